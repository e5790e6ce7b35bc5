"""Story reports: a device/asset timeline figure plus delimited state tables.

Given a story (and optionally a finished playback session), writes:
    states.tsv       one row per (scene index, entity, field, value)
    transitions.tsv  the session's transition log, when a session is given
    timeline.png     matplotlib figure of device levels and asset presence
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from . import model
from .model import DeviceKind, Story
from .playback import PlaybackSession, export_log


def _scene_indices(story: Story) -> list[int]:
    return list(range(-1, len(story.steps)))


def state_rows(story: Story) -> list[tuple]:
    """Long-format (scene, kind, id, field, value) rows over every fold index."""
    rows: list[tuple] = []
    for k in _scene_indices(story):
        world = model.effective_state(story, k)
        for ref, light in world.lights.items():
            rows += [(k, "light", ref, "on", light.on),
                     (k, "light", ref, "brightness_pct", light.brightness_pct),
                     (k, "light", ref, "hue_deg", light.hue_deg),
                     (k, "light", ref, "effect", light.effect or "")]
        for ref, fan in world.fans.items():
            rows += [(k, "fan", ref, "on", fan.on), (k, "fan", ref, "intensity", fan.intensity)]
        for ref, speaker in world.speakers.items():
            rows += [(k, "speaker", ref, "on", speaker.on),
                     (k, "speaker", ref, "volume_pct", speaker.volume_pct),
                     (k, "speaker", ref, "sound", speaker.sound or "")]
        for ref, asset in world.assets.items():
            rows += [(k, "asset", ref, "present", asset.present),
                     (k, "asset", ref, "position", " ".join(f"{c:g}" for c in asset.position))]
    return rows


def write_state_table(story: Story, path: Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("scene\tkind\tid\tfield\tvalue\n")
        for row in state_rows(story):
            fh.write("\t".join(str(c) for c in row) + "\n")


def render_timeline(story: Story, path: Path, *, dpi: int = 120) -> None:
    scenes = _scene_indices(story)
    worlds = [model.effective_state(story, k) for k in scenes]
    lights = story.devices_of_kind(DeviceKind.LIGHT)
    fans = story.devices_of_kind(DeviceKind.FAN)
    speakers = story.devices_of_kind(DeviceKind.SPEAKER)

    fig, (ax_levels, ax_assets) = plt.subplots(
        2, 1, figsize=(max(7.0, 1.1 * len(scenes)), 6.4), sharex=True,
        gridspec_kw={"height_ratios": [3, 2]})

    for decl in lights:
        levels = [w.lights[decl.id].brightness_pct if w.lights[decl.id].on else 0 for w in worlds]
        ax_levels.step(scenes, levels, where="post", marker="o", label=f"{decl.name} (%)")
    for decl in fans:
        levels = [w.fans[decl.id].intensity * 100 / 3 if w.fans[decl.id].on else 0 for w in worlds]
        ax_levels.step(scenes, levels, where="post", marker="s", linestyle="--",
                       label=f"{decl.name} (level/3)")
    for decl in speakers:
        levels = [w.speakers[decl.id].volume_pct if w.speakers[decl.id].playing else 0 for w in worlds]
        ax_levels.step(scenes, levels, where="post", marker="^", linestyle=":",
                       label=f"{decl.name} (vol%)")
    ax_levels.set_ylabel("level (%)")
    ax_levels.set_ylim(-5, 105)
    ax_levels.set_title(story.title)
    if lights or fans or speakers:
        ax_levels.legend(loc="upper right", fontsize="small")

    for row, decl in enumerate(story.assets):
        spans = []
        start = None
        for k, w in zip(scenes, worlds):
            present = w.assets[decl.id].present
            if present and start is None:
                start = k
            elif not present and start is not None:
                spans.append((start, k - start))
                start = None
        if start is not None:
            spans.append((start, scenes[-1] - start + 1))
        if spans:
            ax_assets.broken_barh(spans, (row - 0.3, 0.6))
    ax_assets.set_yticks(range(len(story.assets)))
    ax_assets.set_yticklabels([a.name for a in story.assets], fontsize="small")
    ax_assets.set_ylim(-0.7, max(len(story.assets) - 0.3, 0.7))
    ax_assets.set_xlabel("scene index (-1 = initial)")
    ax_assets.set_xticks(scenes)
    ax_assets.grid(axis="x", alpha=0.3)

    fig.tight_layout()
    fig.savefig(path, dpi=dpi)
    plt.close(fig)


def write_report(story: Story, out_dir: Path, session: PlaybackSession | None = None) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    states = out_dir / "states.tsv"
    write_state_table(story, states)
    written.append(states)

    timeline = out_dir / "timeline.png"
    render_timeline(story, timeline)
    written.append(timeline)

    if session is not None:
        transitions = out_dir / "transitions.tsv"
        with open(transitions, "w", encoding="utf-8") as fh:
            fh.write("timestamp\tstep\tevent\tdetail\n")
            fh.write(export_log(session))
        written.append(transitions)
    return written
