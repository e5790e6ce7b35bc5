"""Operator command line.

    loomcast validate STORY              check a story file, print issues
    loomcast play STORY --simulate       interactive or transcript-driven playback
    loomcast serve --port 8080           host the session + authoring APIs
    loomcast report STORY --out DIR      timeline figure + state tables
    loomcast fixtures --out DIR          write the bundled canonical fixtures

Exit codes: 0 success, 1 validation/content errors, 2 runtime errors.
Transcript format: one utterance per line, blank line = tap,
`@touch x y z` = touch event.
"""

from __future__ import annotations

import argparse
import itertools
import os
import sys
from pathlib import Path

from . import authoring, model, playback, storyfile
from .devices.base import (
    DeviceError, DriverUnavailable, load_device_map, registry_from_map, simulated_registry,
)
from .model import Severity, Vec3
from .triggers import TapEvent, TouchEvent, TranscriptEvent

ENV_FIXTURES = "LOOMCAST_FIXTURES"

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2


def _load_story(path: str, issues=None):
    fixtures_dir = os.environ.get(ENV_FIXTURES)
    candidate = Path(path)
    if not candidate.exists() and fixtures_dir:
        alt = Path(fixtures_dir) / path
        if alt.exists():
            candidate = alt
        elif (Path(fixtures_dir) / f"{path}{storyfile.STORY_SUFFIX}").exists():
            candidate = Path(fixtures_dir) / f"{path}{storyfile.STORY_SUFFIX}"
    if not candidate.exists() and path in authoring.FIXTURE_NAMES:
        return authoring.build_fixture(path)
    return storyfile.load_story(str(candidate), issues=issues)


def cmd_validate(args: argparse.Namespace) -> int:
    issues: list[model.ValidationIssue] = []
    try:
        story = _load_story(args.story, issues=issues)
    except FileNotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RUNTIME
    except storyfile.StorySemanticError as e:
        for issue in e.issues:
            print(issue)
        return EXIT_VALIDATION
    except storyfile.StoryFormatError as e:
        print(f"error: {e}")
        return EXIT_VALIDATION
    for issue in issues:
        print(issue)
    print(f"ok: '{story.title}', {len(story.steps)} steps, "
          f"{len(story.devices)} devices, {len(story.assets)} assets")
    return EXIT_OK


def _parse_transcript_line(line: str):
    stripped = line.rstrip("\n")
    if stripped.strip() == "":
        return TapEvent()
    if stripped.startswith("@touch"):
        parts = stripped.split()
        if len(parts) != 4:
            raise ValueError(f"bad touch line: {stripped!r} (expected '@touch x y z')")
        return TouchEvent(position=Vec3(float(parts[1]), float(parts[2]), float(parts[3])))
    return TranscriptEvent(text=stripped)


def _build_registry(story, args: argparse.Namespace):
    path = args.devices or os.environ.get("LOOMCAST_DEVICE_MAP")
    if path:
        mapping = load_device_map(path)
        return registry_from_map(story, mapping, default_fallback=args.simulate)
    if not args.simulate:
        raise DriverUnavailable("no device map given; pass --devices MAP or --simulate")
    return simulated_registry(story)


def _describe_plan(plan: model.AnimationPlan) -> str:
    parts = []
    for effect in plan:
        if isinstance(effect, model.FadeIn):
            parts.append(f"fade-in {effect.asset} ({effect.duration_s:g}s)")
        elif isinstance(effect, model.FadeOut):
            parts.append(f"fade-out {effect.asset} ({effect.duration_s:g}s)")
        elif isinstance(effect, model.Translate):
            parts.append(f"move {effect.asset} {tuple(effect.from_pos)}->{tuple(effect.to_pos)}")
        elif isinstance(effect, model.AssetCue):
            parts.append(f"restyle {effect.asset} ({effect.state.effect})")
        else:
            changes = ", ".join(f"{k}={v}" for k, v in effect.changes.items())
            parts.append(f"{effect.device}: {changes}")
    return "; ".join(parts) if parts else "(no visible change)"


def cmd_play(args: argparse.Namespace) -> int:
    issues: list[model.ValidationIssue] = []
    try:
        story = _load_story(args.story, issues=issues)
    except storyfile.StoryFormatError as e:
        print(f"error: {e}")
        return EXIT_VALIDATION
    except FileNotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RUNTIME
    for issue in issues:
        if issue.severity == Severity.WARNING:
            print(f"note: {issue}")

    try:
        registry = _build_registry(story, args)
    except (DeviceError, OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RUNTIME

    # Replay runs use a logical clock so the transition log is byte-stable.
    if args.transcript:
        counter = itertools.count()
        clock = lambda: float(next(counter))  # noqa: E731
    else:
        import time
        clock = time.time

    session = playback.start_session(story, registry, clock=clock)
    total = len(story.steps)
    print(f"playing '{story.title}' ({total} steps, narrator {story.narrator_mode.value})")

    def run_events(lines) -> None:
        for line in lines:
            if session.finished:
                break
            try:
                event = _parse_transcript_line(line)
            except ValueError as e:
                print(f"note: {e}")
                continue
            result = playback.handle_event(session, event)
            if result is None:
                continue
            scene = story.steps[result.entered_scene].scene
            print(f"-> scene {result.entered_scene + 1}/{total} "
                  f"({session.log[-1].detail or session.log[-1].event_kind}): "
                  f"{_describe_plan(result.plan)}")
            if result.narration_to_speak:
                print(f"   narration: {result.narration_to_speak}")
            elif scene.narration:
                print(f"   text: {scene.narration}")

    if args.transcript:
        with open(args.transcript, "r", encoding="utf-8") as fh:
            run_events(fh.readlines())
    else:
        print("enter narration lines (blank = tap, '@touch x y z' = touch, Ctrl-D ends)")
        run_events(sys.stdin)

    session.drain_commands()
    for note in session.diagnostics:
        print(f"note: {note}")
    print("final device states:")
    for ref, state in registry.states().items():
        fields = ", ".join(f"{k}={v}" for k, v in state.items())
        print(f"  {ref}: {fields}")

    if args.report_dir:
        from .report import write_report
        written = write_report(story, Path(args.report_dir), session)
        print("report: " + ", ".join(str(p) for p in written))

    if not session.finished:
        armed = session.armed.describe() if session.armed else "?"
        print(f"incomplete: stalled at step {session.cursor + 1} waiting for {armed}")
        return EXIT_VALIDATION
    print(f"story finished after {sum(1 for r in session.log if r.event_kind != 'start')} transitions")
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .server import create_app

    registry_factory = None
    if args.devices:
        try:
            mapping = load_device_map(args.devices)
        except (OSError, ValueError, DeviceError) as e:
            print(f"error: {e}", file=sys.stderr)
            return EXIT_RUNTIME

        def registry_factory(story):  # noqa: F811
            return registry_from_map(story, mapping, default_fallback=True)

    app = create_app(registry_factory, ui_dir=args.ui)
    try:
        uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    except (OSError, SystemExit) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    from .report import write_report

    try:
        story = _load_story(args.story)
    except storyfile.StoryFormatError as e:
        print(f"error: {e}")
        return EXIT_VALIDATION
    except FileNotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RUNTIME
    written = write_report(story, Path(args.out))
    for path in written:
        print(path)
    return EXIT_OK


def cmd_fixtures(args: argparse.Namespace) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name in authoring.FIXTURE_NAMES:
        story = authoring.build_fixture(name)
        story_path = out / f"{name}{storyfile.STORY_SUFFIX}"
        story_path.write_text(storyfile.serialize_story(story), encoding="utf-8")
        transcript_path = out / f"{name}.transcript"
        transcript_path.write_text(authoring.fixture_transcript(name), encoding="utf-8")
        print(f"{story_path} ({len(story.steps)} steps), {transcript_path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="loomcast", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a story file")
    p.add_argument("story")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("play", help="play a story in the terminal")
    p.add_argument("story")
    p.add_argument("--simulate", action="store_true", help="bind simulated drivers")
    p.add_argument("--devices", metavar="MAP", help="device map JSON file")
    p.add_argument("--transcript", metavar="FILE", help="replay a transcript instead of stdin")
    p.add_argument("--report-dir", metavar="DIR", help="write figure + TSV report after playback")
    p.set_defaults(func=cmd_play)

    p = sub.add_parser("serve", help="host the session and authoring APIs")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--devices", metavar="MAP", help="device map JSON file")
    p.add_argument("--ui", metavar="DIR", help="also serve a web UI directory at /")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("report", help="render a story timeline report")
    p.add_argument("story")
    p.add_argument("--out", default="report", help="output directory")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("fixtures", help="write the bundled fixture stories")
    p.add_argument("--out", default="fixtures", help="output directory")
    p.set_defaults(func=cmd_fixtures)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except playback.InvalidStory as e:
        for issue in e.issues:
            print(issue)
        return EXIT_VALIDATION
    except DeviceError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
