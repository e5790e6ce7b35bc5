"""Editing operations over stories.

Every edit produces a new story revision (the prior revision is untouched,
so undo is keeping it); edits that would break a model invariant are
rejected atomically. The three bundled fixtures are constructed purely
through apply_edit sequences, which doubles as proof that the edit
vocabulary is sufficient to author them.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Union

from . import model, storyfile
from .devices.base import DeviceRegistry, simulated_registry
from .model import (
    AssetDecl, AssetEffect, AssetPlace, AssetRemove, Behavior, DeviceDecl, DeviceKind,
    FanSet, IndexOutOfRange, KeywordTrigger, LightSet, NarratorMode, Scene, Severity,
    SpeakerSet, Step, Story, TapTrigger, TouchTrigger, Trigger, ValidationIssue, Vec3,
    behavior_target,
)
from .playback import PlaybackSession, goto_scene, start_session
from .text import slugify

FIXTURE_NAMES = ("goodnight_moon", "benjamin_franklin", "wind_and_sun")


class ValidationRejected(Exception):
    def __init__(self, issues: list[ValidationIssue]):
        super().__init__("; ".join(str(i) for i in issues))
        self.issues = issues


class UnknownAsset(KeyError):
    pass


@dataclass(frozen=True)
class CreateStory:
    title: str
    narrator_mode: NarratorMode
    devices: tuple[DeviceDecl, ...] = ()
    assets: tuple[AssetDecl, ...] = ()


@dataclass(frozen=True)
class AppendScene:
    trigger: Trigger


@dataclass(frozen=True)
class SetTrigger:
    step: int
    trigger: Trigger


@dataclass(frozen=True)
class UpsertBehavior:
    scene: int  # -1 = initial scene
    behavior: Behavior


@dataclass(frozen=True)
class RemoveBehavior:
    scene: int
    target: str  # device or asset ref


@dataclass(frozen=True)
class PlaceAsset:
    scene: int
    name: str  # model name ("red balloon"), display name, or id
    position: Vec3
    anchor: str | None = None


@dataclass(frozen=True)
class SetNarration:
    scene: int
    text: str | None


@dataclass(frozen=True)
class DeleteScene:
    step: int


EditCommand = Union[CreateStory, AppendScene, SetTrigger, UpsertBehavior,
                    RemoveBehavior, PlaceAsset, SetNarration, DeleteScene]


def _lookup_asset(story: Story, name: str) -> AssetDecl:
    wanted = name.casefold()
    for decl in story.assets:
        if wanted in (decl.kind.casefold(), decl.name.casefold(), decl.id.casefold()):
            return decl
    raise UnknownAsset(name)


def _with_scene(story: Story, index: int, scene: Scene) -> Story:
    if index == -1:
        return replace(story, initial=scene)
    steps = list(story.steps)
    steps[index] = replace(steps[index], scene=scene)
    return replace(story, steps=tuple(steps))


def _scene_index_ok(story: Story, index: int) -> None:
    if not -1 <= index < len(story.steps):
        raise IndexOutOfRange(f"scene index {index} not in -1..{len(story.steps) - 1}")


def _step_index_ok(story: Story, index: int) -> None:
    if not 0 <= index < len(story.steps):
        raise IndexOutOfRange(f"step index {index} not in 0..{len(story.steps) - 1}")


def apply_edit(story: Story | None, command: EditCommand) -> Story:
    """Apply one command and return the edited revision.

    The input story is never mutated. The result is re-validated; commands
    that introduce validation errors raise ValidationRejected and leave the
    revision history exactly as it was.
    """
    if isinstance(command, CreateStory):
        if story is not None:
            raise ValueError("CreateStory starts a new story; no input revision expected")
        candidate = Story(
            id=slugify(command.title), title=command.title, narrator_mode=command.narrator_mode,
            devices=tuple(command.devices), assets=tuple(command.assets),
            initial=Scene(), steps=(),
        )
    elif story is None:
        raise ValueError(f"{type(command).__name__} needs an existing story")
    elif isinstance(command, AppendScene):
        candidate = replace(story, steps=story.steps + (Step(command.trigger, Scene()),))
    elif isinstance(command, SetTrigger):
        _step_index_ok(story, command.step)
        steps = list(story.steps)
        steps[command.step] = replace(steps[command.step], trigger=command.trigger)
        candidate = replace(story, steps=tuple(steps))
    elif isinstance(command, UpsertBehavior):
        _scene_index_ok(story, command.scene)
        scene = story.scene_at(command.scene)
        target = behavior_target(command.behavior)
        behaviors = list(scene.behaviors)
        for i, b in enumerate(behaviors):
            if behavior_target(b) == target:
                behaviors[i] = command.behavior
                break
        else:
            behaviors.append(command.behavior)
        candidate = _with_scene(story, command.scene, replace(scene, behaviors=tuple(behaviors)))
    elif isinstance(command, RemoveBehavior):
        _scene_index_ok(story, command.scene)
        scene = story.scene_at(command.scene)
        kept = tuple(b for b in scene.behaviors if behavior_target(b)[1] != command.target)
        if len(kept) == len(scene.behaviors):
            raise ValidationRejected([ValidationIssue(
                Severity.ERROR, f"no behavior targets '{command.target}' in this scene",
                None if command.scene == -1 else command.scene)])
        candidate = _with_scene(story, command.scene, replace(scene, behaviors=kept))
    elif isinstance(command, PlaceAsset):
        _scene_index_ok(story, command.scene)
        decl = _lookup_asset(story, command.name)
        return apply_edit(story, UpsertBehavior(
            command.scene, AssetPlace(decl.id, command.position, command.anchor)))
    elif isinstance(command, SetNarration):
        _scene_index_ok(story, command.scene)
        scene = story.scene_at(command.scene)
        candidate = _with_scene(story, command.scene, replace(scene, narration=command.text))
    elif isinstance(command, DeleteScene):
        _step_index_ok(story, command.step)
        steps = story.steps[:command.step] + story.steps[command.step + 1:]
        candidate = replace(story, steps=steps)
    else:
        raise TypeError(f"unknown edit command {command!r}")

    issues = model.validate_story(candidate)
    if model.has_errors(issues):
        raise ValidationRejected([i for i in issues if i.severity == Severity.ERROR])
    return candidate


def apply_edits(story: Story | None, commands: list[EditCommand]) -> Story:
    for command in commands:
        story = apply_edit(story, command)
    assert story is not None
    return story


def preview(story: Story, up_to: int, drivers: DeviceRegistry | None = None) -> PlaybackSession:
    """Start a playback session (simulated drivers unless given) and jump to a scene."""
    if drivers is None:
        drivers = simulated_registry(story)
    session = start_session(story, drivers)
    goto_scene(session, up_to)
    return session


# --- fixtures -------------------------------------------------------------------


def _goodnight_moon() -> Story:
    v = Vec3
    commands: list[EditCommand] = [CreateStory(
        title="Goodnight Moon",
        narrator_mode=NarratorMode.USER,
        devices=(
            DeviceDecl("lamp", DeviceKind.LIGHT, "Bedside Lamp", v(2.0, 1.5, 0.0)),
            DeviceDecl("fan", DeviceKind.FAN, "Ceiling Fan", v(-2.0, 2.6, 1.0)),
            DeviceDecl("speaker", DeviceKind.SPEAKER, "Nightstand Speaker", v(0.0, 0.5, -2.0)),
        ),
        assets=(
            AssetDecl("red_balloon", "red balloon", "Red Balloon", v(1.0, 2.0, 0.0), 0.25),
            AssetDecl("moon", "moon", "Moon", v(-1.2, 2.4, 0.5), 0.3),
        ),
    )]

    script: list[tuple[str, str, list[Behavior]]] = [
        ("small, cozy room", "In a small, cozy room, the evening settled in.",
         [LightSet("lamp", brightness_pct=20)]),
        ("red balloon", "There was a red balloon floating by the window.",
         [AssetPlace("red_balloon", v(1.0, 2.0, 0.0))]),
        ("speaker playing a pleasant tune", "And a speaker playing a pleasant tune.",
         [SpeakerSet("speaker", sound="lullaby")]),
        ("quiet old moon", "Above it all watched a quiet old moon.",
         [AssetPlace("moon", v(-1.2, 2.4, 0.5))]),
        ("gentle breeze", "A gentle breeze drifted through the room.",
         [FanSet("fan", on=True, intensity=1)]),
        ("goodnight moon", "Goodnight moon, sleep well in the sky.",
         [AssetRemove("moon")]),
        ("goodnight balloon", "Goodnight balloon, drift gently down.",
         [AssetPlace("red_balloon", v(1.0, 0.3, 0.0))]),
        ("goodnight lamp", "Goodnight lamp, dim your light.",
         [LightSet("lamp", brightness_pct=0)]),
        ("goodnight fan", "Goodnight fan, rest your spinning blades.",
         [FanSet("fan", intensity=0)]),
        ("goodnight tune", "Goodnight tune, hush now.",
         [SpeakerSet("speaker", on=False)]),
        ("goodnight noises", "Goodnight noises everywhere.",
         [AssetRemove("red_balloon")]),
    ]
    for i, (phrase, line, behaviors) in enumerate(script):
        commands.append(AppendScene(KeywordTrigger(phrase)))
        commands.append(SetNarration(i, line))
        commands.extend(UpsertBehavior(i, b) for b in behaviors)
    return apply_edits(None, commands)


def _benjamin_franklin() -> Story:
    v = Vec3
    commands: list[EditCommand] = [CreateStory(
        title="Benjamin Franklin",
        narrator_mode=NarratorMode.USER,
        devices=(
            DeviceDecl("light", DeviceKind.LIGHT, "Parlor Light", v(1.8, 2.4, -0.5)),
            DeviceDecl("fan", DeviceKind.FAN, "Storm Fan", v(-1.5, 1.0, 0.8)),
            DeviceDecl("speaker", DeviceKind.SPEAKER, "Thunder Speaker", v(0.0, 0.4, -2.2)),
        ),
        assets=(
            AssetDecl("kite", "kite", "Kite", v(0.0, 2.5, 1.0), 0.2),
            AssetDecl("cloud", "cloud", "Storm Cloud", v(0.5, 2.8, 0.5), 0.4),
            AssetDecl("key", "brass key", "Brass Key", v(0.4, 1.2, 0.1), 0.1),
            AssetDecl("ben_costume", "costume", "Benjamin Franklin", v(0.0, 0.0, 0.0), 0.5),
            AssetDecl("junior_costume", "costume", "Benjamin Franklin Jr.", v(0.5, 0.0, 0.0), 0.5),
        ),
    )]

    commands += [
        AppendScene(KeywordTrigger("one gloomy afternoon")),
        UpsertBehavior(0, LightSet("light", brightness_pct=40, hue_deg=230)),

        AppendScene(KeywordTrigger("when the clouds first passed over")),
        UpsertBehavior(1, FanSet("fan", on=True, intensity=2)),
        PlaceAsset(1, "cloud", v(0.5, 2.8, 0.5)),

        AppendScene(KeywordTrigger("raised his kite")),
        PlaceAsset(2, "kite", v(0.0, 2.5, 1.0)),

        AppendScene(KeywordTrigger("storm rumbled")),
        UpsertBehavior(3, SpeakerSet("speaker", sound="thunder")),
        UpsertBehavior(3, LightSet("light", brightness_pct=25)),

        AppendScene(KeywordTrigger("a brass key")),
        PlaceAsset(4, "brass key", v(0.4, 1.2, 0.1)),

        AppendScene(TouchTrigger("key", threshold_m=0.05)),
        UpsertBehavior(5, LightSet("light", effect="flickering")),
        UpsertBehavior(5, AssetEffect("key", "sparks")),
    ]
    return apply_edits(None, commands)


def _wind_and_sun() -> Story:
    v = Vec3
    commands: list[EditCommand] = [CreateStory(
        title="The Wind and the Sun",
        narrator_mode=NarratorMode.SYSTEM,
        devices=(
            DeviceDecl("light", DeviceKind.LIGHT, "Sun Lamp", v(1.6, 2.2, 0.0)),
            DeviceDecl("fan", DeviceKind.FAN, "Gale Fan", v(-1.6, 1.4, 0.0)),
            DeviceDecl("speaker", DeviceKind.SPEAKER, "Story Speaker", v(0.0, 0.5, -2.0)),
        ),
        assets=(
            AssetDecl("wind", "wind spirit", "The Wind", v(-1.6, 1.8, 0.0), 0.35),
            AssetDecl("sun", "sun", "The Sun", v(1.6, 2.7, 0.0), 0.35),
            AssetDecl("traveler", "traveler", "The Traveler", v(0.0, 0.0, 1.5), 0.3),
        ),
    ), SetNarration(-1, "The Wind and the Sun, a tale from Aesop.")]

    script: list[tuple[str, list[EditCommand]]] = [
        ("The Wind and the Sun once argued about which of them was stronger.", [
            PlaceAsset(0, "wind spirit", v(0.0, 0.4, 0.0), anchor="fan"),
            PlaceAsset(0, "sun", v(0.0, 0.5, 0.0), anchor="light"),
            UpsertBehavior(0, FanSet("fan", on=True, intensity=1)),
        ]),
        ("A traveler came down the road, wrapped in a warm coat.", [
            PlaceAsset(1, "traveler", v(0.0, 0.0, 1.5)),
        ]),
        ("The Wind blew as hard as it could, howling across the road.", [
            UpsertBehavior(2, FanSet("fan", intensity=3)),
            UpsertBehavior(2, SpeakerSet("speaker", sound="wind")),
        ]),
        ("But the harder it blew, the tighter the traveler drew his coat around him.", []),
        ("Then the Sun shone out warmly, and the traveler loosened his coat at once.", [
            UpsertBehavior(4, FanSet("fan", intensity=0)),
            UpsertBehavior(4, LightSet("light", brightness_pct=100, hue_deg=45)),
            UpsertBehavior(4, SpeakerSet("speaker", sound=None)),
            UpsertBehavior(4, AssetEffect("sun", "glow")),
        ]),
        ("And so the Sun was declared the stronger of the two.", [
            UpsertBehavior(5, AssetRemove("wind")),
            UpsertBehavior(5, LightSet("light", effect="pulse")),
        ]),
    ]
    for i, (line, edits) in enumerate(script):
        commands.append(AppendScene(TapTrigger()))
        commands.append(SetNarration(i, line))
        commands.extend(edits)
    return apply_edits(None, commands)


_BUILDERS = {
    "goodnight_moon": _goodnight_moon,
    "benjamin_franklin": _benjamin_franklin,
    "wind_and_sun": _wind_and_sun,
}


def build_fixture(name: str) -> Story:
    """Construct one of the bundled stories through the edit vocabulary alone."""
    try:
        builder = _BUILDERS[name]
    except KeyError:
        raise KeyError(f"unknown fixture '{name}' (expected one of {FIXTURE_NAMES})") from None
    return builder()


def fixture_transcript(name: str) -> str:
    """Transcript that plays a fixture end to end (one utterance per line,
    blank line = tap, `@touch x y z` = touch event).
    """
    story = build_fixture(name)
    lines: list[str] = []
    for step in story.steps:
        trigger = step.trigger
        if isinstance(trigger, KeywordTrigger):
            lines.append(step.scene.narration or trigger.phrase)
        elif isinstance(trigger, TapTrigger):
            lines.append("")
        else:
            decl = story.asset(trigger.target)
            assert decl is not None
            pos = decl.position
            lines.append(f"@touch {pos.x:g} {pos.y:g} {pos.z:g}")
    return "\n".join(lines) + "\n"


# --- wire codec for the authoring HTTP API --------------------------------------


def decode_edit(obj: dict) -> EditCommand:
    op = obj.get("op")
    issues: list[ValidationIssue] = []
    if op == "create_story":
        devices = tuple(storyfile._decode_device(d, f"devices[{i}]", True, issues)
                        for i, d in enumerate(obj.get("devices", [])))
        assets = tuple(storyfile._decode_asset(a, f"assets[{i}]", True, issues)
                       for i, a in enumerate(obj.get("assets", [])))
        return CreateStory(title=obj["title"], narrator_mode=NarratorMode(obj["narrator"]),
                           devices=devices, assets=assets)
    if op == "append_scene":
        return AppendScene(storyfile._decode_trigger(obj["trigger"], "trigger", True, issues))
    if op == "set_trigger":
        return SetTrigger(int(obj["step"]),
                          storyfile._decode_trigger(obj["trigger"], "trigger", True, issues))
    if op == "upsert_behavior":
        return UpsertBehavior(int(obj["scene"]),
                              storyfile._decode_behavior(obj["behavior"], "behavior", True, issues))
    if op == "remove_behavior":
        return RemoveBehavior(int(obj["scene"]), obj["target"])
    if op == "place_asset":
        return PlaceAsset(int(obj["scene"]), obj["name"],
                          storyfile._decode_vec3(obj["position"], "position"),
                          obj.get("anchor"))
    if op == "set_narration":
        return SetNarration(int(obj["scene"]), obj.get("text"))
    if op == "delete_scene":
        return DeleteScene(int(obj["step"]))
    raise ValueError(f"unknown edit op '{op}'")
