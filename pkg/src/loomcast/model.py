"""Domain model for trigger-and-scene stories.

A story is linear: an initial scene establishes the starting world, then
every step pairs exactly one trigger with one scene of sparse state
overrides. The fully resolved world at an index is the left fold of
defaults -> initial scene -> step scenes up to that index, so editing an
early scene automatically propagates to every later one.

Everything here is a plain value type plus pure functions; nothing mutates
in place and nothing touches the network.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from typing import Iterator, Mapping, NamedTuple, Union

from .effects import DEFAULT_EFFECTS, EffectRegistry
from .text import normalize

DEFAULT_TOUCH_THRESHOLD_M = 0.05
DEFAULT_HALF_EXTENT_M = 0.1


class _Unset:
    """Marker for "leave this field alone" on fields where None means "clear"."""

    _instance = None

    def __new__(cls) -> "_Unset":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "UNSET"

    def __bool__(self) -> bool:
        return False

    def __copy__(self) -> "_Unset":
        return self

    def __deepcopy__(self, memo: dict) -> "_Unset":
        return self

    def __reduce__(self):
        return (_Unset, ())


UNSET = _Unset()


class Vec3(NamedTuple):
    x: float
    y: float
    z: float

    def __add__(self, other) -> "Vec3":  # type: ignore[override]
        return Vec3(self.x + other[0], self.y + other[1], self.z + other[2])

    def is_finite(self) -> bool:
        return all(math.isfinite(c) for c in self)


class NarratorMode(enum.Enum):
    USER = "user"
    SYSTEM = "system"


class DeviceKind(enum.Enum):
    LIGHT = "light"
    FAN = "fan"
    SPEAKER = "speaker"


# --- declarations -----------------------------------------------------------


@dataclass(frozen=True)
class DeviceDecl:
    id: str
    kind: DeviceKind
    name: str
    position: Vec3


@dataclass(frozen=True)
class AssetDecl:
    id: str
    kind: str  # model name, e.g. "red balloon"
    name: str
    position: Vec3
    half_extent_m: float = DEFAULT_HALF_EXTENT_M


# --- triggers ----------------------------------------------------------------


@dataclass(frozen=True)
class TapTrigger:
    pass


@dataclass(frozen=True)
class KeywordTrigger:
    phrase: str


@dataclass(frozen=True)
class TouchTrigger:
    target: str
    threshold_m: float = DEFAULT_TOUCH_THRESHOLD_M


Trigger = Union[TapTrigger, KeywordTrigger, TouchTrigger]


# --- behaviors ---------------------------------------------------------------
# Optional fields left at None (or UNSET for clearable names) mean "unchanged".


@dataclass(frozen=True)
class LightSet:
    device: str
    on: bool | None = None
    brightness_pct: int | None = None
    hue_deg: int | None = None
    effect: str | None | _Unset = UNSET


@dataclass(frozen=True)
class FanSet:
    device: str
    on: bool | None = None
    intensity: int | None = None


@dataclass(frozen=True)
class SpeakerSet:
    device: str
    on: bool | None = None
    volume_pct: int | None = None
    sound: str | None | _Unset = UNSET


@dataclass(frozen=True)
class AssetPlace:
    asset: str
    position: Vec3
    anchor: str | None = None  # device id; position becomes an offset from it


@dataclass(frozen=True)
class AssetRemove:
    asset: str


@dataclass(frozen=True)
class AssetEffect:
    asset: str
    effect: str | None  # None clears


Behavior = Union[LightSet, FanSet, SpeakerSet, AssetPlace, AssetRemove, AssetEffect]

_DEVICE_BEHAVIOR_KIND = {LightSet: DeviceKind.LIGHT, FanSet: DeviceKind.FAN, SpeakerSet: DeviceKind.SPEAKER}


def behavior_target(behavior: Behavior) -> tuple[str, str]:
    """Return ("device"|"asset", ref) for any behavior."""
    if isinstance(behavior, (LightSet, FanSet, SpeakerSet)):
        return ("device", behavior.device)
    return ("asset", behavior.asset)


# --- scenes and stories ------------------------------------------------------


@dataclass(frozen=True)
class Scene:
    behaviors: tuple[Behavior, ...] = ()
    narration: str | None = None


@dataclass(frozen=True)
class Step:
    trigger: Trigger
    scene: Scene


@dataclass(frozen=True)
class Story:
    id: str
    title: str
    narrator_mode: NarratorMode
    devices: tuple[DeviceDecl, ...]
    assets: tuple[AssetDecl, ...]
    initial: Scene
    steps: tuple[Step, ...]

    def device(self, ref: str) -> DeviceDecl | None:
        for decl in self.devices:
            if decl.id == ref:
                return decl
        return None

    def asset(self, ref: str) -> AssetDecl | None:
        for decl in self.assets:
            if decl.id == ref:
                return decl
        return None

    def devices_of_kind(self, kind: DeviceKind) -> tuple[DeviceDecl, ...]:
        return tuple(d for d in self.devices if d.kind == kind)

    def scene_at(self, index: int) -> Scene:
        """Scene by fold index: -1 is the initial scene, k is steps[k].scene."""
        if index == -1:
            return self.initial
        return self.steps[index].scene


# --- resolved world state ----------------------------------------------------


@dataclass(frozen=True)
class LightState:
    on: bool = True
    brightness_pct: int = 100
    hue_deg: int = 60
    effect: str | None = None


@dataclass(frozen=True)
class FanState:
    on: bool = False
    intensity: int = 0


@dataclass(frozen=True)
class SpeakerState:
    on: bool = True
    volume_pct: int = 50
    sound: str | None = None

    @property
    def playing(self) -> str | None:
        return self.sound if self.on else None


@dataclass(frozen=True)
class AssetState:
    present: bool
    position: Vec3
    anchor: str | None = None
    effect: str | None = None


@dataclass(frozen=True, eq=True)
class WorldState:
    lights: dict[str, LightState]
    fans: dict[str, FanState]
    speakers: dict[str, SpeakerState]
    assets: dict[str, AssetState]


class IndexOutOfRange(IndexError):
    pass


class MismatchedDeclarations(ValueError):
    pass


# Field application helpers. The simulated device drivers reuse these so
# their observable state machines match the fold semantics exactly.


def apply_light(state: LightState, *, on: bool | None = None, brightness_pct: int | None = None,
                hue_deg: int | None = None, effect: str | None | _Unset = UNSET) -> LightState:
    new = LightState(
        on=state.on if on is None else on,
        brightness_pct=state.brightness_pct if brightness_pct is None else brightness_pct,
        hue_deg=state.hue_deg if hue_deg is None else hue_deg,
        effect=state.effect if isinstance(effect, _Unset) else effect,
    )
    if new.brightness_pct == 0:
        new = replace(new, on=False)  # brightness 0 == off
    return new


def apply_fan(state: FanState, *, on: bool | None = None, intensity: int | None = None) -> FanState:
    new = FanState(
        on=state.on if on is None else on,
        intensity=state.intensity if intensity is None else intensity,
    )
    if new.intensity == 0:
        new = replace(new, on=False)  # intensity 0 == off, mirrors brightness rule
    return new


def apply_speaker(state: SpeakerState, *, on: bool | None = None, volume_pct: int | None = None,
                  sound: str | None | _Unset = UNSET) -> SpeakerState:
    return SpeakerState(
        on=state.on if on is None else on,
        volume_pct=state.volume_pct if volume_pct is None else volume_pct,
        sound=state.sound if isinstance(sound, _Unset) else sound,
    )


def resolve_asset_position(devices: Mapping[str, DeviceDecl], position: Vec3, anchor: str | None) -> Vec3:
    """World position of a placement; anchored placements are offsets from the device."""
    if anchor is None:
        return position
    return devices[anchor].position + position


def initial_defaults(story: Story) -> WorldState:
    """Idle-room state before any scene: lights warm and on, fans off, speakers silent."""
    lights: dict[str, LightState] = {}
    fans: dict[str, FanState] = {}
    speakers: dict[str, SpeakerState] = {}
    for decl in story.devices:
        if decl.kind == DeviceKind.LIGHT:
            lights[decl.id] = LightState()
        elif decl.kind == DeviceKind.FAN:
            fans[decl.id] = FanState()
        else:
            speakers[decl.id] = SpeakerState()
    assets = {decl.id: AssetState(present=False, position=decl.position) for decl in story.assets}
    return WorldState(lights, fans, speakers, assets)


def apply_scene(story: Story, world: WorldState, scene: Scene) -> WorldState:
    lights = dict(world.lights)
    fans = dict(world.fans)
    speakers = dict(world.speakers)
    assets = dict(world.assets)
    device_decls = {d.id: d for d in story.devices}
    for behavior in scene.behaviors:
        if isinstance(behavior, LightSet):
            lights[behavior.device] = apply_light(
                lights[behavior.device], on=behavior.on,
                brightness_pct=behavior.brightness_pct, hue_deg=behavior.hue_deg,
                effect=behavior.effect)
        elif isinstance(behavior, FanSet):
            fans[behavior.device] = apply_fan(
                fans[behavior.device], on=behavior.on, intensity=behavior.intensity)
        elif isinstance(behavior, SpeakerSet):
            speakers[behavior.device] = apply_speaker(
                speakers[behavior.device], on=behavior.on,
                volume_pct=behavior.volume_pct, sound=behavior.sound)
        elif isinstance(behavior, AssetPlace):
            prev = assets[behavior.asset]
            assets[behavior.asset] = AssetState(
                present=True,
                position=resolve_asset_position(device_decls, behavior.position, behavior.anchor),
                anchor=behavior.anchor,
                effect=prev.effect,
            )
        elif isinstance(behavior, AssetRemove):
            assets[behavior.asset] = replace(assets[behavior.asset], present=False)
        elif isinstance(behavior, AssetEffect):
            prev = assets[behavior.asset]
            if prev.present:  # styling an invisible asset does nothing
                assets[behavior.asset] = replace(prev, effect=behavior.effect)
        else:
            raise TypeError(f"unknown behavior {behavior!r}")
    return WorldState(lights, fans, speakers, assets)


def effective_state(story: Story, scene_index: int) -> WorldState:
    """Left fold: defaults -> initial scene -> steps[0..=scene_index] overrides.

    scene_index -1 yields the state after the initial scene only.
    """
    if not -1 <= scene_index < len(story.steps):
        raise IndexOutOfRange(f"scene index {scene_index} not in -1..{len(story.steps) - 1}")
    world = apply_scene(story, initial_defaults(story), story.initial)
    for step in story.steps[: scene_index + 1]:
        world = apply_scene(story, world, step.scene)
    return world


# --- animation plans ---------------------------------------------------------


@dataclass(frozen=True)
class AnimationDefaults:
    fade_s: float = 1.0
    translate_s: float = 1.0


@dataclass(frozen=True)
class FadeIn:
    asset: str
    duration_s: float
    state: AssetState


@dataclass(frozen=True)
class FadeOut:
    asset: str
    duration_s: float


@dataclass(frozen=True)
class Translate:
    asset: str
    from_pos: Vec3
    to_pos: Vec3
    duration_s: float
    state: AssetState


@dataclass(frozen=True)
class AssetCue:
    """Immediate restyle (effect/anchor change) of a visible, stationary asset."""

    asset: str
    state: AssetState


@dataclass(frozen=True)
class DeviceCue:
    """Immediate device command carrying only the changed fields."""

    device: str
    kind: DeviceKind
    changes: dict[str, object]


PlanEffect = Union[FadeIn, FadeOut, Translate, AssetCue, DeviceCue]


@dataclass(frozen=True)
class AnimationPlan:
    effects: tuple[PlanEffect, ...] = ()

    def __iter__(self) -> Iterator[PlanEffect]:
        return iter(self.effects)

    def __len__(self) -> int:
        return len(self.effects)


_LIGHT_FIELDS = ("on", "brightness_pct", "hue_deg", "effect")
_FAN_FIELDS = ("on", "intensity")
_SPEAKER_FIELDS = ("on", "volume_pct", "sound")


def _changed_fields(prev, next_, fields: tuple[str, ...]) -> dict[str, object]:
    return {f: getattr(next_, f) for f in fields if getattr(prev, f) != getattr(next_, f)}


def scene_diff(prev: WorldState, next_: WorldState,
               defaults: AnimationDefaults = AnimationDefaults()) -> AnimationPlan:
    """Synthesize transition effects from the difference of two resolved states.

    Assets appearing fade in, disappearing fade out, and visible assets that
    moved translate between their old and new positions; any changed device
    yields one immediate cue. Both states must resolve the same declarations
    (consecutive folds of one story).
    """
    for attr in ("lights", "fans", "speakers", "assets"):
        if getattr(prev, attr).keys() != getattr(next_, attr).keys():
            raise MismatchedDeclarations(f"{attr} declarations differ between states")

    effects: list[PlanEffect] = []
    for ref, before in prev.assets.items():
        after = next_.assets[ref]
        if before == after:
            continue
        if not before.present and after.present:
            effects.append(FadeIn(ref, defaults.fade_s, after))
        elif before.present and not after.present:
            effects.append(FadeOut(ref, defaults.fade_s))
        elif before.position != after.position:
            effects.append(Translate(ref, before.position, after.position, defaults.translate_s, after))
        else:
            effects.append(AssetCue(ref, after))

    for ref, light in prev.lights.items():
        changes = _changed_fields(light, next_.lights[ref], _LIGHT_FIELDS)
        if changes:
            effects.append(DeviceCue(ref, DeviceKind.LIGHT, changes))
    for ref, fan in prev.fans.items():
        changes = _changed_fields(fan, next_.fans[ref], _FAN_FIELDS)
        if changes:
            effects.append(DeviceCue(ref, DeviceKind.FAN, changes))
    for ref, speaker in prev.speakers.items():
        changes = _changed_fields(speaker, next_.speakers[ref], _SPEAKER_FIELDS)
        if changes:
            effects.append(DeviceCue(ref, DeviceKind.SPEAKER, changes))
    return AnimationPlan(tuple(effects))


def apply_plan(prev: WorldState, plan: AnimationPlan) -> WorldState:
    """Apply a plan's end-states; scene_diff(prev, next) applied to prev yields next."""
    lights = dict(prev.lights)
    fans = dict(prev.fans)
    speakers = dict(prev.speakers)
    assets = dict(prev.assets)
    for effect in plan:
        if isinstance(effect, (FadeIn, Translate, AssetCue)):
            assets[effect.asset] = effect.state
        elif isinstance(effect, FadeOut):
            assets[effect.asset] = replace(assets[effect.asset], present=False)
        elif isinstance(effect, DeviceCue):
            ch = effect.changes
            if effect.kind == DeviceKind.LIGHT:
                lights[effect.device] = apply_light(
                    lights[effect.device], on=ch.get("on"),
                    brightness_pct=ch.get("brightness_pct"), hue_deg=ch.get("hue_deg"),
                    effect=ch.get("effect", UNSET))
            elif effect.kind == DeviceKind.FAN:
                fans[effect.device] = apply_fan(
                    fans[effect.device], on=ch.get("on"), intensity=ch.get("intensity"))
            else:
                speakers[effect.device] = apply_speaker(
                    speakers[effect.device], on=ch.get("on"),
                    volume_pct=ch.get("volume_pct"), sound=ch.get("sound", UNSET))
    return WorldState(lights, fans, speakers, assets)


# --- validation ---------------------------------------------------------------


class Severity(enum.Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class ValidationIssue:
    severity: Severity
    message: str
    step: int | None = None  # step index; None = story-level or initial scene
    path: str = ""

    def __str__(self) -> str:
        where = f" at {self.path}" if self.path else ""
        return f"{self.severity.value}{where}: {self.message}"


def _error(issues: list[ValidationIssue], message: str, step: int | None = None, path: str = "") -> None:
    issues.append(ValidationIssue(Severity.ERROR, message, step, path))


def _warn(issues: list[ValidationIssue], message: str, step: int | None = None, path: str = "") -> None:
    issues.append(ValidationIssue(Severity.WARNING, message, step, path))


def _check_scene(story: Story, scene: Scene, issues: list[ValidationIssue],
                 step: int | None, path: str, effects: EffectRegistry) -> None:
    seen: set[tuple[str, str]] = set()
    for i, b in enumerate(scene.behaviors):
        bpath = f"{path}.behaviors[{i}]"
        target = behavior_target(b)
        if target in seen:
            _error(issues, f"multiple behaviors for {target[0]} '{target[1]}' in one scene", step, bpath)
        seen.add(target)

        if target[0] == "device":
            decl = story.device(target[1])
            if decl is None:
                _error(issues, f"unknown device '{target[1]}'", step, bpath)
                continue
            want = _DEVICE_BEHAVIOR_KIND[type(b)]
            if decl.kind != want:
                _error(issues, f"device '{target[1]}' is a {decl.kind.value}, not a {want.value}", step, bpath)
                continue
        else:
            if story.asset(target[1]) is None:
                _error(issues, f"unknown asset '{target[1]}'", step, bpath)
                continue

        if isinstance(b, LightSet):
            if b.brightness_pct is not None and not 0 <= b.brightness_pct <= 100:
                _error(issues, f"brightness_pct {b.brightness_pct} outside 0..100", step, bpath)
            if b.hue_deg is not None and not 0 <= b.hue_deg <= 360:
                _error(issues, f"hue_deg {b.hue_deg} outside 0..360", step, bpath)
            if not isinstance(b.effect, _Unset) and b.effect is not None and b.effect not in effects.light_effects:
                _error(issues, f"unregistered light effect '{b.effect}'", step, bpath)
        elif isinstance(b, FanSet):
            if b.intensity is not None and not 0 <= b.intensity <= 3:
                _error(issues, f"fan intensity {b.intensity} outside 0..3", step, bpath)
        elif isinstance(b, SpeakerSet):
            if b.volume_pct is not None and not 0 <= b.volume_pct <= 100:
                _error(issues, f"volume_pct {b.volume_pct} outside 0..100", step, bpath)
            if not isinstance(b.sound, _Unset) and b.sound is not None and b.sound not in effects.speaker_sounds:
                _error(issues, f"unregistered speaker sound '{b.sound}'", step, bpath)
        elif isinstance(b, AssetPlace):
            if b.anchor is not None and story.device(b.anchor) is None:
                _error(issues, f"anchor device '{b.anchor}' not declared", step, bpath)
            if not Vec3(*b.position).is_finite():
                _error(issues, "asset position must be finite", step, bpath)
        elif isinstance(b, AssetEffect):
            if b.effect is not None and b.effect not in effects.asset_effects:
                _error(issues, f"unregistered asset effect '{b.effect}'", step, bpath)


def validate_story(story: Story, effects: EffectRegistry = DEFAULT_EFFECTS) -> list[ValidationIssue]:
    """Check every model invariant; an empty list means the story is playable.

    Errors mark stories the engine refuses to run; warnings flag legal but
    risky authoring (duplicate keywords, empty story, ...).
    """
    issues: list[ValidationIssue] = []

    seen_devices: set[str] = set()
    for i, decl in enumerate(story.devices):
        if decl.id in seen_devices:
            _error(issues, f"duplicate device id '{decl.id}'", path=f"devices[{i}]")
        seen_devices.add(decl.id)
    seen_assets: set[str] = set()
    for i, decl in enumerate(story.assets):
        if decl.id in seen_assets:
            _error(issues, f"duplicate asset id '{decl.id}'", path=f"assets[{i}]")
        seen_assets.add(decl.id)
        if decl.half_extent_m <= 0:
            _error(issues, f"half_extent_m must be > 0, got {decl.half_extent_m}", path=f"assets[{i}]")
    for collision in seen_devices & seen_assets:
        _warn(issues, f"id '{collision}' used by both a device and an asset")

    _check_scene(story, story.initial, issues, None, "initial", effects)
    if story.initial.narration is not None and story.initial.narration.strip() == "":
        _warn(issues, "initial narration is blank", path="initial.narration")

    if not story.steps:
        _warn(issues, "empty story (no steps)", path="steps")

    keyword_tokens: dict[int, tuple[str, ...]] = {}
    for i, step in enumerate(story.steps):
        tpath = f"steps[{i}].trigger"
        trig = step.trigger
        if story.narrator_mode == NarratorMode.SYSTEM and not isinstance(trig, TapTrigger):
            _error(issues, "trigger must be Tap when the system narrates", i, tpath)
        if isinstance(trig, KeywordTrigger):
            tokens = tuple(normalize(trig.phrase))
            if not tokens:
                _error(issues, "keyword phrase has no tokens after normalization", i, f"{tpath}.phrase")
            else:
                keyword_tokens[i] = tokens
        elif isinstance(trig, TouchTrigger):
            if story.asset(trig.target) is None:
                _error(issues, f"touch target '{trig.target}' not declared", i, f"{tpath}.target")
            if trig.threshold_m <= 0:
                _error(issues, f"touch threshold_m must be > 0, got {trig.threshold_m}", i, f"{tpath}.threshold_m")

        spath = f"steps[{i}].scene"
        _check_scene(story, step.scene, issues, i, spath, effects)
        if story.narrator_mode == NarratorMode.SYSTEM:
            if step.scene.narration is None or not step.scene.narration.strip():
                _warn(issues, "system-narrated scene has no narration to speak", i, f"{spath}.narration")

    for i, tokens in keyword_tokens.items():
        for j, other in keyword_tokens.items():
            if j <= i:
                continue
            if tokens == other:
                _warn(issues, f"duplicate keyword phrase also used by step {j}", i, f"steps[{i}].trigger.phrase")
            elif _contains(other, tokens) or _contains(tokens, other):
                _warn(issues, f"keyword phrase overlaps step {j}'s phrase (one contains the other)",
                      i, f"steps[{i}].trigger.phrase")

    if story.narrator_mode == NarratorMode.SYSTEM and not story.devices_of_kind(DeviceKind.SPEAKER):
        _warn(issues, "system narrator but no speaker declared; narration will not be audible")

    if any(issue.severity == Severity.ERROR for issue in issues):
        return issues

    # Fold-dependent checks only run on structurally sound stories.
    world = apply_scene(story, initial_defaults(story), story.initial)
    for i, step in enumerate(story.steps):
        if isinstance(step.trigger, TouchTrigger):
            state = world.assets.get(step.trigger.target)
            if state is None or not state.present:
                _error(issues, f"touch target '{step.trigger.target}' is not visible before this step",
                       i, f"steps[{i}].trigger.target")
        for bi, b in enumerate(step.scene.behaviors):
            if isinstance(b, AssetEffect) and not world.assets[b.asset].present:
                _warn(issues, f"effect on absent asset '{b.asset}' has no effect",
                      i, f"steps[{i}].scene.behaviors[{bi}]")
        world = apply_scene(story, world, step.scene)
    return issues


def _contains(haystack: tuple[str, ...], needle: tuple[str, ...]) -> bool:
    if not needle or len(needle) > len(haystack):
        return False
    return any(haystack[i:i + len(needle)] == needle for i in range(len(haystack) - len(needle) + 1))


def has_errors(issues: list[ValidationIssue]) -> bool:
    return any(i.severity == Severity.ERROR for i in issues)


# --- wire/report helpers -------------------------------------------------------


def world_as_dict(world: WorldState) -> dict:
    return {
        "lights": {ref: {"on": s.on, "brightness_pct": s.brightness_pct,
                         "hue_deg": s.hue_deg, "effect": s.effect}
                   for ref, s in world.lights.items()},
        "fans": {ref: {"on": s.on, "intensity": s.intensity} for ref, s in world.fans.items()},
        "speakers": {ref: {"on": s.on, "volume_pct": s.volume_pct, "sound": s.sound}
                     for ref, s in world.speakers.items()},
        "assets": {ref: _asset_as_dict(s) for ref, s in world.assets.items()},
    }


def _asset_as_dict(s: AssetState) -> dict:
    return {"present": s.present, "position": list(s.position), "anchor": s.anchor, "effect": s.effect}


def plan_as_dict(plan: AnimationPlan) -> list[dict]:
    out: list[dict] = []
    for e in plan:
        if isinstance(e, FadeIn):
            out.append({"kind": "fade_in", "asset": e.asset, "duration_s": e.duration_s,
                        "state": _asset_as_dict(e.state)})
        elif isinstance(e, FadeOut):
            out.append({"kind": "fade_out", "asset": e.asset, "duration_s": e.duration_s})
        elif isinstance(e, Translate):
            out.append({"kind": "translate", "asset": e.asset, "from": list(e.from_pos),
                        "to": list(e.to_pos), "duration_s": e.duration_s,
                        "state": _asset_as_dict(e.state)})
        elif isinstance(e, AssetCue):
            out.append({"kind": "asset_cue", "asset": e.asset, "state": _asset_as_dict(e.state)})
        else:
            out.append({"kind": "device_cue", "device": e.device,
                        "device_kind": e.kind.value, "changes": dict(e.changes)})
    return out
