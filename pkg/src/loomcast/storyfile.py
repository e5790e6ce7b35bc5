"""Canonical on-disk story documents (`.story`, JSON).

One top-level object with keys format_version, title, narrator, devices,
assets, initial, steps. Optional behavior fields follow a tri-state rule:
an absent key means "unchanged", an explicit null clears (effects/sounds),
and a value sets. Serialization is canonical -- fixed key order, arrays in
story order, floats in their shortest round-trip form -- so a canonical
document survives parse -> serialize byte-identically.

MIME type: application/x-loomcast-story+json.
"""

from __future__ import annotations

import json
from typing import Any

from . import model
from .model import (
    UNSET, AssetDecl, AssetEffect, AssetPlace, AssetRemove, Behavior, DeviceDecl,
    DeviceKind, FanSet, KeywordTrigger, LightSet, NarratorMode, Scene, Severity,
    SpeakerSet, Step, Story, TapTrigger, TouchTrigger, Trigger, ValidationIssue, Vec3,
)
from .text import slugify

FORMAT_VERSION = 1
STORY_MIME = "application/x-loomcast-story+json"
STORY_SUFFIX = ".story"


class StoryFormatError(Exception):
    pass


class StorySyntaxError(StoryFormatError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class StorySchemaError(StoryFormatError):
    def __init__(self, message: str, path: str):
        super().__init__(f"{path}: {message}")
        self.path = path


class StorySemanticError(StoryFormatError):
    def __init__(self, issues: list[ValidationIssue]):
        super().__init__("; ".join(str(i) for i in issues))
        self.issues = issues


class InvalidStory(StoryFormatError):
    def __init__(self, issues: list[ValidationIssue]):
        super().__init__("; ".join(str(i) for i in issues))
        self.issues = issues


# --- decoding ------------------------------------------------------------------


def _expect(value: Any, kind: type | tuple, path: str) -> Any:
    names = {str: "string", dict: "object", list: "array", bool: "boolean", int: "integer"}
    if kind is int and isinstance(value, bool):
        raise StorySchemaError("expected integer, got boolean", path)
    if not isinstance(value, kind):
        want = names.get(kind, getattr(kind, "__name__", str(kind)))
        raise StorySchemaError(f"expected {want}, got {type(value).__name__}", path)
    return value


def _require(obj: dict, key: str, kind: type | tuple, path: str) -> Any:
    if key not in obj:
        raise StorySchemaError(f"missing required key '{key}'", path)
    return _expect(obj[key], kind, f"{path}.{key}")


def _check_keys(obj: dict, allowed: set[str], path: str, strict: bool,
                issues: list[ValidationIssue]) -> None:
    unknown = set(obj) - allowed
    for key in sorted(unknown):
        if strict:
            raise StorySchemaError(f"unknown key '{key}'", path)
        issues.append(ValidationIssue(Severity.WARNING, f"unknown key '{key}' ignored", path=path))


def _decode_number(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise StorySchemaError(f"expected number, got {type(value).__name__}", path)
    return float(value)


def _decode_vec3(value: Any, path: str) -> Vec3:
    arr = _expect(value, list, path)
    if len(arr) != 3:
        raise StorySchemaError(f"position needs 3 components, got {len(arr)}", path)
    return Vec3(*(_decode_number(c, f"{path}[{i}]") for i, c in enumerate(arr)))


def _decode_device(obj: Any, path: str, strict: bool, issues: list[ValidationIssue]) -> DeviceDecl:
    d = _expect(obj, dict, path)
    _check_keys(d, {"id", "kind", "name", "position"}, path, strict, issues)
    kind_raw = _require(d, "kind", str, path)
    try:
        kind = DeviceKind(kind_raw)
    except ValueError:
        raise StorySchemaError(f"device kind must be light|fan|speaker, got '{kind_raw}'", f"{path}.kind")
    return DeviceDecl(
        id=_require(d, "id", str, path),
        kind=kind,
        name=_require(d, "name", str, path),
        position=_decode_vec3(_require(d, "position", list, path), f"{path}.position"),
    )


def _decode_asset(obj: Any, path: str, strict: bool, issues: list[ValidationIssue]) -> AssetDecl:
    d = _expect(obj, dict, path)
    _check_keys(d, {"id", "kind", "name", "position", "half_extent_m"}, path, strict, issues)
    half = d.get("half_extent_m", model.DEFAULT_HALF_EXTENT_M)
    return AssetDecl(
        id=_require(d, "id", str, path),
        kind=_require(d, "kind", str, path),
        name=_require(d, "name", str, path),
        position=_decode_vec3(_require(d, "position", list, path), f"{path}.position"),
        half_extent_m=_decode_number(half, f"{path}.half_extent_m"),
    )


def _decode_trigger(obj: Any, path: str, strict: bool, issues: list[ValidationIssue]) -> Trigger:
    d = _expect(obj, dict, path)
    ttype = _require(d, "type", str, path)
    if ttype == "tap":
        _check_keys(d, {"type"}, path, strict, issues)
        return TapTrigger()
    if ttype == "keyword":
        _check_keys(d, {"type", "phrase"}, path, strict, issues)
        return KeywordTrigger(phrase=_require(d, "phrase", str, path))
    if ttype == "touch":
        _check_keys(d, {"type", "target", "threshold_m"}, path, strict, issues)
        threshold = d.get("threshold_m", model.DEFAULT_TOUCH_THRESHOLD_M)
        return TouchTrigger(
            target=_require(d, "target", str, path),
            threshold_m=_decode_number(threshold, f"{path}.threshold_m"),
        )
    raise StorySchemaError(f"trigger type must be tap|keyword|touch, got '{ttype}'", f"{path}.type")


def _opt(d: dict, key: str, kind: type | tuple, path: str) -> Any:
    """Optional plain field: absent -> None."""
    if key not in d or d[key] is None:
        return None
    return _expect(d[key], kind, f"{path}.{key}")


def _opt_clearable(d: dict, key: str, path: str) -> Any:
    """Tri-state name field: absent -> UNSET, null -> None (clear), string -> set."""
    if key not in d:
        return UNSET
    if d[key] is None:
        return None
    return _expect(d[key], str, f"{path}.{key}")


def _decode_behavior(obj: Any, path: str, strict: bool, issues: list[ValidationIssue]) -> Behavior:
    d = _expect(obj, dict, path)
    btype = _require(d, "type", str, path)
    if btype == "light":
        _check_keys(d, {"type", "device", "on", "brightness_pct", "hue_deg", "effect"}, path, strict, issues)
        return LightSet(
            device=_require(d, "device", str, path),
            on=_opt(d, "on", bool, path),
            brightness_pct=_opt(d, "brightness_pct", int, path),
            hue_deg=_opt(d, "hue_deg", int, path),
            effect=_opt_clearable(d, "effect", path),
        )
    if btype == "fan":
        _check_keys(d, {"type", "device", "on", "intensity"}, path, strict, issues)
        return FanSet(
            device=_require(d, "device", str, path),
            on=_opt(d, "on", bool, path),
            intensity=_opt(d, "intensity", int, path),
        )
    if btype == "speaker":
        _check_keys(d, {"type", "device", "on", "volume_pct", "sound"}, path, strict, issues)
        return SpeakerSet(
            device=_require(d, "device", str, path),
            on=_opt(d, "on", bool, path),
            volume_pct=_opt(d, "volume_pct", int, path),
            sound=_opt_clearable(d, "sound", path),
        )
    if btype == "place":
        _check_keys(d, {"type", "asset", "position", "anchor"}, path, strict, issues)
        return AssetPlace(
            asset=_require(d, "asset", str, path),
            position=_decode_vec3(_require(d, "position", list, path), f"{path}.position"),
            anchor=_opt(d, "anchor", str, path),
        )
    if btype == "remove":
        _check_keys(d, {"type", "asset"}, path, strict, issues)
        return AssetRemove(asset=_require(d, "asset", str, path))
    if btype == "effect":
        _check_keys(d, {"type", "asset", "effect"}, path, strict, issues)
        if "effect" not in d:
            raise StorySchemaError("missing required key 'effect'", path)
        effect = d["effect"]
        if effect is not None:
            _expect(effect, str, f"{path}.effect")
        return AssetEffect(asset=_require(d, "asset", str, path), effect=effect)
    raise StorySchemaError(
        f"behavior type must be light|fan|speaker|place|remove|effect, got '{btype}'", f"{path}.type")


def _decode_scene(obj: Any, path: str, strict: bool, issues: list[ValidationIssue]) -> Scene:
    d = _expect(obj, dict, path)
    _check_keys(d, {"behaviors", "narration"}, path, strict, issues)
    behaviors = tuple(
        _decode_behavior(b, f"{path}.behaviors[{i}]", strict, issues)
        for i, b in enumerate(_require(d, "behaviors", list, path))
    )
    return Scene(behaviors=behaviors, narration=_opt(d, "narration", str, path))


def parse_story(text: str, *, strict: bool = True,
                issues: list[ValidationIssue] | None = None) -> Story:
    """Parse and validate a story document.

    Validation errors abort with StorySemanticError; warnings pass through
    (appended to `issues` when a list is supplied). Lenient mode downgrades
    unknown keys to warnings instead of rejecting the document.
    """
    collected: list[ValidationIssue] = []
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise StorySyntaxError(e.msg, e.lineno, e.colno) from None

    doc = _expect(raw, dict, "$")
    _check_keys(doc, {"format_version", "title", "narrator", "devices", "assets", "initial", "steps"},
                "$", strict, collected)
    version = _require(doc, "format_version", int, "$")
    if version != FORMAT_VERSION:
        raise StorySchemaError(f"unsupported format_version {version} (expected {FORMAT_VERSION})",
                               "$.format_version")
    title = _require(doc, "title", str, "$")
    narrator_raw = _require(doc, "narrator", str, "$")
    try:
        narrator = NarratorMode(narrator_raw)
    except ValueError:
        raise StorySchemaError(f"narrator must be user|system, got '{narrator_raw}'", "$.narrator")

    devices = tuple(
        _decode_device(d, f"$.devices[{i}]", strict, collected)
        for i, d in enumerate(_require(doc, "devices", list, "$"))
    )
    assets = tuple(
        _decode_asset(a, f"$.assets[{i}]", strict, collected)
        for i, a in enumerate(_require(doc, "assets", list, "$"))
    )
    initial = _decode_scene(_require(doc, "initial", dict, "$"), "$.initial", strict, collected)

    steps = []
    for i, raw_step in enumerate(_require(doc, "steps", list, "$")):
        spath = f"$.steps[{i}]"
        d = _expect(raw_step, dict, spath)
        _check_keys(d, {"trigger", "scene"}, spath, strict, collected)
        steps.append(Step(
            trigger=_decode_trigger(_require(d, "trigger", dict, spath), f"{spath}.trigger", strict, collected),
            scene=_decode_scene(_require(d, "scene", dict, spath), f"{spath}.scene", strict, collected),
        ))

    story = Story(
        id=slugify(title), title=title, narrator_mode=narrator,
        devices=devices, assets=assets, initial=initial, steps=tuple(steps),
    )
    validation = model.validate_story(story)
    errors = [i for i in validation if i.severity == Severity.ERROR]
    if errors:
        raise StorySemanticError(errors)
    collected.extend(validation)
    if issues is not None:
        issues.extend(collected)
    return story


# --- encoding ------------------------------------------------------------------


def _encode_trigger(t: Trigger) -> dict:
    if isinstance(t, TapTrigger):
        return {"type": "tap"}
    if isinstance(t, KeywordTrigger):
        return {"type": "keyword", "phrase": t.phrase}
    return {"type": "touch", "target": t.target, "threshold_m": t.threshold_m}


def _encode_behavior(b: Behavior) -> dict:
    if isinstance(b, LightSet):
        out: dict[str, Any] = {"type": "light", "device": b.device}
        if b.on is not None:
            out["on"] = b.on
        if b.brightness_pct is not None:
            out["brightness_pct"] = b.brightness_pct
        if b.hue_deg is not None:
            out["hue_deg"] = b.hue_deg
        if not isinstance(b.effect, model._Unset):
            out["effect"] = b.effect
        return out
    if isinstance(b, FanSet):
        out = {"type": "fan", "device": b.device}
        if b.on is not None:
            out["on"] = b.on
        if b.intensity is not None:
            out["intensity"] = b.intensity
        return out
    if isinstance(b, SpeakerSet):
        out = {"type": "speaker", "device": b.device}
        if b.on is not None:
            out["on"] = b.on
        if b.volume_pct is not None:
            out["volume_pct"] = b.volume_pct
        if not isinstance(b.sound, model._Unset):
            out["sound"] = b.sound
        return out
    if isinstance(b, AssetPlace):
        out = {"type": "place", "asset": b.asset, "position": list(b.position)}
        if b.anchor is not None:
            out["anchor"] = b.anchor
        return out
    if isinstance(b, AssetRemove):
        return {"type": "remove", "asset": b.asset}
    return {"type": "effect", "asset": b.asset, "effect": b.effect}


def _encode_scene(s: Scene) -> dict:
    out: dict[str, Any] = {"behaviors": [_encode_behavior(b) for b in s.behaviors]}
    if s.narration is not None:
        out["narration"] = s.narration
    return out


def story_as_document(story: Story) -> dict:
    """The document object for a story, keys in canonical order."""
    return {
        "format_version": FORMAT_VERSION,
        "title": story.title,
        "narrator": story.narrator_mode.value,
        "devices": [
            {"id": d.id, "kind": d.kind.value, "name": d.name, "position": list(d.position)}
            for d in story.devices
        ],
        "assets": [
            {"id": a.id, "kind": a.kind, "name": a.name, "position": list(a.position),
             "half_extent_m": a.half_extent_m}
            for a in story.assets
        ],
        "initial": _encode_scene(story.initial),
        "steps": [
            {"trigger": _encode_trigger(s.trigger), "scene": _encode_scene(s.scene)}
            for s in story.steps
        ],
    }


def serialize_story(story: Story) -> str:
    """Canonical text form; parse_story(serialize_story(s)) == s for valid stories."""
    validation = model.validate_story(story)
    if model.has_errors(validation):
        raise InvalidStory([i for i in validation if i.severity == Severity.ERROR])
    return json.dumps(story_as_document(story), indent=2, ensure_ascii=False) + "\n"


def load_story(path: str, *, strict: bool = True,
               issues: list[ValidationIssue] | None = None) -> Story:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_story(fh.read(), strict=strict, issues=issues)
