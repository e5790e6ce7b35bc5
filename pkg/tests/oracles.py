"""Independent oracles the tests check production code against.

naive_replay reimplements the fold semantics over plain dicts with none of
the production helpers, so agreement between the two is meaningful. The
plan folder mirrors what a wire client does with Snapshot + Transition
messages.
"""

from __future__ import annotations

from loomcast.model import (
    AssetEffect, AssetPlace, AssetRemove, FanSet, LightSet, SpeakerSet, Story, UNSET,
)


def _default_world(story: Story) -> dict:
    world: dict = {"lights": {}, "fans": {}, "speakers": {}, "assets": {}}
    for d in story.devices:
        if d.kind.value == "light":
            world["lights"][d.id] = {"on": True, "brightness_pct": 100, "hue_deg": 60, "effect": None}
        elif d.kind.value == "fan":
            world["fans"][d.id] = {"on": False, "intensity": 0}
        else:
            world["speakers"][d.id] = {"on": True, "volume_pct": 50, "sound": None}
    for a in story.assets:
        world["assets"][a.id] = {"present": False, "position": list(a.position),
                                 "anchor": None, "effect": None}
    return world


def _apply_one(story: Story, world: dict, behavior) -> None:
    if isinstance(behavior, LightSet):
        s = world["lights"][behavior.device]
        if behavior.on is not None:
            s["on"] = behavior.on
        if behavior.brightness_pct is not None:
            s["brightness_pct"] = behavior.brightness_pct
        if behavior.hue_deg is not None:
            s["hue_deg"] = behavior.hue_deg
        if behavior.effect is not UNSET:
            s["effect"] = behavior.effect
        if s["brightness_pct"] == 0:
            s["on"] = False
    elif isinstance(behavior, FanSet):
        s = world["fans"][behavior.device]
        if behavior.on is not None:
            s["on"] = behavior.on
        if behavior.intensity is not None:
            s["intensity"] = behavior.intensity
        if s["intensity"] == 0:
            s["on"] = False
    elif isinstance(behavior, SpeakerSet):
        s = world["speakers"][behavior.device]
        if behavior.on is not None:
            s["on"] = behavior.on
        if behavior.volume_pct is not None:
            s["volume_pct"] = behavior.volume_pct
        if behavior.sound is not UNSET:
            s["sound"] = behavior.sound
    elif isinstance(behavior, AssetPlace):
        s = world["assets"][behavior.asset]
        pos = list(behavior.position)
        if behavior.anchor is not None:
            anchor_pos = next(d.position for d in story.devices if d.id == behavior.anchor)
            pos = [anchor_pos[i] + pos[i] for i in range(3)]
        s["present"] = True
        s["position"] = pos
        s["anchor"] = behavior.anchor
    elif isinstance(behavior, AssetRemove):
        world["assets"][behavior.asset]["present"] = False
    elif isinstance(behavior, AssetEffect):
        s = world["assets"][behavior.asset]
        if s["present"]:
            s["effect"] = behavior.effect
    else:
        raise TypeError(behavior)


def naive_replay(story: Story, scene_index: int) -> dict:
    """Sequential single-step replay; same dict shape as model.world_as_dict."""
    world = _default_world(story)
    scenes = [story.initial] + [s.scene for s in story.steps[: scene_index + 1]]
    for scene in scenes:
        for behavior in scene.behaviors:
            _apply_one(story, world, behavior)
    return world


def fold_plan(world: dict, plan: list[dict]) -> dict:
    """Fold a wire-format transition plan onto a wire-format world dict,
    the way a connected client updates its view.
    """
    import copy

    world = copy.deepcopy(world)
    for effect in plan:
        kind = effect["kind"]
        if kind in ("fade_in", "translate", "asset_cue"):
            world["assets"][effect["asset"]] = copy.deepcopy(effect["state"])
        elif kind == "fade_out":
            world["assets"][effect["asset"]]["present"] = False
        elif kind == "device_cue":
            group = {"light": "lights", "fan": "fans", "speaker": "speakers"}[effect["device_kind"]]
            state = world[group][effect["device"]]
            state.update(effect["changes"])
            if group == "lights" and state["brightness_pct"] == 0:
                state["on"] = False
            if group == "fans" and state["intensity"] == 0:
                state["on"] = False
        else:
            raise ValueError(kind)
    return world
