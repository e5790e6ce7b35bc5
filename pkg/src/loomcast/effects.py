"""Registry of effect and sound names stories may reference.

Only registered names are accepted from story documents; how a driver
realizes an effect is driver-local, so adding an implementation never
changes the authoring surface.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class EffectRegistry:
    light_effects: frozenset[str]
    speaker_sounds: frozenset[str]
    asset_effects: frozenset[str]


DEFAULT_EFFECTS = EffectRegistry(
    light_effects=frozenset({"flickering", "pulse"}),
    speaker_sounds=frozenset({"lullaby", "thunder", "wind"}),
    asset_effects=frozenset({"sparks", "glow", "spin"}),
)
