"""Trigger arming and event matching.

Exactly one trigger is armed at a time. Transcript text feeds a rolling
token window for keyword triggers (the window spans utterance boundaries,
so however the speech-to-text engine chunks an utterance, the outcome is
the same); taps fire tap triggers; touch positions are tested against the
target's bounds inflated by the touch threshold.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Mapping, Union

from .model import (
    AssetDecl, KeywordTrigger, TapTrigger, TouchTrigger, Trigger, Vec3, WorldState,
)
from .text import normalize


@dataclass(frozen=True)
class TranscriptEvent:
    text: str
    source: str = "local"


@dataclass(frozen=True)
class TapEvent:
    source: str = "local"


@dataclass(frozen=True)
class TouchEvent:
    position: Vec3
    source: str = "local"


InputEvent = Union[TranscriptEvent, TapEvent, TouchEvent]


class TouchTargetAbsent(Exception):
    pass


class ArmedTrigger:
    """State machine for the one trigger currently eligible to fire.

    Owned and mutated by a single playback loop; events may originate from
    many clients but arrive through one ordered queue.
    """

    def __init__(self, trigger: Trigger,
                 phrase_tokens: tuple[str, ...] = (),
                 bounds_center: Vec3 | None = None,
                 bounds_half_extent: float = 0.0):
        self.trigger = trigger
        self.fired = False
        self._phrase = phrase_tokens
        self._window: deque[str] = deque(maxlen=max(len(phrase_tokens), 1))
        self._center = bounds_center
        self._half = bounds_half_extent

    def feed(self, event: InputEvent) -> bool:
        """Advance the state machine; True once the trigger fires.

        Wrong-kind events never fire: taps cannot fire keyword triggers and
        vice versa; they simply leave the trigger pending.
        """
        if self.fired:
            return True
        trig = self.trigger
        if isinstance(trig, TapTrigger):
            if isinstance(event, TapEvent):
                self.fired = True
        elif isinstance(trig, KeywordTrigger):
            if isinstance(event, TranscriptEvent):
                for token in normalize(event.text):
                    self._window.append(token)
                    if tuple(self._window) == self._phrase:
                        self.fired = True
                        break
        elif isinstance(trig, TouchTrigger):
            if isinstance(event, TouchEvent) and Vec3(*event.position).is_finite():
                assert self._center is not None
                reach = self._half + trig.threshold_m
                self.fired = all(
                    abs(p - c) <= reach for p, c in zip(event.position, self._center)
                )
        return self.fired

    def describe(self) -> str:
        trig = self.trigger
        if isinstance(trig, TapTrigger):
            return "tap"
        if isinstance(trig, KeywordTrigger):
            return f"keyword '{trig.phrase}'"
        return f"touch '{trig.target}' (within {trig.threshold_m} m)"


def arm(trigger: Trigger, predecessor_state: WorldState,
        assets: Mapping[str, AssetDecl] | None = None) -> ArmedTrigger:
    """Arm a trigger against the scene it transitions out of.

    Touch triggers resolve their bounds from the target's current (possibly
    anchored) position in the predecessor state, with the half-extent taken
    from the asset catalog; the target must already be visible.
    """
    if isinstance(trigger, KeywordTrigger):
        tokens = tuple(normalize(trigger.phrase))
        if not tokens:
            raise ValueError(f"keyword phrase {trigger.phrase!r} has no tokens")
        return ArmedTrigger(trigger, phrase_tokens=tokens)
    if isinstance(trigger, TouchTrigger):
        state = predecessor_state.assets.get(trigger.target)
        if state is None or not state.present:
            raise TouchTargetAbsent(f"touch target '{trigger.target}' is not visible")
        half = assets[trigger.target].half_extent_m if assets else 0.0
        return ArmedTrigger(trigger, bounds_center=state.position, bounds_half_extent=half)
    return ArmedTrigger(trigger)


def phrase_in_utterance(phrase: str, utterance: str) -> bool:
    """True when the phrase's token sequence appears contiguously in the utterance."""
    needle = tuple(normalize(phrase))
    haystack = tuple(normalize(utterance))
    if not needle or len(needle) > len(haystack):
        return False
    return any(haystack[i:i + len(needle)] == needle for i in range(len(haystack) - len(needle) + 1))
