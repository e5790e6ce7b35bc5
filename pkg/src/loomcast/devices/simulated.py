"""In-memory device drivers.

These reuse the model's field-application helpers, so a simulated device's
observable state machine is exactly the WorldState semantics (same ranges,
same brightness-0-means-off rule). The simulated speaker records spoken
text verbatim, which makes system-narrated stories assertable without audio.
"""

from __future__ import annotations

import sys
from dataclasses import asdict
from typing import IO

from ..model import FanState, LightState, SpeakerState, apply_fan, apply_light, apply_speaker
from .base import CommandPayload, FanCommand, LightCommand, ProtocolError, SpeakerCommand


class SimulatedLight:
    def __init__(self, initial: LightState = LightState()):
        self.state = initial

    def apply(self, payload: CommandPayload) -> dict:
        if not isinstance(payload, LightCommand):
            raise ProtocolError(f"light cannot apply {type(payload).__name__}")
        self.state = apply_light(self.state, on=payload.on, brightness_pct=payload.brightness_pct,
                                 hue_deg=payload.hue_deg, effect=payload.effect)
        return self.observed_state()

    def observed_state(self) -> dict:
        return asdict(self.state)

    def close(self) -> None:
        pass


class SimulatedFan:
    def __init__(self, initial: FanState = FanState()):
        self.state = initial

    def apply(self, payload: CommandPayload) -> dict:
        if not isinstance(payload, FanCommand):
            raise ProtocolError(f"fan cannot apply {type(payload).__name__}")
        self.state = apply_fan(self.state, on=payload.on, intensity=payload.intensity)
        return self.observed_state()

    def observed_state(self) -> dict:
        return asdict(self.state)

    def close(self) -> None:
        pass


class SimulatedSpeaker:
    def __init__(self, initial: SpeakerState = SpeakerState()):
        self.state = initial
        self.spoken: list[str] = []  # say texts, verbatim, in order

    def apply(self, payload: CommandPayload) -> dict:
        if not isinstance(payload, SpeakerCommand):
            raise ProtocolError(f"speaker cannot apply {type(payload).__name__}")
        self.state = apply_speaker(self.state, on=payload.on,
                                   volume_pct=payload.volume_pct, sound=payload.sound)
        if payload.say is not None:
            self.spoken.append(payload.say)
        return self.observed_state()

    def observed_state(self) -> dict:
        out = asdict(self.state)
        out["playing"] = self.state.playing
        return out

    def close(self) -> None:
        pass


class LocalSpeakerDriver(SimulatedSpeaker):
    """Speaker for live runs: same state machine, but narration and sound
    cues are written to a stream (stdout by default) instead of staying silent.
    An external TTS/audio pipeline can tail that stream.
    """

    def __init__(self, out: IO[str] | None = None):
        super().__init__()
        self._out = out if out is not None else sys.stdout

    def apply(self, payload: CommandPayload) -> dict:
        before = self.state.playing
        state = super().apply(payload)
        if isinstance(payload, SpeakerCommand):
            if payload.say is not None:
                print(f"[speaker] says: {payload.say}", file=self._out)
            if self.state.playing and self.state.playing != before:
                print(f"[speaker] playing: {self.state.playing}", file=self._out)
        return state
