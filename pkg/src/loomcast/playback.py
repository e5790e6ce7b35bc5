"""Playback state machine.

One event loop owns a session: it arms exactly one trigger, folds the
world forward on every fired trigger, synthesizes the animation plan,
dispatches device commands in declaration order, and speaks narration in
system-narrator mode. Device failures become diagnostics, never transition
failures -- the show must go on.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass

from . import model
from .devices.base import (
    CommandDispatcher, DeviceCommand, DeviceRegistry, SpeakerCommand,
    full_state_payload, payload_from_cue,
)
from .model import (
    AnimationDefaults, AnimationPlan, DeviceCue, DeviceKind, IndexOutOfRange,
    KeywordTrigger, NarratorMode, Story, ValidationIssue, WorldState,
)
from .triggers import ArmedTrigger, InputEvent, TapEvent, TranscriptEvent, arm

log = logging.getLogger(__name__)


class SessionFinished(RuntimeError):
    pass


class InvalidStory(ValueError):
    def __init__(self, issues: list[ValidationIssue]):
        super().__init__("; ".join(str(i) for i in issues))
        self.issues = issues


@dataclass(frozen=True)
class TransitionRecord:
    timestamp: float
    step: int
    event_kind: str  # start | keyword | tap | touch | goto
    detail: str = ""

    def as_line(self) -> str:
        return f"{self.timestamp:.3f}\t{self.step}\t{self.event_kind}\t{self.detail}"


@dataclass(frozen=True)
class TransitionResult:
    entered_scene: int
    plan: AnimationPlan
    device_commands: tuple[DeviceCommand, ...]
    narration_to_speak: str | None
    finished: bool


class PlaybackSession:
    def __init__(self, story: Story, drivers: DeviceRegistry, *,
                 clock=time.time, animation: AnimationDefaults = AnimationDefaults()):
        self.story = story
        self.drivers = drivers
        self.clock = clock
        self.animation = animation
        self.cursor: int = -1
        self.world: WorldState = model.effective_state(story, -1)
        self.armed: ArmedTrigger | None = None
        self.log: list[TransitionRecord] = []
        self.diagnostics: list[str] = []
        self.dispatcher = CommandDispatcher(drivers, self.diagnostics.append)
        self._assets = {a.id: a for a in story.assets}

    @property
    def finished(self) -> bool:
        return self.cursor >= len(self.story.steps) - 1

    def drain_commands(self) -> None:
        """Wait for queued device commands (network drivers run off-loop)."""
        self.dispatcher.drain()

    def _arm_next(self) -> None:
        if self.finished:
            self.armed = None
        else:
            self.armed = arm(self.story.steps[self.cursor + 1].trigger, self.world, self._assets)

    def _dispatch(self, commands: tuple[DeviceCommand, ...]) -> None:
        for command in commands:
            self.dispatcher.dispatch(command)

    def _declaration_order(self, commands: list[DeviceCommand]) -> tuple[DeviceCommand, ...]:
        order = {decl.id: i for i, decl in enumerate(self.story.devices)}
        return tuple(sorted(commands, key=lambda c: order[c.target]))

    def _narration_command(self, text: str) -> DeviceCommand | None:
        speakers = self.story.devices_of_kind(DeviceKind.SPEAKER)
        if not speakers:
            self.diagnostics.append("no speaker declared; narration not spoken")
            return None
        return DeviceCommand(speakers[0].id, SpeakerCommand(say=text))


def start_session(story: Story, drivers: DeviceRegistry, *,
                  clock=time.time, animation: AnimationDefaults = AnimationDefaults()) -> PlaybackSession:
    """Validate, bring devices to the initial state, and arm the first trigger."""
    issues = model.validate_story(story)
    if model.has_errors(issues):
        raise InvalidStory([i for i in issues if i.severity == model.Severity.ERROR])
    drivers.ensure_bound(story.devices)

    session = PlaybackSession(story, drivers, clock=clock, animation=animation)
    commands = _full_state_commands(story, session.world)
    narration = None
    if story.narrator_mode == NarratorMode.SYSTEM and story.initial.narration:
        narration = story.initial.narration
        say = session._narration_command(narration)
        if say is not None:
            commands = commands + (say,)
    session._dispatch(commands)
    session.log.append(TransitionRecord(session.clock(), -1, "start"))
    session._arm_next()
    return session


def _full_state_commands(story: Story, world: WorldState) -> tuple[DeviceCommand, ...]:
    commands = []
    for decl in story.devices:
        if decl.kind == DeviceKind.LIGHT:
            state = world.lights[decl.id]
        elif decl.kind == DeviceKind.FAN:
            state = world.fans[decl.id]
        else:
            state = world.speakers[decl.id]
        commands.append(DeviceCommand(decl.id, full_state_payload(decl.kind, state)))
    return tuple(commands)


def _event_kind(event: InputEvent) -> str:
    if isinstance(event, TranscriptEvent):
        return "keyword"
    if isinstance(event, TapEvent):
        return "tap"
    return "touch"


def handle_event(session: PlaybackSession, event: InputEvent) -> TransitionResult | None:
    """Feed one event to the armed trigger; returns the transition or None.

    A pending transcript that contains a *later* step's keyword is recorded
    as a "missed cue" diagnostic -- the single-armed rule never skips scenes.
    On a fired keyword, the rest of that utterance is discarded: the story
    jumps and waits for the next trigger with a fresh window.
    """
    if session.finished or session.armed is None:
        raise SessionFinished("story already finished")

    if not session.armed.feed(event):
        if isinstance(event, TranscriptEvent):
            _note_missed_cues(session, event.text)
        return None

    fired = session.armed
    session.cursor += 1
    step = session.story.steps[session.cursor]
    next_world = model.effective_state(session.story, session.cursor)
    plan = model.scene_diff(session.world, next_world, session.animation)

    commands = [DeviceCommand(e.device, payload_from_cue(e)) for e in plan if isinstance(e, DeviceCue)]
    ordered = session._declaration_order(commands)
    narration = None
    if session.story.narrator_mode == NarratorMode.SYSTEM and step.scene.narration:
        narration = step.scene.narration
        say = session._narration_command(narration)
        if say is not None:
            ordered = ordered + (say,)
    session._dispatch(ordered)

    session.world = next_world
    session.log.append(TransitionRecord(
        session.clock(), session.cursor, _event_kind(event), fired.describe()))
    session._arm_next()
    return TransitionResult(
        entered_scene=session.cursor,
        plan=plan,
        device_commands=ordered,
        narration_to_speak=narration,
        finished=session.finished,
    )


def _note_missed_cues(session: PlaybackSession, text: str) -> None:
    from .triggers import phrase_in_utterance

    armed_index = session.cursor + 1
    for k in range(armed_index + 1, len(session.story.steps)):
        trigger = session.story.steps[k].trigger
        if isinstance(trigger, KeywordTrigger) and phrase_in_utterance(trigger.phrase, text):
            note = (f"missed cue: step {k} keyword '{trigger.phrase}' heard "
                    f"while step {armed_index} is armed")
            session.diagnostics.append(note)
            log.info(note)


def goto_scene(session: PlaybackSession, index: int) -> TransitionResult:
    """Jump without a trigger: refold the world, force devices to the target
    state, re-arm. No animations on jumps (and no narration playback).
    """
    if not -1 <= index < len(session.story.steps):
        raise IndexOutOfRange(f"scene index {index} not in -1..{len(session.story.steps) - 1}")
    session.cursor = index
    session.world = model.effective_state(session.story, index)
    commands = _full_state_commands(session.story, session.world)
    session._dispatch(commands)
    session.log.append(TransitionRecord(session.clock(), index, "goto"))
    session._arm_next()
    return TransitionResult(
        entered_scene=index,
        plan=AnimationPlan(),
        device_commands=commands,
        narration_to_speak=None,
        finished=session.finished,
    )


def export_log(session: PlaybackSession) -> str:
    """Newline-delimited records: timestamp, step, event kind, detail."""
    return "\n".join(r.as_line() for r in session.log) + ("\n" if session.log else "")
