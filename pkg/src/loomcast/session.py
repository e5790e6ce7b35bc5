"""Multi-user co-located playback sessions.

The hub is transport-agnostic: the WebSocket layer registers a send
callback per client and everything else happens here. All mutations of one
session funnel through its lock, broadcasts fan out under that lock with a
monotonically increasing sequence number, so every client observes the
same total order. The server is authoritative -- clients never advance
locally, they fold Snapshot + Transition messages.
"""

from __future__ import annotations

import logging
import threading
import uuid
from dataclasses import dataclass
from typing import Callable

from . import model, playback, storyfile
from .devices.base import DeviceRegistry, simulated_registry
from .model import Story, Vec3
from .triggers import InputEvent, TapEvent, TouchEvent, TranscriptEvent

log = logging.getLogger(__name__)

SendFn = Callable[[dict], None]


class UnknownSession(KeyError):
    pass


@dataclass(frozen=True)
class Role:
    kind: str  # narrator | actor | audience
    name: str | None = None  # actor character name

    def as_dict(self) -> dict:
        out: dict = {"kind": self.kind}
        if self.name is not None:
            out["name"] = self.name
        return out


AUDIENCE = Role("audience")


def _actor_names(story: Story) -> set[str]:
    # Characters are the story's costume assets (actors wear virtual costumes).
    return {a.name for a in story.assets if a.kind == "costume"}


class LiveSession:
    def __init__(self, session_id: str, story: Story, registry: DeviceRegistry):
        self.id = session_id
        self.story = story
        self.playback = playback.start_session(story, registry)
        self.lock = threading.Lock()
        self.clients: dict[str, SendFn] = {}
        self.roles: dict[str, Role] = {}
        self.seq = 0
        self._document = storyfile.story_as_document(story)
        self._diag_mark = len(self.playback.diagnostics)

    # All _locked methods assume self.lock is held.

    def _next_seq(self) -> int:
        self.seq += 1
        return self.seq

    def _send(self, client_id: str, message: dict) -> None:
        send = self.clients.get(client_id)
        if send is None:
            return
        try:
            send(message)
        except Exception:
            log.exception("dropping unreachable client %s", client_id)
            self.clients.pop(client_id, None)

    def _broadcast(self, message: dict) -> None:
        for client_id in list(self.clients):
            self._send(client_id, message)

    def _roles_payload(self) -> dict:
        return {cid: role.as_dict() for cid, role in self.roles.items()}

    def _snapshot(self, client_id: str) -> dict:
        return {
            "type": "snapshot",
            "seq": self._next_seq(),
            "client_id": client_id,
            "story": self._document,
            "cursor": self.playback.cursor,
            "world": model.world_as_dict(self.playback.world),
            "roles": self._roles_payload(),
            "finished": self.playback.finished,
        }

    def _flush_diagnostics(self) -> None:
        fresh = self.playback.diagnostics[self._diag_mark:]
        self._diag_mark = len(self.playback.diagnostics)
        for text in fresh:
            self._broadcast({"type": "diagnostic", "seq": self._next_seq(), "text": text})


class SessionHub:
    def __init__(self, registry_factory: Callable[[Story], DeviceRegistry] = simulated_registry):
        self._sessions: dict[str, LiveSession] = {}
        self._registry_factory = registry_factory
        self._lock = threading.Lock()

    def create(self, story: Story, registry: DeviceRegistry | None = None) -> str:
        session_id = uuid.uuid4().hex[:12]
        session = LiveSession(session_id, story, registry or self._registry_factory(story))
        with self._lock:
            self._sessions[session_id] = session
        return session_id

    def get(self, session_id: str) -> LiveSession:
        with self._lock:
            try:
                return self._sessions[session_id]
            except KeyError:
                raise UnknownSession(session_id) from None

    def ids(self) -> list[str]:
        with self._lock:
            return list(self._sessions)

    def join(self, session_id: str, client_id: str, send: SendFn) -> None:
        """Register a client; the Snapshot is always its first message, so a
        late joiner converges by folding subsequent Transitions onto it.
        """
        session = self.get(session_id)
        with session.lock:
            session.clients[client_id] = send
            session.roles.setdefault(client_id, AUDIENCE)
            session._send(client_id, session._snapshot(client_id))

    def leave(self, session_id: str, client_id: str) -> None:
        try:
            session = self.get(session_id)
        except UnknownSession:
            return
        with session.lock:
            session.clients.pop(client_id, None)
            if session.roles.pop(client_id, None) is not None:
                session._broadcast({"type": "roles", "seq": session._next_seq(),
                                    "roles": session._roles_payload()})

    def claim_role(self, session_id: str, client_id: str, role: Role) -> tuple[bool, str | None]:
        """Narrator and each actor name are exclusive; audience is unlimited."""
        session = self.get(session_id)
        with session.lock:
            if client_id not in session.clients:
                return False, "join the session first"
            reason: str | None = None
            if role.kind == "narrator":
                holder = next((c for c, r in session.roles.items()
                               if r.kind == "narrator" and c != client_id), None)
                if holder is not None:
                    reason = "narrator already claimed"
            elif role.kind == "actor":
                if role.name not in _actor_names(session.story):
                    reason = f"story has no character '{role.name}'"
                else:
                    holder = next((c for c, r in session.roles.items()
                                   if r == role and c != client_id), None)
                    if holder is not None:
                        reason = f"'{role.name}' already claimed"
            elif role.kind != "audience":
                reason = f"unknown role kind '{role.kind}'"

            ok = reason is None
            if ok:
                session.roles[client_id] = role
            session._send(client_id, {"type": "role_result", "seq": session._next_seq(),
                                      "ok": ok, "role": role.as_dict(), "reason": reason})
            if ok:
                session._broadcast({"type": "roles", "seq": session._next_seq(),
                                    "roles": session._roles_payload()})
            return ok, reason

    def submit_event(self, session_id: str, client_id: str, event: InputEvent) -> tuple[bool, str | None]:
        """Role-gate and forward one event to the playback loop; any resulting
        transition broadcasts to every client in sequence order.
        """
        session = self.get(session_id)
        with session.lock:
            if isinstance(event, TranscriptEvent):
                role = session.roles.get(client_id)
                if role is None or role.kind != "narrator":
                    return False, "narrator only"
            if session.playback.finished:
                return False, "story finished"
            result = playback.handle_event(session.playback, event)
            if result is not None:
                message = {
                    "type": "transition",
                    "seq": session._next_seq(),
                    "entered_scene": result.entered_scene,
                    "plan": model.plan_as_dict(result.plan),
                    "finished": result.finished,
                }
                if result.narration_to_speak is not None:
                    message["narration"] = result.narration_to_speak
                session._broadcast(message)
            session._flush_diagnostics()
            return True, None

    def log_text(self, session_id: str) -> str:
        session = self.get(session_id)
        with session.lock:
            return playback.export_log(session.playback)


def event_from_dict(obj: dict, source: str) -> InputEvent:
    kind = obj.get("kind")
    if kind == "transcript":
        return TranscriptEvent(text=str(obj["text"]), source=source)
    if kind == "tap":
        return TapEvent(source=source)
    if kind == "touch":
        pos = obj["position"]
        return TouchEvent(position=Vec3(float(pos[0]), float(pos[1]), float(pos[2])), source=source)
    raise ValueError(f"unknown event kind '{kind}'")


def role_from_dict(obj: dict) -> Role:
    return Role(kind=str(obj.get("kind", "")), name=obj.get("name"))
