"""Uniform device abstraction: commands, acknowledgements, and the registry.

A registry binds each declared device to a driver: simulated (in-memory),
smart-plug/light over the autokey-XOR TCP protocol, IR-bridge fan over a
local REST API, or a local speaker. The simulated fallback makes any story
runnable with zero hardware.
"""

from __future__ import annotations

import json
import logging
import os
import queue
import threading
from dataclasses import dataclass, field
from typing import Callable, Protocol, Union

from ..model import UNSET, DeviceCue, DeviceKind, DeviceDecl, _Unset

log = logging.getLogger(__name__)

DEFAULT_TIMEOUT_S = 2.0
ENV_DEVICE_MAP = "LOOMCAST_DEVICE_MAP"
ENV_BRIDGE_TOKEN = "LOOMCAST_BRIDGE_TOKEN"


class DeviceError(Exception):
    pass


class Unbound(DeviceError):
    pass


class DriverUnavailable(DeviceError):
    pass


class Timeout(DeviceError):
    pass


class ProtocolError(DeviceError):
    pass


# Sparse command payloads; None (or UNSET for clearable names) = leave alone.


@dataclass(frozen=True)
class LightCommand:
    on: bool | None = None
    brightness_pct: int | None = None
    hue_deg: int | None = None
    effect: str | None | _Unset = UNSET


@dataclass(frozen=True)
class FanCommand:
    on: bool | None = None
    intensity: int | None = None


@dataclass(frozen=True)
class SpeakerCommand:
    on: bool | None = None
    volume_pct: int | None = None
    sound: str | None | _Unset = UNSET
    say: str | None = None  # text-to-speech; requires the driver's say capability


CommandPayload = Union[LightCommand, FanCommand, SpeakerCommand]


@dataclass(frozen=True)
class DeviceCommand:
    target: str
    payload: CommandPayload


@dataclass(frozen=True)
class Ack:
    device: str
    ok: bool
    state: dict = field(default_factory=dict)  # post-command observed state
    error: str | None = None


class Driver(Protocol):
    def apply(self, payload: CommandPayload) -> dict: ...

    def observed_state(self) -> dict: ...

    def close(self) -> None: ...


def payload_from_cue(cue: DeviceCue) -> CommandPayload:
    """Typed sparse payload from a scene-diff device cue."""
    ch = cue.changes
    if cue.kind == DeviceKind.LIGHT:
        return LightCommand(on=ch.get("on"), brightness_pct=ch.get("brightness_pct"),
                            hue_deg=ch.get("hue_deg"), effect=ch.get("effect", UNSET))
    if cue.kind == DeviceKind.FAN:
        return FanCommand(on=ch.get("on"), intensity=ch.get("intensity"))
    return SpeakerCommand(on=ch.get("on"), volume_pct=ch.get("volume_pct"),
                          sound=ch.get("sound", UNSET))


def full_state_payload(kind: DeviceKind, state) -> CommandPayload:
    """Payload that forces a device to an exact resolved state (used on jumps)."""
    if kind == DeviceKind.LIGHT:
        return LightCommand(on=state.on, brightness_pct=state.brightness_pct,
                            hue_deg=state.hue_deg, effect=state.effect)
    if kind == DeviceKind.FAN:
        return FanCommand(on=state.on, intensity=state.intensity)
    return SpeakerCommand(on=state.on, volume_pct=state.volume_pct, sound=state.sound)


class DeviceRegistry:
    """Binds device refs to drivers and funnels commands to them."""

    def __init__(self) -> None:
        self._drivers: dict[str, Driver] = {}

    def bind(self, ref: str, driver: Driver) -> None:
        self._drivers[ref] = driver

    def driver(self, ref: str) -> Driver:
        try:
            return self._drivers[ref]
        except KeyError:
            raise Unbound(f"device '{ref}' has no driver binding") from None

    def is_bound(self, ref: str) -> bool:
        return ref in self._drivers

    def ensure_bound(self, decls: tuple[DeviceDecl, ...]) -> None:
        missing = [d.id for d in decls if d.id not in self._drivers]
        if missing:
            raise DriverUnavailable(f"no driver for device(s): {', '.join(missing)}")

    def apply(self, command: DeviceCommand) -> Ack:
        driver = self.driver(command.target)
        state = driver.apply(command.payload)
        return Ack(device=command.target, ok=True, state=state)

    def states(self) -> dict[str, dict]:
        return {ref: drv.observed_state() for ref, drv in self._drivers.items()}

    def close(self) -> None:
        for drv in self._drivers.values():
            drv.close()


class CommandDispatcher:
    """Per-device FIFO command dispatch.

    Drivers that do network I/O (blocking_io = True) execute on one worker
    thread per device, so the playback loop never blocks on a slow or dead
    device; in-memory drivers apply inline. Failures are reported through
    the diagnostics callback, never raised into the loop.
    """

    def __init__(self, registry: DeviceRegistry,
                 on_diagnostic: Callable[[str], None] | None = None):
        self.registry = registry
        self._on_diagnostic = on_diagnostic or (lambda text: None)
        self._queues: dict[str, queue.Queue] = {}

    def dispatch(self, command: DeviceCommand) -> None:
        try:
            driver = self.registry.driver(command.target)
        except Unbound as e:
            self._on_diagnostic(str(e))
            return
        if not getattr(driver, "blocking_io", False):
            self._apply(command)
            return
        q = self._queues.get(command.target)
        if q is None:
            q = queue.Queue()
            self._queues[command.target] = q
            worker = threading.Thread(target=self._worker, args=(q,), daemon=True,
                                      name=f"loomcast-device-{command.target}")
            worker.start()
        q.put(command)

    def _apply(self, command: DeviceCommand) -> None:
        try:
            self.registry.apply(command)
        except DeviceError as e:
            note = f"device '{command.target}': {e}"
            self._on_diagnostic(note)
            log.warning("continuing despite %s", note)

    def _worker(self, q: queue.Queue) -> None:
        while True:
            command = q.get()
            if command is None:
                return
            try:
                self._apply(command)
            finally:
                q.task_done()

    def drain(self) -> None:
        """Block until every queued command has been attempted."""
        for q in self._queues.values():
            q.join()

    def close(self) -> None:
        for q in self._queues.values():
            q.put(None)


def simulated_registry(story) -> DeviceRegistry:
    """Bind every declared device to an in-memory simulated driver."""
    from .simulated import SimulatedFan, SimulatedLight, SimulatedSpeaker

    registry = DeviceRegistry()
    for decl in story.devices:
        if decl.kind == DeviceKind.LIGHT:
            registry.bind(decl.id, SimulatedLight())
        elif decl.kind == DeviceKind.FAN:
            registry.bind(decl.id, SimulatedFan())
        else:
            registry.bind(decl.id, SimulatedSpeaker())
    return registry


def load_device_map(path: str | None = None) -> dict:
    """Read a device map file ({ref: {driver, host, ...}}); env var fallback."""
    path = path or os.environ.get(ENV_DEVICE_MAP)
    if not path:
        return {}
    with open(path, "r", encoding="utf-8") as fh:
        mapping = json.load(fh)
    if not isinstance(mapping, dict):
        raise DeviceError(f"device map {path} must be a JSON object")
    return mapping


def registry_from_map(story, mapping: dict, *, default_fallback: bool = False) -> DeviceRegistry:
    """Build a registry from a device map; unmapped devices fall back to
    simulated drivers only when allowed (per-binding flag or default_fallback).
    """
    from .bridge import BridgeFanDriver
    from .simulated import LocalSpeakerDriver, SimulatedFan, SimulatedLight, SimulatedSpeaker
    from .smartplug import SmartPlugDriver

    registry = DeviceRegistry()
    for decl in story.devices:
        binding = mapping.get(decl.id)
        if binding is None:
            if default_fallback:
                sim = {DeviceKind.LIGHT: SimulatedLight, DeviceKind.FAN: SimulatedFan,
                       DeviceKind.SPEAKER: SimulatedSpeaker}[decl.kind]
                registry.bind(decl.id, sim())
                continue
            raise DriverUnavailable(f"device '{decl.id}' not in device map and fallback disabled")
        kind = binding.get("driver", "simulated")
        timeout = float(binding.get("timeout_s", DEFAULT_TIMEOUT_S))
        if kind == "simulated" or binding.get("fallback_simulated"):
            sim = {DeviceKind.LIGHT: SimulatedLight, DeviceKind.FAN: SimulatedFan,
                   DeviceKind.SPEAKER: SimulatedSpeaker}[decl.kind]
            registry.bind(decl.id, sim())
        elif kind == "smartplug":
            registry.bind(decl.id, SmartPlugDriver(
                host=binding["host"], port=int(binding.get("port", 9999)), timeout=timeout))
        elif kind == "bridge":
            token = binding.get("token") or os.environ.get(ENV_BRIDGE_TOKEN, "")
            registry.bind(decl.id, BridgeFanDriver(
                host=binding["host"], device_id=binding["device_id"], token=token, timeout=timeout))
        elif kind == "speaker":
            registry.bind(decl.id, LocalSpeakerDriver())
        else:
            raise DeviceError(f"unknown driver kind '{kind}' for device '{decl.id}'")
    return registry
