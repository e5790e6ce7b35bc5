from .base import (
    Ack, CommandPayload, DeviceCommand, DeviceError, DeviceRegistry, DriverUnavailable,
    FanCommand, LightCommand, ProtocolError, SpeakerCommand, Timeout, Unbound,
    full_state_payload, load_device_map, payload_from_cue, registry_from_map,
    simulated_registry,
)
from .bridge import AuthFailed, BridgeExchange, BridgeFanDriver, UnknownDevice, bridge_action
from .simulated import LocalSpeakerDriver, SimulatedFan, SimulatedLight, SimulatedSpeaker
from .smartplug import (
    ShortFrame, SmartPlugDriver, SmartPlugSimulator, autokey_decrypt, autokey_encrypt,
    frame_tcp, parse_frame,
)

__all__ = [
    "Ack", "AuthFailed", "BridgeExchange", "BridgeFanDriver", "CommandPayload",
    "DeviceCommand", "DeviceError", "DeviceRegistry", "DriverUnavailable", "FanCommand",
    "LightCommand", "LocalSpeakerDriver", "ProtocolError", "ShortFrame", "SimulatedFan",
    "SimulatedLight", "SimulatedSpeaker", "SmartPlugDriver", "SmartPlugSimulator",
    "SpeakerCommand", "Timeout", "Unbound", "UnknownDevice", "autokey_decrypt",
    "autokey_encrypt", "bridge_action", "frame_tcp", "full_state_payload",
    "load_device_map", "parse_frame", "payload_from_cue", "registry_from_map",
    "simulated_registry",
]
