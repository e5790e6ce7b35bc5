"""IR-bridge fan driver over the bridge's local REST API.

The bridge relays infrared commands to fans, so control is action-based:
PUT /v2/devices/{device_id}/actions/{action} with a BOND-Token header,
body {"argument": n} for SetSpeed and {} otherwise. HTTP 200 = success.
"""

from __future__ import annotations

from dataclasses import dataclass

import requests

from ..model import FanState, apply_fan
from .base import (
    DEFAULT_TIMEOUT_S, CommandPayload, DeviceError, FanCommand, ProtocolError, Timeout,
)

TOKEN_HEADER = "BOND-Token"
ACTIONS = ("TurnOn", "TurnOff", "SetSpeed")


class AuthFailed(DeviceError):
    pass


class UnknownDevice(DeviceError):
    pass


@dataclass(frozen=True)
class BridgeExchange:
    """Description of one HTTP exchange against the bridge."""

    method: str
    path: str
    headers: dict
    body: dict

    def url(self, host: str) -> str:
        return f"http://{host}{self.path}"


def bridge_action(device_id: str, action: str, argument: int | None = None,
                  *, token: str = "") -> BridgeExchange:
    """Build the exchange for one action; SetSpeed carries its argument in the body."""
    if action not in ACTIONS:
        raise ValueError(f"unknown bridge action '{action}' (expected one of {ACTIONS})")
    body = {"argument": argument} if action == "SetSpeed" else {}
    return BridgeExchange(
        method="PUT",
        path=f"/v2/devices/{device_id}/actions/{action}",
        headers={TOKEN_HEADER: token},
        body=body,
    )


class BridgeFanDriver:
    """Drives one IR fan through the bridge; keeps a shadow of the last
    commanded state because IR devices cannot report theirs.
    """

    blocking_io = True

    def __init__(self, host: str, device_id: str, token: str = "",
                 timeout: float = DEFAULT_TIMEOUT_S, session=None):
        self.host = host
        self.device_id = device_id
        self.token = token
        self.timeout = timeout
        self._session = session or requests.Session()
        self._shadow = FanState()

    def _send(self, exchange: BridgeExchange) -> None:
        try:
            response = self._session.request(
                exchange.method, exchange.url(self.host),
                headers=exchange.headers, json=exchange.body, timeout=self.timeout)
        except requests.Timeout as e:
            raise Timeout(f"bridge {self.host} did not answer within {self.timeout}s") from e
        if response.status_code == 401:
            raise AuthFailed(f"bridge {self.host} rejected the token")
        if response.status_code == 404:
            raise UnknownDevice(f"bridge has no device '{self.device_id}'")
        if response.status_code != 200:
            raise ProtocolError(f"bridge answered HTTP {response.status_code}")

    def apply(self, payload: CommandPayload) -> dict:
        if not isinstance(payload, FanCommand):
            raise ProtocolError(f"bridge fan cannot apply {type(payload).__name__}")
        target = apply_fan(self._shadow, on=payload.on, intensity=payload.intensity)
        if target.on:
            self._send(bridge_action(self.device_id, "TurnOn", token=self.token))
            if target.intensity != self._shadow.intensity or not self._shadow.on:
                self._send(bridge_action(self.device_id, "SetSpeed", target.intensity, token=self.token))
        else:
            self._send(bridge_action(self.device_id, "TurnOff", token=self.token))
        self._shadow = target
        return self.observed_state()

    def observed_state(self) -> dict:
        return {"on": self._shadow.on, "intensity": self._shadow.intensity}

    def close(self) -> None:
        self._session.close()
