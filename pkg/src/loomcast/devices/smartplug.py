"""Smart-plug/light driver over the local autokey-XOR TCP protocol.

Wire format: a 4-byte big-endian length prefix followed by the payload
encrypted with a rolling-key XOR (initial key byte 171; each ciphertext
byte becomes the next key byte). Payloads are UTF-8 JSON command documents:

    {"set_state": {"on": true, "brightness_pct": 20, "hue_deg": 60, "effect": null}}
    {"get_state": {}}

Replies: {"ok": true, "state": {...}} or {"ok": false, "error": "..."}.
Absent fields are unchanged; an explicit null clears the effect. The
default TCP port is 9999.
"""

from __future__ import annotations

import json
import socket
import socketserver
import struct
import threading

from ..model import UNSET, LightState, apply_light
from .base import (
    DEFAULT_TIMEOUT_S, CommandPayload, LightCommand, ProtocolError, Timeout,
)

INITIAL_KEY = 171
PLUG_PORT = 9999


class ShortFrame(ProtocolError):
    pass


def autokey_encrypt(plaintext: bytes) -> bytes:
    key = INITIAL_KEY
    out = bytearray()
    for byte in plaintext:
        key = byte ^ key
        out.append(key)
    return bytes(out)


def autokey_decrypt(cipher: bytes) -> bytes:
    key = INITIAL_KEY
    out = bytearray()
    for byte in cipher:
        out.append(byte ^ key)
        key = byte
    return bytes(out)


def frame_tcp(payload: bytes) -> bytes:
    """Length-prefix and encrypt one payload for the wire."""
    if len(payload) >= 2 ** 32:
        raise ValueError("payload too large for a 4-byte length prefix")
    return struct.pack(">I", len(payload)) + autokey_encrypt(payload)


def parse_frame(buf: bytes) -> tuple[bytes, bytes]:
    """Parse exactly one frame; returns (decrypted payload, remainder)."""
    if len(buf) < 4:
        raise ShortFrame(f"need 4 length bytes, have {len(buf)}")
    (length,) = struct.unpack(">I", buf[:4])
    if len(buf) < 4 + length:
        raise ShortFrame(f"frame announces {length} bytes, only {len(buf) - 4} present")
    return autokey_decrypt(buf[4:4 + length]), buf[4 + length:]


def _recv_exact(sock: socket.socket, n: int) -> bytes:
    chunks = bytearray()
    while len(chunks) < n:
        part = sock.recv(n - len(chunks))
        if not part:
            raise ShortFrame(f"connection closed after {len(chunks)}/{n} bytes")
        chunks.extend(part)
    return bytes(chunks)


def _payload_doc(payload: LightCommand) -> dict:
    fields: dict = {}
    if payload.on is not None:
        fields["on"] = payload.on
    if payload.brightness_pct is not None:
        fields["brightness_pct"] = payload.brightness_pct
    if payload.hue_deg is not None:
        fields["hue_deg"] = payload.hue_deg
    if not isinstance(payload.effect, type(UNSET)):
        fields["effect"] = payload.effect
    return {"set_state": fields}


class SmartPlugDriver:
    """Client for one plug/bulb; one connection per exchange, commands FIFO."""

    blocking_io = True

    def __init__(self, host: str, port: int = PLUG_PORT, timeout: float = DEFAULT_TIMEOUT_S,
                 transport=None):
        self.host = host
        self.port = port
        self.timeout = timeout
        self._transport = transport  # injectable: bytes -> bytes, for record/replay
        self._lock = threading.Lock()
        self._last_state: dict = {}

    def _exchange(self, request: bytes) -> bytes:
        if self._transport is not None:
            return self._transport(request)
        try:
            with socket.create_connection((self.host, self.port), timeout=self.timeout) as sock:
                sock.sendall(request)
                header = _recv_exact(sock, 4)
                (length,) = struct.unpack(">I", header)
                body = _recv_exact(sock, length)
                return header + body
        except socket.timeout as e:
            raise Timeout(f"{self.host}:{self.port} did not answer within {self.timeout}s") from e

    def _roundtrip(self, doc: dict) -> dict:
        request = frame_tcp(json.dumps(doc).encode("utf-8"))
        with self._lock:
            raw = self._exchange(request)
        payload, _ = parse_frame(raw)
        try:
            reply = json.loads(payload.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as e:
            raise ProtocolError(f"malformed device reply: {e}") from None
        if not isinstance(reply, dict) or "ok" not in reply:
            raise ProtocolError(f"malformed device reply: {reply!r}")
        if not reply["ok"]:
            raise ProtocolError(f"device rejected command: {reply.get('error', 'unknown error')}")
        return reply.get("state", {})

    def apply(self, payload: CommandPayload) -> dict:
        if not isinstance(payload, LightCommand):
            raise ProtocolError(f"smart plug cannot apply {type(payload).__name__}")
        self._last_state = self._roundtrip(_payload_doc(payload))
        return dict(self._last_state)

    def observed_state(self) -> dict:
        self._last_state = self._roundtrip({"get_state": {}})
        return dict(self._last_state)

    def close(self) -> None:
        pass


class SmartPlugSimulator(socketserver.ThreadingTCPServer):
    """Loopback plug speaking the real wire protocol over a simulated light.

    Lets `play --devices` demos and the protocol tests exercise the exact
    TCP path with zero hardware.
    """

    allow_reuse_address = True
    daemon_threads = True

    def __init__(self, host: str = "127.0.0.1", port: int = 0):
        self.light = LightState()
        self._state_lock = threading.Lock()
        super().__init__((host, port), _SimulatorHandler)

    @property
    def address(self) -> tuple[str, int]:
        return self.server_address[0], self.server_address[1]

    def handle_doc(self, doc: dict) -> dict:
        with self._state_lock:
            if "set_state" in doc:
                fields = doc["set_state"]
                self.light = apply_light(
                    self.light,
                    on=fields.get("on"),
                    brightness_pct=fields.get("brightness_pct"),
                    hue_deg=fields.get("hue_deg"),
                    effect=fields.get("effect") if "effect" in fields else UNSET,
                )
            elif "get_state" not in doc:
                return {"ok": False, "error": f"unknown command {sorted(doc)}"}
            state = {"on": self.light.on, "brightness_pct": self.light.brightness_pct,
                     "hue_deg": self.light.hue_deg, "effect": self.light.effect}
        return {"ok": True, "state": state}

    def start_background(self) -> threading.Thread:
        thread = threading.Thread(target=self.serve_forever, daemon=True)
        thread.start()
        return thread


class _SimulatorHandler(socketserver.BaseRequestHandler):
    server: SmartPlugSimulator

    def handle(self) -> None:
        try:
            header = _recv_exact(self.request, 4)
            (length,) = struct.unpack(">I", header)
            body = _recv_exact(self.request, length)
        except ShortFrame:
            return
        payload, _ = parse_frame(header + body)
        try:
            doc = json.loads(payload.decode("utf-8"))
            reply = self.server.handle_doc(doc)
        except (UnicodeDecodeError, json.JSONDecodeError):
            reply = {"ok": False, "error": "malformed request"}
        self.request.sendall(frame_tcp(json.dumps(reply).encode("utf-8")))
