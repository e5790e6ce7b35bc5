#!/usr/bin/env python3
"""Record a complete Goodnight Moon session through the engine's external
interfaces (HTTP + WebSocket) into a JSON fixture the frontend tests replay.

The recording pairs every server message with, per scene index, the
simulated device states reported by the preview endpoint, so the store
tests can check the folded room view against the authoritative devices
without talking to a live server.

Regenerate with: npm run record  (the engine package must be installed)
"""

import json
import sys
from pathlib import Path

from fastapi.testclient import TestClient

from loomcast.server import create_app

OUT = Path(__file__).parent.parent / "tests" / "fixtures" / "goodnight_moon_session.json"


def main() -> int:
    app = create_app()
    client = TestClient(app)

    transcript = [
        step["scene"]["narration"]
        for step in client.get("/stories/goodnight_moon").json()["steps"]
    ]

    driver_states = {}
    for k in range(-1, len(transcript)):
        body = client.post("/stories/goodnight_moon/preview", json={"up_to": k}).json()
        driver_states[str(k)] = body["devices"]

    session_id = client.post("/sessions", json={"story_file": "goodnight_moon"}).json()["id"]
    messages = []
    with client.websocket_connect(f"/session/{session_id}") as ws:
        messages.append(ws.receive_json())  # snapshot
        ws.send_json({"type": "claim_role", "role": {"kind": "narrator"}})
        transitions = 0
        while transitions < len(transcript):
            if transitions < len(transcript):
                line = transcript[transitions]
            ws.send_json({"type": "event", "event": {"kind": "transcript", "text": line}})
            while True:
                message = ws.receive_json()
                messages.append(message)
                if message["type"] == "transition":
                    transitions += 1
                    break

    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps({
        "transcript": transcript,
        "messages": messages,
        "driver_states": driver_states,
    }, indent=2) + "\n", encoding="utf-8")
    print(f"wrote {OUT} ({len(messages)} messages)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
