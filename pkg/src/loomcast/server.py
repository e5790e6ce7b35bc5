"""HTTP + WebSocket service: session playback and the authoring API.

Endpoints:
    POST /sessions {"story_file": path-or-fixture-name} | {"story": document} -> {"id"}
    GET  /sessions/{id}/log                  newline-delimited transition records
    WS   /session/{id}                       session protocol (snapshot/roles/transitions)
    GET  /stories                            story ids + titles
    GET  /stories/{id}                       canonical story document
    PUT  /stories/{id}                       create or replace a story
    POST /stories/{id}/edits                 apply one EditCommand document
    POST /stories/{id}/preview {"up_to": k}  fold + simulated device states
"""

from __future__ import annotations

import asyncio
import json
import logging
import os
import uuid
from contextlib import asynccontextmanager

from fastapi import FastAPI, HTTPException, WebSocket, WebSocketDisconnect
from fastapi.responses import PlainTextResponse

from . import authoring, model, storyfile
from .model import IndexOutOfRange, Story
from .session import SessionHub, UnknownSession, event_from_dict, role_from_dict

log = logging.getLogger(__name__)


class StoryStore:
    """In-memory revision store; the newest revision is the visible one."""

    def __init__(self) -> None:
        self._revisions: dict[str, list[Story]] = {}

    def put(self, story_id: str, story: Story) -> None:
        self._revisions.setdefault(story_id, []).append(story)

    def get(self, story_id: str) -> Story:
        try:
            return self._revisions[story_id][-1]
        except KeyError:
            raise KeyError(story_id) from None

    def ids(self) -> list[str]:
        return list(self._revisions)


def _resolve_story(payload: dict, store: StoryStore) -> Story:
    if "story" in payload:
        return storyfile.parse_story(
            json.dumps(payload["story"]), strict=False)
    name = payload.get("story_file")
    if not name:
        raise HTTPException(status_code=422, detail="need 'story_file' or 'story'")
    if name in authoring.FIXTURE_NAMES:
        return authoring.build_fixture(name)
    try:
        return store.get(name)
    except KeyError:
        pass
    if not os.path.exists(name):
        raise HTTPException(status_code=404, detail=f"story file '{name}' not found")
    try:
        return storyfile.load_story(name)
    except storyfile.StoryFormatError as e:
        raise HTTPException(status_code=422, detail=str(e))


def create_app(registry_factory=None, *, seed_fixtures: bool = True,
               ui_dir: str | None = None) -> FastAPI:
    hub = SessionHub(**({"registry_factory": registry_factory} if registry_factory else {}))
    store = StoryStore()

    @asynccontextmanager
    async def lifespan(_app: FastAPI):
        yield
        # Graceful shutdown flushes every session's transition log.
        for session_id in hub.ids():
            text = hub.log_text(session_id)
            if text:
                log.info("session %s transition log:\n%s", session_id, text)

    app = FastAPI(title="loomcast", version="0.1.0", lifespan=lifespan)
    app.state.hub = hub
    app.state.store = store

    if seed_fixtures:
        for name in authoring.FIXTURE_NAMES:
            store.put(name, authoring.build_fixture(name))

    @app.post("/sessions")
    def create_session(payload: dict) -> dict:
        story = _resolve_story(payload, store)
        issues = model.validate_story(story)
        if model.has_errors(issues):
            raise HTTPException(status_code=422, detail=[str(i) for i in issues])
        return {"id": hub.create(story)}

    @app.get("/sessions/{session_id}/log")
    def session_log(session_id: str) -> PlainTextResponse:
        try:
            return PlainTextResponse(hub.log_text(session_id))
        except UnknownSession:
            raise HTTPException(status_code=404, detail="unknown session")

    @app.websocket("/session/{session_id}")
    async def session_ws(websocket: WebSocket, session_id: str) -> None:
        await websocket.accept()
        client_id = uuid.uuid4().hex[:8]
        loop = asyncio.get_running_loop()
        outbox: asyncio.Queue = asyncio.Queue()

        def send(message: dict) -> None:
            loop.call_soon_threadsafe(outbox.put_nowait, message)

        try:
            hub.join(session_id, client_id, send)
        except UnknownSession:
            await websocket.close(code=4404, reason="unknown session")
            return

        async def pump() -> None:
            while True:
                await websocket.send_json(await outbox.get())

        pump_task = asyncio.create_task(pump())
        try:
            while True:
                message = await websocket.receive_json()
                mtype = message.get("type")
                if mtype == "claim_role":
                    hub.claim_role(session_id, client_id, role_from_dict(message.get("role", {})))
                elif mtype == "event":
                    try:
                        event = event_from_dict(message.get("event", {}), source=client_id)
                    except (ValueError, KeyError, IndexError, TypeError) as e:
                        send({"type": "diagnostic", "seq": -1, "text": f"bad event: {e}"})
                        continue
                    accepted, reason = hub.submit_event(session_id, client_id, event)
                    if not accepted:
                        send({"type": "rejected", "seq": -1, "reason": reason})
                else:
                    send({"type": "diagnostic", "seq": -1, "text": f"unknown message type '{mtype}'"})
        except WebSocketDisconnect:
            pass
        finally:
            pump_task.cancel()
            hub.leave(session_id, client_id)

    @app.get("/stories")
    def list_stories() -> list[dict]:
        out = []
        for story_id in store.ids():
            story = store.get(story_id)
            out.append({"id": story_id, "title": story.title, "steps": len(story.steps)})
        return out

    @app.get("/stories/{story_id}")
    def get_story(story_id: str) -> dict:
        try:
            return storyfile.story_as_document(store.get(story_id))
        except KeyError:
            raise HTTPException(status_code=404, detail="unknown story")

    @app.put("/stories/{story_id}")
    def put_story(story_id: str, document: dict) -> dict:
        try:
            story = storyfile.parse_story(json.dumps(document), strict=False)
        except storyfile.StoryFormatError as e:
            raise HTTPException(status_code=422, detail=str(e))
        store.put(story_id, story)
        return {"id": story_id, "steps": len(story.steps)}

    @app.post("/stories/{story_id}/edits")
    def post_edit(story_id: str, command: dict) -> dict:
        is_create = command.get("op") == "create_story"
        base: Story | None = None
        if not is_create:
            try:
                base = store.get(story_id)
            except KeyError:
                raise HTTPException(status_code=404, detail="unknown story")
        try:
            edit = authoring.decode_edit(command)
            revised = authoring.apply_edit(base, edit)
        except authoring.ValidationRejected as e:
            raise HTTPException(status_code=422, detail=[str(i) for i in e.issues])
        except (authoring.UnknownAsset, IndexOutOfRange, KeyError, ValueError,
                storyfile.StoryFormatError) as e:
            raise HTTPException(status_code=422, detail=str(e))
        store.put(story_id, revised)
        return storyfile.story_as_document(revised)

    @app.post("/stories/{story_id}/preview")
    def post_preview(story_id: str, payload: dict) -> dict:
        try:
            story = store.get(story_id)
        except KeyError:
            raise HTTPException(status_code=404, detail="unknown story")
        up_to = int(payload.get("up_to", -1))
        try:
            session = authoring.preview(story, up_to)
        except IndexOutOfRange as e:
            raise HTTPException(status_code=422, detail=str(e))
        return {
            "cursor": session.cursor,
            "world": model.world_as_dict(session.world),
            "devices": session.drivers.states(),
        }

    if ui_dir:
        from fastapi.staticfiles import StaticFiles

        # Mounted last so the API and WebSocket routes win.
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
