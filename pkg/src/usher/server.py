"""HTTP session service with an ordered server-push event stream.

Inputs arrive as POSTs; output events flow over a long-lived SSE-framed
response per session. Each session runs its turns under a lock so
concurrent posts queue rather than interleave, and the event log replays
from any index for reconnecting subscribers.
"""

from __future__ import annotations

import json
import logging
import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, HTTPException, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, StreamingResponse
from pydantic import BaseModel

from .agent import Agent, SessionClosed, restore_session, snapshot_session
from .catalog import Scenario
from .nlu import ProviderConfig

logger = logging.getLogger(__name__)

MAX_TEXT_LENGTH = 10_000
STREAM_POLL_SECONDS = 0.5


class CreateSessionBody(BaseModel):
    scenarioId: str
    mode: str = "maestro"


class MessageBody(BaseModel):
    text: str


class ActionBody(BaseModel):
    kind: str
    params: dict = {}


@dataclass
class SessionRuntime:
    agent: Agent
    lock: threading.Lock = field(default_factory=threading.Lock)
    changed: threading.Condition = field(default_factory=threading.Condition)

    def notify(self) -> None:
        with self.changed:
            self.changed.notify_all()


@dataclass
class ServerState:
    scenarios: dict[str, Scenario]
    provider: ProviderConfig
    persist_dir: Path | None = None
    sessions: dict[str, SessionRuntime] = field(default_factory=dict)
    registry_lock: threading.Lock = field(default_factory=threading.Lock)


def create_app(scenarios: dict[str, Scenario], provider: ProviderConfig | None = None,
               persist_dir: str | None = None, ui_dir: str | None = None) -> FastAPI:
    state = ServerState(
        scenarios=scenarios,
        provider=provider or ProviderConfig(kind="rules"),
        persist_dir=Path(persist_dir) if persist_dir else None,
    )
    app = FastAPI(title="usher", version="0.1.0")
    app.state.engine = state
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"],
    )

    def runtime_of(session_id: str) -> SessionRuntime:
        runtime = state.sessions.get(session_id)
        if runtime is None:
            raise HTTPException(404, detail={"code": "unknownSession", "sessionId": session_id})
        return runtime

    @app.get("/scenarios")
    def list_scenarios() -> list[dict]:
        return [
            {"id": s.id, "title": s.title, "brief": s.brief,
             "stages": [{"id": st.id, "title": st.title, "uiKind": st.ui_kind}
                        for st in s.workflow.stages]}
            for s in sorted(state.scenarios.values(), key=lambda s: s.id)
        ]

    @app.post("/sessions")
    def create_session(body: CreateSessionBody) -> dict:
        scenario = state.scenarios.get(body.scenarioId)
        if scenario is None:
            raise HTTPException(404, detail={"code": "unknownScenario",
                                             "scenarioId": body.scenarioId})
        if body.mode not in ("maestro", "baseline"):
            raise HTTPException(422, detail={"code": "badMode", "mode": body.mode})
        session_id = uuid.uuid4().hex[:12]
        agent = Agent.create(scenario, session_id=session_id, mode=body.mode,
                             provider=state.provider)
        runtime = SessionRuntime(agent=agent)
        with state.registry_lock:
            state.sessions[session_id] = runtime
        runtime.notify()
        return {"sessionId": session_id, "scenarioId": scenario.id, "mode": body.mode}

    @app.post("/sessions/{session_id}/message")
    def post_message(session_id: str, body: MessageBody) -> dict:
        if len(body.text) > MAX_TEXT_LENGTH:
            raise HTTPException(413, detail={"code": "oversizedPayload"})
        runtime = runtime_of(session_id)
        with runtime.lock:
            try:
                events = runtime.agent.handle_user_message(body.text)
            except SessionClosed:
                raise HTTPException(409, detail={"code": "sessionSubmitted"})
        runtime.notify()
        return {"ok": True, "events": len(events),
                "lastIndex": len(runtime.agent.session.event_log) - 1}

    @app.post("/sessions/{session_id}/action")
    def post_action(session_id: str, body: ActionBody) -> dict:
        runtime = runtime_of(session_id)
        with runtime.lock:
            try:
                events = runtime.agent.handle_gui_action(
                    body.kind,
                    option_id=body.params.get("optionId"),
                    target_stage=body.params.get("targetStage"),
                )
            except SessionClosed:
                raise HTTPException(409, detail={"code": "sessionSubmitted"})
        runtime.notify()
        return {"ok": True, "events": len(events),
                "lastIndex": len(runtime.agent.session.event_log) - 1}

    @app.get("/sessions/{session_id}/events")
    def subscribe_events(session_id: str, request: Request,
                         fromIndex: int = 0, follow: bool = True):
        runtime = runtime_of(session_id)
        start = fromIndex if fromIndex >= 0 else 0

        def stream():
            cursor = start
            while True:
                log = runtime.agent.session.event_log
                while cursor < len(log):
                    event = log[cursor]
                    payload = json.dumps(event.to_dict(), sort_keys=True)
                    yield f"id: {event.index}\nevent: {event.kind}\ndata: {payload}\n\n"
                    cursor += 1
                if not follow:
                    return
                if runtime.agent.session.submitted and cursor >= len(log):
                    yield "event: end\ndata: {}\n\n"
                    return
                with runtime.changed:
                    runtime.changed.wait(timeout=STREAM_POLL_SECONDS)

        return StreamingResponse(stream(), media_type="text/event-stream", headers={
            "Cache-Control": "no-cache",
            "X-Accel-Buffering": "no",
        })

    @app.get("/sessions/{session_id}/state")
    def get_state(session_id: str) -> dict:
        runtime = runtime_of(session_id)
        with runtime.lock:
            return snapshot_session(runtime.agent.session)

    @app.post("/sessions/{session_id}/snapshot")
    def save_snapshot(session_id: str) -> dict:
        runtime = runtime_of(session_id)
        if state.persist_dir is None:
            raise HTTPException(409, detail={"code": "persistenceDisabled"})
        state.persist_dir.mkdir(parents=True, exist_ok=True)
        with runtime.lock:
            doc = snapshot_session(runtime.agent.session)
        path = state.persist_dir / f"{session_id}.json"
        path.write_text(json.dumps(doc, sort_keys=True, indent=1))
        return {"ok": True, "path": str(path)}

    @app.post("/sessions/restore")
    def restore(doc: dict) -> dict:
        scenario = state.scenarios.get(doc.get("scenarioId", ""))
        if scenario is None:
            raise HTTPException(404, detail={"code": "unknownScenario"})
        try:
            session = restore_session(doc, scenario)
        except (KeyError, ValueError) as exc:
            raise HTTPException(422, detail={"code": "badSnapshot", "error": str(exc)})
        runtime = SessionRuntime(agent=Agent(session, provider=state.provider))
        with state.registry_lock:
            if session.session_id in state.sessions:
                raise HTTPException(409, detail={"code": "sessionExists"})
            state.sessions[session.session_id] = runtime
        return {"sessionId": session.session_id}

    @app.exception_handler(HTTPException)
    async def http_error(request: Request, exc: HTTPException):
        detail = exc.detail if isinstance(exc.detail, dict) else {"code": str(exc.detail)}
        return JSONResponse(status_code=exc.status_code, content={"error": detail})

    if ui_dir:
        from fastapi.staticfiles import StaticFiles
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
