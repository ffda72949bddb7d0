"""HTTP + websocket API over the session manager."""

from __future__ import annotations

from fastapi import FastAPI, HTTPException, WebSocket, WebSocketDisconnect

from .errors import (
    EngineError,
    NotPending,
    OutOfRoom,
    PendingTurnExists,
    UnknownSession,
)
from .pose import UserPose
from .session import Session, SessionManager, Turn

_STATUS = {
    UnknownSession: 404,
    PendingTurnExists: 409,
    NotPending: 409,
    OutOfRoom: 422,
}


def turn_doc(turn: Turn) -> dict:
    doc = turn.to_doc()
    doc.pop("snapshotBefore", None)
    doc.pop("snapshotAfter", None)
    return doc


def create_app(manager: SessionManager | None = None) -> FastAPI:
    from fastapi.middleware.cors import CORSMiddleware

    manager = manager or SessionManager()
    app = FastAPI(title="roomscript service")
    app.state.manager = manager
    # the companion browser client is served from a different origin
    app.add_middleware(CORSMiddleware, allow_origins=["*"], allow_methods=["*"],
                       allow_headers=["*"])

    def _session(sid: str) -> Session:
        try:
            return manager.get(sid)
        except UnknownSession as exc:
            raise HTTPException(404, exc.message) from exc

    def _guard(fn):
        try:
            return fn()
        except EngineError as exc:
            raise HTTPException(_STATUS.get(type(exc), 400),
                                {"code": exc.code, "message": str(exc)}) from exc

    @app.post("/sessions")
    def create_session(body: dict | None = None):
        body = body or {}
        session = manager.create_session(
            planner_mode=body.get("plannerMode"),
            auto_confirm=body.get("autoConfirm"),
            initial_scene=body.get("initialScene"),
        )
        return {"sessionId": session.id, "state": session.state_doc()}

    @app.post("/sessions/{sid}/prompt")
    def submit_prompt(sid: str, body: dict):
        session = _session(sid)
        turn = _guard(lambda: session.submit_prompt(
            body["text"],
            token_timestamps=body.get("tokenTimestamps"),
            gestures=body.get("gestures"),
            prompt_start_ms=body.get("promptStartMs"),
        ))
        return turn_doc(turn)

    @app.post("/sessions/{sid}/confirm")
    def confirm(sid: str, body: dict):
        session = _session(sid)
        turn = _guard(lambda: session.confirm(int(body["turnIndex"])))
        return turn_doc(turn)

    @app.post("/sessions/{sid}/abort")
    def abort(sid: str, body: dict):
        session = _session(sid)
        turn = _guard(lambda: session.abort(int(body["turnIndex"])))
        return turn_doc(turn)

    @app.post("/sessions/{sid}/pose")
    def update_pose(sid: str, body: dict):
        session = _session(sid)
        grab = body.get("grab", "__keep__")
        _guard(lambda: session.update_pose(UserPose.from_doc(body["pose"]), grab=grab))
        return {"ok": True}

    @app.post("/sessions/{sid}/gesture")
    def append_gesture(sid: str, body: dict):
        session = _session(sid)
        _guard(lambda: session.append_gesture(body["sample"]))
        return {"ok": True}

    @app.post("/sessions/{sid}/ticks")
    def run_ticks(sid: str, body: dict | None = None):
        session = _session(sid)
        body = body or {}
        reports = _guard(lambda: session.run_ticks(int(body.get("n", 1)),
                                                   grab=body.get("grab", "__keep__")))
        return {"reports": reports}

    @app.post("/sessions/{sid}/fault")
    def inject_fault(sid: str, body: dict):
        session = _session(sid)
        turn = _guard(lambda: session.inject_fault(body["sets"]))
        return turn_doc(turn)

    @app.get("/sessions/{sid}/state")
    def get_state(sid: str):
        return _session(sid).state_doc()

    @app.get("/sessions/{sid}/history")
    def get_history(sid: str):
        return {"turns": _session(sid).history_doc()}

    @app.get("/sessions/{sid}/events")
    def get_events(sid: str, since: int = 0):
        return {"events": _session(sid).events_since(since)}

    @app.websocket("/sessions/{sid}/stream")
    async def stream(ws: WebSocket, sid: str):
        await ws.accept()
        try:
            session = manager.get(sid)
        except UnknownSession:
            await ws.close(code=4004)
            return
        seq = 0
        import anyio

        try:
            while True:
                events = session.events_since(seq)
                if events:
                    for event in events:
                        await ws.send_json(event)
                    seq = events[-1]["seq"] + 1
                else:
                    await anyio.sleep(0.05)
        except (WebSocketDisconnect, RuntimeError):
            return

    return app
