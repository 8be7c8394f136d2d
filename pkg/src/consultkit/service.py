"""Local session service: drive the pipeline turn-by-turn over HTTP and
push incremental updates to subscribed clients.

Each session owns one engine; turns are serialized per session with a
lock, and every TurnUpdate mirrors exactly the trace records appended for
that turn. The push channel at /sessions/{id}/updates is server-sent
events carrying the same JSON bodies.
"""

from __future__ import annotations

import asyncio
import json
import threading
import uuid
from dataclasses import dataclass

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, PlainTextResponse, StreamingResponse

from .errors import DuplicateTurn, InvalidConfig, PipelineError, SessionClosed, UnknownSession
from .harness.cases import PilotCase, SuiteResources, bundled_suite_path
from .harness.config import RunConfig
from .harness.engine import TurnEngine, TurnResult
from .report_replay import generate_report
from .stream import ROLES


@dataclass
class SessionHandle:
    session_id: str
    case_id: str
    status: str  # open | concluded | aborted
    turn: int

    def to_dict(self) -> dict:
        return {"session_id": self.session_id, "case_id": self.case_id,
                "status": self.status, "turn": self.turn}


def turn_update_payload(result: TurnResult) -> dict:
    """The wire shape of one processed turn; mirrors the trace records."""
    return {
        "turn": result.turn,
        "role": result.role,
        "text": result.text,
        "utterances": [
            {"role": u.role, "text": u.text, "terminal_mark": u.terminal_mark,
             "boundary_prob": u.boundary_prob, "start_seq": u.start_seq, "end_seq": u.end_seq}
            for u in result.utterances
        ],
        "events": [e.to_dict() for e in result.events],
        "belief": {
            "raw": result.belief_raw.dist.tolist(),
            "fused": result.belief_fused.dist.tolist(),
            "smoothed": result.belief_smoothed.dist.tolist(),
            "temperature": result.t_t,
        },
        "gaps": [{"kind": g.kind, "target": g.target, "priority": g.priority}
                 for g in result.gaps],
        "candidates": [
            {"action_id": c.action_id, "kind": c.kind, "target": c.target,
             "prompt_text": c.prompt_text,
             "eig": s.eig, "h_bar": s.h_bar, "v": s.v}
            for c, s in zip(result.candidates, result.scores)
        ],
        "selected_action": (
            {"action_id": result.selected.action_id, "kind": result.selected.kind,
             "target": result.selected.target, "prompt_text": result.selected.prompt_text,
             "eig": result.selected_score.eig if result.selected_score else None,
             "anchors": [a.to_dict() for _o, _s, a in result.retrieval[:3]]}
            if result.selected else None
        ),
        "retrieval": [
            {"object_id": oid, "score": score, "anchor": anchor.to_dict()}
            for oid, score, anchor in result.retrieval
        ],
    }


class Session:
    def __init__(self, session_id: str, engine: TurnEngine, case: PilotCase):
        self.handle = SessionHandle(session_id=session_id, case_id=case.case_id,
                                    status="open", turn=0)
        self.engine = engine
        self.case = case
        self.lock = threading.Lock()
        self.updates: list[dict] = []
        self.subscribers: list[asyncio.Queue] = []
        self.final_report = None

    def snapshot(self) -> dict:
        engine = self.engine
        state_slots = {
            fid: {"value": ev.value, "polarity": ev.polarity, "temporal": ev.temporal,
                  "source_turn": ev.source_turn}
            for fid, ev in sorted(engine.state.slots.items())
        }
        belief = engine.belief
        if self.final_report is not None:
            report = self.final_report
        else:
            risks = [
                {"risk_id": c.risk_id,
                 "status": "closed" if c.risk_id in engine.closed_risks else "open",
                 "closing_action": engine.closing_actions.get(c.risk_id), "anchors": []}
                for c in engine.case.goal.risk_checks if c.risk_id in engine.triggered_turns
            ]
            report = generate_report(engine.state, risks, engine.res.schema,
                                     engine.case.case_id, engine.turn)
        gaps = self.updates[-1]["gaps"] if self.updates else []
        return {
            "session": self.handle.to_dict(),
            "state": state_slots,
            "belief": belief.dist.tolist(),
            "gaps": gaps,
            "report": report.to_dict(),
        }


class SessionManager:
    """Owns all live sessions; safe to call from concurrent requests."""

    def __init__(self, suite_dir=None):
        self.suite_dir = suite_dir or bundled_suite_path()
        self._resources: SuiteResources | None = None
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()

    def resources(self, cfg: RunConfig) -> SuiteResources:
        if self._resources is None:
            self._resources = SuiteResources(self.suite_dir, index_cfg=cfg.index)
        return self._resources

    def create_session(self, case_id: str | None, config: dict | None, seed: int) -> Session:
        try:
            cfg = RunConfig.from_dict(config)
        except (TypeError, ValueError) as exc:
            raise InvalidConfig(str(exc)) from None
        resources = self.resources(cfg)
        case = resources.load_case(case_id or self.default_case_id())
        session_id = uuid.uuid4().hex[:12]
        engine = TurnEngine(resources, case, cfg, seed)
        session = Session(session_id, engine, case)
        with self._lock:
            self._sessions[session_id] = session
        return session

    def default_case_id(self) -> str:
        cases = sorted(p.stem for p in (self.suite_dir / "cases").glob("*.json"))
        if not cases:
            raise InvalidConfig("no cases available in the suite directory")
        return cases[0]

    def get(self, session_id: str) -> Session:
        session = self._sessions.get(session_id)
        if session is None:
            raise UnknownSession(session_id)
        return session

    def push_turn(self, session_id: str, role: str, text: str,
                  turn_index: int | None = None) -> dict:
        session = self.get(session_id)
        with session.lock:
            if session.handle.status != "open":
                raise SessionClosed(f"session {session_id} is {session.handle.status}")
            if turn_index is not None and turn_index <= session.handle.turn:
                raise DuplicateTurn(f"turn {turn_index} already processed")
            if role not in ROLES:
                raise InvalidConfig(f"role must be one of {ROLES}")
            result = session.engine.process_turn(role, text, source="live")
            session.handle.turn = result.turn
            if result.selected is not None and result.selected.kind == "conclude":
                session.handle.status = "concluded"
                # finalize the trace: emit the closing report record
                session.final_report = session.engine.finish()
            update = turn_update_payload(result)
            update["session"] = session.handle.to_dict()
            session.updates.append(update)
        return update


def create_app(manager: SessionManager | None = None) -> FastAPI:
    app = FastAPI(title="consultkit session service")
    mgr = manager or SessionManager()
    app.state.manager = mgr

    def error_response(exc: PipelineError, status: int) -> JSONResponse:
        return JSONResponse(
            status_code=status,
            content={"code": type(exc).__name__, "message": str(exc), "detail": None},
        )

    @app.exception_handler(UnknownSession)
    async def _unknown(request: Request, exc: UnknownSession):
        return error_response(exc, 404)

    @app.exception_handler(SessionClosed)
    async def _closed(request: Request, exc: SessionClosed):
        return error_response(exc, 409)

    @app.exception_handler(DuplicateTurn)
    async def _dup(request: Request, exc: DuplicateTurn):
        return error_response(exc, 409)

    @app.exception_handler(InvalidConfig)
    async def _badcfg(request: Request, exc: InvalidConfig):
        return error_response(exc, 422)

    @app.post("/sessions")
    async def create_session(body: dict | None = None):
        body = body or {}
        session = mgr.create_session(
            case_id=body.get("case_id"), config=body.get("config"),
            seed=int(body.get("seed", 0)),
        )
        return session.handle.to_dict()

    @app.post("/sessions/{session_id}/turns")
    async def push_turn(session_id: str, body: dict):
        update = await asyncio.to_thread(
            mgr.push_turn, session_id, body.get("role", "patient"),
            body.get("text", ""), body.get("turn_index"),
        )
        # Broadcast on the event loop; asyncio queues are not thread-safe.
        session = mgr.get(session_id)
        for q in list(session.subscribers):
            q.put_nowait(update)
        return update

    @app.get("/sessions/{session_id}/snapshot")
    async def get_snapshot(session_id: str):
        session = mgr.get(session_id)
        with session.lock:
            return session.snapshot()

    @app.get("/sessions/{session_id}/trace")
    async def get_trace(session_id: str):
        session = mgr.get(session_id)
        with session.lock:
            log = session.engine.trace
            lines = [json.dumps(log.header())]
            lines.extend(json.dumps(r.to_dict()) for r in log.records())
        return PlainTextResponse("\n".join(lines) + "\n", media_type="application/x-ndjson")

    @app.get("/sessions/{session_id}/updates")
    async def updates(session_id: str, backlog_only: bool = False):
        """Server-push channel. New subscribers first receive the backlog of
        TurnUpdates, then live ones; backlog_only=1 closes after the backlog
        (poll-style clients and tests)."""
        session = mgr.get(session_id)
        backlog = list(session.updates)
        queue: asyncio.Queue = asyncio.Queue()
        if not backlog_only:
            session.subscribers.append(queue)

        async def stream():
            try:
                for update in backlog:
                    yield f"data: {json.dumps(update)}\n\n"
                if backlog_only:
                    return
                while True:
                    update = await queue.get()
                    yield f"data: {json.dumps(update)}\n\n"
            finally:
                if queue in session.subscribers:
                    session.subscribers.remove(queue)

        return StreamingResponse(stream(), media_type="text/event-stream")

    _mount_console(app)
    return app


def _mount_console(app: FastAPI) -> None:
    """Serve the built console (frontend/dist) at /app when present."""
    from pathlib import Path

    from fastapi.staticfiles import StaticFiles

    dist = Path(__file__).resolve().parents[2] / "frontend" / "dist"
    if dist.is_dir():
        app.mount("/app", StaticFiles(directory=dist, html=True), name="console")


def serve(port: int = 8787, suite_dir=None) -> None:
    import uvicorn

    uvicorn.run(create_app(SessionManager(suite_dir)), host="127.0.0.1", port=port)
