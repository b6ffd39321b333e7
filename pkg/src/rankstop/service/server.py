"""HTTP host for the selection game.

Turn-based wire contract: the client POSTs advances and decisions and
listens to a one-directional server-sent event stream.  Pre-close
responses use a dedicated redacted schema that structurally lacks the
hidden fields (values, N, the chosen CDF), so a leak is a type error,
not a filtering bug.  Closed sessions are persisted append-only and
survive restarts byte for byte.
"""

from __future__ import annotations

import json
import threading
import time
import uuid
from typing import Literal

from fastapi import FastAPI, HTTPException, Request
from fastapi.responses import StreamingResponse
from pydantic import BaseModel

from ..namur import machine_decide, new_session
from ..namur.compat import CompatibilityLedger
from ..namur.objectives import EXACT_RANK, Objective, load_default_table
from ..namur.session import Session
from .config import ServiceConfig
from .store import SessionStore


class ObjectiveModel(BaseModel):
    kind: Literal["EXACT_RANK", "TOP_PERCENT"]
    param: float


class CreateSessionRequest(BaseModel):
    m: int | None = None
    mode: Literal["human", "machine"] = "human"
    objective: ObjectiveModel | None = None
    objective_secret: bool = False
    seed: int | None = None


class ArrivalView(BaseModel):
    t: float
    rel_rank: int


class RedactedSessionView(BaseModel):
    """Everything a player may see before close: no values, no N, no CDF."""

    id: str
    M: int
    basket: list[str]
    status: str
    player: str
    revealed: int
    awaiting_decision: bool
    arrivals: list[ArrivalView]
    decisions: list[str]
    objective: ObjectiveModel | None = None


class DecisionRequest(BaseModel):
    decision: Literal["ACCEPT", "PASS"]


class _Live:
    def __init__(self, session: Session):
        self.session = session
        self.events: list[dict] = []
        self.lock = threading.Lock()
        self.created = time.time()

    def emit(self, event: str, data: dict) -> None:
        self.events.append({"id": len(self.events) + 1, "event": event, "data": data})


def _redact(s: Session) -> RedactedSessionView:
    objective = None
    if s.objective is not None and not s.objective_secret:
        objective = ObjectiveModel(**s.objective)
    return RedactedSessionView(
        id=s.id,
        M=s.m_max,
        basket=s.basket.names(),
        status=s.status,
        player=s.player,
        revealed=s.revealed,
        awaiting_decision=s.awaiting_decision,
        arrivals=[ArrivalView(**a) for a in s.arrivals_seen()],
        decisions=list(s.decisions),
        objective=objective,
    )


def _blank_scoreboard() -> dict:
    return {"games": 0, "rank_total": 0, "objective_games": 0, "objective_hits": 0}


def _score_record(board: dict, record: dict) -> None:
    side = board[record.get("player", "human")]
    side["games"] += 1
    side["rank_total"] += record["outcome"]["final_rank"]
    obj = record.get("objective")
    if obj:
        side["objective_games"] += 1
        o = Objective(obj["kind"], obj["param"])
        if o.satisfied(record["outcome"]["final_rank"], record["outcome"]["N"]):
            side["objective_hits"] += 1


def scoreboard_from_records(records: list[dict]) -> dict:
    board = {"human": _blank_scoreboard(), "machine": _blank_scoreboard()}
    for r in records:
        _score_record(board, r)
    return board


def ledger_from_records(records: list[dict]) -> CompatibilityLedger:
    ledger = CompatibilityLedger()
    for r in records:
        if r.get("player") == "human" and r.get("objective_secret"):
            ledger.update(r["outcome"]["final_rank"], r["outcome"]["N"], r["id"])
    return ledger


def _board_view(board: dict) -> dict:
    out = {}
    for side, b in board.items():
        out[side] = {
            "games": b["games"],
            "mean_rank": (b["rank_total"] / b["games"]) if b["games"] else None,
            "objective_success_rate": (
                b["objective_hits"] / b["objective_games"]
                if b["objective_games"]
                else None
            ),
        }
    return out


def create_app(config: ServiceConfig | None = None) -> FastAPI:
    config = config or ServiceConfig()
    app = FastAPI(title="rankstop session service")
    store = SessionStore(config.data_dir)
    basket = config.basket()
    table = load_default_table()
    live: dict[str, _Live] = {}
    records = store.read_all()
    board = scoreboard_from_records(records)
    ledger = ledger_from_records(records)
    counter = threading.Lock()
    state = {"created": len(records)}

    app.state.store = store
    app.state.board = board
    app.state.ledger = ledger

    def _get_live(sid: str) -> _Live:
        item = live.get(sid)
        if item is None:
            raise HTTPException(status_code=404, detail="unknown session")
        if (
            not item.session.closed
            and time.time() - item.created > config.session_ttl_seconds
        ):
            del live[sid]
            raise HTTPException(status_code=404, detail="session expired")
        return item

    def _machine_turn(item: _Live) -> None:
        s = item.session
        accept = machine_decide(
            s.times[: s.revealed],
            s.rel_ranks[: s.revealed],
            Objective(**(s.objective or {"kind": EXACT_RANK, "param": 1})),
            s.basket,
            s.m_max,
            table,
        )
        s.decide(accept)
        item.emit(
            "decision",
            {"decision": "ACCEPT" if accept else "PASS", "forced": s.forced,
             "by": "machine"},
        )

    def _maybe_close(item: _Live) -> None:
        s = item.session
        if not s.closed or store.has(s.id):
            return
        record = s.record()
        store.write_record(record)
        _score_record(board, record)
        if record.get("player") == "human" and record.get("objective_secret"):
            ledger.update(record["outcome"]["final_rank"], record["outcome"]["N"], s.id)
        item.emit("closed", {"status": s.status, "final_rank": s.outcome_rank})

    @app.post("/sessions")
    def create_session(body: CreateSessionRequest) -> dict:
        with counter:
            state["created"] += 1
            serial = state["created"]
        seed = body.seed if body.seed is not None else config.master_seed + serial * 7919
        session = new_session(
            m_max=body.m or config.default_m,
            basket=basket,
            seed=seed,
            objective=body.objective.model_dump() if body.objective else None,
            objective_secret=body.objective_secret,
            player=body.mode,
            session_id=uuid.uuid4().hex[:12],
        )
        item = _Live(session)
        item.emit("created", {"M": session.m_max, "basket": session.basket.names()})
        live[session.id] = item
        return {"id": session.id}

    @app.get("/sessions/{sid}")
    def get_session(sid: str) -> RedactedSessionView:
        item = _get_live(sid)
        with item.lock:
            return _redact(item.session)

    @app.post("/sessions/{sid}/advance")
    def advance(sid: str) -> RedactedSessionView:
        item = _get_live(sid)
        with item.lock:
            s = item.session
            if s.closed:
                raise HTTPException(status_code=409, detail="session is closed")
            if s.awaiting_decision:
                raise HTTPException(status_code=409, detail="decision pending")
            arrival = s.advance()
            item.emit("arrival", {**arrival, "index": s.revealed})
            if s.player == "machine":
                _machine_turn(item)
            _maybe_close(item)
            return _redact(s)

    @app.post("/sessions/{sid}/decision")
    def decide(sid: str, body: DecisionRequest) -> RedactedSessionView:
        item = _get_live(sid)
        with item.lock:
            s = item.session
            if s.player == "machine":
                raise HTTPException(status_code=409, detail="machine plays its own turns")
            if s.closed:
                raise HTTPException(status_code=409, detail="session is closed")
            if not s.awaiting_decision:
                raise HTTPException(status_code=409, detail="no arrival to decide on")
            s.decide(body.decision == "ACCEPT")
            item.emit("decision", {"decision": body.decision, "forced": s.forced,
                                   "by": "human"})
            _maybe_close(item)
            return _redact(s)

    @app.get("/sessions/{sid}/events")
    def events(sid: str, request: Request, last_event_id: int = 0):
        item = _get_live(sid)
        start = int(request.headers.get("last-event-id", last_event_id))

        def gen():
            cursor = start
            idle = 0.0
            while True:
                with item.lock:
                    pending = [e for e in item.events if e["id"] > cursor]
                    closed = item.session.closed
                for e in pending:
                    cursor = e["id"]
                    payload = json.dumps(e["data"])
                    yield f"id: {e['id']}\nevent: {e['event']}\ndata: {payload}\n\n"
                if closed and not pending:
                    return
                if not pending:
                    time.sleep(0.05)
                    idle += 0.05
                    if idle > config.session_ttl_seconds:
                        return

        return StreamingResponse(gen(), media_type="text/event-stream")

    @app.get("/sessions/{sid}/reveal")
    def reveal(sid: str) -> dict:
        if store.has(sid):
            return store.read(sid)
        item = _get_live(sid)
        with item.lock:
            if not item.session.closed:
                raise HTTPException(status_code=409, detail="session still open")
            return item.session.record()

    @app.get("/stats")
    def stats() -> dict:
        return {
            "scoreboard": _board_view(board),
            "ledger": ledger.snapshot(),
        }

    return app
