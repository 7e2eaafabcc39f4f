"""HTTP interface to the survey store.

Clients only ever see per-session refs (q01..q44, b1..b4) and income
vectors; catalog ids, transfer labels, and test markers stay server-side.
Ordering violations map to 409, unknown sessions to 404, and malformed
bodies to 422.  Completion is reported as a terminal {"kind": "done"}
payload rather than an error so clients can finish without special-casing.
"""

from __future__ import annotations

import csv
import io
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, Response
from pydantic import BaseModel

from . import records
from .errors import (
    OutOfOrder,
    PhaseIncomplete,
    ReviewWindowClosed,
    SessionComplete,
)
from .sessions import PHASE_DONE, SurveyStore

_CONFLICTS = (OutOfOrder, ReviewWindowClosed, SessionComplete,
              PhaseIncomplete)


class CreateSessionBody(BaseModel):
    seed: Optional[int] = None


class AnswerBody(BaseModel):
    question_id: str
    choice: str


class ChoiceBody(BaseModel):
    choice: str


class TextBody(BaseModel):
    statement: str
    level: int


class ProfileBody(BaseModel):
    profile: dict


def _next_or_done(store: SurveyStore, session_id: str) -> dict:
    session = store.get(session_id)
    if session.phase == PHASE_DONE:
        return {"kind": "done",
                "error_count": session.error_count(store.index)}
    return store.next_payload(session_id)


def _csv_response(columns, rows) -> Response:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return Response(buffer.getvalue(), media_type="text/csv")


def create_app(store: Optional[SurveyStore] = None,
               static_dir=None) -> FastAPI:
    store = store if store is not None else SurveyStore()
    app = FastAPI(title="transfer comparison survey")
    app.state.store = store

    @app.exception_handler(KeyError)
    async def _missing(request: Request, exc: KeyError):
        return JSONResponse(status_code=404, content={"detail": str(exc)})

    @app.exception_handler(ValueError)
    async def _invalid(request: Request, exc: ValueError):
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    for conflict in _CONFLICTS:
        @app.exception_handler(conflict)
        async def _conflict(request: Request, exc: Exception):
            return JSONResponse(
                status_code=409,
                content={"detail": str(exc),
                         "error": type(exc).__name__})

    @app.post("/sessions", status_code=201)
    def create_session(body: Optional[CreateSessionBody] = None):
        session = store.create_session(
            seed=None if body is None else body.seed)
        return {"session_id": session.session_id,
                "next": _next_or_done(store, session.session_id)}

    @app.get("/sessions/{session_id}/next")
    def next_payload(session_id: str):
        return _next_or_done(store, session_id)

    @app.get("/sessions/{session_id}/status")
    def status(session_id: str):
        session = store.get(session_id)
        done = session.phase == PHASE_DONE
        return {"session_id": session_id, "phase": session.phase,
                "answered": len(session.answers),
                "error_count": (session.error_count(store.index)
                                if done else None)}

    @app.post("/sessions/{session_id}/answers")
    def record_answer(session_id: str, body: AnswerBody):
        session = store.get(session_id)
        qid = session.resolve_ref(body.question_id)
        outcome = store.record_answer(session_id, qid, body.choice)
        return {"status": outcome,
                "next": _next_or_done(store, session_id)}

    @app.put("/sessions/{session_id}/answers/{question_ref}")
    def revise_answer(session_id: str, question_ref: str, body: ChoiceBody):
        session = store.get(session_id)
        qid = session.resolve_ref(question_ref)
        outcome = store.revise_answer(session_id, qid, body.choice)
        return {"status": outcome,
                "next": _next_or_done(store, session_id)}

    @app.post("/sessions/{session_id}/review/{block_ref}/confirm")
    def confirm_review(session_id: str, block_ref: str):
        session = store.get(session_id)
        store.confirm_review(session_id,
                             session.resolve_block_ref(block_ref))
        return {"status": "confirmed",
                "next": _next_or_done(store, session_id)}

    @app.post("/sessions/{session_id}/text")
    def record_text(session_id: str, body: TextBody):
        outcome = store.record_text(session_id, body.statement, body.level)
        return {"status": outcome,
                "next": _next_or_done(store, session_id)}

    @app.post("/sessions/{session_id}/profile")
    def record_profile(session_id: str, body: ProfileBody):
        outcome = store.record_profile(session_id, body.profile)
        return {"status": outcome,
                "next": _next_or_done(store, session_id)}

    @app.get("/export/responses.csv")
    def export_responses():
        return _csv_response(records.RESPONSES_CSV_COLUMNS,
                             store.export_responses_rows())

    @app.get("/export/sessions.csv")
    def export_sessions():
        return _csv_response(records.SESSIONS_CSV_COLUMNS,
                             store.export_sessions_rows())

    if static_dir is not None:
        from fastapi.staticfiles import StaticFiles
        app.mount("/", StaticFiles(directory=static_dir, html=True),
                  name="static")

    return app
