"""Survey session lifecycle: ordering, answer capture, review, persistence.

A session walks a fixed phase ladder: 44 numeric comparisons in 4 blocks of
11 with a review screen after each block, then 5 agreement statements, then
the demographic profile.  Mutations append to a JSON-lines event log; a store
can be rebuilt by replaying the log, and exports are derived views.

On the wire, questions are addressed by per-session opaque refs (q01..q44 in
presentation order) and blocks by position (b1..b4), so a client never sees
which items are tests or which catalog block it is answering.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Optional

import numpy as np

from . import records
from .errors import (
    OutOfOrder,
    PhaseIncomplete,
    ReviewWindowClosed,
    SessionComplete,
)
from .transfers import BLOCK_IDS, QuestionPair, build_catalog

PHASE_NUMERIC = "NumericQuestions"
PHASE_TEXT = "TextQuestions"
PHASE_PROFILE = "Demographics"
PHASE_DONE = "Done"

QUESTIONS_PER_BLOCK = 11
BLOCKS_PER_SESSION = 4
TOTAL_QUESTIONS = QUESTIONS_PER_BLOCK * BLOCKS_PER_SESSION

STATUS_RECORDED = "recorded"
STATUS_DUPLICATE = "duplicate"


def draw_session_orders(seed: int, block_questions: Dict[str, list]):
    """Block order and per-block shuffles for one session seed.

    The first block is fixed; the second slot of the protocol draws one of
    the two alternate distributions with equal probability, and the three
    remaining blocks are shuffled together.
    """
    rng = np.random.default_rng(seed)
    alternate = "y4" if rng.random() < 0.5 else "y5"
    tail = ["y2", "y3", alternate]
    tail = [tail[i] for i in rng.permutation(3)]
    block_order = ["y1"] + tail
    question_order = {}
    for block in block_order:
        qids = block_questions[block]
        question_order[block] = [qids[i] for i in rng.permutation(len(qids))]
    return block_order, question_order


@dataclass
class SurveySession:
    session_id: str
    rng_seed: int
    block_order: list
    question_order: dict
    answers: dict = field(default_factory=dict)
    text_answers: dict = field(default_factory=dict)
    profile: Optional[dict] = None
    cursor: int = 0
    confirmed_blocks: int = 0

    def __post_init__(self):
        self.sequence = [qid for block in self.block_order
                         for qid in self.question_order[block]]
        self._ref_of = {qid: f"q{i + 1:02d}"
                        for i, qid in enumerate(self.sequence)}
        self._qid_of = {ref: qid for qid, ref in self._ref_of.items()}

    # -- addressing ------------------------------------------------------

    def ref_for(self, qid: str) -> str:
        return self._ref_of[qid]

    def resolve_ref(self, ref: str) -> str:
        qid = self._qid_of.get(ref)
        if qid is None:
            raise ValueError(f"unknown question ref {ref!r}")
        return qid

    def resolve_block_ref(self, ref: str) -> int:
        try:
            pos = int(ref.removeprefix("b")) - 1
        except ValueError:
            pos = -1
        if not 0 <= pos < BLOCKS_PER_SESSION:
            raise ValueError(f"unknown block ref {ref!r}")
        return pos

    # -- derived state ---------------------------------------------------

    @property
    def phase(self) -> str:
        if self.confirmed_blocks < BLOCKS_PER_SESSION:
            return PHASE_NUMERIC
        if len(self.text_answers) < len(records.TEXT_STATEMENTS):
            return PHASE_TEXT
        if self.profile is None:
            return PHASE_PROFILE
        return PHASE_DONE

    @property
    def in_review(self) -> bool:
        return (self.phase == PHASE_NUMERIC
                and self.cursor == (self.confirmed_blocks + 1)
                * QUESTIONS_PER_BLOCK)

    def current_block(self) -> str:
        return self.block_order[self.confirmed_blocks]

    def _review_qids(self) -> list:
        return self.question_order[self.current_block()]

    # -- payloads --------------------------------------------------------

    def next_payload(self, index: Dict[str, QuestionPair]) -> dict:
        phase = self.phase
        if phase == PHASE_NUMERIC:
            if self.in_review:
                entries = []
                for qid in self._review_qids():
                    q = index[qid]
                    entries.append({
                        "ref": self.ref_for(qid),
                        "a": list(q.a),
                        "b": list(q.b),
                        "choice": self.answers[qid]["choice"],
                    })
                return {"kind": "review",
                        "block_ref": f"b{self.confirmed_blocks + 1}",
                        "entries": entries}
            qid = self.sequence[self.cursor]
            q = index[qid]
            return {"kind": "question", "ref": self.ref_for(qid),
                    "number": self.cursor + 1, "total": TOTAL_QUESTIONS,
                    "a": list(q.a), "b": list(q.b)}
        if phase == PHASE_TEXT:
            statements = []
            for code in records.TEXT_STATEMENTS:
                levels = (records.CLARITY_LEVELS if code == "Clarity"
                          else records.AGREEMENT_LEVELS)
                statements.append({"code": code,
                                   "text": records.STATEMENT_TEXTS[code],
                                   "levels": list(levels)})
            return {"kind": "text", "statements": statements,
                    "answered": sorted(self.text_answers)}
        if phase == PHASE_PROFILE:
            fields = [{"name": f,
                       "categories": list(records.category_labels(f))}
                      for f in records.PROFILE_FIELDS]
            return {"kind": "profile", "fields": fields}
        raise SessionComplete(f"session {self.session_id} is complete")

    # -- mutations -------------------------------------------------------

    def record_answer(self, qid: str, choice: str) -> str:
        if choice not in records.CHOICES:
            raise ValueError(f"unknown choice {choice!r}")
        if qid not in self._ref_of:
            raise ValueError(f"question {qid!r} not in this session")
        prior = self.answers.get(qid)
        if (prior is not None and prior["choice"] == choice
                and not prior["revised"]):
            return STATUS_DUPLICATE  # client retry of a delivered answer
        if self.phase == PHASE_DONE:
            raise SessionComplete("all phases complete")
        if self.phase != PHASE_NUMERIC or self.in_review:
            raise OutOfOrder("no comparison question is awaiting an answer")
        expected = self.sequence[self.cursor]
        if qid != expected:
            raise OutOfOrder(
                f"expected answer for {self.ref_for(expected)!r}")
        self.answers[qid] = {"choice": choice, "revised": False}
        self.cursor += 1
        return STATUS_RECORDED

    def revise_answer(self, qid: str, choice: str) -> str:
        if choice not in records.CHOICES:
            raise ValueError(f"unknown choice {choice!r}")
        if qid not in self._ref_of:
            raise ValueError(f"question {qid!r} not in this session")
        if not self.in_review or qid not in self._review_qids():
            raise ReviewWindowClosed(
                "revisions are only accepted during the block's review")
        self.answers[qid] = {"choice": choice, "revised": True}
        return STATUS_RECORDED

    def confirm_review(self, block_pos: int) -> None:
        if not self.in_review or block_pos != self.confirmed_blocks:
            raise OutOfOrder("no review pending for that block")
        self.confirmed_blocks += 1

    def record_text(self, statement: str, level: int) -> str:
        if statement not in records.TEXT_STATEMENTS:
            raise ValueError(f"unknown statement {statement!r}")
        if not isinstance(level, int) or not 1 <= level <= 5:
            raise ValueError("level must be an integer in 1..5")
        prior = self.text_answers.get(statement)
        if prior == level:
            return STATUS_DUPLICATE
        if self.phase != PHASE_TEXT:
            raise OutOfOrder("statements are answered after the comparisons")
        if prior is not None:
            raise OutOfOrder("statement answers are final")
        self.text_answers[statement] = level
        return STATUS_RECORDED

    def record_profile(self, profile: dict) -> str:
        if self.phase != PHASE_PROFILE:
            if self.profile is not None and self.profile == dict(profile):
                return STATUS_DUPLICATE
            raise OutOfOrder("profile is collected after the statements")
        self.profile = records.validate_profile(profile)
        return STATUS_RECORDED

    def error_count(self, index: Dict[str, QuestionPair]) -> int:
        if self.confirmed_blocks < BLOCKS_PER_SESSION:
            raise PhaseIncomplete("comparison questions still in progress")
        wrong = 0
        for qid, rec in self.answers.items():
            if index[qid].is_test and rec["choice"] != "B":
                wrong += 1
        return wrong


class SurveyStore:
    """All sessions plus the append-only event log behind them."""

    def __init__(self, catalog=None, log_path=None):
        self.catalog = list(catalog) if catalog is not None else build_catalog()
        self.index = {q.id: q for q in self.catalog}
        self.block_questions = {}
        for q in self.catalog:
            self.block_questions.setdefault(q.block, []).append(q.id)
        self.sessions: Dict[str, SurveySession] = {}
        self.log_path = Path(log_path) if log_path else None
        self._counter = 0

    # -- event log -------------------------------------------------------

    def _append(self, event: dict) -> None:
        if self.log_path is None:
            return
        event = dict(event, ts=time.time())
        with self.log_path.open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(event, sort_keys=True) + "\n")

    @classmethod
    def replay(cls, log_path, catalog=None) -> "SurveyStore":
        """Rebuild a store from its event log without re-logging."""
        store = cls(catalog=catalog, log_path=None)
        path = Path(log_path)
        if path.exists():
            with path.open(encoding="utf-8") as fh:
                for line in fh:
                    if line.strip():
                        store._apply(json.loads(line))
        store.log_path = path
        return store

    def _apply(self, event: dict) -> None:
        kind = event["event"]
        if kind == "session_created":
            session = SurveySession(
                session_id=event["session_id"],
                rng_seed=event["seed"],
                block_order=list(event["block_order"]),
                question_order={b: list(v) for b, v
                                in event["question_order"].items()})
            self.sessions[session.session_id] = session
            self._counter = max(self._counter,
                                int(session.session_id[1:]) + 1)
        elif kind == "answer":
            self.sessions[event["session_id"]].record_answer(
                event["question_id"], event["choice"])
        elif kind == "revision":
            self.sessions[event["session_id"]].revise_answer(
                event["question_id"], event["choice"])
        elif kind == "review_confirmed":
            self.sessions[event["session_id"]].confirm_review(
                event["block_pos"])
        elif kind == "text_answer":
            self.sessions[event["session_id"]].record_text(
                event["statement"], event["level"])
        elif kind == "profile":
            self.sessions[event["session_id"]].record_profile(
                event["profile"])
        else:
            raise ValueError(f"unknown event kind {kind!r}")

    # -- session operations ----------------------------------------------

    def create_session(self, seed: Optional[int] = None) -> SurveySession:
        if seed is None:
            seed = int(np.random.SeedSequence().entropy % (2 ** 63))
        seed = int(seed)
        block_order, question_order = draw_session_orders(
            seed, self.block_questions)
        session = SurveySession(
            session_id=f"s{self._counter:05d}", rng_seed=seed,
            block_order=block_order, question_order=question_order)
        self._counter += 1
        self.sessions[session.session_id] = session
        self._append({"event": "session_created",
                      "session_id": session.session_id, "seed": seed,
                      "block_order": block_order,
                      "question_order": question_order})
        return session

    def get(self, session_id: str) -> SurveySession:
        session = self.sessions.get(session_id)
        if session is None:
            raise KeyError(f"no session {session_id!r}")
        return session

    def next_payload(self, session_id: str) -> dict:
        return self.get(session_id).next_payload(self.index)

    def record_answer(self, session_id: str, qid: str, choice: str) -> str:
        status = self.get(session_id).record_answer(qid, choice)
        if status == STATUS_RECORDED:
            self._append({"event": "answer", "session_id": session_id,
                          "question_id": qid, "choice": choice})
        return status

    def revise_answer(self, session_id: str, qid: str, choice: str) -> str:
        status = self.get(session_id).revise_answer(qid, choice)
        self._append({"event": "revision", "session_id": session_id,
                      "question_id": qid, "choice": choice})
        return status

    def confirm_review(self, session_id: str, block_pos: int) -> None:
        self.get(session_id).confirm_review(block_pos)
        self._append({"event": "review_confirmed", "session_id": session_id,
                      "block_pos": block_pos})

    def record_text(self, session_id: str, statement: str, level: int) -> str:
        status = self.get(session_id).record_text(statement, level)
        if status == STATUS_RECORDED:
            self._append({"event": "text_answer", "session_id": session_id,
                          "statement": statement, "level": level})
        return status

    def record_profile(self, session_id: str, profile: dict) -> str:
        status = self.get(session_id).record_profile(profile)
        if status == STATUS_RECORDED:
            self._append({"event": "profile", "session_id": session_id,
                          "profile": self.get(session_id).profile})
        return status

    def error_count(self, session_id: str) -> int:
        return self.get(session_id).error_count(self.index)

    # -- exports -----------------------------------------------------------

    def export_responses_rows(self) -> list:
        rows = []
        for sid in sorted(self.sessions):
            session = self.sessions[sid]
            for qid in session.sequence:
                rec = session.answers.get(qid)
                if rec is None:
                    continue
                q = self.index[qid]
                rows.append({
                    "session_id": sid,
                    "block": q.block,
                    "question_id": qid,
                    "label": q.label,
                    "choice": rec["choice"],
                    "revised": "true" if rec["revised"] else "false",
                })
        return rows

    def export_sessions_rows(self) -> list:
        rows = []
        for sid in sorted(self.sessions):
            session = self.sessions[sid]
            try:
                errors = str(session.error_count(self.index))
            except PhaseIncomplete:
                errors = ""
            row = {"session_id": sid, "error_count": errors}
            profile = session.profile or {}
            for f in records.PROFILE_FIELDS:
                row[f] = profile.get(f, "")
            for code, col in zip(records.TEXT_STATEMENTS,
                                 records.TEXT_COLUMNS):
                level = session.text_answers.get(code)
                row[col] = "" if level is None else str(level)
            rows.append(row)
        return rows
