"""Survey session state machine, event log replay, and export views."""

import json

import numpy as np
import pytest

from ineqpref import records
from ineqpref.errors import (
    OutOfOrder,
    PhaseIncomplete,
    ReviewWindowClosed,
    SessionComplete,
)
from ineqpref.sessions import (
    BLOCKS_PER_SESSION,
    PHASE_DONE,
    PHASE_NUMERIC,
    PHASE_PROFILE,
    PHASE_TEXT,
    QUESTIONS_PER_BLOCK,
    STATUS_DUPLICATE,
    STATUS_RECORDED,
    TOTAL_QUESTIONS,
    SurveyStore,
    draw_session_orders,
)
from ineqpref.transfers import build_catalog


def make_store(tmp_path=None):
    log = None if tmp_path is None else tmp_path / "events.jsonl"
    return SurveyStore(log_path=log)


def sample_profile():
    return {f: records.category_labels(f)[0] for f in records.PROFILE_FIELDS}


def answer_current(store, session, choice="B"):
    payload = store.next_payload(session.session_id)
    assert payload["kind"] == "question"
    qid = session.resolve_ref(payload["ref"])
    status = store.record_answer(session.session_id, qid, choice)
    assert status == STATUS_RECORDED
    return qid


def finish_block(store, session, test_choice="B"):
    """Answer 11 questions (tests get `test_choice`) and confirm the review."""
    for _ in range(QUESTIONS_PER_BLOCK):
        payload = store.next_payload(session.session_id)
        qid = session.resolve_ref(payload["ref"])
        choice = test_choice if store.index[qid].is_test else "B"
        store.record_answer(session.session_id, qid, choice)
    review = store.next_payload(session.session_id)
    assert review["kind"] == "review"
    store.confirm_review(session.session_id,
                         session.resolve_block_ref(review["block_ref"]))


def finish_numeric(store, session, test_choices=("B", "B", "B", "B")):
    for choice in test_choices:
        finish_block(store, session, test_choice=choice)


def finish_text(store, session):
    for i, code in enumerate(records.TEXT_STATEMENTS):
        store.record_text(session.session_id, code, (i % 5) + 1)


def complete_session(store, session):
    finish_numeric(store, session)
    finish_text(store, session)
    store.record_profile(session.session_id, sample_profile())


class TestOrderDraws:
    def test_deterministic_in_seed(self):
        store = make_store()
        a = draw_session_orders(123, store.block_questions)
        b = draw_session_orders(123, store.block_questions)
        assert a == b

    def test_order_structure_and_alternate_frequency(self):
        store = make_store()
        n = 10_000
        y4_draws = 0
        for seed in range(n):
            block_order, question_order = draw_session_orders(
                seed, store.block_questions)
            assert block_order[0] == "y1"
            assert set(block_order[1:]) in ({"y2", "y3", "y4"},
                                            {"y2", "y3", "y5"})
            y4_draws += "y4" in block_order
            for block in block_order:
                assert sorted(question_order[block]) == sorted(
                    store.block_questions[block])
        assert 0.48 <= y4_draws / n <= 0.52

    def test_shuffles_vary_across_seeds(self):
        store = make_store()
        orders = {tuple(draw_session_orders(s, store.block_questions)[1]["y1"])
                  for s in range(20)}
        assert len(orders) > 1


class TestHappyPath:
    def test_full_walk(self, tmp_path):
        store = make_store(tmp_path)
        session = store.create_session(seed=7)
        assert session.phase == PHASE_NUMERIC

        revised_qid = None
        for block_pos in range(BLOCKS_PER_SESSION):
            for i in range(QUESTIONS_PER_BLOCK):
                payload = store.next_payload(session.session_id)
                assert payload["kind"] == "question"
                number = block_pos * QUESTIONS_PER_BLOCK + i + 1
                assert payload["number"] == number
                assert payload["total"] == TOTAL_QUESTIONS
                assert payload["ref"] == f"q{number:02d}"
                assert len(payload["a"]) == 5 and len(payload["b"]) == 5
                qid = session.resolve_ref(payload["ref"])
                store.record_answer(session.session_id, qid, "B")
            review = store.next_payload(session.session_id)
            assert review["kind"] == "review"
            assert review["block_ref"] == f"b{block_pos + 1}"
            assert len(review["entries"]) == QUESTIONS_PER_BLOCK
            assert all(e["choice"] == "B" for e in review["entries"])
            if block_pos == 0:
                entry = next(
                    e for e in review["entries"]
                    if not store.index[session.resolve_ref(e["ref"])].is_test)
                revised_qid = session.resolve_ref(entry["ref"])
                assert store.revise_answer(session.session_id, revised_qid,
                                           "A") == STATUS_RECORDED
            store.confirm_review(session.session_id, block_pos)

        assert session.phase == PHASE_TEXT
        text = store.next_payload(session.session_id)
        assert text["kind"] == "text"
        codes = [s["code"] for s in text["statements"]]
        assert codes == list(records.TEXT_STATEMENTS)
        for statement in text["statements"]:
            assert len(statement["levels"]) == 5
        finish_text(store, session)

        assert session.phase == PHASE_PROFILE
        profile_payload = store.next_payload(session.session_id)
        assert profile_payload["kind"] == "profile"
        assert [f["name"] for f in profile_payload["fields"]] == list(
            records.PROFILE_FIELDS)
        store.record_profile(session.session_id, sample_profile())

        assert session.phase == PHASE_DONE
        with pytest.raises(SessionComplete):
            store.next_payload(session.session_id)

        assert store.error_count(session.session_id) == 0
        rows = store.export_responses_rows()
        assert len(rows) == TOTAL_QUESTIONS
        assert [r["question_id"] for r in rows] == session.sequence
        revised = [r for r in rows if r["revised"] == "true"]
        assert len(revised) == 1
        assert revised[0]["question_id"] == revised_qid
        assert revised[0]["choice"] == "A"

    def test_wire_payloads_never_leak_catalog_internals(self):
        store = make_store()
        session = store.create_session(seed=11)
        seen_review = False
        for block_pos in range(BLOCKS_PER_SESSION):
            for _ in range(QUESTIONS_PER_BLOCK):
                payload = store.next_payload(session.session_id)
                blob = json.dumps(payload)
                assert "TEST" not in blob and "label" not in blob
                assert not any(f"y{j}" in blob for j in range(1, 6))
                assert set(payload) == {"kind", "ref", "number", "total",
                                        "a", "b"}
                store.record_answer(
                    session.session_id,
                    session.resolve_ref(payload["ref"]), "Equivalent")
            review = store.next_payload(session.session_id)
            blob = json.dumps(review)
            assert "TEST" not in blob and "label" not in blob
            assert not any(f"y{j}" in blob for j in range(1, 6))
            assert all(set(e) == {"ref", "a", "b", "choice"}
                       for e in review["entries"])
            seen_review = True
            store.confirm_review(session.session_id, block_pos)
        assert seen_review

    def test_revision_to_same_choice_still_marks_revised(self):
        store = make_store()
        session = store.create_session(seed=3)
        for _ in range(QUESTIONS_PER_BLOCK):
            answer_current(store, session)
        qid = session.sequence[0]
        store.revise_answer(session.session_id, qid, "B")
        assert session.answers[qid] == {"choice": "B", "revised": True}


class TestOrderingErrors:
    def test_answer_must_match_cursor(self):
        store = make_store()
        session = store.create_session(seed=1)
        with pytest.raises(OutOfOrder):
            store.record_answer(session.session_id, session.sequence[3], "A")

    def test_no_answers_during_review(self):
        store = make_store()
        session = store.create_session(seed=1)
        for _ in range(QUESTIONS_PER_BLOCK):
            answer_current(store, session)
        assert session.in_review
        with pytest.raises(OutOfOrder):
            store.record_answer(session.session_id,
                                session.sequence[QUESTIONS_PER_BLOCK], "A")

    def test_revision_outside_review_window(self):
        store = make_store()
        session = store.create_session(seed=1)
        qid = answer_current(store, session)
        with pytest.raises(ReviewWindowClosed):
            store.revise_answer(session.session_id, qid, "A")
        for _ in range(QUESTIONS_PER_BLOCK - 1):
            answer_current(store, session)
        store.confirm_review(session.session_id, 0)
        with pytest.raises(ReviewWindowClosed):
            store.revise_answer(session.session_id, qid, "A")

    def test_review_confirm_requires_pending_block(self):
        store = make_store()
        session = store.create_session(seed=1)
        with pytest.raises(OutOfOrder):
            store.confirm_review(session.session_id, 0)
        for _ in range(QUESTIONS_PER_BLOCK):
            answer_current(store, session)
        with pytest.raises(OutOfOrder):
            store.confirm_review(session.session_id, 1)

    def test_text_and_profile_wait_their_turn(self):
        store = make_store()
        session = store.create_session(seed=1)
        with pytest.raises(OutOfOrder):
            store.record_text(session.session_id, "PT", 5)
        with pytest.raises(OutOfOrder):
            store.record_profile(session.session_id, sample_profile())
        finish_numeric(store, session)
        with pytest.raises(OutOfOrder):
            store.record_profile(session.session_id, sample_profile())

    def test_error_count_needs_all_blocks_confirmed(self):
        store = make_store()
        session = store.create_session(seed=1)
        finish_block(store, session)
        with pytest.raises(PhaseIncomplete):
            store.error_count(session.session_id)

    def test_invalid_inputs_rejected(self):
        store = make_store()
        session = store.create_session(seed=1)
        with pytest.raises(ValueError):
            store.record_answer(session.session_id, session.sequence[0],
                                "Maybe")
        with pytest.raises(ValueError):
            store.record_answer(session.session_id, "nonsense", "A")
        with pytest.raises(KeyError):
            store.next_payload("s99999")
        with pytest.raises(ValueError):
            session.resolve_ref("q99")
        with pytest.raises(ValueError):
            session.resolve_block_ref("b9")
        finish_numeric(store, session)
        with pytest.raises(ValueError):
            store.record_text(session.session_id, "XX", 3)
        with pytest.raises(ValueError):
            store.record_text(session.session_id, "PT", 9)
        finish_text(store, session)
        with pytest.raises(ValueError):
            store.record_profile(session.session_id, {"gender": "Woman"})
        bad = sample_profile()
        bad["age"] = "child"
        with pytest.raises(ValueError):
            store.record_profile(session.session_id, bad)


class TestDuplicates:
    def test_answer_retry_is_noop(self):
        store = make_store()
        session = store.create_session(seed=2)
        qid = answer_current(store, session, "A")
        assert store.record_answer(session.session_id, qid,
                                   "A") == STATUS_DUPLICATE
        assert session.cursor == 1
        with pytest.raises(OutOfOrder):
            store.record_answer(session.session_id, qid, "B")

    def test_answer_retry_after_completion(self):
        store = make_store()
        session = store.create_session(seed=2)
        complete_session(store, session)
        qid = session.sequence[5]
        assert store.record_answer(session.session_id, qid,
                                   "B") == STATUS_DUPLICATE
        with pytest.raises(SessionComplete):
            store.record_answer(session.session_id, qid, "A")

    def test_text_and_profile_retries(self):
        store = make_store()
        session = store.create_session(seed=2)
        finish_numeric(store, session)
        assert store.record_text(session.session_id, "PT", 4) \
            == STATUS_RECORDED
        assert store.record_text(session.session_id, "PT", 4) \
            == STATUS_DUPLICATE
        with pytest.raises(OutOfOrder):
            store.record_text(session.session_id, "PT", 2)
        for code in records.TEXT_STATEMENTS[1:]:
            store.record_text(session.session_id, code, 3)
        profile = sample_profile()
        assert store.record_profile(session.session_id, profile) \
            == STATUS_RECORDED
        assert store.record_profile(session.session_id, profile) \
            == STATUS_DUPLICATE
        other = dict(profile, gender=records.category_labels("gender")[1])
        with pytest.raises(OutOfOrder):
            store.record_profile(session.session_id, other)


class TestErrorCount:
    def test_counts_non_b_test_finals(self):
        store = make_store()
        session = store.create_session(seed=9)
        finish_numeric(store, session,
                       test_choices=("B", "A", "Equivalent", "B"))
        assert store.error_count(session.session_id) == 2

    def test_revision_can_fix_a_test_slip(self):
        store = make_store()
        session = store.create_session(seed=9)
        test_qid = None
        for _ in range(QUESTIONS_PER_BLOCK):
            payload = store.next_payload(session.session_id)
            qid = session.resolve_ref(payload["ref"])
            if store.index[qid].is_test:
                test_qid = qid
                store.record_answer(session.session_id, qid, "A")
            else:
                store.record_answer(session.session_id, qid, "B")
        assert test_qid is not None
        store.revise_answer(session.session_id, test_qid, "B")
        store.confirm_review(session.session_id, 0)
        for choice in ("B", "B", "B"):
            finish_block(store, session, test_choice=choice)
        assert store.error_count(session.session_id) == 0


class TestEventLogReplay:
    def test_replay_reconstructs_state_and_exports(self, tmp_path):
        store = make_store(tmp_path)
        full = store.create_session(seed=21)
        complete_session(store, full)
        partial = store.create_session(seed=22)
        for _ in range(3):
            answer_current(store, partial, "A")
        # duplicates must not add events
        store.record_answer(partial.session_id, partial.sequence[0], "A")

        rebuilt = SurveyStore.replay(store.log_path)
        assert sorted(rebuilt.sessions) == sorted(store.sessions)
        for sid, original in store.sessions.items():
            twin = rebuilt.sessions[sid]
            assert twin.phase == original.phase
            assert twin.cursor == original.cursor
            assert twin.answers == original.answers
            assert twin.text_answers == original.text_answers
            assert twin.profile == original.profile
        assert rebuilt.export_responses_rows() == store.export_responses_rows()
        assert rebuilt.export_sessions_rows() == store.export_sessions_rows()
        added = rebuilt.create_session(seed=5)
        assert added.session_id == "s00002"

    def test_log_records_full_orders(self, tmp_path):
        store = make_store(tmp_path)
        session = store.create_session(seed=33)
        events = [json.loads(line) for line in
                  store.log_path.read_text().splitlines()]
        created = events[0]
        assert created["event"] == "session_created"
        assert created["block_order"] == session.block_order
        assert created["question_order"] == session.question_order
        assert "ts" in created


class TestExports:
    def test_empty_store_exports_no_rows(self):
        store = make_store()
        assert store.export_responses_rows() == []
        assert store.export_sessions_rows() == []

    def test_complete_and_partial_rows(self):
        store = make_store()
        done = store.create_session(seed=41)
        complete_session(store, done)
        begun = store.create_session(seed=42)
        answer_current(store, begun, "A")

        rows = store.export_responses_rows()
        assert len(rows) == TOTAL_QUESTIONS + 1
        assert all(tuple(r) == records.RESPONSES_CSV_COLUMNS for r in rows)
        test_rows = [r for r in rows if store.index[r["question_id"]].is_test]
        assert len(test_rows) == BLOCKS_PER_SESSION
        assert all(r["label"] == store.index[r["question_id"]].label
                   for r in rows)

        srws = store.export_sessions_rows()
        assert [r["session_id"] for r in srws] == [done.session_id,
                                                   begun.session_id]
        assert all(tuple(r) == records.SESSIONS_CSV_COLUMNS for r in srws)
        assert srws[0]["error_count"] == "0"
        assert srws[0]["text_pt"] == "1"
        assert srws[1]["error_count"] == ""
        assert srws[1]["gender"] == ""
