import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from consultkit.boundary import RecoveredUtterance
from consultkit.errors import UnknownField
from consultkit.extraction import (
    ASSERTED, NEGATED, CurrentState, FieldDef, FieldSchema, MatchCounts, StateEvent,
    apply_events, event_prf, extract_events, match_events,
)
from consultkit.stream import TokenEvent


def schema():
    return FieldSchema(
        fields=[
            FieldDef("fever", "symptom", ("present",)),
            FieldDef("chest_tightness", "symptom", ("present",)),
            FieldDef("exertional_worsening", "modifier", ("present",)),
            FieldDef("onset", "onset", ("yesterday",)),
        ],
        synonym_map={
            "fever": ("fever", "present"),
            "tight": ("chest_tightness", "present"),
            "climbing stairs": ("exertional_worsening", "present"),
            "yesterday": ("onset", "yesterday"),
        },
        negation_cues=["no", "not"],
        temporal_cues={"yesterday": "since_yesterday"},
    )


def utterance(text, turn=1, conf=0.9, start_seq=1):
    tokens = tuple(
        TokenEvent(text=w, t_start_ms=i * 300, t_end_ms=i * 300 + 200, pause_after_ms=100,
                   conf=conf, role="patient", seq=start_seq + i)
        for i, w in enumerate(text.split())
    )
    return RecoveredUtterance(tokens=tokens, role="patient", terminal_mark="period",
                              boundary_prob=0.9, start_seq=tokens[0].seq,
                              end_seq=tokens[-1].seq, turn=turn)


class TestExtractEvents:
    def test_negated_fever(self):
        events = extract_events(utterance("no fever"), schema())
        assert len(events) == 1
        assert events[0].field_id == "fever"
        assert events[0].polarity == NEGATED

    def test_no_matches(self):
        assert extract_events(utterance("hello there doctor"), schema()) == []

    def test_two_asserted_events(self):
        events = extract_events(utterance("chest feels tight worse when climbing stairs"), schema())
        assert [(e.field_id, e.polarity) for e in events] == [
            ("chest_tightness", ASSERTED), ("exertional_worsening", ASSERTED)]

    def test_negation_window_is_four_tokens(self):
        inside = extract_events(utterance("not a b c fever"), schema())
        assert inside[0].polarity == NEGATED
        outside = extract_events(utterance("not a b c d fever"), schema())
        assert outside[0].polarity == ASSERTED

    def test_negation_never_crosses_utterance(self):
        first = extract_events(utterance("no fever", turn=1), schema())
        second = extract_events(utterance("tight chest", turn=1, start_seq=10), schema())
        assert first[0].polarity == NEGATED
        assert second[0].polarity == ASSERTED

    def test_temporal_qualifier_same_utterance(self):
        events = extract_events(utterance("started yesterday chest feels tight"), schema())
        assert all(e.temporal == "since_yesterday" for e in events)
        events = extract_events(utterance("chest feels tight"), schema())
        assert events[0].temporal is None

    def test_confidence_is_span_mean(self):
        events = extract_events(utterance("climbing stairs", conf=0.6), schema())
        assert events[0].confidence == pytest.approx(0.6)

    def test_determinism(self):
        u = utterance("no fever but chest tight yesterday")
        assert extract_events(u, schema()) == extract_events(u, schema())


class TestApplyEvents:
    def test_empty_plus_empty(self):
        state = CurrentState.empty(schema())
        assert apply_events(state, []) is state

    def test_last_writer_wins_polarity(self):
        s = CurrentState.empty(schema())
        e1 = StateEvent("fever", "present", ASSERTED, None, 1, (1, 1), 0.9)
        e2 = StateEvent("fever", "present", NEGATED, None, 2, (5, 5), 0.9)
        s = apply_events(apply_events(s, [e1]), [e2])
        assert s.slot("fever").polarity == NEGATED
        assert len(s.history) == 2

    def test_unknown_field(self):
        s = CurrentState.empty(schema())
        bad = StateEvent("pulse", "present", ASSERTED, None, 1, (1, 1), 0.9)
        with pytest.raises(UnknownField):
            apply_events(s, [bad])

    def test_fold_equivalence_random_lists(self):
        # Replaying any prefix reproduces the slot map of that prefix.
        rng = random.Random(42)
        fields = ["fever", "chest_tightness", "onset"]
        events = [
            StateEvent(rng.choice(fields), "present", rng.choice([ASSERTED, NEGATED]),
                       None, i, (i, i), 0.5)
            for i in range(60)
        ]
        base = CurrentState.empty(schema())
        whole = apply_events(base, events)
        stepped = base
        for ev in events:
            stepped = apply_events(stepped, [ev])
        assert whole.slots == stepped.slots
        assert whole.history == stepped.history
        for cut in (0, 10, 37, 60):
            prefix = apply_events(base, events[:cut])
            refold = base
            for ev in events[:cut]:
                refold = apply_events(refold, [ev])
            assert prefix.slots == refold.slots


def ev(field, value, pol, turn):
    return StateEvent(field, value, pol, None, turn, (0, 0), 1.0)


class TestMatchEvents:
    def test_identical_lists(self):
        gold = [ev("fever", "present", ASSERTED, 1), ev("onset", "yesterday", ASSERTED, 2)]
        counts = match_events(list(gold), gold)
        assert (counts.tp, counts.fp, counts.fn) == (2, 0, 0)

    def test_empty_predictions(self):
        gold = [ev("fever", "present", ASSERTED, t) for t in range(5)]
        counts = match_events([], gold)
        assert (counts.tp, counts.fp, counts.fn) == (0, 0, 5)

    def test_turn_tolerance_one(self):
        gold = [ev("fever", "present", ASSERTED, 3)]
        assert match_events([ev("fever", "present", ASSERTED, 4)], gold).tp == 1
        assert match_events([ev("fever", "present", ASSERTED, 5)], gold).tp == 0

    def test_polarity_flip_counts_both_ways(self):
        # Brute-force enumeration of the greedy matching on a small instance:
        # 3 gold, 3 predictions, one polarity flip -> 2 matches + 1 fp + 1 fn.
        gold = [ev("fever", "present", ASSERTED, 1),
                ev("chest_tightness", "present", ASSERTED, 1),
                ev("onset", "yesterday", ASSERTED, 2)]
        pred = [ev("fever", "present", NEGATED, 1),
                ev("chest_tightness", "present", ASSERTED, 1),
                ev("onset", "yesterday", ASSERTED, 2)]
        expected_tp = 0
        matched_gold = set()
        for p in sorted(pred, key=lambda e: (e.source_turn, e.field_id)):
            for j, g in enumerate(sorted(gold, key=lambda e: (e.source_turn, e.field_id))):
                if j in matched_gold:
                    continue
                if p.key() == g.key() and abs(p.source_turn - g.source_turn) <= 1:
                    matched_gold.add(j)
                    expected_tp += 1
                    break
        counts = match_events(pred, gold)
        assert counts.tp == expected_tp == 2
        assert (counts.fp, counts.fn) == (1, 1)

    def test_duplicates_match_one_to_one(self):
        gold = [ev("fever", "present", ASSERTED, 1)]
        pred = [ev("fever", "present", ASSERTED, 1), ev("fever", "present", ASSERTED, 1)]
        counts = match_events(pred, gold)
        assert (counts.tp, counts.fp, counts.fn) == (1, 1, 0)


class TestEventPrf:
    def test_paper_raw_count_audit(self):
        p, r, f1 = event_prf(MatchCounts(91, 16, 19))
        assert p == pytest.approx(0.8505, abs=0.0005)
        assert r == pytest.approx(0.8273, abs=0.0005)
        assert f1 == pytest.approx(0.8387, abs=0.0005)
        # the published two-decimal view
        assert (round(p, 2), round(r, 2), round(f1, 2)) == (0.85, 0.83, 0.84)

    def test_zero_convention(self):
        assert event_prf(MatchCounts(0, 0, 0)) == (0.0, 0.0, 0.0)

    def test_perfect(self):
        assert event_prf(MatchCounts(10, 0, 0)) == (1.0, 1.0, 1.0)

    @given(tp=st.integers(0, 300), fp=st.integers(0, 300), fn=st.integers(0, 300))
    @settings(max_examples=200)
    def test_matches_scalar_recomputation(self, tp, fp, fn):
        p, r, f1 = event_prf(MatchCounts(tp, fp, fn))
        p2 = tp / (tp + fp) if tp + fp else 0.0
        r2 = tp / (tp + fn) if tp + fn else 0.0
        f2 = 2 * p2 * r2 / (p2 + r2) if p2 + r2 else 0.0
        assert abs(p - p2) < 1e-12 and abs(r - r2) < 1e-12 and abs(f1 - f2) < 1e-12


class TestGoldEventsFile:
    def test_load_gold_events_round_trip(self, resources, all_cases):
        from consultkit.extraction import load_gold_events

        gold = load_gold_events(resources.suite_dir / "gold_events.jsonl")
        assert set(gold) == {c.case_id for c in all_cases}
        for case in all_cases:
            counts = match_events(list(case.gold_events), gold[case.case_id])
            assert counts.fp == 0 and counts.fn == 0
