import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from consultkit.boundary import (
    CueVector, CueWeights, Lexicon, boundary_prf, boundary_prob, boundary_score,
    cue_scores, predicted_boundary_positions, prf_from_counts, segment,
)
from consultkit.errors import EmptyStream
from consultkit.stream import DialogueTurn, ScriptedDialogue, TokenEvent, synthesize_stream


def tok(text, seq, pause=0, conf=0.9, role="patient", t0=0):
    return TokenEvent(text=text, t_start_ms=t0, t_end_ms=t0 + 200,
                      pause_after_ms=pause, conf=conf, role=role, seq=seq)


@pytest.fixture()
def lexicon():
    return Lexicon(initial_cues={"well": 1.0, "so": 1.0}, terminal_cues={"thanks": 1.0},
                   interrogatives={"does", "when"})


class TestCueScores:
    def test_all_null_cues(self, lexicon):
        tokens = [tok("a", 1, pause=0, conf=0.9), tok("b", 2, conf=0.9)]
        c = cue_scores(tokens, 0, lexicon)
        assert (c.p, c.l, c.r, c.q) == (0.0, 0.0, 0.0, 0.0)

    def test_pause_saturation(self, lexicon):
        tokens = [tok("a", 1, pause=800), tok("b", 2)]
        assert cue_scores(tokens, 0, lexicon, p_max_ms=800).p == 1.0

    def test_role_transition(self, lexicon):
        tokens = [tok("a", 1, role="doctor"), tok("b", 2, role="patient")]
        assert cue_scores(tokens, 0, lexicon).r == 1.0

    def test_end_of_stream_forced(self, lexicon):
        tokens = [tok("a", 1)]
        c = cue_scores(tokens, 0, lexicon)
        assert c.r == 1.0 and c.p == 1.0

    def test_confidence_drop_cue(self, lexicon):
        tokens = [tok("a", 1, conf=0.9), tok("b", 2, conf=0.4)]
        assert cue_scores(tokens, 0, lexicon).q == pytest.approx(0.5)
        rising = [tok("a", 1, conf=0.4), tok("b", 2, conf=0.9)]
        assert cue_scores(rising, 0, lexicon).q == 0.0

    def test_lexical_cue_initial_and_terminal(self, lexicon):
        tokens = [tok("fine", 1), tok("well", 2)]
        assert cue_scores(tokens, 0, lexicon).l == 1.0
        tokens = [tok("thanks", 1), tok("doctor", 2)]
        assert cue_scores(tokens, 0, lexicon).l == 1.0


class TestBoundaryScore:
    def test_zero_input(self):
        w = CueWeights(1, 1, 1, 1, bias=0.0, threshold=0.5)
        assert boundary_score(CueVector(0, 0, 0, 0), w) == 0.0

    def test_unit_sum(self):
        w = CueWeights(1, 1, 1, 1, bias=0.0, threshold=0.5)
        assert boundary_score(CueVector(1, 1, 1, 1), w) == 4.0

    def test_hand_arithmetic(self):
        # 2*0.5 + 1*0.2 + 1*1 + 1*0.3 = 2.5
        w = CueWeights(2, 1, 1, 1, bias=0.0, threshold=0.5)
        assert boundary_score(CueVector(0.5, 0.2, 1.0, 0.3), w) == pytest.approx(2.5)


class TestBoundaryProb:
    def test_midpoint(self):
        assert boundary_prob(0.0) == 0.5

    def test_asymptote(self):
        assert boundary_prob(30.0) > 0.999999

    def test_direct_evaluation(self):
        assert boundary_prob(1.0) == pytest.approx(0.7310585786, abs=1e-9)

    @given(st.floats(min_value=-500, max_value=500))
    def test_symmetry(self, b):
        assert boundary_prob(-b) == pytest.approx(1.0 - boundary_prob(b), abs=1e-12)

    @given(st.floats(min_value=-700, max_value=700))
    def test_strictly_inside_unit_interval(self, b):
        p = boundary_prob(b)
        assert 0.0 < p < 1.0

    def test_monotone_in_cues(self):
        w = CueWeights()
        base = CueVector(0.3, 0.2, 0.0, 0.1)
        p0 = boundary_prob(boundary_score(base, w))
        for bumped in (CueVector(0.5, 0.2, 0.0, 0.1), CueVector(0.3, 0.6, 0.0, 0.1),
                       CueVector(0.3, 0.2, 1.0, 0.1), CueVector(0.3, 0.2, 0.0, 0.9)):
            assert boundary_prob(boundary_score(bumped, w)) >= p0


class TestSegment:
    def test_weak_cues_one_utterance(self, lexicon):
        w = CueWeights(threshold=0.99)
        tokens = [tok(t, i + 1, pause=100) for i, t in enumerate("a b c d e".split())]
        utts = segment(tokens, w, lexicon)
        assert len(utts) == 1
        assert len(utts[0].tokens) == 5

    def test_role_change_forces_split(self, lexicon):
        tokens = [tok("hello", 1, role="doctor", pause=100),
                  tok("there", 2, role="doctor", pause=100),
                  tok("hi", 3, role="patient", pause=100),
                  tok("doctor", 4, role="patient")]
        utts = segment(tokens, CueWeights(threshold=0.99), lexicon)
        assert len(utts) >= 2
        assert utts[0].end_seq == 2 and utts[1].start_seq == 3

    def test_paper_span_with_injected_pauses(self, lexicon):
        # The unpunctuated example span; long pauses injected at the scripted
        # sentence ends must come back as exactly those boundaries.
        script = ScriptedDialogue(case_id="t", turns=(DialogueTurn(
            role="patient",
            text="started yesterday. chest feels tight. worse when climbing stairs. "
                 "gets a little better after sitting. left shoulder sometimes sore.",
            boundary_styles=("long", "long", "long", "long")),))
        stream = synthesize_stream(script, seed=13)
        gold = [1, 4, 8, 14]  # token indexes ending each scripted sentence
        utts = segment(stream, CueWeights(), lexicon, ablation="full")
        assert predicted_boundary_positions(utts, stream) == gold

    def test_partition_property(self, lexicon, resources, run_config):
        case_script = ScriptedDialogue(case_id="t", turns=(
            DialogueTurn(role="doctor", text="does it hurt when you breathe?"),
            DialogueTurn(role="patient", text="only a little. mostly at night."),
        ))
        stream = synthesize_stream(case_script, seed=3)
        for ablation in ("none", "pause_only", "pause_lexical", "full"):
            utts = segment(stream, run_config.cue_weights, resources.lexicon, ablation)
            covered = [t.seq for u in utts for t in u.tokens]
            assert covered == [t.seq for t in stream]

    def test_question_mark_from_interrogative(self, lexicon):
        tokens = [tok("does", 1, pause=100), tok("it", 2, pause=100), tok("hurt", 3)]
        utts = segment(tokens, CueWeights(), lexicon)
        assert utts[-1].terminal_mark == "question"

    def test_empty_stream(self, lexicon):
        with pytest.raises(EmptyStream):
            segment([], CueWeights(), lexicon)


class TestBoundaryPrf:
    def test_paper_counts(self):
        # Published raw-count audit for the strongest setting.
        gold = list(range(114))                      # 96 matched + 18 missed
        predicted = list(range(96)) + list(range(1000, 1021))  # 96 + 21 spurious
        p, r, f1, tp, fp, fn = boundary_prf(predicted, gold)
        assert (tp, fp, fn) == (96, 21, 18)
        assert p == pytest.approx(0.8205, abs=0.0005)
        assert r == pytest.approx(0.8421, abs=0.0005)
        assert f1 == pytest.approx(0.8312, abs=0.0005)

    def test_perfect_match(self):
        p, r, f1, *_ = boundary_prf([1, 5, 9], [1, 5, 9])
        assert (p, r, f1) == (1.0, 1.0, 1.0)

    def test_empty_predictions_convention(self):
        p, r, f1, tp, fp, fn = boundary_prf([], [3, 7])
        assert (p, r, f1) == (0.0, 0.0, 0.0)
        assert (tp, fp, fn) == (0, 0, 2)

    def test_tolerance_matching_is_one_to_one(self):
        p, r, f1, tp, fp, fn = boundary_prf([10, 11], [10], tolerance_tokens=1)
        assert (tp, fp, fn) == (1, 1, 0)

    @given(tp=st.integers(0, 500), fp=st.integers(0, 500), fn=st.integers(0, 500))
    def test_prf_from_counts_identities(self, tp, fp, fn):
        p, r, f1 = prf_from_counts(tp, fp, fn)
        if tp + fp:
            assert p == pytest.approx(tp / (tp + fp), abs=1e-12)
        if tp + fn:
            assert r == pytest.approx(tp / (tp + fn), abs=1e-12)
        if p + r:
            assert f1 == pytest.approx(2 * p * r / (p + r), abs=1e-12)


class TestAblationOrdering:
    def test_f1_ordering_on_bundled_suite(self, resources, run_config, all_cases):
        pooled = {s: [0, 0, 0] for s in ("none", "pause_only", "pause_lexical", "full")}
        for case in all_cases:
            stream = synthesize_stream(case.script, seed=7)
            for setting in pooled:
                utts = segment(stream, run_config.cue_weights, resources.lexicon, setting)
                pred = predicted_boundary_positions(utts, stream)
                _p, _r, _f1, tp, fp, fn = boundary_prf(pred, list(case.gold_boundaries))
                pooled[setting][0] += tp
                pooled[setting][1] += fp
                pooled[setting][2] += fn
        f1s = [prf_from_counts(*pooled[s])[2] for s in ("none", "pause_only", "pause_lexical", "full")]
        assert f1s[0] <= f1s[1] <= f1s[2] <= f1s[3]
