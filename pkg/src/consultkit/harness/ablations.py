"""Ablation drivers: the stabilization ladder and the punctuation settings.

Both run the same cases under one seed and report pooled tables; the
stabilization table tracks volatility, information-gain variance, and
wrong actions, the punctuation table tracks boundary F1, state F1,
retrieval nDCG, and action accuracy.
"""

from __future__ import annotations

import numpy as np

from ..boundary import boundary_prf, predicted_boundary_positions, prf_from_counts, segment
from ..extraction import MatchCounts, event_prf, match_events
from ..planner import count_wrong_actions
from ..retrieval import ndcg_at_k
from ..stream import synthesize_stream
from .cases import PilotCase, SuiteResources
from .config import STAGES, RunConfig
from .metrics import derive_gold_action_turns
from .runner import run_case

PUNCTUATION_SETTINGS = ("none", "pause_only", "pause_lexical", "full")


def ablate_belief(
    cases: list[PilotCase],
    base_cfg: RunConfig,
    stages: list[str],
    seed: int,
    resources: SuiteResources,
) -> dict[str, dict]:
    """One row per stabilizer stage over the same cases and seed."""
    table: dict[str, dict] = {}
    for stage in stages:
        if stage not in STAGES:
            raise ValueError(f"unknown stabilizer stage {stage!r}")
        cfg = base_cfg.with_harness(baseline="D_full", stabilizer_stage=stage)
        vols, eig_vars, wrong_total, turn_total = [], [], 0, 0
        for case in cases:
            result, _trace = run_case(case, cfg, seed, resources=resources)
            smoothed = result.smoothed_sequence
            if len(smoothed) >= 2:
                steps = [float(np.abs(b.dist - a.dist).sum())
                         for a, b in zip(smoothed, smoothed[1:])]
                vols.append(sum(steps) / len(steps))
            vs = [t.selected_score.v for t in result.turns if t.selected_score is not None]
            if vs:
                eig_vars.append(float(np.mean(vs)))
            wrong_total += count_wrong_actions(
                [t.selected for t in result.turns], derive_gold_action_turns(result, case))
            turn_total += len(result.turns)
        table[stage] = {
            "volatility": float(np.mean(vols)) if vols else 0.0,
            "eig_variance": float(np.mean(eig_vars)) if eig_vars else 0.0,
            "wrong_actions": wrong_total,
            "turns": turn_total,
        }
    return table


def ablate_punctuation(
    cases: list[PilotCase],
    base_cfg: RunConfig,
    settings: list[str],
    seed: int,
    resources: SuiteResources,
) -> dict[str, dict]:
    """One row per punctuation setting: boundary F1 on the script streams,
    plus downstream state F1, state-conditioned retrieval nDCG, and action
    accuracy from full runs under that setting."""
    table: dict[str, dict] = {}
    for setting in settings:
        if setting not in PUNCTUATION_SETTINGS:
            raise ValueError(f"unknown punctuation setting {setting!r}")
        cfg = base_cfg.with_harness(baseline="D_full", punctuation=setting)

        b_tp = b_fp = b_fn = 0
        tp = fp = fn = 0
        wrong_total = turn_total = 0
        ndcgs: list[float] = []
        for case in cases:
            stream = synthesize_stream(case.script, seed)
            utterances = segment(stream, cfg.cue_weights, resources.lexicon,
                                 ablation=setting, p_max_ms=cfg.p_max_ms)
            predicted = predicted_boundary_positions(utterances, stream)
            _p, _r, _f1, c_tp, c_fp, c_fn = boundary_prf(predicted, list(case.gold_boundaries))
            b_tp, b_fp, b_fn = b_tp + c_tp, b_fp + c_fp, b_fn + c_fn

            result, _trace = run_case(case, cfg, seed, resources=resources)
            pred_events = [ev for t in result.turns if t.source == "script" for ev in t.events]
            counts = match_events(pred_events, list(case.gold_events))
            tp, fp, fn = tp + counts.tp, fp + counts.fp, fn + counts.fn

            wrong_total += count_wrong_actions(
                [t.selected for t in result.turns], derive_gold_action_turns(result, case))
            turn_total += len(result.turns)

            ndcgs.extend(_state_query_ndcg(result, case, resources, cfg))

        _bp, _br, b_f1 = prf_from_counts(b_tp, b_fp, b_fn)
        _ep, _er, e_f1 = event_prf(MatchCounts(tp, fp, fn))
        table[setting] = {
            "boundary_f1": b_f1,
            "state_f1": e_f1,
            "retrieval_ndcg": float(np.mean(ndcgs)) if ndcgs else 0.0,
            "action_accuracy": 1.0 - wrong_total / turn_total if turn_total else 0.0,
        }
    return table


def _state_query_ndcg(result, case: PilotCase, resources: SuiteResources, cfg: RunConfig) -> list[float]:
    """Retrieval quality as seen through the session's extracted state.

    Each qrels entry declares the schema fields it is built from; queries
    are re-assembled from the session's final asserted values, so boundary
    damage that corrupts extraction degrades the query and the ranking.
    """
    from ..retrieval import retrieve

    scores: list[float] = []
    state = result.final_state
    for qid in case.query_ids:
        entry = resources.qrels.get(qid)
        if entry is None or not entry.fields:
            continue
        terms: list[str] = []
        for field_id in entry.fields:
            ev = state.slot(field_id)
            if ev is not None and ev.polarity == "asserted":
                terms.append(field_id.replace("_", " "))
                if ev.value not in ("present",):
                    terms.append(ev.value.replace("_", " "))
        if not terms:
            scores.append(0.0)
            continue
        ranked = retrieve(resources.index, " ".join(terms), k=5, mode=cfg.retrieval_mode)
        scores.append(ndcg_at_k({qid: ranked}, {qid: entry}, k=5))
    return scores
