"""End-to-end metric layers: coverage, structural completeness, risk
recall, redundancy, goal turn, extraction PRF, retrieval metrics,
volatility, and wrong actions.

Every rate is stored next to its raw counts and must equal their ratio
exactly; suite-level aggregation pools counts across cases.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..belief import volatility
from ..extraction import MatchCounts, event_prf, match_events
from ..planner import count_wrong_actions
from ..retrieval import (
    mrr_at_k, ndcg_at_k, object_and_path_hits, recall_at_k, retrieve,
)
from .cases import PilotCase, SuiteResources
from .config import RunConfig
from .runner import SessionResult


@dataclass
class Ratio:
    hits: int
    total: int

    @property
    def rate(self) -> float:
        return self.hits / self.total if self.total else 0.0

    def to_dict(self) -> dict:
        return {"hits": self.hits, "total": self.total, "rate": self.rate}


@dataclass
class MetricsReport:
    case_id: str
    baseline: str
    coverage: Ratio
    structural: Ratio
    risk_recall: Ratio
    redundancy: Ratio
    t_goal: int | None
    extraction_counts: MatchCounts
    retrieval: dict
    volatility: float
    eig_variance: float
    wrong_actions: int
    turns: int
    action_utility_placeholder: dict
    timings_ms: dict = field(default_factory=dict)

    @property
    def extraction_prf(self) -> tuple[float, float, float]:
        return event_prf(self.extraction_counts)

    def to_dict(self) -> dict:
        p, r, f1 = self.extraction_prf
        return {
            "case_id": self.case_id,
            "baseline": self.baseline,
            "coverage": self.coverage.to_dict(),
            "structural_completeness": self.structural.to_dict(),
            "risk_recall": self.risk_recall.to_dict(),
            "redundancy": self.redundancy.to_dict(),
            "t_goal": self.t_goal if self.t_goal is not None else "not_reached",
            "extraction": {"tp": self.extraction_counts.tp, "fp": self.extraction_counts.fp,
                           "fn": self.extraction_counts.fn,
                           "precision": p, "recall": r, "f1": f1},
            "retrieval": self.retrieval,
            "volatility": self.volatility,
            "eig_variance": self.eig_variance,
            "wrong_actions": self.wrong_actions,
            "turns": self.turns,
            "action_utility_placeholder": self.action_utility_placeholder,
            "timings_ms": self.timings_ms,
        }


def rates_from_counts(coverage, structural, risk, redundancy) -> dict:
    """Rates for externally-audited raw counts (e.g. published tallies)."""
    out = {}
    for name, (hits, total) in {
        "coverage": coverage, "structural_completeness": structural,
        "risk_recall": risk, "redundancy": redundancy,
    }.items():
        out[name] = Ratio(hits, total).to_dict()
    return out


def derive_gold_action_turns(result: SessionResult, case: PilotCase) -> list[dict]:
    """Per-turn gold annotations for wrong-action counting.

    Preferred kinds come from the case's declared defaults, widened with
    "conclude" once the goal state is met; gold risks that never got closed
    append one due-entry each past the session end.
    """
    defaults = list(case.preferred_actions.get(
        "default_kinds", ["ask", "verify", "recommend_exam", "risk_close"]))
    widen = case.preferred_actions.get("conclude_when_goal_met", True)
    gold: list[dict] = []
    for t in result.turns:
        kinds = list(defaults)
        if widen and t.goal_met_at_selection:
            kinds.append("conclude")
        gold.append({"preferred_kinds": kinds, "risk_due": t.risk_due_at_selection})
    for check in case.goal.risk_checks:
        if check.risk_id not in result.closed_risks:
            gold.append({"preferred_kinds": [], "risk_due": check.risk_id})
    return gold


def end_to_end_metrics(
    result: SessionResult,
    case: PilotCase,
    resources: SuiteResources,
    cfg: RunConfig,
) -> MetricsReport:
    state = result.final_state

    cov_hits = 0
    for field_id, value, polarity in case.gold_information_items:
        ev = state.slot(field_id)
        if ev is not None and ev.value == value and ev.polarity == polarity:
            cov_hits += 1
    coverage = Ratio(cov_hits, len(case.gold_information_items))

    s_hits = 0
    for slot in case.goal.required_slots:
        ev = state.slot(slot)
        gold = case.gold_slot_values.get(slot)
        if ev is not None and gold is not None and (ev.value, ev.polarity) == tuple(gold):
            s_hits += 1
    structural = Ratio(s_hits, len(case.goal.required_slots))

    risk = Ratio(len(set(result.triggered_turns) & {c.risk_id for c in case.goal.risk_checks}),
                 len(case.goal.risk_checks))

    redundant = sum(1 for p in result.prompts if p["redundant"])
    redundancy = Ratio(redundant, len(result.prompts))

    predicted = [ev for t in result.turns if t.source == "script" for ev in t.events]
    counts = match_events(predicted, list(case.gold_events))

    case_qrels = resources.case_qrels(case)
    retrieval_metrics = {}
    if case_qrels:
        results = {qid: retrieve(resources.index, entry.query, k=5, mode=cfg.retrieval_mode)
                   for qid, entry in case_qrels.items()}
        rate, hits, total = recall_at_k(results, case_qrels, k=5)
        hit_stats = object_and_path_hits(results, case_qrels, resources.index.adjacency, k=5)
        retrieval_metrics = {
            "recall_at_5": {"hits": hits, "total": total, "rate": rate},
            "mrr_at_5": mrr_at_k(results, case_qrels, k=5),
            "ndcg_at_5": ndcg_at_k(results, case_qrels, k=5),
            **hit_stats,
        }

    smoothed = result.smoothed_sequence
    vol = volatility(smoothed) if len(smoothed) >= 2 else 0.0

    selected_vs = [t.selected_score.v for t in result.turns
                   if t.selected_score is not None and t.selected is not None]
    eig_var = float(np.mean(selected_vs)) if selected_vs else 0.0

    selected = [t.selected for t in result.turns]
    wrong = count_wrong_actions(selected, derive_gold_action_turns(result, case))

    utilities = [
        max(0.0, min(1.0, t.selected_score.eig / t.selected_score.h0))
        for t in result.turns
        if t.selected is not None and t.selected_score is not None and t.selected_score.h0 > 1e-12
    ]
    placeholder = {
        "value": float(np.mean(utilities)) if utilities else 0.0,
        "non_normative": True,
        "note": "mean selected-action information gain normalized to [0,1]; "
                "not comparable to any published utility number",
    }

    stage_names = ("ingest", "boundary", "extraction", "belief", "retrieval", "planning")
    timings = {
        s: float(np.mean([t.timings_ms.get(s, 0.0) for t in result.turns])) if result.turns else 0.0
        for s in stage_names
    }

    return MetricsReport(
        case_id=case.case_id, baseline=result.baseline,
        coverage=coverage, structural=structural, risk_recall=risk,
        redundancy=redundancy, t_goal=result.t_goal,
        extraction_counts=counts, retrieval=retrieval_metrics,
        volatility=vol, eig_variance=eig_var, wrong_actions=wrong,
        turns=len(result.turns),
        action_utility_placeholder=placeholder, timings_ms=timings,
    )


def pool_reports(reports: list[MetricsReport]) -> dict:
    """Suite-level pooled metrics: counts summed across cases, rates
    recomputed from the pooled counts."""
    def pool(get) -> Ratio:
        return Ratio(sum(get(r).hits for r in reports), sum(get(r).total for r in reports))

    coverage = pool(lambda r: r.coverage)
    structural = pool(lambda r: r.structural)
    risk = pool(lambda r: r.risk_recall)
    redundancy = pool(lambda r: r.redundancy)
    tp = sum(r.extraction_counts.tp for r in reports)
    fp = sum(r.extraction_counts.fp for r in reports)
    fn = sum(r.extraction_counts.fn for r in reports)
    p, rec, f1 = event_prf(MatchCounts(tp, fp, fn))
    t_goals = [r.t_goal for r in reports if r.t_goal is not None]
    return {
        "cases": [r.case_id for r in reports],
        "coverage": coverage.to_dict(),
        "structural_completeness": structural.to_dict(),
        "risk_recall": risk.to_dict(),
        "redundancy": redundancy.to_dict(),
        "t_goal_mean": float(np.mean(t_goals)) if t_goals else "not_reached",
        "t_goal_reached": len(t_goals),
        "extraction": {"tp": tp, "fp": fp, "fn": fn, "precision": p, "recall": rec, "f1": f1},
        "volatility_mean": float(np.mean([r.volatility for r in reports])) if reports else 0.0,
        "eig_variance_mean": float(np.mean([r.eig_variance for r in reports])) if reports else 0.0,
        "wrong_actions": sum(r.wrong_actions for r in reports),
        "turns": sum(r.turns for r in reports),
        "action_utility_placeholder": {
            "value": float(np.mean([r.action_utility_placeholder["value"] for r in reports])) if reports else 0.0,
            "non_normative": True,
        },
    }
