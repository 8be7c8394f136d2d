"""Gap derivation, candidate generation, stabilized information-gain
scoring, and action selection.

Actions are ranked by expected information gain: current entropy minus the
Monte-Carlo mean of post-action posterior entropies, minus a variance
penalty. A risk-closing candidate, when present, is always selected.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .belief import BeliefState, HypothesisSet, entropy
from .errors import EmptyCandidates, NoObservationModel, TurnMisalignment
from .extraction import ASSERTED, CurrentState
from .retrieval import RetrievalIndex, retrieve

ACTION_KINDS = ("ask", "verify", "recommend_exam", "risk_close", "conclude")
PROMPT_KINDS = ("ask", "verify", "recommend_exam", "risk_close")

GAP_PRIORITIES = {"unresolved_risk": 3.0, "missing_slot": 2.0, "low_confidence": 1.0}


@dataclass(frozen=True)
class RiskCheck:
    risk_id: str
    # AND-ed clauses over current slots: (field_id, polarity, value-or-None)
    trigger: tuple[tuple[str, str, str | None], ...]

    def triggered(self, state: CurrentState) -> bool:
        for field_id, polarity, value in self.trigger:
            ev = state.slot(field_id)
            if ev is None or ev.polarity != polarity:
                return False
            if value is not None and ev.value != value:
                return False
        return True


@dataclass(frozen=True)
class GoalState:
    required_slots: tuple[str, ...]
    risk_checks: tuple[RiskCheck, ...]
    confidence_floor: float = 0.45

    def __post_init__(self):
        ids = [r.risk_id for r in self.risk_checks]
        if len(set(ids)) != len(ids):
            raise ValueError("risk ids must be unique")


@dataclass(frozen=True)
class GapSignal:
    kind: str  # missing_slot | unresolved_risk | low_confidence
    target: str
    priority: float


@dataclass(frozen=True)
class ObservationModel:
    """Per-action likelihood table: answer id -> (text, P(answer | hypothesis))."""

    answers: tuple[str, ...]
    texts: dict[str, str]
    likelihood: np.ndarray  # shape (n_answers, n_hypotheses), columns sum to 1

    @staticmethod
    def from_dict(d: dict, hypotheses: HypothesisSet) -> "ObservationModel":
        answers = tuple(sorted(d["answers"]))
        texts = {a: d["answers"][a]["text"] for a in answers}
        lik = np.zeros((len(answers), len(hypotheses)))
        for i, a in enumerate(answers):
            probs = d["answers"][a]["likelihood"]
            for hyp, p in probs.items():
                lik[i, hypotheses.index(hyp)] = float(p)
        col_sums = lik.sum(axis=0)
        if np.any(np.abs(col_sums - 1.0) > 1e-9):
            raise ValueError("observation model columns must each sum to 1")
        return ObservationModel(answers=answers, texts=texts, likelihood=lik)

    @staticmethod
    def uninformative(hypotheses: HypothesisSet, text: str = "noted") -> "ObservationModel":
        return ObservationModel(
            answers=("noted",), texts={"noted": text},
            likelihood=np.ones((1, len(hypotheses))),
        )


@dataclass(frozen=True)
class CandidateAction:
    action_id: str
    kind: str
    target: str | None
    prompt_text: str
    observation_model: ObservationModel | None = None

    def __post_init__(self):
        if self.kind not in ACTION_KINDS:
            raise ValueError(f"unknown action kind {self.kind!r}")
        if self.kind == "risk_close" and not self.target:
            raise ValueError("risk_close actions need a risk target")


@dataclass(frozen=True)
class EigScore:
    eig: float
    h0: float
    h_bar: float
    v: float
    draws: int


@dataclass(frozen=True)
class PlannerConfig:
    eta: float = 0.5
    mc_samples: int = 64
    rng_seed: int = 0
    conservative: bool = True
    conservative_margin: float = 0.05
    max_prompts_per_turn: int = 1
    exam_candidates: int = 2

    def __post_init__(self):
        if self.eta < 0 or self.mc_samples < 1 or self.conservative_margin < 0:
            raise ValueError("invalid planner config")

    @staticmethod
    def from_dict(d: dict) -> "PlannerConfig":
        return PlannerConfig(**d)


def derive_gaps(
    state: CurrentState,
    goal: GoalState,
    belief: BeliefState,
    closed_risks: frozenset[str] = frozenset(),
) -> list[GapSignal]:
    """Typed differences between current and goal state, sorted by priority
    (risk > missing slot > low confidence), stable by target id."""
    gaps: list[GapSignal] = []
    for check in goal.risk_checks:
        if check.risk_id not in closed_risks and check.triggered(state):
            gaps.append(GapSignal("unresolved_risk", check.risk_id, GAP_PRIORITIES["unresolved_risk"]))
    for slot in goal.required_slots:
        if state.slot(slot) is None:
            gaps.append(GapSignal("missing_slot", slot, GAP_PRIORITIES["missing_slot"]))
    if belief.max() < goal.confidence_floor:
        gaps.append(GapSignal("low_confidence", "belief", GAP_PRIORITIES["low_confidence"]))
    gaps.sort(key=lambda g: (-g.priority, g.target))
    return gaps


def build_query(state: CurrentState, gaps: list[GapSignal]) -> str:
    """Deterministic retrieval query from asserted slot values and the gap
    targets; underscores become spaces so ids match corpus vocabulary."""
    terms: list[str] = []
    for field_id in sorted(state.slots):
        ev = state.slots[field_id]
        if ev.polarity == ASSERTED:
            terms.append(field_id.replace("_", " "))
            if ev.value not in ("present",):
                terms.append(ev.value.replace("_", " "))
    for gap in gaps:
        if gap.kind == "missing_slot":
            terms.append(gap.target.replace("_", " "))
    seen: set[str] = set()
    out = []
    for t in terms:
        if t not in seen:
            seen.add(t)
            out.append(t)
    return " ".join(out) if out else "consultation"


def generate_candidates(
    gaps: list[GapSignal],
    belief: BeliefState,
    index: RetrievalIndex | None,
    cfg: PlannerConfig,
    hypotheses: HypothesisSet,
    models: dict[str, ObservationModel] | None = None,
    query: str | None = None,
    asked: frozenset[str] = frozenset(),
    verified: frozenset[str] = frozenset(),
    recommended: frozenset[str] = frozenset(),
    retrieval_mode: str = "hybrid",
) -> list[CandidateAction]:
    """Deterministic candidate set for this turn's gaps.

    One ask per not-yet-asked missing slot, one verify for the top
    unverified hypothesis on low confidence, one risk_close per unresolved
    risk, exam recommendations from the top retrieved exam units, and
    conclude only when no gaps remain.
    """
    models = models or {}

    def model_for(action_id: str) -> ObservationModel:
        return models.get(action_id) or ObservationModel.uninformative(hypotheses)

    if not gaps:
        return [CandidateAction(
            action_id="conclude", kind="conclude", target=None,
            prompt_text="consultation goals are met; wrap up and confirm the summary.",
            observation_model=ObservationModel.uninformative(hypotheses),
        )]

    candidates: list[CandidateAction] = []
    for gap in gaps:
        if gap.kind == "missing_slot":
            if gap.target in asked:
                continue
            aid = f"ask:{gap.target}"
            candidates.append(CandidateAction(
                action_id=aid, kind="ask", target=gap.target,
                prompt_text=f"ask the patient about {gap.target.replace('_', ' ')}.",
                observation_model=model_for(aid),
            ))
        elif gap.kind == "unresolved_risk":
            aid = f"risk_close:{gap.target}"
            candidates.append(CandidateAction(
                action_id=aid, kind="risk_close", target=gap.target,
                prompt_text=f"run the closing check for risk {gap.target.replace('_', ' ')}.",
                observation_model=model_for(aid),
            ))
        elif gap.kind == "low_confidence":
            # Top unverified hypothesis; once all are spent, re-verifying the
            # leader is the only informative move left for this gap.
            order = np.argsort(-belief.dist, kind="stable")
            target = next((hypotheses.ids[i] for i in order if hypotheses.ids[i] not in verified),
                          hypotheses.ids[belief.argmax()])
            aid = f"verify:{target}"
            candidates.append(CandidateAction(
                action_id=aid, kind="verify", target=target,
                prompt_text=f"verify the working hypothesis {target.replace('_', ' ')}.",
                observation_model=model_for(aid),
            ))
    if index is not None and len(index) > 0:
        ranked = retrieve(index, query or "consultation", k=len(index), mode=retrieval_mode)
        exams = [oid for oid, _s, _a in ranked
                 if index.objects[oid].kind == "exam_unit" and oid not in recommended]
        for oid in exams[:cfg.exam_candidates]:
            aid = f"recommend_exam:{oid}"
            candidates.append(CandidateAction(
                action_id=aid, kind="recommend_exam", target=oid,
                prompt_text=f"recommend: {index.objects[oid].text}",
                observation_model=model_for(aid),
            ))
    if not candidates:
        # Remaining gaps are unanswerable (slots already asked, answers
        # pending); conclude rather than stall.
        candidates.append(CandidateAction(
            action_id="conclude", kind="conclude", target=None,
            prompt_text="no further informative actions available; wrap up.",
            observation_model=ObservationModel.uninformative(hypotheses),
        ))
    return candidates


def estimate_eig(
    a: CandidateAction,
    belief: BeliefState,
    cfg: PlannerConfig,
    rng: np.random.Generator | None = None,
) -> EigScore:
    """Monte-Carlo stabilized expected information gain.

    Samples (hypothesis, answer) pairs, applies a single multiplicative
    posterior update per answer, and penalizes the spread of posterior
    entropies: eig = h0 - mean(H) - eta * var(H) (population variance).
    The sample mean is clipped at the prior entropy: the exact expectation
    can never exceed it, so the clip removes only sampling noise and keeps
    eig >= -eta * var.
    """
    if a.observation_model is None:
        raise NoObservationModel(a.action_id)
    if rng is None:
        rng = np.random.default_rng(cfg.rng_seed)
    model = a.observation_model
    h0 = entropy(belief)
    n_hyp = len(belief.dist)
    if model.likelihood.shape[1] != n_hyp:
        raise ValueError("observation model does not match belief dimension")

    m = cfg.mc_samples
    cum_h = np.cumsum(belief.dist)
    hs = np.minimum(np.searchsorted(cum_h, rng.random(m), side="right"), n_hyp - 1)
    cum_ans = np.cumsum(model.likelihood, axis=0)  # (answers, hypotheses)
    ans = (cum_ans[:, hs] <= rng.random(m)[None, :]).sum(axis=0)
    ans = np.minimum(ans, len(model.answers) - 1)

    post = belief.dist[None, :] * model.likelihood[ans]  # (m, hypotheses)
    post = post / post.sum(axis=1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        logs = np.where(post > 0, np.log2(np.where(post > 0, post, 1.0)), 0.0)
    entropies = -(post * logs).sum(axis=1)
    h_bar = min(float(entropies.mean()), h0)
    v = float(entropies.var())  # population convention
    return EigScore(eig=h0 - h_bar - cfg.eta * v, h0=h0, h_bar=h_bar, v=v, draws=cfg.mc_samples)


def exact_eig(a: CandidateAction, belief: BeliefState, eta: float) -> EigScore:
    """Closed-form enumeration over answers; the oracle counterpart of
    estimate_eig for small models."""
    if a.observation_model is None:
        raise NoObservationModel(a.action_id)
    model = a.observation_model
    h0 = entropy(belief)
    p_ans = model.likelihood @ belief.dist
    h_vals = []
    for i in range(len(model.answers)):
        post = belief.dist * model.likelihood[i]
        total = post.sum()
        if total <= 0:
            h_vals.append(0.0)
            continue
        post = post / total
        nz = post[post > 0]
        h_vals.append(float(-(nz * np.log2(nz)).sum()))
    h_vals = np.asarray(h_vals)
    h_bar = float((p_ans * h_vals).sum())
    v = float((p_ans * (h_vals - h_bar) ** 2).sum())
    return EigScore(eig=h0 - h_bar - eta * v, h0=h0, h_bar=h_bar, v=v, draws=0)


def select_action(
    candidates: list[CandidateAction],
    scores: list[EigScore],
    previous: CandidateAction | None,
    cfg: PlannerConfig,
) -> CandidateAction:
    """Pick the next action.

    A risk_close candidate always wins (top-scoring one if several). In
    conservative mode the previous action's (kind, target), when still a
    candidate, is kept unless the best alternative beats it by the margin.
    """
    if not candidates:
        raise EmptyCandidates("no candidates to select from")
    if len(candidates) != len(scores):
        raise ValueError("scores not aligned with candidates")
    by_score = sorted(zip(candidates, scores), key=lambda cs: (-cs[1].eig, cs[0].action_id))

    risk = [cs for cs in by_score if cs[0].kind == "risk_close"]
    if risk:
        return risk[0][0]

    best = by_score[0][0]
    if cfg.conservative and previous is not None:
        prev_cs = next(
            (cs for cs in by_score if cs[0].kind == previous.kind and cs[0].target == previous.target),
            None,
        )
        if prev_cs is not None and best.action_id != prev_cs[0].action_id:
            best_score = by_score[0][1].eig
            if best_score <= prev_cs[1].eig + cfg.conservative_margin:
                return prev_cs[0]
    return best


def count_wrong_actions(
    selected: list[CandidateAction | None],
    gold: list[dict],
) -> int:
    """Wrong-action count against per-turn gold annotations.

    gold[t] = {"preferred_kinds": [...], "risk_due": risk_id or None}. A
    turn is wrong when the selected kind is not preferred, or a due risk
    closure was not (and had not been) selected; each turn counts once.
    Gold turns past the end of the session still count their missed risk
    closures: the session ended without selecting them.
    """
    if len(gold) < len(selected):
        raise TurnMisalignment(f"gold covers {len(gold)} turns, trace has {len(selected)}")
    closed: set[str] = set()
    wrong = 0
    for t, g in enumerate(gold):
        action = selected[t] if t < len(selected) else None
        if action is not None and action.kind == "risk_close" and action.target:
            closed.add(action.target)
        bad = False
        if action is not None and g.get("preferred_kinds") and action.kind not in g["preferred_kinds"]:
            bad = True
        risk_due = g.get("risk_due")
        if risk_due and risk_due not in closed:
            bad = True
        if bad:
            wrong += 1
    return wrong
