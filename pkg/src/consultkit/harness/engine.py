"""Per-turn pipeline executor shared by the case runner, the session
service, and trace replay.

One engine owns one session: it ingests a turn's tokens, restores
boundaries, extracts events, updates the stabilized belief, retrieves
support, derives gaps, and (policy permitting) scores and selects the next
action, appending every step to the trace.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

import numpy as np

from .. import boundary as boundary_mod
from ..belief import (
    RAW, BeliefState, KeywordOverlapScorer, ScoreBundle,
    adapt_temperature, entropy, fuse, smooth, temperature_scale, volatility,
)
from ..extraction import CurrentState, StateEvent, apply_events, extract_events
from ..planner import (
    PROMPT_KINDS, CandidateAction, EigScore, GapSignal, ObservationModel,
    build_query, derive_gaps, estimate_eig, generate_candidates, select_action,
)
from ..report_replay import ReplayRecord, TraceLog, generate_report
from ..retrieval import retrieve
from ..stream import TokenEvent, synthesize_turn, token_record
from .cases import PilotCase, SuiteResources
from .config import RunConfig

_RULE_SMOOTHING = 0.5
_RETRIEVAL_SMOOTHING = 0.5


@dataclass
class TurnResult:
    turn: int
    source: str  # script | answer | live
    role: str
    text: str
    tokens: list[TokenEvent]
    utterances: list
    events: list[StateEvent]
    belief_raw: BeliefState
    belief_fused: BeliefState
    belief_smoothed: BeliefState
    t_t: float
    quality: float
    rule_confidence: float
    recent_volatility: float
    query: str
    retrieval: list
    gaps: list[GapSignal]
    candidates: list[CandidateAction]
    scores: list[EigScore]
    selected: CandidateAction | None
    selected_score: EigScore | None
    prompt: dict | None
    goal_met_at_selection: bool
    risk_due_at_selection: str | None
    timings_ms: dict[str, float]
    slots_snapshot: dict = field(default_factory=dict)


class TurnEngine:
    def __init__(
        self,
        resources: SuiteResources,
        case: PilotCase,
        cfg: RunConfig,
        seed: int,
        trace_path=None,
    ):
        self.res = resources
        self.case = case
        self.cfg = cfg
        self.seed = seed
        self.hypotheses = case.hypotheses
        self.scorer = KeywordOverlapScorer(case.hypotheses, case.keywords, gain=cfg.scorer_gain)
        n = len(case.hypotheses)
        self.state = CurrentState.empty(resources.schema)
        self.belief = BeliefState.uniform(n, turn=0)
        self.smoothed_seq: list[BeliefState] = []
        self.closed_risks: set[str] = set()
        self.closed_turns: dict[str, int] = {}
        self.closing_actions: dict[str, str] = {}
        self.asked: set[str] = set()
        self.verified: set[str] = set()
        self.recommended: set[str] = set()
        self.triggered_turns: dict[str, int] = {}
        self.prompts: list[dict] = []
        self.turn = 0
        self.next_seq = 1
        self.clock_ms = 0
        self.prev_action: CandidateAction | None = None
        self.turns: list[TurnResult] = []
        self.trace = TraceLog(case.case_id, cfg.hash(), path=trace_path)
        self._trace_seq = 0
        self._last_ranked: list = []
        # Template policy state (rule-template baseline).
        self._template_queue: list[str] = list(case.goal.required_slots)
        self._template_exam_done = False

    # --- trace helpers ---

    def _append(self, kind: str, payload: dict, anchors: tuple = (), rng_positions=None) -> None:
        self._trace_seq += 1
        self.trace.append_record(ReplayRecord(
            seq=self._trace_seq, turn=self.turn, record_kind=kind,
            payload=payload, anchors=anchors, rng_positions=rng_positions,
        ))

    # --- evidence scores ---

    def _rule_scores(self) -> tuple[np.ndarray, float]:
        n = len(self.hypotheses)
        raw = np.zeros(n)
        for hyp_id, clauses in self.case.rule_evidence.items():
            i = self.hypotheses.index(hyp_id)
            for field_id, polarity, value, weight in clauses:
                ev = self.state.slot(field_id)
                if ev is None or ev.polarity != polarity:
                    continue
                if value is not None and ev.value != value:
                    continue
                raw[i] += weight
        s_rule = (raw + _RULE_SMOOTHING) / (raw.sum() + _RULE_SMOOTHING * n)
        # Certainty of the rule evidence: 0 on uniform, towards 1 when peaked.
        rc = 1.0 - entropy(s_rule) / np.log2(n)
        return s_rule, float(min(1.0, max(0.0, rc)))

    def _retrieval_scores(self, ranked: list) -> np.ndarray:
        n = len(self.hypotheses)
        raw = np.zeros(n)
        for oid, score, _anchor in ranked:
            obj = self.res.index.objects[oid]
            for tag in obj.tags:
                if tag.startswith("hyp:"):
                    hyp_id = tag[4:]
                    if hyp_id in self.hypotheses.ids:
                        raw[self.hypotheses.index(hyp_id)] += score
        return (raw + _RETRIEVAL_SMOOTHING) / (raw.sum() + _RETRIEVAL_SMOOTHING * n)

    def _recent_volatility(self) -> float:
        window = self.smoothed_seq[-self.cfg.stabilizer.volatility_window:]
        if len(window) < 2:
            return 0.0
        return volatility(window)

    # --- risk bookkeeping ---

    def _update_triggers(self) -> None:
        for check in self.case.goal.risk_checks:
            if check.risk_id not in self.triggered_turns and check.triggered(self.state):
                self.triggered_turns[check.risk_id] = self.turn

    def _unclosed_triggered(self) -> list[str]:
        return sorted(r for r in self.triggered_turns if r not in self.closed_risks)

    def _goal_met(self) -> bool:
        slots_ok = all(self.state.slot(s) is not None for s in self.case.goal.required_slots)
        return slots_ok and not self._unclosed_triggered()

    def goal_turn(self) -> int | None:
        """First turn at which the mandatory slots were filled and every
        risk check that fired during the session had already been closed.
        Judged in hindsight: a session that left any fired check open never
        reached its goal."""
        triggered = set(self.triggered_turns)
        if any(r not in self.closed_turns for r in triggered):
            return None
        risk_ready = max((self.closed_turns[r] for r in triggered), default=0)
        for t in self.turns:
            if t.turn >= risk_ready and all(
                    f in t.slots_snapshot for f in self.case.goal.required_slots):
                return t.turn
        return None

    # --- policies ---

    def _select_template(self, gaps, candidates_by_id) -> CandidateAction:
        """Fixed question-order policy: close triggered risks, then ask each
        required slot in declared order regardless of fill state, then one
        exam recommendation; the checklist restarts until the goal state is
        met, then the template concludes."""
        risk_gaps = [g for g in gaps if g.kind == "unresolved_risk"]
        if risk_gaps:
            target = risk_gaps[0].target
            aid = f"risk_close:{target}"
            return candidates_by_id.get(aid) or CandidateAction(
                action_id=aid, kind="risk_close", target=target,
                prompt_text=f"run the closing check for risk {target.replace('_', ' ')}.",
                observation_model=self.case.observation_models.get(
                    aid, ObservationModel.uninformative(self.hypotheses)),
            )
        if not self._template_queue and self._template_exam_done and not self._goal_met():
            self._template_queue = list(self.case.goal.required_slots)
        if self._template_queue:
            slot = self._template_queue.pop(0)
            aid = f"ask:{slot}"
            return CandidateAction(
                action_id=aid, kind="ask", target=slot,
                prompt_text=f"ask the patient about {slot.replace('_', ' ')}.",
                observation_model=self.case.observation_models.get(
                    aid, ObservationModel.uninformative(self.hypotheses)),
            )
        if not self._template_exam_done:
            self._template_exam_done = True
            exams = [oid for oid, _s, _a in self._last_ranked
                     if self.res.index.objects[oid].kind == "exam_unit"]
            if exams:
                aid = f"recommend_exam:{exams[0]}"
                return CandidateAction(
                    action_id=aid, kind="recommend_exam", target=exams[0],
                    prompt_text=f"recommend: {self.res.index.objects[exams[0]].text}",
                    observation_model=self.case.observation_models.get(
                        aid, ObservationModel.uninformative(self.hypotheses)),
                )
        return CandidateAction(
            action_id="conclude", kind="conclude", target=None,
            prompt_text="template checklist complete; wrap up and confirm the summary.",
            observation_model=ObservationModel.uninformative(self.hypotheses),
        )

    # --- main turn ---

    def process_turn(
        self,
        role: str,
        text: str | None = None,
        tokens: list[TokenEvent] | None = None,
        source: str = "script",
    ) -> TurnResult:
        self.turn += 1
        timings: dict[str, float] = {}
        t0 = time.perf_counter()

        # Ingest: synthesize timings for text input unless tokens are given
        # (replay feeds recorded tokens straight through).
        if tokens is None:
            tokens = synthesize_turn(role, text or "", self.seed, self.turn,
                                     start_seq=self.next_seq, t0_ms=self.clock_ms)
        if tokens:
            self.next_seq = tokens[-1].seq + 1
            self.clock_ms = tokens[-1].t_end_ms + tokens[-1].pause_after_ms
        turn_text = " ".join(t.text for t in tokens)
        timings["ingest"] = _lap(timings, t0)

        # Boundary restoration.
        utterances = boundary_mod.segment(
            tokens, self.cfg.cue_weights, self.res.lexicon,
            ablation=self.cfg.punctuation, p_max_ms=self.cfg.p_max_ms, turn=self.turn,
        ) if tokens else []
        timings["boundary"] = _lap(timings, t0)

        # Stateful extraction.
        events = [ev for u in utterances for ev in extract_events(u, self.res.schema)]
        self.state = apply_events(self.state, events)
        self._update_triggers()
        timings["extraction"] = _lap(timings, t0)

        # Retrieval (query from state and still-missing slots; belief-free).
        missing = [GapSignal("missing_slot", s, 2.0)
                   for s in self.case.goal.required_slots if self.state.slot(s) is None]
        query = build_query(self.state, missing)
        ranked = retrieve(self.res.index, query, k=self.cfg.retrieval_k,
                          mode=self.cfg.retrieval_mode)
        self._last_ranked = ranked
        timings["retrieval"] = _lap(timings, t0)

        # Belief stabilization stack.
        z = self.scorer.score_logits([t.text for t in tokens])
        s_rule, rule_conf = self._rule_scores()
        s_retr = self._retrieval_scores(ranked)
        quality = float(np.mean([t.conf for t in tokens])) if tokens else 1.0
        recent_vol = self._recent_volatility()
        if self.cfg.stage_adaptive_temperature:
            t_t = adapt_temperature(self.cfg.stabilizer, quality, rule_conf, recent_vol)
        else:
            t_t = 1.0
        bundle = ScoreBundle(s_rule=s_rule, s_retrieval=s_retr, raw_logits=z,
                             quality=quality, rule_confidence=rule_conf)
        alpha, beta, gamma, delta = self.cfg.stage_fusion()
        stage_cfg = replace(self.cfg.stabilizer, alpha=alpha, beta=beta, gamma=gamma, delta=delta)
        raw_belief = BeliefState(temperature_scale(z, 1.0), turn=self.turn, variant=RAW)
        fused = fuse(self.belief, bundle, stage_cfg, t_t)
        smoothed = smooth(self.belief, fused, self.cfg.stage_lambda)
        self.belief = smoothed
        self.smoothed_seq.append(smoothed)
        timings["belief"] = _lap(timings, t0)

        # Gaps and action planning.
        gaps = derive_gaps(self.state, self.case.goal, smoothed, frozenset(self.closed_risks))
        goal_met = self._goal_met()
        unclosed = self._unclosed_triggered()
        risk_due = unclosed[0] if unclosed else None

        selected: CandidateAction | None = None
        selected_score: EigScore | None = None
        candidates: list[CandidateAction] = []
        scores: list[EigScore] = []
        if self.cfg.policy == "eig":
            candidates = generate_candidates(
                gaps, smoothed, self.res.index, self.cfg.planner, self.hypotheses,
                models=self.case.observation_models, query=query,
                asked=frozenset(self.asked), verified=frozenset(self.verified),
                recommended=frozenset(self.recommended), retrieval_mode=self.cfg.retrieval_mode,
            )
            rng = np.random.default_rng(np.random.SeedSequence([self.seed, self.turn, 101]))
            scores = [estimate_eig(c, smoothed, self.cfg.planner, rng) for c in candidates]
            planner_cfg = replace(self.cfg.planner, conservative=self.cfg.conservative)
            selected = select_action(candidates, scores, self.prev_action, planner_cfg)
            selected_score = scores[candidates.index(selected)]
        elif self.cfg.policy == "template":
            candidates = generate_candidates(
                gaps, smoothed, self.res.index, self.cfg.planner, self.hypotheses,
                models=self.case.observation_models, query=query,
                asked=frozenset(self.asked), verified=frozenset(self.verified),
                recommended=frozenset(self.recommended), retrieval_mode=self.cfg.retrieval_mode,
            )
            zero = EigScore(eig=0.0, h0=entropy(smoothed), h_bar=entropy(smoothed), v=0.0, draws=0)
            scores = [zero for _ in candidates]
            selected = self._select_template(gaps, {c.action_id: c for c in candidates})
            if selected.action_id not in {c.action_id for c in candidates}:
                candidates = candidates + [selected]
                scores = scores + [zero]
            selected_score = zero
        timings["planning"] = _lap(timings, t0)

        prompt = None
        if selected is not None:
            if selected.kind in PROMPT_KINDS:
                prompt = {
                    "turn": self.turn, "action_id": selected.action_id,
                    "kind": selected.kind, "target": selected.target,
                    "redundant": self._is_redundant(selected),
                }
                self.prompts.append(prompt)
            if selected.kind == "ask" and selected.target:
                self.asked.add(selected.target)
            elif selected.kind == "verify" and selected.target:
                self.verified.add(selected.target)
            elif selected.kind == "recommend_exam" and selected.target:
                self.recommended.add(selected.target)
            elif selected.kind == "risk_close" and selected.target:
                self.closed_risks.add(selected.target)
                self.closed_turns.setdefault(selected.target, self.turn)
                self.closing_actions[selected.target] = selected.action_id
            self.prev_action = selected


        result = TurnResult(
            turn=self.turn, source=source, role=role, text=turn_text,
            tokens=list(tokens), utterances=utterances, events=events,
            belief_raw=raw_belief, belief_fused=fused, belief_smoothed=smoothed,
            t_t=t_t, quality=quality, rule_confidence=rule_conf,
            recent_volatility=recent_vol, query=query, retrieval=ranked,
            gaps=gaps, candidates=candidates, scores=scores,
            selected=selected, selected_score=selected_score, prompt=prompt,
            goal_met_at_selection=goal_met, risk_due_at_selection=risk_due,
            timings_ms=timings,
            slots_snapshot=dict(self.state.slots),
        )
        self.turns.append(result)
        self._write_turn_records(result)
        return result

    def _is_redundant(self, action: CandidateAction) -> bool:
        if action.kind == "ask":
            return self.state.slot(action.target) is not None
        if action.kind == "verify":
            return self.belief.max() >= self.case.goal.confidence_floor
        if action.kind == "recommend_exam":
            return action.target in self.recommended
        if action.kind == "risk_close":
            return action.target in self.closed_risks
        return False

    def _write_turn_records(self, r: TurnResult) -> None:
        self._append("utterance", {
            "role": r.role, "source": r.source,
            "tokens": [token_record(t) for t in r.tokens],
            "utterances": [
                {"role": u.role, "text": u.text, "terminal_mark": u.terminal_mark,
                 "boundary_prob": u.boundary_prob, "start_seq": u.start_seq, "end_seq": u.end_seq}
                for u in r.utterances
            ],
        })
        self._append("events", {"events": [e.to_dict() for e in r.events]})
        self._append("belief_snapshot", {
            "raw": r.belief_raw.dist.tolist(),
            "fused": r.belief_fused.dist.tolist(),
            "smoothed": r.belief_smoothed.dist.tolist(),
            "temperature": r.t_t, "quality": r.quality,
            "rule_confidence": r.rule_confidence, "recent_volatility": r.recent_volatility,
        })
        self._append(
            "retrieval_result",
            {"query": r.query, "mode": self.cfg.retrieval_mode,
             "ranked": [{"object_id": oid, "score": s} for oid, s, _a in r.retrieval]},
            anchors=tuple(a.to_dict() for _oid, _s, a in r.retrieval),
        )
        if r.selected is not None:
            self._append("candidates", {
                "candidates": [
                    {"action_id": c.action_id, "kind": c.kind, "target": c.target,
                     "prompt_text": c.prompt_text,
                     "eig": s.eig, "h0": s.h0, "h_bar": s.h_bar, "v": s.v}
                    for c, s in zip(r.candidates, r.scores)
                ],
            })
            self._append(
                "selected_action",
                {"action_id": r.selected.action_id, "kind": r.selected.kind,
                 "target": r.selected.target, "prompt_text": r.selected.prompt_text,
                 "eig": r.selected_score.eig if r.selected_score else None,
                 "h_bar": r.selected_score.h_bar if r.selected_score else None,
                 "v": r.selected_score.v if r.selected_score else None,
                 "redundant": bool(r.prompt["redundant"]) if r.prompt else False,
                 "goal_met": r.goal_met_at_selection},
                rng_positions={"seed": self.seed, "turn": self.turn,
                               "planner_draws": sum(s.draws for s in r.scores)},
            )

    def finish(self):
        """Generate the final report and append the closing trace record."""
        risks = [
            {"risk_id": c.risk_id,
             "status": "closed" if c.risk_id in self.closed_risks else "open",
             "closing_action": self.closing_actions.get(c.risk_id),
             "anchors": []}
            for c in self.case.goal.risk_checks
            if c.risk_id in self.triggered_turns
        ]
        report = generate_report(self.state, risks, self.res.schema,
                                 self.case.case_id, self.turn)
        self._append("report_delta", {"report": report.to_dict()})
        self.trace.close()
        return report


def _lap(timings: dict, t0: float) -> float:
    used = sum(timings.values())
    return max(0.0, (time.perf_counter() - t0) * 1000.0 - used)
