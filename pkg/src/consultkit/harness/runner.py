"""Case runner: drives the per-turn engine over a scripted dialogue with a
simulated interlocutor, and rebuilds sessions from traces for replay.

Script turns are consumed first; answers to the planner's prompts queue up
behind them and drain once the script is exhausted. The interlocutor
samples answers from the selected action's observation model conditioned
on the case's designated true hypothesis.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import CorruptRecord
from ..planner import CandidateAction
from ..report_replay import TraceLog
from ..stream import PATIENT, TokenEvent
from .cases import PilotCase, SuiteResources, bundled_suite_path
from .config import RunConfig
from .engine import TurnEngine, TurnResult


@dataclass
class SessionResult:
    case_id: str
    baseline: str
    seed: int
    config_hash: str
    turns: list[TurnResult]
    final_state: object
    prompts: list[dict]
    closed_risks: set[str]
    triggered_turns: dict[str, int]
    t_goal: int | None
    concluded: bool
    turn_cap_reached: bool
    report: object

    def per_turn(self) -> list[dict]:
        out = []
        for t in self.turns:
            slots = {f: (ev.value, ev.polarity) for f, ev in sorted(t.slots_snapshot.items())}
            out.append({
                "turn": t.turn,
                "slots": slots,
                "belief": t.belief_smoothed.dist,
                "action": t.selected.action_id if t.selected else None,
            })
        return out

    @property
    def smoothed_sequence(self):
        return [t.belief_smoothed for t in self.turns]


def simulate_answer(
    action: CandidateAction,
    case: PilotCase,
    seed: int,
    turn: int,
) -> tuple[str, str] | None:
    """Sample the interlocutor's reply to a prompt, conditioned on the
    case's true hypothesis. Returns (role, text) or None for non-prompts."""
    if action.kind == "conclude" or action.observation_model is None:
        return None
    model = action.observation_model
    h = case.hypotheses.index(case.true_hypothesis)
    p = model.likelihood[:, h]
    rng = np.random.default_rng(np.random.SeedSequence([seed, turn, 202]))
    cum = np.cumsum(p)
    idx = min(int(np.searchsorted(cum, rng.random(), side="right")), len(model.answers) - 1)
    return (PATIENT, model.texts[model.answers[idx]])


def run_case(
    case: PilotCase,
    cfg: RunConfig,
    seed: int,
    resources: SuiteResources | None = None,
    trace_path: str | Path | None = None,
) -> tuple[SessionResult, TraceLog]:
    """Run one pilot case under one configuration.

    Terminates at conclude or the turn cap; the non-interactive baseline
    processes the script passively and never prompts.
    """
    if resources is None:
        resources = SuiteResources(bundled_suite_path(), index_cfg=cfg.index)
    engine = TurnEngine(resources, case, cfg, seed, trace_path=trace_path)

    script = list(case.script.turns)
    queue: list[tuple[str, str]] = []
    si = 0
    concluded = False
    while engine.turn < cfg.turn_cap:
        if si < len(script):
            turn = script[si]
            si += 1
            role, text, source = turn.role, turn.text, "script"
            styles = turn.boundary_styles
        elif queue:
            role, text = queue.pop(0)
            source, styles = "answer", None
        else:
            break
        result = engine.process_turn(role, text, source=source, tokens=_turn_tokens(
            engine, role, text, styles))
        if result.selected is None:
            continue
        if result.selected.kind == "conclude":
            concluded = True
            break
        answer = simulate_answer(result.selected, case, seed, result.turn)
        if answer is not None:
            queue.append(answer)
    cap_hit = not concluded and engine.turn >= cfg.turn_cap

    report = engine.finish()
    session = SessionResult(
        case_id=case.case_id, baseline=cfg.baseline, seed=seed,
        config_hash=cfg.hash(), turns=engine.turns,
        final_state=engine.state, prompts=engine.prompts,
        closed_risks=set(engine.closed_risks), triggered_turns=dict(engine.triggered_turns),
        t_goal=engine.goal_turn(), concluded=concluded, turn_cap_reached=cap_hit,
        report=report,
    )
    return session, engine.trace


def _turn_tokens(engine: TurnEngine, role: str, text: str, styles):
    from ..stream import synthesize_turn

    return synthesize_turn(role, text, engine.seed, engine.turn + 1,
                           start_seq=engine.next_seq, t0_ms=engine.clock_ms,
                           boundary_styles=styles)


def replay_from_trace(
    log: TraceLog,
    config: dict | RunConfig,
    suite_dir: str | Path | None = None,
    resources: SuiteResources | None = None,
) -> SessionResult:
    """Re-execute the deterministic stages from a trace's recorded tokens.

    The reconstructed session re-derives extraction, belief, retrieval, and
    action selection; verify_replay checks it against the live run.
    """
    cfg = config if isinstance(config, RunConfig) else RunConfig.from_dict(config)
    if resources is None:
        resources = SuiteResources(suite_dir or bundled_suite_path(), index_cfg=cfg.index)
    case = resources.load_case(log.case_id)

    turn_inputs: dict[int, dict] = {}
    seed = None
    for rec in log.records():
        if rec.record_kind == "utterance":
            turn_inputs[rec.turn] = rec.payload
        elif rec.record_kind == "selected_action" and rec.rng_positions:
            seed = rec.rng_positions.get("seed", seed)
    if seed is None:
        seed = 0
    engine = TurnEngine(resources, case, cfg, seed)
    concluded = False
    for turn_no in sorted(turn_inputs):
        payload = turn_inputs[turn_no]
        try:
            tokens = [
                TokenEvent(text=t["text"], t_start_ms=t["t_start_ms"], t_end_ms=t["t_end_ms"],
                           pause_after_ms=t["pause_after_ms"], conf=t["conf"],
                           role=t["role"], seq=t["seq"])
                for t in payload["tokens"]
            ]
        except KeyError as exc:
            raise CorruptRecord(turn_no, f"utterance record missing {exc.args[0]}") from None
        result = engine.process_turn(payload.get("role", PATIENT), tokens=tokens,
                                     source=payload.get("source", "replay"))
        if result.selected is not None and result.selected.kind == "conclude":
            concluded = True
    report = engine.finish()
    return SessionResult(
        case_id=case.case_id, baseline=cfg.baseline, seed=seed,
        config_hash=cfg.hash(), turns=engine.turns,
        final_state=engine.state, prompts=engine.prompts,
        closed_risks=set(engine.closed_risks), triggered_turns=dict(engine.triggered_turns),
        t_goal=engine.goal_turn(), concluded=concluded, turn_cap_reached=False,
        report=report,
    )
