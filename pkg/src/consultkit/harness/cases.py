"""Pilot case packages and shared suite resources.

A suite directory holds one JSON per case plus shared schema, boundary
lexicon, corpus, and qrels files. Cases bundle everything a run needs:
script, golds, goal state, hypothesis profiles, and observation models.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources as importlib_resources
from pathlib import Path

from ..belief import HypothesisSet
from ..boundary import Lexicon
from ..errors import InvalidConfig
from ..extraction import FieldSchema, StateEvent
from ..planner import GoalState, ObservationModel, RiskCheck
from ..retrieval import IndexConfig, KnowledgeObject, QrelEntry, RetrievalIndex, load_corpus, load_qrels
from ..stream import ScriptedDialogue


def bundled_suite_path() -> Path:
    """Location of the synthetic suite shipped inside the package."""
    return Path(importlib_resources.files("consultkit")) / "data" / "suite"


@dataclass(frozen=True)
class PilotCase:
    case_id: str
    script: ScriptedDialogue
    true_hypothesis: str
    hypotheses: HypothesisSet
    keywords: dict[str, list[str]]
    rule_evidence: dict[str, list[tuple[str, str, str | None, float]]]
    goal: GoalState
    gold_boundaries: tuple[int, ...]
    gold_events: tuple[StateEvent, ...]
    gold_information_items: tuple[tuple[str, str, str], ...]
    gold_slot_values: dict[str, tuple[str, str]]
    preferred_actions: dict
    observation_models: dict[str, ObservationModel]
    query_ids: tuple[str, ...]

    @staticmethod
    def from_dict(data: dict, schema: FieldSchema) -> "PilotCase":
        hyp = HypothesisSet(ids=tuple(data["hypotheses"]["ids"]),
                            names=tuple(data["hypotheses"].get("names", ())))
        if data["true_hypothesis"] not in hyp.ids:
            raise InvalidConfig(f"{data['case_id']}: unknown true hypothesis")
        goal_d = data["goal"]
        goal = GoalState(
            required_slots=tuple(goal_d["required_slots"]),
            risk_checks=tuple(
                RiskCheck(risk_id=r["risk_id"],
                          trigger=tuple((c[0], c[1], c[2]) for c in r["trigger"]))
                for r in goal_d["risk_checks"]
            ),
            confidence_floor=goal_d.get("confidence_floor", 0.45),
        )
        for slot in goal.required_slots:
            if slot not in schema.fields:
                raise InvalidConfig(f"{data['case_id']}: required slot {slot!r} not in schema")
        for check in goal.risk_checks:
            for f, _pol, _val in check.trigger:
                if f not in schema.fields:
                    raise InvalidConfig(f"{data['case_id']}: risk trigger field {f!r} not in schema")
        gold_events = tuple(
            StateEvent(
                field_id=e["field_id"], value=e["value"], polarity=e["polarity"],
                temporal=e.get("temporal"), source_turn=e["source_turn"],
                source_span=tuple(e.get("source_span", (0, 0))),
                confidence=e.get("confidence", 1.0),
            )
            for e in data["gold_events"]
        )
        if not gold_events or not data["gold_information_items"]:
            raise InvalidConfig(f"{data['case_id']}: gold layers must be nonempty")
        models = {
            aid: ObservationModel.from_dict(m, hyp)
            for aid, m in data.get("observation_models", {}).items()
        }
        return PilotCase(
            case_id=data["case_id"],
            script=ScriptedDialogue.from_dict(data["script"]),
            true_hypothesis=data["true_hypothesis"],
            hypotheses=hyp,
            keywords={k: list(v) for k, v in data["hypotheses"]["keywords"].items()},
            rule_evidence={
                h: [(c[0], c[1], c[2], float(c[3])) for c in clauses]
                for h, clauses in data.get("rule_evidence", {}).items()
            },
            goal=goal,
            gold_boundaries=tuple(data["gold_boundaries"]),
            gold_events=gold_events,
            gold_information_items=tuple(tuple(i) for i in data["gold_information_items"]),
            gold_slot_values={k: tuple(v) for k, v in data["gold_slot_values"].items()},
            preferred_actions=data.get("preferred_actions", {"default_kinds": []}),
            observation_models=models,
            query_ids=tuple(data.get("query_ids", ())),
        )


class SuiteResources:
    """Shared, read-only artifacts for a suite: schema, lexicon, corpus,
    retrieval index, and qrels."""

    def __init__(self, suite_dir: str | Path, index_cfg: IndexConfig | None = None):
        self.suite_dir = Path(suite_dir)
        self.schema = FieldSchema.load(self.suite_dir / "schema.json")
        self.lexicon = Lexicon.load(self.suite_dir / "lexicon.json")
        self.objects: list[KnowledgeObject] = load_corpus(self.suite_dir / "corpus.jsonl")
        self.index: RetrievalIndex = RetrievalIndex(self.objects, index_cfg or IndexConfig())
        qrels_path = self.suite_dir / "qrels.jsonl"
        self.qrels: dict[str, QrelEntry] = load_qrels(qrels_path) if qrels_path.exists() else {}

    def load_case(self, case_id: str) -> PilotCase:
        path = self.suite_dir / "cases" / f"{case_id}.json"
        return PilotCase.from_dict(json.loads(path.read_text(encoding="utf-8")), self.schema)

    def load_all_cases(self) -> list[PilotCase]:
        case_dir = self.suite_dir / "cases"
        return [
            PilotCase.from_dict(json.loads(p.read_text(encoding="utf-8")), self.schema)
            for p in sorted(case_dir.glob("*.json"))
        ]

    def case_qrels(self, case: PilotCase) -> dict[str, QrelEntry]:
        return {qid: self.qrels[qid] for qid in case.query_ids if qid in self.qrels}
