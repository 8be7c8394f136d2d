"""Rule-based stateful extraction: schema-normalized events from utterances
and the accumulated consultation state.

Extraction is deterministic: surface synonyms are matched longest-first
within one utterance, negation applies inside a fixed token window that
never crosses an utterance boundary, and slots follow last-writer-wins.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

from .boundary import RecoveredUtterance
from .errors import UnknownField

FIELD_KINDS = ("symptom", "onset", "location", "severity", "modifier", "exam", "history", "risk_flag")

ASSERTED = "asserted"
NEGATED = "negated"

DEFAULT_NEGATION_WINDOW = 4


@dataclass(frozen=True)
class FieldDef:
    field_id: str
    kind: str
    value_domain: tuple[str, ...] | None = None  # None = free text
    required_for_goal: bool = False


@dataclass(frozen=True)
class StateEvent:
    field_id: str
    value: str
    polarity: str  # asserted | negated
    temporal: str | None
    source_turn: int
    source_span: tuple[int, int]  # token seq range, inclusive
    confidence: float

    def key(self) -> tuple[str, str, str]:
        return (self.field_id, self.value, self.polarity)

    def to_dict(self) -> dict:
        return {
            "field_id": self.field_id, "value": self.value, "polarity": self.polarity,
            "temporal": self.temporal, "source_turn": self.source_turn,
            "source_span": list(self.source_span), "confidence": self.confidence,
        }

    @staticmethod
    def from_dict(d: dict) -> "StateEvent":
        return StateEvent(
            field_id=d["field_id"], value=d["value"], polarity=d["polarity"],
            temporal=d.get("temporal"), source_turn=d["source_turn"],
            source_span=tuple(d["source_span"]), confidence=d["confidence"],
        )


@dataclass(frozen=True)
class MatchCounts:
    tp: int
    fp: int
    fn: int

    def __post_init__(self):
        if min(self.tp, self.fp, self.fn) < 0:
            raise ValueError("match counts must be non-negative")


class FieldSchema:
    """Field definitions plus the surface lexicons driving extraction."""

    def __init__(self, fields, synonym_map, negation_cues, temporal_cues,
                 negation_window: int = DEFAULT_NEGATION_WINDOW):
        self.fields: dict[str, FieldDef] = {f.field_id: f for f in fields}
        if len(self.fields) != len(fields):
            raise ValueError("field_ids must be unique")
        # surface form (possibly multi-word) -> (field_id, normalized value)
        self.synonym_map: dict[str, tuple[str, str]] = dict(synonym_map)
        self.negation_cues: frozenset[str] = frozenset(negation_cues)
        self.temporal_cues: dict[str, str] = dict(temporal_cues)
        self.negation_window = negation_window
        for surface, (fid, value) in self.synonym_map.items():
            fdef = self.fields.get(fid)
            if fdef is None:
                raise UnknownField(fid)
            if fdef.value_domain is not None and value not in fdef.value_domain:
                raise ValueError(f"synonym {surface!r} maps to undeclared value {value!r} of {fid}")
        # Pre-split multiword surfaces, longest first for greedy matching.
        self._surfaces = sorted(
            ((tuple(s.split()), s) for s in self.synonym_map),
            key=lambda t: (-len(t[0]), t[1]),
        )

    @property
    def required_slots(self) -> tuple[str, ...]:
        return tuple(f.field_id for f in self.fields.values() if f.required_for_goal)

    @staticmethod
    def from_dict(data: dict) -> "FieldSchema":
        fields = [
            FieldDef(
                field_id=f["field_id"], kind=f["kind"],
                value_domain=tuple(f["value_domain"]) if f.get("value_domain") else None,
                required_for_goal=f.get("required_for_goal", False),
            )
            for f in data["fields"]
        ]
        return FieldSchema(
            fields=fields,
            synonym_map={k: (v[0], v[1]) for k, v in data["synonym_map"].items()},
            negation_cues=data.get("negation_cues", []),
            temporal_cues={k: v for k, v in data.get("temporal_cues", {}).items()},
            negation_window=data.get("negation_window", DEFAULT_NEGATION_WINDOW),
        )

    @staticmethod
    def load(path: str | Path) -> "FieldSchema":
        with open(path, "r", encoding="utf-8") as fh:
            return FieldSchema.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        return {
            "fields": [
                {"field_id": f.field_id, "kind": f.kind,
                 "value_domain": list(f.value_domain) if f.value_domain else None,
                 "required_for_goal": f.required_for_goal}
                for f in self.fields.values()
            ],
            "synonym_map": {k: list(v) for k, v in self.synonym_map.items()},
            "negation_cues": sorted(self.negation_cues),
            "temporal_cues": dict(self.temporal_cues),
            "negation_window": self.negation_window,
        }


@dataclass(frozen=True)
class CurrentState:
    """Accumulated consultation state: latest event per slot plus full history."""

    field_ids: frozenset[str]
    slots: dict[str, StateEvent] = field(default_factory=dict)
    history: tuple[StateEvent, ...] = ()

    @staticmethod
    def empty(schema: FieldSchema) -> "CurrentState":
        return CurrentState(field_ids=frozenset(schema.fields))

    def slot(self, field_id: str) -> StateEvent | None:
        return self.slots.get(field_id)


def extract_events(u: RecoveredUtterance, schema: FieldSchema, turn: int | None = None) -> list[StateEvent]:
    """Match schema synonyms inside one utterance and emit typed events.

    Polarity flips to negated when a negation cue sits within the window
    before the match (never crossing the utterance). A temporal qualifier
    attaches when its cue occurs anywhere in the same utterance.
    """
    words = [t.text for t in u.tokens]
    turn_no = u.turn if turn is None else turn

    temporal: str | None = None
    for surface, qualifier in schema.temporal_cues.items():
        if _find_phrase(words, tuple(surface.split())) is not None:
            temporal = qualifier
            break

    events: list[StateEvent] = []
    claimed = [False] * len(words)
    for surface_tokens, surface in schema._surfaces:
        start = 0
        while True:
            pos = _find_phrase(words, surface_tokens, start)
            if pos is None:
                break
            end = pos + len(surface_tokens)
            if any(claimed[pos:end]):
                start = pos + 1
                continue
            for k in range(pos, end):
                claimed[k] = True
            field_id, value = schema.synonym_map[surface]
            window_lo = max(0, pos - schema.negation_window)
            negated = any(w in schema.negation_cues for w in words[window_lo:pos])
            span_tokens = u.tokens[pos:end]
            events.append(StateEvent(
                field_id=field_id, value=value,
                polarity=NEGATED if negated else ASSERTED,
                temporal=temporal,
                source_turn=turn_no,
                source_span=(span_tokens[0].seq, span_tokens[-1].seq),
                confidence=sum(t.conf for t in span_tokens) / len(span_tokens),
            ))
            start = end
    events.sort(key=lambda e: e.source_span[0])
    return events


def _find_phrase(words: list[str], phrase: tuple[str, ...], start: int = 0) -> int | None:
    n = len(phrase)
    for i in range(start, len(words) - n + 1):
        if tuple(words[i:i + n]) == phrase:
            return i
    return None


def apply_events(s: CurrentState, evs: list[StateEvent]) -> CurrentState:
    """Fold events into the state: history append, last-writer-wins slots."""
    if not evs:
        return s
    slots = dict(s.slots)
    for ev in evs:
        if ev.field_id not in s.field_ids:
            raise UnknownField(ev.field_id)
        slots[ev.field_id] = ev
    return replace(s, slots=slots, history=s.history + tuple(evs))


def match_events(pred: list[StateEvent], gold: list[StateEvent]) -> MatchCounts:
    """Greedy 1-to-1 matching in turn order.

    A pair matches when (field_id, value, polarity) are equal and the
    source turns differ by at most one.
    """
    pred_sorted = sorted(pred, key=lambda e: (e.source_turn, e.field_id, e.value, e.polarity))
    gold_sorted = sorted(gold, key=lambda e: (e.source_turn, e.field_id, e.value, e.polarity))
    unmatched = list(range(len(gold_sorted)))
    tp = 0
    for p in pred_sorted:
        hit = None
        for j in unmatched:
            g = gold_sorted[j]
            if p.key() == g.key() and abs(p.source_turn - g.source_turn) <= 1:
                hit = j
                break
        if hit is not None:
            unmatched.remove(hit)
            tp += 1
    return MatchCounts(tp=tp, fp=len(pred_sorted) - tp, fn=len(unmatched))


def event_prf(c: MatchCounts) -> tuple[float, float, float]:
    """Precision, recall, F1 from match counts (0 conventions on empty)."""
    p = c.tp / (c.tp + c.fp) if c.tp + c.fp else 0.0
    r = c.tp / (c.tp + c.fn) if c.tp + c.fn else 0.0
    f1 = 2 * p * r / (p + r) if p + r else 0.0
    return (p, r, f1)


def load_gold_events(path: str | Path) -> dict[str, list[StateEvent]]:
    """Gold annotation file: JSONL of StateEvent records keyed by case_id."""
    out: dict[str, list[StateEvent]] = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        d = json.loads(line)
        out.setdefault(d["case_id"], []).append(StateEvent.from_dict(d))
    return out
