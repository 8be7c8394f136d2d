"""Synchronized session outputs: a structured report and an append-only
replayable trace.

The trace is the audit surface: one JSONL record per pipeline event, with
a header embedding the config hash so replays refuse silently-divergent
configurations. Replay re-executes the deterministic stages from recorded
tokens and must reproduce beliefs and actions exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigMismatch, CorruptRecord, SeqGap
from .extraction import CurrentState, FieldSchema

TRACE_FORMAT_VERSION = 1

RECORD_KINDS = (
    "utterance", "events", "belief_snapshot", "retrieval_result",
    "candidates", "selected_action", "report_delta",
)

_SECTION_ORDER = ("symptom", "onset", "location", "severity", "modifier", "exam", "history", "risk_flag")


@dataclass(frozen=True)
class ReplayRecord:
    seq: int
    turn: int
    record_kind: str
    payload: dict
    anchors: tuple[dict, ...] = ()
    rng_positions: dict | None = None

    def __post_init__(self):
        if self.record_kind not in RECORD_KINDS:
            raise ValueError(f"unknown record kind {self.record_kind!r}")

    def to_dict(self) -> dict:
        d = {"seq": self.seq, "turn": self.turn, "record_kind": self.record_kind,
             "payload": self.payload}
        if self.anchors:
            d["anchors"] = list(self.anchors)
        if self.rng_positions is not None:
            d["rng_positions"] = self.rng_positions
        return d

    @staticmethod
    def from_dict(d: dict) -> "ReplayRecord":
        try:
            return ReplayRecord(
                seq=d["seq"], turn=d["turn"], record_kind=d["record_kind"],
                payload=d["payload"], anchors=tuple(d.get("anchors", ())),
                rng_positions=d.get("rng_positions"),
            )
        except (KeyError, ValueError) as exc:
            raise CorruptRecord(d.get("seq", -1), str(exc)) from None


class TraceLog:
    """Append-only per-session record log with write-through persistence."""

    def __init__(self, case_id: str, config_hash: str, path: str | Path | None = None):
        self.case_id = case_id
        self.config_hash = config_hash
        self._records: list[ReplayRecord] = []
        self._path = Path(path) if path else None
        self._fh = None
        if self._path:
            self._fh = open(self._path, "w", encoding="utf-8")
            self._fh.write(json.dumps(self.header()) + "\n")
            self._fh.flush()

    def header(self) -> dict:
        return {"type": "trace_header", "format_version": TRACE_FORMAT_VERSION,
                "config_hash": self.config_hash, "case_id": self.case_id}

    def append_record(self, r: ReplayRecord) -> None:
        expected = self._records[-1].seq + 1 if self._records else 1
        if r.seq != expected:
            raise SeqGap(expected, r.seq)
        if r.record_kind == "selected_action":
            same_turn = [x for x in self._records if x.turn == r.turn]
            if not any(x.record_kind == "candidates" for x in same_turn):
                raise CorruptRecord(r.seq, "selected_action without a candidates record this turn")
        self._records.append(r)
        if self._fh:
            self._fh.write(json.dumps(r.to_dict()) + "\n")
            self._fh.flush()

    def records(self) -> tuple[ReplayRecord, ...]:
        return tuple(self._records)

    def close(self) -> None:
        if self._fh:
            self._fh.close()
            self._fh = None

    def write(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(json.dumps(self.header()) + "\n")
            for r in self._records:
                fh.write(json.dumps(r.to_dict()) + "\n")

    @staticmethod
    def read(path: str | Path) -> "TraceLog":
        lines = [ln for ln in Path(path).read_text(encoding="utf-8").splitlines() if ln.strip()]
        if not lines:
            raise CorruptRecord(0, "empty trace file")
        head = json.loads(lines[0])
        if head.get("type") != "trace_header" or head.get("format_version") != TRACE_FORMAT_VERSION:
            raise CorruptRecord(0, "missing or unsupported trace header")
        log = TraceLog(case_id=head.get("case_id", ""), config_hash=head.get("config_hash", ""))
        for ln in lines[1:]:
            try:
                rec = ReplayRecord.from_dict(json.loads(ln))
            except json.JSONDecodeError:
                raise CorruptRecord(len(log._records) + 1, "record is not valid JSON") from None
            log.append_record(rec)
        return log


@dataclass(frozen=True)
class EmrReport:
    case_id: str
    slot_values: dict
    risk_items: tuple[dict, ...]
    narrative_sections: tuple[tuple[str, str], ...]
    generated_at_turn: int

    def to_dict(self) -> dict:
        return {
            "case_id": self.case_id,
            "generated_at_turn": self.generated_at_turn,
            "slot_values": self.slot_values,
            "risk_items": [dict(r) for r in self.risk_items],
            "narrative_sections": [[sid, text] for sid, text in self.narrative_sections],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def _slot_line(field_id: str, entry: dict) -> str:
    bits = [entry["polarity"]]
    if entry["value"] not in ("present",):
        bits.insert(0, entry["value"])
    if entry.get("temporal"):
        bits.append(entry["temporal"])
    return f"{field_id.replace('_', ' ')}: {', '.join(bits)}"


def generate_report(
    state: CurrentState,
    risks: list[dict],
    schema: FieldSchema,
    case_id: str,
    turn: int,
) -> EmrReport:
    """Deterministic structured report from the current state.

    risks entries carry {risk_id, status, closing_action, anchors}. Output
    serialization is byte-stable for identical inputs.
    """
    slot_values: dict = {}
    for field_id in sorted(state.slots):
        ev = state.slots[field_id]
        slot_values[field_id] = {
            "value": ev.value, "polarity": ev.polarity, "temporal": ev.temporal,
            "sources": [{"turn": ev.source_turn, "span": list(ev.source_span)}],
        }

    sections: list[tuple[str, str]] = []
    for kind in _SECTION_ORDER:
        lines = [
            _slot_line(fid, slot_values[fid])
            for fid in sorted(slot_values)
            if schema.fields[fid].kind == kind
        ]
        sections.append((kind, "\n".join(lines) if lines else "(none recorded)"))
    risk_lines = [
        f"{r['risk_id'].replace('_', ' ')}: {r['status']}"
        for r in sorted(risks, key=lambda r: r["risk_id"])
    ]
    sections.append(("risks", "\n".join(risk_lines) if risk_lines else "(none recorded)"))

    return EmrReport(
        case_id=case_id,
        slot_values=slot_values,
        risk_items=tuple(
            {"risk_id": r["risk_id"], "status": r["status"],
             "closing_action": r.get("closing_action"),
             "evidence_anchors": list(r.get("anchors", ()))}
            for r in sorted(risks, key=lambda r: r["risk_id"])
        ),
        narrative_sections=tuple(sections),
        generated_at_turn=turn,
    )


def replay(log: TraceLog, config: dict, suite_dir: str | Path | None = None):
    """Re-execute the deterministic pipeline stages from a recorded trace.

    Refuses to run when the supplied configuration hashes differently from
    the one the trace was produced under. Returns a reconstructed session
    result comparable with verify_replay.
    """
    from .harness.config import config_hash as _hash
    from .harness.runner import replay_from_trace

    if _hash(config) != log.config_hash:
        raise ConfigMismatch(
            f"trace config hash {log.config_hash[:12]}… does not match supplied config")
    return replay_from_trace(log, config, suite_dir=suite_dir)


def verify_replay(live, replayed, atol: float = 1e-12) -> tuple[bool, dict | None]:
    """Compare two session results turn by turn.

    True when per-turn states, smoothed beliefs (within atol), and selected
    actions all match; otherwise False plus the first divergence as
    {"turn": t, "field": name}.
    """
    live_turns = live.per_turn()
    rep_turns = replayed.per_turn()
    for t in range(max(len(live_turns), len(rep_turns))):
        if t >= len(live_turns) or t >= len(rep_turns):
            return False, {"turn": t + 1, "field": "missing_turn"}
        a, b = live_turns[t], rep_turns[t]
        if a["slots"] != b["slots"]:
            return False, {"turn": a["turn"], "field": "state"}
        if np.max(np.abs(np.asarray(a["belief"]) - np.asarray(b["belief"]))) > atol:
            return False, {"turn": a["turn"], "field": "belief"}
        if a["action"] != b["action"]:
            return False, {"turn": a["turn"], "field": "action"}
    return True, None
