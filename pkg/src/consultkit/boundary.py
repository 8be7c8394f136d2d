"""Utterance boundary restoration from pause, lexical, role, and quality cues.

A candidate position after token x_i gets a linear cue score pushed through
a sigmoid; the boundary fires when the probability clears a threshold. Role
transitions and end-of-stream always force a boundary, so the output spans
partition the input stream.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

from .errors import EmptyStream
from .stream import TokenEvent

ABLATION_MODES = ("none", "pause_only", "pause_lexical", "full")

DEFAULT_P_MAX_MS = 800


@dataclass(frozen=True)
class CueWeights:
    """Linear weights for the four boundary cues, plus bias and threshold."""

    alpha_pause: float = 2.2
    alpha_lexical: float = 1.4
    alpha_role: float = 3.0
    alpha_quality: float = 0.6
    bias: float = -1.5
    threshold: float = 0.5

    def __post_init__(self):
        if not 0.0 < self.threshold < 1.0:
            raise ValueError(f"threshold must be in (0,1), got {self.threshold}")
        for name in ("alpha_pause", "alpha_lexical", "alpha_role", "alpha_quality", "bias"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")


@dataclass(frozen=True)
class CueVector:
    p: float  # pause cue, [0,1]
    l: float  # lexical cue, [0,1]
    r: float  # role-transition cue, {0,1}
    q: float  # confidence-drop cue, [0,1]


@dataclass(frozen=True)
class RecoveredUtterance:
    tokens: tuple[TokenEvent, ...]
    role: str
    terminal_mark: str  # "period" | "question"
    boundary_prob: float
    start_seq: int
    end_seq: int
    turn: int = 0

    @property
    def text(self) -> str:
        return " ".join(t.text for t in self.tokens)


class Lexicon:
    """Weighted boundary cue lists: utterance-initial cues, terminal cues,
    and interrogative markers."""

    def __init__(self, initial_cues=None, terminal_cues=None, interrogatives=None):
        self.initial_cues: dict[str, float] = dict(initial_cues or {})
        self.terminal_cues: dict[str, float] = dict(terminal_cues or {})
        self.interrogatives: frozenset[str] = frozenset(interrogatives or ())

    @staticmethod
    def from_dict(data: dict) -> "Lexicon":
        return Lexicon(
            initial_cues={w: float(wt) for w, wt in data.get("initial_cues", [])},
            terminal_cues={w: float(wt) for w, wt in data.get("terminal_cues", [])},
            interrogatives=data.get("interrogatives", []),
        )

    @staticmethod
    def load(path: str | Path) -> "Lexicon":
        with open(path, "r", encoding="utf-8") as fh:
            return Lexicon.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        return {
            "initial_cues": [[w, wt] for w, wt in sorted(self.initial_cues.items())],
            "terminal_cues": [[w, wt] for w, wt in sorted(self.terminal_cues.items())],
            "interrogatives": sorted(self.interrogatives),
        }


def cue_scores(
    tokens: list[TokenEvent],
    i: int,
    lexicon: Lexicon,
    p_max_ms: int = DEFAULT_P_MAX_MS,
) -> CueVector:
    """Cue vector for the candidate boundary after tokens[i].

    End-of-stream positions are forced: r = 1 and p = 1. The quality cue is
    the confidence drop from tokens[i] to tokens[i+1], clamped to [0,1].
    """
    cur = tokens[i]
    if i >= len(tokens) - 1:
        l = lexicon.terminal_cues.get(cur.text, 0.0)
        return CueVector(p=1.0, l=l, r=1.0, q=0.0)
    nxt = tokens[i + 1]
    p = min(1.0, cur.pause_after_ms / p_max_ms)
    l = max(lexicon.initial_cues.get(nxt.text, 0.0), lexicon.terminal_cues.get(cur.text, 0.0))
    r = 1.0 if nxt.role != cur.role else 0.0
    q = min(1.0, max(0.0, cur.conf - nxt.conf))
    return CueVector(p=p, l=l, r=r, q=q)


def boundary_score(c: CueVector, w: CueWeights) -> float:
    return (w.alpha_pause * c.p + w.alpha_lexical * c.l
            + w.alpha_role * c.r + w.alpha_quality * c.q + w.bias)


def boundary_prob(b: float) -> float:
    """Logistic boundary probability; numerically stable for large |b|.

    The result stays strictly inside (0, 1) even where float64 would
    saturate, so downstream threshold logic never sees the endpoints.
    """
    if b >= 0:
        p = 1.0 / (1.0 + math.exp(-b))
    else:
        e = math.exp(b)
        p = e / (1.0 + e)
    if p >= 1.0:
        return math.nextafter(1.0, 0.0)
    if p <= 0.0:
        return math.nextafter(0.0, 1.0)
    return p


def _ablated(c: CueVector, ablation: str) -> CueVector:
    if ablation == "pause_only":
        return CueVector(p=c.p, l=0.0, r=0.0, q=0.0)
    if ablation == "pause_lexical":
        return CueVector(p=c.p, l=c.l, r=c.r, q=0.0)
    return c


def segment(
    tokens: list[TokenEvent],
    w: CueWeights,
    lexicon: Lexicon,
    ablation: str = "full",
    p_max_ms: int = DEFAULT_P_MAX_MS,
    turn: int = 0,
) -> list[RecoveredUtterance]:
    """Partition a token sequence into utterances with terminal marks.

    Ablation modes: "none" segments only at role changes; "pause_only"
    keeps just the pause cue; "pause_lexical" drops the quality cue;
    "full" uses all four. Role transitions always force a boundary.
    """
    if not tokens:
        raise EmptyStream("cannot segment an empty token sequence")
    if ablation not in ABLATION_MODES:
        raise ValueError(f"unknown ablation mode {ablation!r}")

    utterances: list[RecoveredUtterance] = []
    span_start = 0
    for i in range(len(tokens)):
        cues = cue_scores(tokens, i, lexicon, p_max_ms)
        forced = cues.r >= 1.0  # role change or end of stream
        prob = boundary_prob(boundary_score(_ablated(cues, ablation), w))
        if ablation == "none":
            fire = forced
        else:
            fire = forced or prob >= w.threshold
        if fire:
            span = tuple(tokens[span_start:i + 1])
            mark = "question" if any(t.text in lexicon.interrogatives for t in span) else "period"
            utterances.append(RecoveredUtterance(
                tokens=span, role=span[0].role, terminal_mark=mark,
                boundary_prob=prob, start_seq=span[0].seq, end_seq=span[-1].seq,
                turn=turn,
            ))
            span_start = i + 1
    return utterances


def predicted_boundary_positions(utterances: list[RecoveredUtterance], tokens: list[TokenEvent]) -> list[int]:
    """0-based token positions of predicted boundaries, excluding the forced
    end-of-stream position (conventionally shared by every segmentation)."""
    seq_to_pos = {t.seq: i for i, t in enumerate(tokens)}
    return [seq_to_pos[u.end_seq] for u in utterances[:-1]]


def boundary_prf(
    predicted: list[int],
    gold: list[int],
    tolerance_tokens: int = 0,
) -> tuple[float, float, float, int, int, int]:
    """Boundary precision/recall/F1 with 1-to-1 greedy matching by distance.

    Returns (precision, recall, f1, tp, fp, fn). Precision is 0 by
    convention when there are no predictions.
    """
    if tolerance_tokens < 0:
        raise ValueError("tolerance must be >= 0")
    pred = sorted(predicted)
    gld = sorted(gold)
    pairs = sorted(
        ((abs(p - g), pi, gi) for pi, p in enumerate(pred) for gi, g in enumerate(gld)
         if abs(p - g) <= tolerance_tokens),
        key=lambda t: (t[0], t[1], t[2]),
    )
    used_p: set[int] = set()
    used_g: set[int] = set()
    tp = 0
    for _, pi, gi in pairs:
        if pi in used_p or gi in used_g:
            continue
        used_p.add(pi)
        used_g.add(gi)
        tp += 1
    fp = len(pred) - tp
    fn = len(gld) - tp
    p, r, f1 = prf_from_counts(tp, fp, fn)
    return (p, r, f1, tp, fp, fn)


def prf_from_counts(tp: int, fp: int, fn: int) -> tuple[float, float, float]:
    """Standard P/R/F1 from raw counts, with divide-by-zero → 0 conventions."""
    p = tp / (tp + fp) if tp + fp else 0.0
    r = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * p * r / (p + r) if p + r else 0.0
    return (p, r, f1)
