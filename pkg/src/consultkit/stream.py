"""Token stream contract and deterministic synthetic stream generation.

Streams are line-delimited JSON: one header record followed by token
records in seq order. Synthetic streams stand in for the speech front-end:
scripted turns are tokenized, timed, and given pause/confidence structure
from a seeded generator, so the same (script, seed) always produces the
byte-identical stream.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyScript, MalformedRecord, MissingHeader, NonMonotonicSeq

DOCTOR = "doctor"
PATIENT = "patient"
ROLES = (DOCTOR, PATIENT)

FORMAT_VERSION = 1

# Pause model (milliseconds). Sentence-boundary styles sit between plain
# intra-sentence gaps and turn gaps; turn gaps are always drawn above the
# largest injected pause so the turn boundary stays the loudest cue.
TOKEN_PAUSE_RANGE = (80, 240)
TOKEN_DURATION_RANGE = (180, 420)
INTER_TURN_PAUSE_RANGE = (600, 1400)
BOUNDARY_PAUSE_RANGES = {
    "long": (680, 800),
    "cue": (280, 400),
    "dip": (440, 520),
}
BASE_CONFIDENCE_RANGE = (0.86, 0.97)
DIP_CONFIDENCE_RANGE = (0.20, 0.30)

_WORD_RE = re.compile(r"[a-z0-9']+")


@dataclass(frozen=True)
class TokenEvent:
    """One streamed token with timing, pause, confidence, and speaker role."""

    text: str
    t_start_ms: int
    t_end_ms: int
    pause_after_ms: int
    conf: float
    role: str
    seq: int


@dataclass(frozen=True)
class NoiseProfile:
    drop_rate: float = 0.0
    confidence_factor: float = 1.0


@dataclass(frozen=True)
class DialogueTurn:
    role: str
    text: str
    # Style of the pause injected after each internal sentence end
    # (len == sentences - 1); defaults to "long" when omitted.
    boundary_styles: tuple[str, ...] | None = None


@dataclass(frozen=True)
class ScriptedDialogue:
    case_id: str
    turns: tuple[DialogueTurn, ...]
    noise_profile: NoiseProfile | None = None

    @staticmethod
    def from_dict(data: dict) -> "ScriptedDialogue":
        turns = tuple(
            DialogueTurn(
                role=t["role"],
                text=t["text"],
                boundary_styles=tuple(t["boundary_styles"]) if t.get("boundary_styles") else None,
            )
            for t in data["turns"]
        )
        noise = data.get("noise_profile")
        return ScriptedDialogue(
            case_id=data["case_id"],
            turns=turns,
            noise_profile=NoiseProfile(**noise) if noise else None,
        )

    def to_dict(self) -> dict:
        out: dict = {
            "case_id": self.case_id,
            "turns": [
                {"role": t.role, "text": t.text}
                | ({"boundary_styles": list(t.boundary_styles)} if t.boundary_styles else {})
                for t in self.turns
            ],
        }
        if self.noise_profile:
            out["noise_profile"] = {
                "drop_rate": self.noise_profile.drop_rate,
                "confidence_factor": self.noise_profile.confidence_factor,
            }
        return out


def tokenize(text: str) -> list[str]:
    """Whitespace-ish word tokens, lowercased, punctuation stripped."""
    return _WORD_RE.findall(text.lower())


def split_sentences(text: str) -> list[tuple[str, str]]:
    """Split scripted text on terminal marks; returns (sentence, mark) pairs."""
    out = []
    for chunk in re.split(r"(?<=[.?])\s*", text.strip()):
        if not chunk:
            continue
        mark = "question" if chunk.rstrip().endswith("?") else "period"
        out.append((chunk.strip(), mark))
    return out


# --- wire format ---

def token_record(ev: TokenEvent) -> dict:
    # Field order is fixed by the stream format for byte-stable round-trips.
    return {
        "type": "token",
        "seq": ev.seq,
        "text": ev.text,
        "t_start_ms": ev.t_start_ms,
        "t_end_ms": ev.t_end_ms,
        "pause_after_ms": ev.pause_after_ms,
        "conf": ev.conf,
        "role": ev.role,
    }


def serialize_stream(events: list[TokenEvent], session_id: str) -> str:
    lines = [json.dumps({"type": "header", "format_version": FORMAT_VERSION, "session_id": session_id})]
    lines.extend(json.dumps(token_record(ev)) for ev in events)
    return "\n".join(lines) + "\n"


def _validate_token(rec: dict, line_no: int) -> TokenEvent:
    try:
        text = rec["text"]
        seq = rec["seq"]
        t0, t1 = rec["t_start_ms"], rec["t_end_ms"]
        pause = rec["pause_after_ms"]
        conf = rec["conf"]
        role = rec["role"]
    except KeyError as exc:
        raise MalformedRecord(line_no, f"missing field {exc.args[0]}") from None
    if not isinstance(text, str) or not text or any(c.isspace() for c in text):
        raise MalformedRecord(line_no, "text must be a single non-empty token")
    if not all(isinstance(v, int) and not isinstance(v, bool) for v in (seq, t0, t1, pause)):
        raise MalformedRecord(line_no, "seq/timing fields must be integers")
    if t0 < 0 or t1 < t0 or pause < 0:
        raise MalformedRecord(line_no, "timings must be non-negative with t_end_ms >= t_start_ms")
    if not isinstance(conf, (int, float)) or isinstance(conf, bool) or not 0.0 <= conf <= 1.0:
        raise MalformedRecord(line_no, "conf must be in [0,1]")
    if role not in ROLES:
        raise MalformedRecord(line_no, f"role must be one of {ROLES}")
    return TokenEvent(text=text, t_start_ms=t0, t_end_ms=t1, pause_after_ms=pause,
                      conf=float(conf), role=role, seq=seq)


def parse_stream(source) -> list[TokenEvent]:
    """Parse a stream file (str, bytes, or file-like) into TokenEvents.

    Rejects the whole stream on the first malformed line, missing header,
    or non-monotonic seq.
    """
    if isinstance(source, bytes):
        text = source.decode("utf-8")
    elif isinstance(source, str):
        text = source
    else:
        text = source.read()
        if isinstance(text, bytes):
            text = text.decode("utf-8")

    lines = [ln for ln in text.split("\n") if ln.strip()]
    if not lines:
        raise MissingHeader("stream is empty")
    try:
        head = json.loads(lines[0])
    except json.JSONDecodeError:
        raise MalformedRecord(1, "header is not valid JSON") from None
    if not isinstance(head, dict) or head.get("type") != "header":
        raise MissingHeader("first record is not a header")
    if head.get("format_version") != FORMAT_VERSION:
        raise MalformedRecord(1, f"unsupported format_version {head.get('format_version')!r}")

    events: list[TokenEvent] = []
    last_seq = None
    for line_no, line in enumerate(lines[1:], start=2):
        try:
            rec = json.loads(line)
        except json.JSONDecodeError:
            raise MalformedRecord(line_no, "not valid JSON") from None
        if not isinstance(rec, dict) or rec.get("type") != "token":
            raise MalformedRecord(line_no, f"unexpected record type {rec.get('type')!r}")
        ev = _validate_token(rec, line_no)
        if last_seq is not None and ev.seq <= last_seq:
            raise NonMonotonicSeq(ev.seq)
        last_seq = ev.seq
        events.append(ev)
    return events


# --- synthesis ---

def _styles_for_turn(turn: DialogueTurn, n_sentences: int) -> list[str]:
    if turn.boundary_styles is not None:
        styles = list(turn.boundary_styles)
        if len(styles) != max(0, n_sentences - 1):
            raise EmptyScript(
                f"turn has {n_sentences} sentences but {len(styles)} boundary styles"
            )
        for s in styles:
            if s not in BOUNDARY_PAUSE_RANGES:
                raise EmptyScript(f"unknown boundary style {s!r}")
        return styles
    return ["long"] * max(0, n_sentences - 1)


def synthesize_stream(
    script: ScriptedDialogue,
    seed: int,
    start_seq: int = 1,
    t0_ms: int = 0,
) -> list[TokenEvent]:
    """Deterministically turn a scripted dialogue into a token stream.

    Timing, pauses, and confidences are drawn from a generator seeded with
    (seed) only, so equal inputs give byte-identical streams. Inter-turn
    pauses are drawn strictly above every intra-turn pause in the stream.
    """
    return _synthesize(script, np.random.default_rng(seed), start_seq, t0_ms)


def _synthesize(
    script: ScriptedDialogue,
    rng: np.random.Generator,
    start_seq: int,
    t0_ms: int,
) -> list[TokenEvent]:
    if not script.turns:
        raise EmptyScript("script has no turns")

    # First pass: tokens, durations, intra-turn pauses, confidence dips.
    tokens: list[dict] = []
    turn_last_index: list[int] = []
    max_intra_pause = 0
    for turn in script.turns:
        sentences = split_sentences(turn.text)
        if not sentences:
            raise EmptyScript("turn has no sentences")
        styles = _styles_for_turn(turn, len(sentences))
        dip_next_sentence = False
        for s_idx, (sentence, _mark) in enumerate(sentences):
            words = tokenize(sentence)
            if not words:
                raise EmptyScript("sentence has no tokens")
            for w_idx, word in enumerate(words):
                dur = int(rng.integers(*TOKEN_DURATION_RANGE, endpoint=True))
                conf = float(rng.uniform(*BASE_CONFIDENCE_RANGE))
                if dip_next_sentence and w_idx == 0:
                    conf = float(rng.uniform(*DIP_CONFIDENCE_RANGE))
                last_in_sentence = w_idx == len(words) - 1
                if not last_in_sentence:
                    pause = int(rng.integers(*TOKEN_PAUSE_RANGE, endpoint=True))
                elif s_idx < len(sentences) - 1:
                    pause = int(rng.integers(*BOUNDARY_PAUSE_RANGES[styles[s_idx]], endpoint=True))
                else:
                    pause = -1  # turn-final; assigned in the second pass
                if pause >= 0:
                    max_intra_pause = max(max_intra_pause, pause)
                tokens.append({"text": word, "dur": dur, "conf": conf, "pause": pause,
                               "role": turn.role})
            dip_next_sentence = s_idx < len(sentences) - 1 and styles[s_idx] == "dip"
        turn_last_index.append(len(tokens) - 1)

    # Second pass: inter-turn pauses above every intra-turn pause.
    lo = max(INTER_TURN_PAUSE_RANGE[0], max_intra_pause + 1)
    for idx in turn_last_index[:-1]:
        tokens[idx]["pause"] = int(rng.integers(lo, INTER_TURN_PAUSE_RANGE[1], endpoint=True))
    tokens[turn_last_index[-1]]["pause"] = 0

    if script.noise_profile is not None:
        tokens = _apply_noise(tokens, script.noise_profile, rng)

    events: list[TokenEvent] = []
    t = t0_ms
    for i, tok in enumerate(tokens):
        t_end = t + tok["dur"]
        events.append(TokenEvent(
            text=tok["text"], t_start_ms=t, t_end_ms=t_end,
            pause_after_ms=tok["pause"], conf=round(tok["conf"], 4),
            role=tok["role"], seq=start_seq + i,
        ))
        t = t_end + tok["pause"]
    return events


def _apply_noise(tokens: list[dict], noise: NoiseProfile, rng: np.random.Generator) -> list[dict]:
    kept: list[dict] = []
    for i, tok in enumerate(tokens):
        tok = dict(tok)
        tok["conf"] = min(1.0, max(0.0, tok["conf"] * noise.confidence_factor))
        # Never drop the first token or sentence/turn-final tokens, so the
        # stream stays nonempty and boundary structure survives.
        droppable = i > 0 and 0 < tok["pause"] <= TOKEN_PAUSE_RANGE[1]
        if droppable and rng.random() < noise.drop_rate:
            kept[-1]["pause"] += tok["dur"] + tok["pause"]
            continue
        kept.append(tok)
    return kept


def synthesize_turn(
    role: str,
    text: str,
    seed: int,
    turn_index: int,
    start_seq: int = 1,
    t0_ms: int = 0,
    boundary_styles: tuple[str, ...] | None = None,
) -> list[TokenEvent]:
    """Synthesize one turn's tokens with a turn-scoped seed.

    Used by the live session driver, which receives turns one at a time;
    the (seed, turn_index) pair makes each turn independently replayable.
    """
    script = ScriptedDialogue(
        case_id="turn",
        turns=(DialogueTurn(role=role, text=text, boundary_styles=boundary_styles),),
    )
    rng = np.random.default_rng(np.random.SeedSequence([seed, turn_index]))
    return _synthesize(script, rng, start_seq, t0_ms)


def gold_boundaries_for_script(script: ScriptedDialogue) -> tuple[list[int], list[str]]:
    """Token positions (0-based) after which a gold boundary falls, plus marks.

    The forced end-of-stream boundary after the final token is excluded;
    it is trivially shared by every segmentation.
    """
    positions: list[int] = []
    marks: list[str] = []
    idx = -1
    for turn in script.turns:
        for sentence, mark in split_sentences(turn.text):
            idx += len(tokenize(sentence))
            positions.append(idx)
            marks.append(mark)
    if positions:
        positions.pop()
        marks.pop()
    return positions, marks
