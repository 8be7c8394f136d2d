"""Belief stabilization stack: temperature scaling, four-source fusion,
exponential smoothing, dynamic temperature, entropy, and volatility.

All operations preserve the distribution invariant (non-negative, sum 1
within 1e-9) and are pure, so belief states can be shared read-only.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, InvalidConfig, NonPositiveTemperature, TooShort

RAW = "raw"
FUSED = "fused"
SMOOTHED = "smoothed"

_SUM_TOL = 1e-9


@dataclass(frozen=True)
class HypothesisSet:
    ids: tuple[str, ...]
    names: tuple[str, ...] = ()

    def __post_init__(self):
        if len(self.ids) < 2:
            raise InvalidConfig("need at least two hypotheses")
        if len(set(self.ids)) != len(self.ids):
            raise InvalidConfig("hypothesis ids must be unique")
        if not self.names:
            object.__setattr__(self, "names", self.ids)

    def __len__(self) -> int:
        return len(self.ids)

    def index(self, hyp_id: str) -> int:
        return self.ids.index(hyp_id)


@dataclass(frozen=True)
class BeliefState:
    dist: np.ndarray
    turn: int
    variant: str  # raw | fused | smoothed

    def __post_init__(self):
        d = np.asarray(self.dist, dtype=float)
        object.__setattr__(self, "dist", d)
        if d.ndim != 1 or len(d) < 2:
            raise DimensionMismatch("belief must be a vector over >= 2 hypotheses")
        if np.any(d < -_SUM_TOL) or abs(float(d.sum()) - 1.0) > _SUM_TOL:
            raise DimensionMismatch(f"belief is not a distribution (sum={d.sum():.12f})")

    def argmax(self) -> int:
        return int(np.argmax(self.dist))

    def max(self) -> float:
        return float(np.max(self.dist))

    @staticmethod
    def uniform(n: int, turn: int = 0, variant: str = SMOOTHED) -> "BeliefState":
        return BeliefState(np.full(n, 1.0 / n), turn=turn, variant=variant)


@dataclass(frozen=True)
class StabilizerConfig:
    """Fusion weights, smoothing factor, and dynamic-temperature gains."""

    alpha: float = 0.30   # prior belief
    beta: float = 0.20    # rule evidence
    gamma: float = 0.20   # retrieval evidence
    delta: float = 0.30   # model scores
    lambda_: float = 0.80
    t_base: float = 1.2
    t_min: float = 0.8
    t_max: float = 2.5
    w_quality: float = 0.5
    w_rule: float = 0.15
    w_volatility: float = 0.8
    volatility_window: int = 3

    def __post_init__(self):
        weights = (self.alpha, self.beta, self.gamma, self.delta)
        if any(w < 0 for w in weights) or abs(sum(weights) - 1.0) > _SUM_TOL:
            raise InvalidConfig("fusion weights must be non-negative and sum to 1")
        if not 0.7 <= self.lambda_ <= 0.9:
            raise InvalidConfig(f"lambda must lie in [0.7, 0.9], got {self.lambda_}")
        if not (0 < self.t_min <= self.t_base <= self.t_max):
            raise InvalidConfig("need 0 < t_min <= t_base <= t_max")
        if min(self.w_quality, self.w_rule, self.w_volatility) < 0:
            raise InvalidConfig("temperature gains must be non-negative")
        if self.volatility_window < 2:
            raise InvalidConfig("volatility_window must be >= 2")

    @staticmethod
    def from_dict(d: dict) -> "StabilizerConfig":
        d = dict(d)
        if "lambda" in d:
            d["lambda_"] = d.pop("lambda")
        return StabilizerConfig(**d)


@dataclass(frozen=True)
class ScoreBundle:
    """Per-turn evidence for fusion: rule, retrieval, and model sources."""

    s_rule: np.ndarray
    s_retrieval: np.ndarray
    raw_logits: np.ndarray
    quality: float
    rule_confidence: float
    s_llm: np.ndarray = field(init=False)

    def __post_init__(self):
        for name in ("s_rule", "s_retrieval"):
            v = np.asarray(getattr(self, name), dtype=float)
            object.__setattr__(self, name, v)
            if abs(float(v.sum()) - 1.0) > _SUM_TOL or np.any(v < 0):
                raise DimensionMismatch(f"{name} is not a distribution")
        z = np.asarray(self.raw_logits, dtype=float)
        object.__setattr__(self, "raw_logits", z)
        if not (len(self.s_rule) == len(self.s_retrieval) == len(z)):
            raise DimensionMismatch("score vectors span different hypothesis sets")
        object.__setattr__(self, "s_llm", temperature_scale(z, 1.0))


def temperature_scale(z: np.ndarray, t: float) -> np.ndarray:
    """Softmax of z/t with max-subtraction; t=1 is plain softmax."""
    if t <= 0:
        raise NonPositiveTemperature(t)
    z = np.asarray(z, dtype=float) / t
    z = z - z.max()
    e = np.exp(z)
    return e / e.sum()


def adapt_temperature(cfg: StabilizerConfig, quality: float, rule_confidence: float,
                      recent_volatility: float) -> float:
    """Dynamic temperature: poorer speech and higher volatility raise it,
    confident rule evidence lowers it; clamped to [t_min, t_max]."""
    t = cfg.t_base * (1.0 + cfg.w_quality * (1.0 - quality)
                      - cfg.w_rule * rule_confidence
                      + cfg.w_volatility * recent_volatility)
    return min(cfg.t_max, max(cfg.t_min, t))


def fuse(prior: BeliefState, scores: ScoreBundle, cfg: StabilizerConfig, t_t: float) -> BeliefState:
    """Convex fusion of prior belief with rule, retrieval, and scaled model
    scores; output is a distribution up to 1e-9 drift correction."""
    n = len(prior.dist)
    if not (len(scores.s_rule) == len(scores.s_retrieval) == len(scores.raw_logits) == n):
        raise DimensionMismatch("score bundle does not match prior belief dimension")
    s_llm = temperature_scale(scores.raw_logits, t_t)
    b = (cfg.alpha * prior.dist + cfg.beta * scores.s_rule
         + cfg.gamma * scores.s_retrieval + cfg.delta * s_llm)
    b = b / b.sum()
    return BeliefState(b, turn=prior.turn + 1, variant=FUSED)


def smooth(prev: BeliefState, fused: BeliefState, lam: float) -> BeliefState:
    """Exponential smoothing between the previous smoothed belief and the
    current fused one."""
    if len(prev.dist) != len(fused.dist):
        raise DimensionMismatch("smoothing inputs span different hypothesis sets")
    if not 0.0 <= lam <= 1.0:
        raise InvalidConfig(f"lambda must be in [0,1], got {lam}")
    b = lam * prev.dist + (1.0 - lam) * fused.dist
    b = b / b.sum()
    return BeliefState(b, turn=fused.turn, variant=SMOOTHED)


def entropy(b: BeliefState | np.ndarray) -> float:
    """Shannon entropy in bits, with 0·log 0 = 0."""
    d = b.dist if isinstance(b, BeliefState) else np.asarray(b, dtype=float)
    nz = d[d > 0]
    return float(-(nz * np.log2(nz)).sum())


def volatility(seq: list[BeliefState], variant: str | None = None) -> float:
    """Mean adjacent L1 change over a belief sequence."""
    if variant is not None:
        seq = [b for b in seq if b.variant == variant]
    if len(seq) < 2:
        raise TooShort(f"volatility needs >= 2 states, got {len(seq)}")
    dims = {len(b.dist) for b in seq}
    if len(dims) != 1:
        raise DimensionMismatch("belief sequence spans different hypothesis sets")
    total = 0.0
    for a, b in zip(seq, seq[1:]):
        total += float(np.abs(b.dist - a.dist).sum())
    return total / (len(seq) - 1)


class KeywordOverlapScorer:
    """Deterministic stand-in for a model-backed hypothesis scorer.

    Logits are keyword-overlap counts per hypothesis over the turn's
    tokens, scaled by a fixed gain; no overlap gives uniform scores.
    """

    def __init__(self, hypotheses: HypothesisSet, keywords: dict[str, list[str]], gain: float = 1.5):
        self.hypotheses = hypotheses
        self.gain = gain
        self._phrases: list[tuple[int, tuple[str, ...]]] = []
        for hyp_id, words in keywords.items():
            idx = hypotheses.index(hyp_id)
            for w in words:
                self._phrases.append((idx, tuple(w.split())))

    def score_logits(self, tokens: list[str]) -> np.ndarray:
        z = np.zeros(len(self.hypotheses))
        for idx, phrase in self._phrases:
            n = len(phrase)
            for i in range(len(tokens) - n + 1):
                if tuple(tokens[i:i + n]) == phrase:
                    z[idx] += self.gain
        return z
