"""Run configuration: one structured file with a section per subsystem.

Every default named by the pipeline lives here; a config file only has to
state overrides. The fully-resolved dict is hashed into each trace header
so replay can refuse configuration drift.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

from ..belief import StabilizerConfig
from ..boundary import CueWeights
from ..errors import InvalidConfig
from ..planner import PlannerConfig
from ..retrieval import IndexConfig

BASELINES = ("A_direct", "B_chunk_rag", "C_rule_template", "D_full")
STAGES = ("raw", "temp", "temp_smooth", "temp_smooth_conservative", "full")
PUNCTUATION_SETTINGS = ("none", "pause_only", "pause_lexical", "full")

DEFAULT_CONFIG: dict = {
    "stabilizer": {
        "alpha": 0.30, "beta": 0.20, "gamma": 0.20, "delta": 0.30,
        "lambda": 0.8,
        "t_base": 1.2, "t_min": 0.8, "t_max": 2.5,
        "w_quality": 0.5, "w_rule": 0.15, "w_volatility": 0.8,
        "volatility_window": 3,
    },
    "planner": {
        "eta": 0.5, "mc_samples": 64, "rng_seed": 0,
        "conservative": True, "conservative_margin": 0.05,
        "max_prompts_per_turn": 1, "exam_candidates": 2,
    },
    "boundary": {
        "alpha_pause": 2.2, "alpha_lexical": 1.4, "alpha_role": 3.0, "alpha_quality": 0.6,
        "bias": -1.5, "threshold": 0.5, "p_max_ms": 800,
    },
    "retrieval": {
        "w_lex": 0.45, "w_vec": 0.25, "w_graph": 2.6,
        "pool_size": 50, "k1": 1.2, "b": 0.75, "embed_dim": 256,
        "seed_count": 3, "path_bonus": 0.15, "max_depth": 2,
    },
    "harness": {
        "baseline": "D_full",
        "punctuation": "full",
        "stabilizer_stage": "full",
        "turn_cap": 20,
        "scorer_gain": 1.5,
        "retrieval_k": 10,
    },
}


def merge_config(overrides: dict | None) -> dict:
    """Overlay a (possibly partial) config file onto the defaults."""
    merged = {section: dict(values) for section, values in DEFAULT_CONFIG.items()}
    for section, values in (overrides or {}).items():
        if section not in merged:
            raise InvalidConfig(f"unknown config section {section!r}")
        for key, val in values.items():
            if key not in merged[section]:
                raise InvalidConfig(f"unknown config key {section}.{key}")
            merged[section][key] = val
    return merged


def load_config(path: str | Path | None) -> dict:
    if path is None:
        return merge_config(None)
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    return merge_config(data)


def config_hash(config: dict | None) -> str:
    """Stable hash of the configuration after resolving against defaults."""
    canon = json.dumps(merge_config(config), sort_keys=True)
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class RunConfig:
    """Typed view of one resolved run configuration."""

    baseline: str
    punctuation: str
    stabilizer_stage: str
    turn_cap: int
    scorer_gain: float
    retrieval_k: int
    stabilizer: StabilizerConfig
    planner: PlannerConfig
    cue_weights: CueWeights
    p_max_ms: int
    index: IndexConfig
    raw: dict  # the resolved section dict this view was built from

    @staticmethod
    def from_dict(config: dict | None = None, **overrides) -> "RunConfig":
        resolved = merge_config(config)
        for key, val in overrides.items():
            resolved["harness"][key] = val
        h = resolved["harness"]
        if h["baseline"] not in BASELINES:
            raise InvalidConfig(f"unknown baseline {h['baseline']!r}")
        if h["punctuation"] not in PUNCTUATION_SETTINGS:
            raise InvalidConfig(f"unknown punctuation setting {h['punctuation']!r}")
        if h["stabilizer_stage"] not in STAGES:
            raise InvalidConfig(f"unknown stabilizer stage {h['stabilizer_stage']!r}")
        if h["turn_cap"] < 1:
            raise InvalidConfig("turn_cap must be >= 1")
        b = dict(resolved["boundary"])
        p_max = b.pop("p_max_ms")
        try:
            cue_weights = CueWeights(**b)
        except ValueError as exc:
            raise InvalidConfig(str(exc)) from None
        try:
            planner = PlannerConfig(**resolved["planner"])
        except ValueError as exc:
            raise InvalidConfig(str(exc)) from None
        return RunConfig(
            baseline=h["baseline"],
            punctuation=h["punctuation"],
            stabilizer_stage=h["stabilizer_stage"],
            turn_cap=h["turn_cap"],
            scorer_gain=h["scorer_gain"],
            retrieval_k=h["retrieval_k"],
            stabilizer=StabilizerConfig.from_dict(resolved["stabilizer"]),
            planner=planner,
            cue_weights=cue_weights,
            p_max_ms=p_max,
            index=IndexConfig.from_dict(resolved["retrieval"]),
            raw=resolved,
        )

    def with_harness(self, **overrides) -> "RunConfig":
        raw = {s: dict(v) for s, v in self.raw.items()}
        raw["harness"].update(overrides)
        return RunConfig.from_dict(raw)

    def hash(self) -> str:
        return config_hash(self.raw)

    # --- baseline/stage resolution ---

    @property
    def retrieval_mode(self) -> str:
        return "chunk_only" if self.baseline == "B_chunk_rag" else "hybrid"

    @property
    def effective_stage(self) -> str:
        return "raw" if self.baseline == "B_chunk_rag" else self.stabilizer_stage

    @property
    def policy(self) -> str:
        if self.baseline == "A_direct":
            return "none"
        if self.baseline == "C_rule_template":
            return "template"
        return "eig"

    @property
    def conservative(self) -> bool:
        stage = self.effective_stage
        if stage in ("temp_smooth_conservative", "full"):
            return self.planner.conservative
        return False

    def stage_fusion(self) -> tuple[float, float, float, float]:
        """(alpha, beta, gamma, delta) effective for the current stage."""
        if self.effective_stage == "full":
            s = self.stabilizer
            return (s.alpha, s.beta, s.gamma, s.delta)
        return (0.0, 0.0, 0.0, 1.0)

    @property
    def stage_lambda(self) -> float:
        if self.effective_stage in ("raw", "temp"):
            return 0.0
        return self.stabilizer.lambda_

    @property
    def stage_adaptive_temperature(self) -> bool:
        return self.effective_stage != "raw"
