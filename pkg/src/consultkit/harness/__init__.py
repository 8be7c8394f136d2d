"""Evaluation harness: configs, cases, the session runner, metric layers,
and the ablation drivers."""

from .ablations import ablate_belief, ablate_punctuation
from .cases import PilotCase, SuiteResources, bundled_suite_path
from .config import BASELINES, DEFAULT_CONFIG, STAGES, RunConfig, config_hash, load_config, merge_config
from .engine import TurnEngine, TurnResult
from .metrics import MetricsReport, end_to_end_metrics, pool_reports, rates_from_counts
from .runner import SessionResult, replay_from_trace, run_case, simulate_answer

__all__ = [
    "BASELINES", "DEFAULT_CONFIG", "STAGES",
    "MetricsReport", "PilotCase", "RunConfig", "SessionResult",
    "SuiteResources", "TurnEngine", "TurnResult",
    "ablate_belief", "ablate_punctuation", "bundled_suite_path",
    "config_hash", "end_to_end_metrics", "load_config", "merge_config",
    "pool_reports", "rates_from_counts", "replay_from_trace", "run_case",
    "simulate_answer",
]
