"""Command-line entry points: run a case, evaluate a suite under the
baselines, run ablations, replay a trace, or serve live sessions."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .harness import (
    RunConfig, SuiteResources, ablate_belief, ablate_punctuation,
    bundled_suite_path, end_to_end_metrics, load_config, pool_reports,
    replay_from_trace, run_case,
)
from .harness.config import BASELINES, STAGES
from .harness.ablations import PUNCTUATION_SETTINGS
from .report_replay import TraceLog, verify_replay


def _load_cfg(config_path: str | None, **overrides) -> RunConfig:
    return RunConfig.from_dict(load_config(config_path), **overrides)


@click.group()
def main() -> None:
    """Streaming consultation pipeline tools."""


@main.command("run")
@click.option("--case", "case_path", required=True, type=click.Path(exists=True))
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--seed", type=int, default=0)
@click.option("--trace", "trace_path", type=click.Path(), default=None)
@click.option("--report", "report_path", type=click.Path(), default=None,
              help="Write the session's structured report document here.")
def run_cmd(case_path: str, config_path: str | None, seed: int,
            trace_path: str | None, report_path: str | None) -> None:
    """Run one pilot case and print its metric report."""
    case_file = Path(case_path)
    suite_dir = case_file.parent.parent if case_file.parent.name == "cases" else case_file.parent
    cfg = _load_cfg(config_path)
    resources = SuiteResources(suite_dir, index_cfg=cfg.index)
    case = resources.load_case(case_file.stem)
    result, _trace = run_case(case, cfg, seed, resources=resources, trace_path=trace_path)
    if report_path:
        Path(report_path).write_text(result.report.to_json(), encoding="utf-8")
    report = end_to_end_metrics(result, case, resources, cfg)
    click.echo(json.dumps(report.to_dict(), indent=2))


@main.command("eval")
@click.option("--suite", "suite_dir", type=click.Path(exists=True), default=None,
              help="Suite directory (defaults to the bundled synthetic suite).")
@click.option("--baselines", default="A,B,C,D", help="Comma list out of A,B,C,D.")
@click.option("--seed", type=int, default=7)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--out", "out_path", type=click.Path(), default=None)
def eval_cmd(suite_dir, baselines, seed, config_path, out_path) -> None:
    """Evaluate every case under the requested baselines."""
    suite = Path(suite_dir) if suite_dir else bundled_suite_path()
    short = {b[0]: b for b in BASELINES}
    chosen = [short[x.strip().upper()] for x in baselines.split(",") if x.strip()]
    base_cfg = _load_cfg(config_path)
    resources = SuiteResources(suite, index_cfg=base_cfg.index)
    cases = resources.load_all_cases()
    out = {"suite": str(suite), "seed": seed, "baselines": {}}
    for baseline in chosen:
        cfg = base_cfg.with_harness(baseline=baseline)
        reports = []
        for case in cases:
            result, _ = run_case(case, cfg, seed, resources=resources)
            reports.append(end_to_end_metrics(result, case, resources, cfg))
        out["baselines"][baseline] = {
            "pooled": pool_reports(reports),
            "cases": [r.to_dict() for r in reports],
        }
    text = json.dumps(out, indent=2)
    if out_path:
        Path(out_path).write_text(text, encoding="utf-8")
        click.echo(f"wrote {out_path}")
    else:
        click.echo(text)


@main.command("ablate")
@click.argument("which", type=click.Choice(["belief", "punctuation"]))
@click.option("--suite", "suite_dir", type=click.Path(exists=True), default=None)
@click.option("--seed", type=int, default=7)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--out", "out_path", type=click.Path(), default=None)
def ablate_cmd(which, suite_dir, seed, config_path, out_path) -> None:
    """Reproduce the ablation table shapes on a suite."""
    suite = Path(suite_dir) if suite_dir else bundled_suite_path()
    cfg = _load_cfg(config_path)
    resources = SuiteResources(suite, index_cfg=cfg.index)
    cases = resources.load_all_cases()
    if which == "belief":
        table = ablate_belief(cases, cfg, list(STAGES), seed, resources)
    else:
        table = ablate_punctuation(cases, cfg, list(PUNCTUATION_SETTINGS), seed, resources)
    text = json.dumps({"ablation": which, "seed": seed, "rows": table}, indent=2)
    if out_path:
        Path(out_path).write_text(text, encoding="utf-8")
        click.echo(f"wrote {out_path}")
    else:
        click.echo(text)


@main.command("replay")
@click.option("--trace", "trace_path", required=True, type=click.Path(exists=True))
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--suite", "suite_dir", type=click.Path(exists=True), default=None)
def replay_cmd(trace_path, config_path, suite_dir) -> None:
    """Re-execute a trace and report the reconstructed session."""
    from .report_replay import replay

    log = TraceLog.read(trace_path)
    config = load_config(config_path)
    session = replay(log, config, suite_dir=suite_dir)
    click.echo(json.dumps({
        "case_id": session.case_id,
        "turns": len(session.turns),
        "concluded": session.concluded,
        "t_goal": session.t_goal,
        "final_belief": session.turns[-1].belief_smoothed.dist.tolist() if session.turns else [],
    }, indent=2))


@main.command("verify-replay")
@click.option("--trace", "trace_path", required=True, type=click.Path(exists=True))
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--suite", "suite_dir", type=click.Path(exists=True), default=None)
@click.option("--case", "case_id", default=None)
@click.option("--seed", type=int, default=None)
def verify_replay_cmd(trace_path, config_path, suite_dir, case_id, seed) -> None:
    """Replay a trace, re-run the live session, and compare them."""
    suite = Path(suite_dir) if suite_dir else bundled_suite_path()
    cfg = _load_cfg(config_path)
    resources = SuiteResources(suite, index_cfg=cfg.index)
    log = TraceLog.read(trace_path)
    replayed = replay_from_trace(log, cfg, resources=resources)
    case = resources.load_case(case_id or log.case_id)
    live, _ = run_case(case, cfg, replayed.seed if seed is None else seed, resources=resources)
    ok, divergence = verify_replay(live, replayed)
    click.echo(json.dumps({"match": ok, "divergence": divergence}))
    if not ok:
        sys.exit(1)


@main.command("serve")
@click.option("--port", type=int, default=8787)
@click.option("--suite", "suite_dir", type=click.Path(exists=True), default=None)
def serve_cmd(port, suite_dir) -> None:
    """Serve live sessions (and the console, when built) over HTTP."""
    from .service import serve

    serve(port=port, suite_dir=Path(suite_dir) if suite_dir else None)


@main.command("build-suite")
@click.option("--out", "out_dir", type=click.Path(), required=True)
def build_suite_cmd(out_dir) -> None:
    """Regenerate the bundled synthetic suite into a directory."""
    from .harness.suite_builder import write_suite

    write_suite(Path(out_dir))
    click.echo(f"wrote suite to {out_dir}")


if __name__ == "__main__":
    main()
