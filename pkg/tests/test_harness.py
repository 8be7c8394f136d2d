import json

import pytest
from click.testing import CliRunner

from consultkit.cli import main as cli_main
from consultkit.errors import InvalidConfig
from consultkit.harness import (
    RunConfig, config_hash, end_to_end_metrics, load_config, merge_config,
    pool_reports, rates_from_counts, run_case,
)
from consultkit.harness.ablations import PUNCTUATION_SETTINGS, ablate_belief, ablate_punctuation
from consultkit.harness.config import STAGES
from consultkit.harness.suite_builder import build_cases, build_corpus, build_qrels, build_schema


class TestConfig:
    def test_defaults_resolve(self):
        cfg = RunConfig.from_dict()
        assert cfg.baseline == "D_full"
        assert cfg.stabilizer.lambda_ == 0.8
        assert cfg.cue_weights.alpha_role == 3.0

    def test_unknown_key_rejected(self):
        with pytest.raises(InvalidConfig):
            merge_config({"stabilizer": {"nope": 1}})

    def test_unknown_baseline_rejected(self):
        with pytest.raises(InvalidConfig):
            RunConfig.from_dict({"harness": {"baseline": "E_wild"}})

    def test_lambda_out_of_range_rejected(self):
        with pytest.raises(InvalidConfig):
            RunConfig.from_dict({"stabilizer": {"lambda": 0.55}})

    def test_hash_stable_and_sensitive(self):
        base = config_hash(None)
        assert base == config_hash({})
        assert base != config_hash({"planner": {"eta": 0.9}})

    def test_baseline_resolution(self):
        b = RunConfig.from_dict({"harness": {"baseline": "B_chunk_rag"}})
        assert b.retrieval_mode == "chunk_only"
        assert b.effective_stage == "raw"
        assert b.policy == "eig"
        a = RunConfig.from_dict({"harness": {"baseline": "A_direct"}})
        assert a.policy == "none"
        c = RunConfig.from_dict({"harness": {"baseline": "C_rule_template"}})
        assert c.policy == "template"

    def test_stage_resolution(self):
        raw = RunConfig.from_dict({"harness": {"stabilizer_stage": "raw"}})
        assert raw.stage_fusion() == (0.0, 0.0, 0.0, 1.0)
        assert raw.stage_lambda == 0.0
        assert not raw.stage_adaptive_temperature and not raw.conservative
        full = RunConfig.from_dict()
        assert full.stage_fusion() == (0.30, 0.20, 0.20, 0.30)
        assert full.stage_lambda == 0.8
        assert full.conservative

    def test_load_config_file(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"planner": {"mc_samples": 16}}))
        cfg = load_config(path)
        assert cfg["planner"]["mc_samples"] == 16
        assert cfg["stabilizer"]["lambda"] == 0.8


class TestSuiteData:
    def test_bundled_files_match_builder(self, resources):
        # The shipped suite is the builder's output, byte for byte.
        assert json.loads((resources.suite_dir / "schema.json").read_text()) == build_schema()
        shipped_corpus = [json.loads(l) for l in
                          (resources.suite_dir / "corpus.jsonl").read_text().splitlines() if l]
        assert shipped_corpus == build_corpus()
        shipped_qrels = [json.loads(l) for l in
                         (resources.suite_dir / "qrels.jsonl").read_text().splitlines() if l]
        assert shipped_qrels == build_qrels()
        for case in build_cases():
            shipped = json.loads(
                (resources.suite_dir / "cases" / f"{case['case_id']}.json").read_text())
            assert shipped == case

    def test_suite_has_at_least_five_cases(self, all_cases):
        assert len(all_cases) >= 5
        for case in all_cases:
            assert case.gold_events
            assert case.gold_boundaries
            assert case.gold_information_items
            assert case.goal.risk_checks
            assert case.query_ids

    def test_qrels_reference_existing_objects(self, resources):
        for entry in resources.qrels.values():
            for oid in entry.relevant_objects:
                assert oid in resources.index.objects
            for path in entry.relevant_paths:
                for a, b in zip(path, path[1:]):
                    assert b in resources.index.adjacency[a]


class TestRunCase:
    def test_baseline_a_is_passive(self, resources, chest_case):
        cfg = RunConfig.from_dict({"harness": {"baseline": "A_direct"}})
        result, trace = run_case(chest_case, cfg, seed=7, resources=resources)
        assert result.prompts == []
        assert result.t_goal is None
        assert all(t.selected is None for t in result.turns)
        assert not any(r.record_kind == "selected_action" for r in trace.records())

    def test_baseline_d_concludes_before_cap(self, resources, all_cases, run_config):
        for case in all_cases:
            result, _ = run_case(case, run_config, seed=7, resources=resources)
            assert result.concluded
            assert len(result.turns) < run_config.turn_cap

    def test_same_seed_same_session(self, resources, chest_case, run_config):
        a, _ = run_case(chest_case, run_config, seed=5, resources=resources)
        b, _ = run_case(chest_case, run_config, seed=5, resources=resources)
        from consultkit.report_replay import verify_replay
        ok, div = verify_replay(a, b)
        assert ok, div

    def test_risk_override_selected_when_due(self, resources, chest_case, run_config):
        result, _ = run_case(chest_case, run_config, seed=7, resources=resources)
        by_turn = {t.turn: t for t in result.turns}
        for risk_id, turn in result.triggered_turns.items():
            t = by_turn[turn]
            assert t.selected is not None and t.selected.kind == "risk_close"


class TestMetrics:
    def test_paper_rate_audit(self):
        rates = rates_from_counts(coverage=(150, 180), structural=(114, 140),
                                  risk=(48, 60), redundancy=(15, 95))
        assert rates["coverage"]["rate"] == pytest.approx(150 / 180, abs=1e-9)
        assert round(rates["coverage"]["rate"] * 100, 1) == 83.3
        assert round(rates["structural_completeness"]["rate"] * 100, 1) == 81.4
        assert round(rates["risk_recall"]["rate"] * 100, 1) == 80.0
        assert round(rates["redundancy"]["rate"] * 100, 1) == 15.8

    def test_report_counts_consistent(self, resources, chest_case, run_config):
        result, _ = run_case(chest_case, run_config, seed=7, resources=resources)
        report = end_to_end_metrics(result, chest_case, resources, run_config)
        d = report.to_dict()
        for key in ("coverage", "structural_completeness", "risk_recall", "redundancy"):
            block = d[key]
            expected = block["hits"] / block["total"] if block["total"] else 0.0
            assert block["rate"] == pytest.approx(expected, abs=1e-9)
        assert d["action_utility_placeholder"]["non_normative"] is True

    def test_retrieval_metrics_single_source_of_truth(self, resources, chest_case, run_config):
        from consultkit.retrieval import ndcg_at_k, recall_at_k, retrieve

        result, _ = run_case(chest_case, run_config, seed=7, resources=resources)
        report = end_to_end_metrics(result, chest_case, resources, run_config)
        qrels = resources.case_qrels(chest_case)
        results = {qid: retrieve(resources.index, e.query, k=5, mode=run_config.retrieval_mode)
                   for qid, e in qrels.items()}
        rate, hits, total = recall_at_k(results, qrels, k=5)
        assert report.retrieval["recall_at_5"]["rate"] == rate
        assert report.retrieval["ndcg_at_5"] == ndcg_at_k(results, qrels, k=5)

    def test_baseline_ordering(self, resources, all_cases, run_config):
        pooled = {}
        for baseline in ("B_chunk_rag", "D_full"):
            cfg = run_config.with_harness(baseline=baseline)
            reports = [
                end_to_end_metrics(run_case(c, cfg, 7, resources=resources)[0], c, resources, cfg)
                for c in all_cases
            ]
            pooled[baseline] = pool_reports(reports)
        assert pooled["D_full"]["coverage"]["rate"] >= pooled["B_chunk_rag"]["coverage"]["rate"]
        assert pooled["D_full"]["risk_recall"]["rate"] >= pooled["B_chunk_rag"]["risk_recall"]["rate"]


class TestAblations:
    def test_belief_table_shape_and_directions(self, resources, all_cases, run_config):
        table = ablate_belief(all_cases, run_config, list(STAGES), seed=7, resources=resources)
        assert list(table) == list(STAGES)
        vols = [table[s]["volatility"] for s in STAGES]
        wrongs = [table[s]["wrong_actions"] for s in STAGES]
        assert all(a >= b - 1e-12 for a, b in zip(vols, vols[1:]))
        assert all(a >= b for a, b in zip(wrongs, wrongs[1:]))
        assert all(isinstance(w, int) and w >= 0 for w in wrongs)

    def test_single_stage_table(self, resources, all_cases, run_config):
        table = ablate_belief(all_cases[:1], run_config, ["raw"], seed=7, resources=resources)
        assert list(table) == ["raw"]

    def test_punctuation_table(self, resources, all_cases, run_config):
        table = ablate_punctuation(all_cases, run_config, list(PUNCTUATION_SETTINGS),
                                   seed=7, resources=resources)
        for row in table.values():
            for value in row.values():
                assert 0.0 <= value <= 1.0
        assert table["pause_lexical"]["boundary_f1"] > table["none"]["boundary_f1"]
        assert table["pause_lexical"]["state_f1"] > table["none"]["state_f1"]

    def test_punctuation_table_deterministic(self, resources, all_cases, run_config):
        a = ablate_punctuation(all_cases[:2], run_config, ["none", "full"], 7, resources)
        b = ablate_punctuation(all_cases[:2], run_config, ["none", "full"], 7, resources)
        assert a == b


class TestCli:
    def test_run_command(self, resources, tmp_path):
        runner = CliRunner()
        case_path = resources.suite_dir / "cases" / "chest_pain_01.json"
        trace_path = tmp_path / "trace.jsonl"
        result = runner.invoke(cli_main, ["run", "--case", str(case_path), "--seed", "7",
                                          "--trace", str(trace_path)])
        assert result.exit_code == 0, result.output
        payload = json.loads(result.output)
        assert payload["case_id"] == "chest_pain_01"
        assert trace_path.exists()

    def test_replay_command(self, resources, tmp_path):
        runner = CliRunner()
        case_path = resources.suite_dir / "cases" / "chest_pain_01.json"
        trace_path = tmp_path / "trace.jsonl"
        runner.invoke(cli_main, ["run", "--case", str(case_path), "--seed", "7",
                                 "--trace", str(trace_path)])
        result = runner.invoke(cli_main, ["replay", "--trace", str(trace_path),
                                          "--suite", str(resources.suite_dir)])
        assert result.exit_code == 0, result.output
        assert json.loads(result.output)["concluded"] is True

    def test_ablate_command_writes_table(self, resources, tmp_path):
        runner = CliRunner()
        out = tmp_path / "table.json"
        result = runner.invoke(cli_main, ["ablate", "punctuation",
                                          "--suite", str(resources.suite_dir),
                                          "--seed", "7", "--out", str(out)])
        assert result.exit_code == 0, result.output
        table = json.loads(out.read_text())
        assert set(table["rows"]) == set(PUNCTUATION_SETTINGS)

    def test_eval_command(self, resources, tmp_path):
        runner = CliRunner()
        out = tmp_path / "report.json"
        result = runner.invoke(cli_main, ["eval", "--suite", str(resources.suite_dir),
                                          "--baselines", "B,D", "--seed", "7",
                                          "--out", str(out)])
        assert result.exit_code == 0, result.output
        payload = json.loads(out.read_text())
        assert set(payload["baselines"]) == {"B_chunk_rag", "D_full"}
        pooled = payload["baselines"]["D_full"]["pooled"]
        assert pooled["coverage"]["hits"] <= pooled["coverage"]["total"]


class TestReportFile:
    def test_run_writes_report_document(self, resources, tmp_path):
        runner = CliRunner()
        case_path = resources.suite_dir / "cases" / "chest_pain_01.json"
        report_path = tmp_path / "report.json"
        result = runner.invoke(cli_main, ["run", "--case", str(case_path), "--seed", "7",
                                          "--report", str(report_path)])
        assert result.exit_code == 0, result.output
        doc = json.loads(report_path.read_text())
        assert doc["case_id"] == "chest_pain_01"
        assert any(sid == "risks" for sid, _ in doc["narrative_sections"])
        assert doc["slot_values"]
