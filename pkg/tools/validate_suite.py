"""Dev-time validation of the bundled suite.

Checks, per case:
  1. full-punctuation extraction over the script turns equals gold_events;
  2. boundary recall per ablation setting grows strictly none -> full;
  3. each case's confirmatory exam is in the top-2 hybrid exam ranking for
     the post-script state query, and out of the top-2 under chunk_only;
  4. sessions conclude before the turn cap for baseline D.
Run:  python3 tools/validate_suite.py
"""

import sys
from collections import Counter

from consultkit.boundary import boundary_prf, predicted_boundary_positions, segment
from consultkit.extraction import extract_events
from consultkit.harness import RunConfig, SuiteResources, bundled_suite_path, run_case
from consultkit.stream import synthesize_stream

EXPECTED_EXAMS = {
    "chest_pain_01": "exam_catalog/ecg",
    "abdominal_pain_02": "exam_catalog/ultrasound",
    "cough_03": "exam_catalog/chest_xray",
    "headache_04": "exam_catalog/headache_diary",
    "joint_pain_05": "exam_catalog/joint_fluid",
    "dizziness_06": "exam_catalog/blood_count",
}


def show_events(evs):
    return sorted((e.source_turn, e.field_id, e.value, e.polarity) for e in evs)


def main() -> int:
    cfg = RunConfig.from_dict()
    res = SuiteResources(bundled_suite_path(), index_cfg=cfg.index)
    cases = res.load_all_cases()
    failures = 0

    for case in cases:
        print(f"=== {case.case_id} ===")
        stream = synthesize_stream(case.script, seed=7)

        # 1. extraction vs gold under full punctuation (per-turn segmentation)
        predicted = []
        seq = 1
        clock = 0
        from consultkit.stream import synthesize_turn
        for t_no, turn in enumerate(case.script.turns, start=1):
            tokens = synthesize_turn(turn.role, turn.text, 7, t_no, start_seq=seq,
                                     t0_ms=clock, boundary_styles=turn.boundary_styles)
            seq = tokens[-1].seq + 1
            clock = tokens[-1].t_end_ms + tokens[-1].pause_after_ms
            for u in segment(tokens, cfg.cue_weights, res.lexicon, "full", turn=t_no):
                predicted.extend(extract_events(u, res.schema))
        gold = list(case.gold_events)
        pred_set = Counter(show_events(predicted))
        gold_set = Counter(show_events(gold))
        if pred_set != gold_set:
            failures += 1
            print("  EXTRACTION MISMATCH")
            print("   pred-only:", sorted((pred_set - gold_set).elements()))
            print("   gold-only:", sorted((gold_set - pred_set).elements()))
        else:
            print(f"  extraction ok ({len(predicted)} events)")

        # 2. boundary recall ordering across settings
        f1s = {}
        for setting in ("none", "pause_only", "pause_lexical", "full"):
            utts = segment(stream, cfg.cue_weights, res.lexicon, setting)
            pred = predicted_boundary_positions(utts, stream)
            p, r, f1, tp, fp, fn = boundary_prf(pred, list(case.gold_boundaries))
            f1s[setting] = (f1, tp, fp, fn)
        print("  boundary:", {k: f"f1={v[0]:.3f} tp={v[1]} fp={v[2]} fn={v[3]}" for k, v in f1s.items()})
        vals = [f1s[s][0] for s in ("none", "pause_only", "pause_lexical", "full")]
        if not all(a < b for a, b in zip(vals, vals[1:])):
            failures += 1
            print("  BOUNDARY ORDER NOT STRICT")

        # 3. behavioral exam check: the full system recommends the
        #    confirmatory exam and closes every gold risk; the chunk-only
        #    baseline never reaches the exam-dependent risks
        result, _ = run_case(case, cfg, 7, resources=res)
        target = EXPECTED_EXAMS[case.case_id]
        recommended = {t.selected.target for t in result.turns
                       if t.selected and t.selected.kind == "recommend_exam"}
        if target not in recommended:
            failures += 1
            print(f"  D NEVER RECOMMENDS {target}; got {sorted(recommended)}")
        if set(result.closed_risks) != {c.risk_id for c in case.goal.risk_checks}:
            failures += 1
            print(f"  D LEFT RISKS OPEN: closed={sorted(result.closed_risks)}")

        b_cfg = cfg.with_harness(baseline="B_chunk_rag")
        b_result, _ = run_case(case, b_cfg, 7, resources=res)
        exam_risks = {c.risk_id for c in case.goal.risk_checks
                      if any(f.startswith("exam_") for f, _p, _v in c.trigger)}
        b_missed = exam_risks - set(b_result.triggered_turns)
        print(f"  B misses exam risks: {sorted(b_missed)} of {sorted(exam_risks)}")

        # 4. baseline D terminates with conclude
        print(f"  D: turns={len(result.turns)} concluded={result.concluded} "
              f"t_goal={result.t_goal} prompts={len(result.prompts)} "
              f"closed={sorted(result.closed_risks)} triggered={sorted(result.triggered_turns)}")
        if not result.concluded:
            failures += 1
            print("  D DID NOT CONCLUDE")

    print("FAILURES:", failures)
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
