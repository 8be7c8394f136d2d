"""Record a scripted live session into a fixture for the console tests.

Drives the real session service in-process for six turns and captures the
exact wire payloads: per-turn TurnUpdates, the final snapshot, and the
trace JSONL. Run:  python3 tools/export_frontend_fixture.py
"""

import json
from pathlib import Path

from consultkit.service import SessionManager

TURNS = [
    ("patient", "started yesterday and my chest feels tight"),
    ("doctor", "does it change with effort?"),
    ("patient", "the pressure builds when climbing stairs"),
    ("patient", "it gets a little better after sitting still"),
    ("patient", "the tightness reaches my left shoulder with heavy exertion"),
    ("patient", "overall it feels moderate and sits on the left side of my chest"),
]

OUT = Path(__file__).resolve().parents[1] / "frontend" / "test" / "fixtures" / "session_fixture.json"


def main() -> None:
    manager = SessionManager()
    session = manager.create_session("chest_pain_01", None, seed=12)
    sid = session.handle.session_id
    updates = [manager.push_turn(sid, role, text) for role, text in TURNS]
    assert session.handle.status == "concluded", "fixture session must conclude on turn 6"
    snapshot = session.snapshot()
    log = session.engine.trace
    trace_lines = [json.dumps(log.header())]
    trace_lines.extend(json.dumps(r.to_dict()) for r in log.records())

    case = session.case
    fixture = {
        "session": session.handle.to_dict(),
        "hypotheses": list(case.hypotheses.names),
        "updates": updates,
        "final_snapshot": snapshot,
        "trace_jsonl": "\n".join(trace_lines) + "\n",
        "scripted_turns": len(TURNS),
    }
    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps(fixture, indent=1), encoding="utf-8")
    print(f"wrote {OUT} ({len(updates)} updates, status={session.handle.status})")


if __name__ == "__main__":
    main()
