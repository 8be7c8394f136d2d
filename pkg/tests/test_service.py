import json
import threading

import pytest
from fastapi.testclient import TestClient

from consultkit.harness import RunConfig, replay_from_trace, run_case
from consultkit.report_replay import TraceLog, verify_replay
from consultkit.service import SessionManager, create_app


@pytest.fixture()
def client():
    return TestClient(create_app(SessionManager()))


def create(client, **body):
    response = client.post("/sessions", json=body or {"seed": 3})
    assert response.status_code == 200, response.text
    return response.json()


class TestCreateSession:
    def test_fresh_session(self, client):
        handle = create(client, seed=3)
        assert handle["turn"] == 0
        assert handle["status"] == "open"

    def test_distinct_ids(self, client):
        a = create(client, seed=1)
        b = create(client, seed=2)
        assert a["session_id"] != b["session_id"]

    def test_invalid_lambda_rejected(self, client):
        response = client.post("/sessions", json={"seed": 1, "config": {"stabilizer": {"lambda": 0.5}}})
        assert response.status_code == 422
        assert response.json()["code"] == "InvalidConfig"


class TestPushTurn:
    def test_first_text_turn(self, client):
        handle = create(client, seed=3, case_id="chest_pain_01")
        response = client.post(f"/sessions/{handle['session_id']}/turns",
                               json={"role": "patient", "text": "chest feels tight"})
        assert response.status_code == 200
        update = response.json()
        assert update["turn"] == 1
        assert len(update["utterances"]) >= 1
        assert sum(update["belief"]["smoothed"]) == pytest.approx(1.0, abs=1e-9)
        assert update["selected_action"] is not None

    def test_unknown_session(self, client):
        response = client.post("/sessions/nope/turns", json={"role": "patient", "text": "hi"})
        assert response.status_code == 404
        assert response.json()["code"] == "UnknownSession"

    def test_duplicate_turn_rejected(self, client):
        handle = create(client, seed=3)
        sid = handle["session_id"]
        client.post(f"/sessions/{sid}/turns", json={"role": "patient", "text": "hello", "turn_index": 1})
        response = client.post(f"/sessions/{sid}/turns",
                               json={"role": "patient", "text": "again", "turn_index": 1})
        assert response.status_code == 409
        assert response.json()["code"] == "DuplicateTurn"

    def test_concluded_session_rejects_input(self, client):
        handle = create(client, seed=3, case_id="chest_pain_01")
        sid = handle["session_id"]
        last = None
        for text in ["started yesterday and my chest feels tight",
                     "the tight feeling is moderate and sits on the left side",
                     "the pressure builds when climbing stairs",
                     "it gets a little better after sitting still",
                     "the tightness spread to my left shoulder this time",
                     "climbing stairs brings the pressure back every time",
                     "the tight pressure eases with rest",
                     "mostly tight pressure with exertion again"]:
            response = client.post(f"/sessions/{sid}/turns", json={"role": "patient", "text": text})
            assert response.status_code == 200
            last = response.json()
            if last["session"]["status"] == "concluded":
                break
        assert last["session"]["status"] == "concluded"
        response = client.post(f"/sessions/{sid}/turns", json={"role": "patient", "text": "more"})
        assert response.status_code == 409
        assert response.json()["code"] == "SessionClosed"


class TestSnapshot:
    def test_fresh_snapshot(self, client):
        handle = create(client, seed=3)
        snap = client.get(f"/sessions/{handle['session_id']}/snapshot").json()
        assert snap["state"] == {}
        assert sum(snap["belief"]) == pytest.approx(1.0, abs=1e-9)

    def test_snapshot_matches_last_update(self, client):
        handle = create(client, seed=3, case_id="chest_pain_01")
        sid = handle["session_id"]
        update = None
        for text in ["started yesterday and my chest feels tight",
                     "it is worse when climbing stairs"]:
            update = client.post(f"/sessions/{sid}/turns",
                                 json={"role": "patient", "text": text}).json()
        snap = client.get(f"/sessions/{sid}/snapshot").json()
        assert snap["belief"] == update["belief"]["smoothed"]
        assert snap["session"]["turn"] == 2
        for fid, entry in snap["state"].items():
            assert entry["value"]
        assert "narrative_sections" in snap["report"]

    def test_unknown_snapshot(self, client):
        assert client.get("/sessions/zzz/snapshot").status_code == 404


class TestTraceEndpoint:
    def test_trace_replays_to_live_state(self, client, resources, run_config, tmp_path):
        handle = create(client, seed=9, case_id="chest_pain_01")
        sid = handle["session_id"]
        texts = ["started yesterday and my chest feels tight",
                 "worse when climbing stairs and better after sitting"]
        updates = [client.post(f"/sessions/{sid}/turns",
                               json={"role": "patient", "text": t}).json() for t in texts]
        raw = client.get(f"/sessions/{sid}/trace").text
        path = tmp_path / "service_trace.jsonl"
        path.write_text(raw)
        log = TraceLog.read(path)
        replayed = replay_from_trace(log, run_config, resources=resources)
        assert len(replayed.turns) == len(texts)
        for update, turn in zip(updates, replayed.turns):
            assert update["belief"]["smoothed"] == pytest.approx(
                list(turn.belief_smoothed.dist), abs=1e-12)
            assert update["selected_action"]["action_id"] == turn.selected.action_id

    def test_turn_update_mirrors_trace_records(self, client):
        handle = create(client, seed=9, case_id="chest_pain_01")
        sid = handle["session_id"]
        update = client.post(f"/sessions/{sid}/turns",
                             json={"role": "patient", "text": "chest feels tight"}).json()
        lines = [json.loads(l) for l in client.get(f"/sessions/{sid}/trace").text.splitlines()]
        by_kind = {l["record_kind"]: l for l in lines if l.get("record_kind")}
        assert by_kind["belief_snapshot"]["payload"]["smoothed"] == update["belief"]["smoothed"]
        assert by_kind["selected_action"]["payload"]["action_id"] == update["selected_action"]["action_id"]
        assert [e["field_id"] for e in by_kind["events"]["payload"]["events"]] == \
            [e["field_id"] for e in update["events"]]


class TestUpdatesChannel:
    def test_sse_replays_backlog(self, client):
        handle = create(client, seed=3, case_id="chest_pain_01")
        sid = handle["session_id"]
        pushed = [
            client.post(f"/sessions/{sid}/turns",
                        json={"role": "patient", "text": text}).json()
            for text in ("chest feels tight", "worse when climbing stairs")
        ]
        response = client.get(f"/sessions/{sid}/updates", params={"backlog_only": 1})
        assert response.status_code == 200
        assert response.headers["content-type"].startswith("text/event-stream")
        events = [json.loads(line[len("data: "):])
                  for line in response.text.splitlines() if line.startswith("data: ")]
        assert [e["turn"] for e in events] == [u["turn"] for u in pushed]
        assert events[-1]["belief"] == pushed[-1]["belief"]


class TestSessionIsolation:
    def test_interleaved_sessions_match_serial(self, client):
        h1 = create(client, seed=4, case_id="chest_pain_01")
        h2 = create(client, seed=4, case_id="chest_pain_01")
        texts = ["started yesterday and chest feels tight", "worse when climbing stairs"]
        inter = {h1["session_id"]: [], h2["session_id"]: []}
        for text in texts:
            for sid in inter:
                inter[sid].append(client.post(f"/sessions/{sid}/turns",
                                              json={"role": "patient", "text": text}).json())
        h3 = create(client, seed=4, case_id="chest_pain_01")
        serial = [client.post(f"/sessions/{h3['session_id']}/turns",
                              json={"role": "patient", "text": t}).json() for t in texts]
        for sid, updates in inter.items():
            for u, s in zip(updates, serial):
                assert u["belief"] == s["belief"]
                assert u["selected_action"]["action_id"] == s["selected_action"]["action_id"]
