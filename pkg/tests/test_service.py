import json

import pytest
from fastapi.testclient import TestClient

from roomscript.config import EngineConfig
from roomscript.scene import apply_delta
from roomscript.service import create_app
from roomscript.session import SessionManager


@pytest.fixture()
def client():
    manager = SessionManager(EngineConfig())
    return TestClient(create_app(manager))


def make_session(client, **body) -> str:
    resp = client.post("/sessions", json=body)
    assert resp.status_code == 200
    return resp.json()["sessionId"]


class TestEndpoints:
    def test_create_and_state(self, client):
        sid = make_session(client)
        state = client.get(f"/sessions/{sid}/state").json()
        assert state["room"]["width"] == 4.0
        assert state["objects"] == []

    def test_unknown_session_404(self, client):
        assert client.get("/sessions/nope/state").status_code == 404
        assert client.post("/sessions/nope/ticks", json={}).status_code == 404

    def test_prompt_confirm_flow(self, client):
        sid = make_session(client)
        turn = client.post(f"/sessions/{sid}/prompt",
                           json={"text": "create a table"}).json()
        assert turn["status"] == "pending"
        assert turn["stages"]["plan"]["Instruction"].startswith("1.")
        state = client.get(f"/sessions/{sid}/state").json()
        assert state["objects"] == []
        done = client.post(f"/sessions/{sid}/confirm",
                           json={"turnIndex": turn["index"]}).json()
        assert done["status"] == "executed"
        state = client.get(f"/sessions/{sid}/state").json()
        assert [o["kind"] for o in state["objects"]] == ["table"]

    def test_abort_keeps_state(self, client):
        sid = make_session(client)
        before = client.get(f"/sessions/{sid}/state").json()
        turn = client.post(f"/sessions/{sid}/prompt",
                           json={"text": "create a table"}).json()
        client.post(f"/sessions/{sid}/abort", json={"turnIndex": turn["index"]})
        after = client.get(f"/sessions/{sid}/state").json()
        assert before == after

    def test_pending_conflict_409(self, client):
        sid = make_session(client)
        client.post(f"/sessions/{sid}/prompt", json={"text": "create a table"})
        resp = client.post(f"/sessions/{sid}/prompt", json={"text": "create a chair"})
        assert resp.status_code == 409

    def test_pose_validation_422(self, client):
        sid = make_session(client)
        resp = client.post(f"/sessions/{sid}/pose",
                           json={"pose": {"position": [99, 0, 0]}})
        assert resp.status_code == 422

    def test_history_after_two_turns(self, client):
        sid = make_session(client, autoConfirm=True)
        client.post(f"/sessions/{sid}/prompt", json={"text": "create a table"})
        client.post(f"/sessions/{sid}/prompt", json={"text": "create a chair behind me"})
        turns = client.get(f"/sessions/{sid}/history").json()["turns"]
        assert len(turns) == 2
        assert all(t["snapshotBefore"] is not None and t["snapshotAfter"] is not None
                   for t in turns)

    def test_ticks_and_gesture_endpoints(self, client):
        sid = make_session(client, autoConfirm=True)
        client.post(f"/sessions/{sid}/prompt",
                    json={"text": "create a table with a lamp on it. "
                                  "when someone grabs the lamp turn it on."})
        reports = client.post(f"/sessions/{sid}/ticks",
                              json={"n": 2, "grab": "lamp-1"}).json()["reports"]
        assert any(f["event"] == "OnHoldEnter" for r in reports for f in r["fired"])
        assert client.post(f"/sessions/{sid}/gesture",
                           json={"sample": {"t": 0, "origin": [0, 1.6, 0],
                                            "direction": [0, -1, 1]}}).json()["ok"]

    def test_fault_endpoint(self, client):
        sid = make_session(client, autoConfirm=True)
        client.post(f"/sessions/{sid}/prompt", json={"text": "create a lamp"})
        turn = client.post(f"/sessions/{sid}/fault",
                           json={"sets": {"lamp-1": {"illuminated": True}}}).json()
        assert turn["status"] == "executed"
        state = client.get(f"/sessions/{sid}/state").json()
        assert state["objects"][0]["illuminated"] is True

    def test_initial_scene_payload(self, client):
        from roomscript.scene import Scene

        scene = Scene()
        scene.create_object("couch")
        sid = make_session(client, initialScene=scene.to_doc())
        state = client.get(f"/sessions/{sid}/state").json()
        assert [o["kind"] for o in state["objects"]] == ["couch"]


class TestStream:
    def test_websocket_delivers_committed_deltas_exactly_once(self, client):
        sid = make_session(client, autoConfirm=True)
        with client.websocket_connect(f"/sessions/{sid}/stream") as ws:
            client.post(f"/sessions/{sid}/prompt", json={"text": "create a table"})
            client.post(f"/sessions/{sid}/prompt",
                        json={"text": "create a lamp on the table"})
            expected_state = client.get(f"/sessions/{sid}/state").json()
            doc = {"objects": [], "triggers": [], "step": 0}
            seen = set()
            deltas = 0
            while deltas < 2:
                event = ws.receive_json()
                assert event["seq"] not in seen
                seen.add(event["seq"])
                if event["type"] == "delta":
                    doc = apply_delta(doc, event["delta"])
                    deltas += 1
        assert json.dumps(doc["objects"], sort_keys=True) == json.dumps(
            expected_state["objects"], sort_keys=True)
        assert doc["step"] == expected_state["step"]

    def test_events_endpoint_pagination(self, client):
        sid = make_session(client, autoConfirm=True)
        client.post(f"/sessions/{sid}/prompt", json={"text": "create a table"})
        all_events = client.get(f"/sessions/{sid}/events").json()["events"]
        tail = client.get(f"/sessions/{sid}/events", params={"since": 2}).json()["events"]
        assert all_events[2:] == tail
