"""[SECONDARY] UI round trip, exercised through the same API calls the
browser client makes: click a floor point (gesture sample), type the prompt
(token timestamps), review the staged turn, then confirm or abort.

The client-side halves (click-to-ray math, timestamp capture, delta folding,
panel gating) are covered by the frontend's vitest suite.
"""

import pytest
from fastapi.testclient import TestClient

from roomscript.config import EngineConfig
from roomscript.geometry import Ray, Vec3, ray_floor_point
from roomscript.service import create_app
from roomscript.session import SessionManager


@pytest.fixture()
def client():
    return TestClient(create_app(SessionManager(EngineConfig())))


def _ui_click_ray():
    # what frontend/src/gesture.ts screenRay() produces for a click below
    # the horizon while standing at the origin looking north
    return Ray(Vec3(0, 1.6, 0), Vec3(0.25, -0.9, 1.0))


def test_ui_round_trip_confirm_places_desk_at_clicked_point(client):
    sid = client.post("/sessions", json={}).json()["sessionId"]
    ray = _ui_click_ray()
    clicked = ray_floor_point(ray)

    turn = client.post(f"/sessions/{sid}/prompt", json={
        "text": "put a desk here",
        "tokenTimestamps": [0, 180, 350, 520],
        "gestures": [{"t": 530, "origin": [0, 1.6, 0],
                      "direction": [0.25, -0.9, 1.0]}],
    }).json()

    # all three stages are populated before any scene change
    assert turn["status"] == "pending"
    assert turn["stages"]["transcription"] == "put a desk here"
    assert turn["stages"]["plan"]["Instruction"]
    assert turn["stages"]["explanations"]
    assert client.get(f"/sessions/{sid}/state").json()["objects"] == []

    client.post(f"/sessions/{sid}/confirm", json={"turnIndex": turn["index"]})
    state = client.get(f"/sessions/{sid}/state").json()
    desk = [o for o in state["objects"] if o["kind"] == "desk"][0]
    assert desk["position"]["x"] == pytest.approx(clicked.x, abs=1e-6)
    assert desk["position"]["z"] == pytest.approx(clicked.z, abs=1e-6)


def test_ui_round_trip_abort_changes_nothing(client):
    sid = client.post("/sessions", json={}).json()["sessionId"]
    before = client.get(f"/sessions/{sid}/state").json()
    turn = client.post(f"/sessions/{sid}/prompt", json={
        "text": "put a desk here",
        "tokenTimestamps": [0, 180, 350, 520],
        "gestures": [{"t": 530, "origin": [0, 1.6, 0],
                      "direction": [0.25, -0.9, 1.0]}],
    }).json()
    client.post(f"/sessions/{sid}/abort", json={"turnIndex": turn["index"]})
    after = client.get(f"/sessions/{sid}/state").json()
    assert before == after
    history = client.get(f"/sessions/{sid}/history").json()["turns"]
    assert history[0]["status"] == "aborted"
