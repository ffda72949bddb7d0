import json
import threading

import pytest

from roomscript import sol
from roomscript.config import EngineConfig
from roomscript.errors import NotPending, OutOfRoom, PendingTurnExists, UnknownSession
from roomscript.geometry import Ray, Vec3
from roomscript.pose import UserPose
from roomscript.scene import Scene, apply_delta
from roomscript.session import Session, SessionManager


def manager(**kw):
    return SessionManager(EngineConfig(**kw))


class TestTurnLifecycle:
    def test_staging_contract_no_execution(self):
        session = manager().create_session()
        turn = session.submit_prompt("create a table")
        assert turn.status == "pending"
        assert turn.stages["plan"]["Instruction"].startswith("1.")
        assert turn.stages["envelope"]["ClassName"]
        assert turn.stages["explanations"]
        assert session.scene.objects == []  # nothing executed yet

    def test_conversational_turn_auto_closes(self):
        session = manager().create_session()
        turn = session.submit_prompt("how are you?")
        assert turn.status == "executed"
        assert turn.stages["plan"]["Instruction"] is None
        assert session.pending_turn() is None
        assert session.scene.objects == []

    def test_second_submit_while_pending(self):
        session = manager().create_session()
        session.submit_prompt("create a table")
        with pytest.raises(PendingTurnExists):
            session.submit_prompt("create a chair")

    def test_confirm_executes(self):
        session = manager().create_session()
        turn = session.submit_prompt("create a table with a lamp on it")
        session.confirm(turn.index)
        assert turn.status == "executed"
        assert turn.snapshot_after is not None
        assert {o.kind for o in session.scene.objects} == {"table", "lamp"}

    def test_abort_leaves_scene_bit_identical(self):
        session = manager().create_session()
        before = session.scene.snapshot().canonical()
        turn = session.submit_prompt("create a table")
        session.abort(turn.index)
        assert turn.status == "aborted"
        assert session.scene.snapshot().canonical() == before
        # a new prompt can now be staged
        session.submit_prompt("create a chair")

    def test_confirm_non_pending(self):
        session = manager().create_session()
        with pytest.raises(NotPending):
            session.confirm(0)
        turn = session.submit_prompt("create a table")
        session.confirm(turn.index)
        with pytest.raises(NotPending):
            session.confirm(turn.index)

    def test_failed_turn_rolls_back(self):
        session = manager().create_session()
        turn = session.submit_prompt("create a table")
        session.confirm(turn.index)
        before = session.scene.snapshot().canonical()
        # stage a turn, then invalidate its target before confirming
        turn2 = session.submit_prompt("move the table to the center of the room")
        session.scene._objects.pop("table-1")
        session.confirm(turn2.index)
        assert turn2.status == "failed"
        session.scene._objects["table-1"] = Scene.from_doc(
            {"objects": turn.snapshot_after.doc["objects"], "triggers": [], "step": 0}
        )._objects["table-1"]
        assert "table-1" in session.scene._objects

    def test_clarification_turn_for_ambiguity(self):
        session = manager().create_session()
        for prompt in ("create a cube", "create a cube behind me"):
            t = session.submit_prompt(prompt)
            session.confirm(t.index)
        turn = session.submit_prompt("levitate the cube")
        assert turn.status == "executed"
        assert turn.stages["plan"]["Instruction"] is None
        assert "clarification" in turn.stages["plan"]["Message"].lower()

    def test_auto_confirm_mode(self):
        session = manager(auto_confirm=True).create_session()
        turn = session.submit_prompt("create a table")
        assert turn.status == "executed"
        assert session.scene.find_by_name("table-1") is not None


class TestMemorySemantics:
    def test_put_it_back_after_two_moves_restores_creation_state(self):
        session = manager(auto_confirm=True).create_session()
        session.submit_prompt("create a cube")
        created_doc = json.dumps(session.turns[0].snapshot_after.doc["objects"][0])
        session.submit_prompt("move the cube to the center of the room")
        session.submit_prompt("move the cube behind me")
        session.submit_prompt("put it back")
        final_doc = json.dumps(session.scene.authoring_doc()["objects"][0])
        assert final_doc == created_doc

    def test_original_after_multiple_edits_replay_oracle(self):
        session = manager(auto_confirm=True).create_session()
        prompts = [
            "create a table",
            "make the table wider",
            "move the table to the center of the room",
            "make the table red",
        ]
        for p in prompts:
            session.submit_prompt(p)
        # oracle: replay the creating turn alone in a fresh scene
        oracle = manager(auto_confirm=True).create_session()
        oracle.submit_prompt("create a table")
        expected = json.dumps(oracle.scene.authoring_doc()["objects"])

        session.submit_prompt("move the table back to its original position")
        assert json.dumps(session.scene.authoring_doc()["objects"]) == expected

    def test_undo_restores_previous_turn_state(self):
        def authoring_state(scene):
            doc = scene.authoring_doc()
            doc.pop("step")  # the committed-turn counter stays monotonic
            return json.dumps(doc)

        session = manager(auto_confirm=True).create_session()
        session.submit_prompt("create a cube")
        mid = authoring_state(session.scene)
        session.submit_prompt("move the cube to the center of the room")
        session.submit_prompt("undo that")
        assert authoring_state(session.scene) == mid

    def test_back_on_untouched_object_is_clarification(self):
        session = manager(auto_confirm=True).create_session()
        session.submit_prompt("create a cube")
        turn = session.submit_prompt("put the cube back")
        assert turn.stages["plan"]["Instruction"] is None

    def test_history_replay_invariant(self):
        session = manager(auto_confirm=True).create_session()
        for p in ("create a table", "create a lamp on the table",
                  "make the lamp blue", "move the table to the center of the room"):
            session.submit_prompt(p)
        current = session.scene.snapshot().canonical()

        replayed = Scene()
        interp = sol.Interpreter(replayed)
        for turn in session.turns:
            if turn.status != "executed":
                continue
            envelope = turn.stages.get("envelope")
            if not envelope:
                continue
            program = sol.parse(envelope["SourceCode"])
            vp = sol.ValidatedProgram.check(program, replayed)
            interp.execute(vp)
        replayed.step = session.scene.step
        assert replayed.snapshot().canonical() == current


class TestEmbodimentInputs:
    def test_pose_outside_room_rejected(self):
        session = manager().create_session()
        with pytest.raises(OutOfRoom):
            session.update_pose(UserPose(position=Vec3(9, 0, 0)))

    def test_gesture_window_filter_oracle(self):
        session = manager().create_session()
        samples = [
            {"t": 1000.0, "origin": [0, 1.6, 0], "direction": [0, -1, 1]},
            {"t": 14000.0, "origin": [0, 1.6, 0], "direction": [0.1, -1, 1]},
            {"t": 15000.0, "origin": [0, 1.6, 0], "direction": [0.2, -1, 1]},
        ]
        for s in samples:
            session.append_gesture(s)
        # oracle: the newest sample defines "submit time"; anything older than
        # 10 s before it is excluded
        submit_ms = max(s["t"] for s in samples)
        expected = [s for s in samples if s["t"] >= submit_ms - 10000.0]
        timeline, docs = session._collect_timeline(None, prompt_start_ms=14000.0)
        assert len(docs) == len(expected) == 2
        assert [d["t"] for d in docs] == [0.0, 1000.0]
        assert session.gesture_buffer == []  # cleared on submit

    def test_inline_gestures_attach_to_turn(self):
        session = manager().create_session()
        turn = session.submit_prompt(
            "put a desk here", token_timestamps=[0, 150, 300, 450],
            gestures=[{"t": 450, "origin": [0, 1.6, 0], "direction": [0.2, -1.0, 1.0]}])
        assert turn.status == "pending"
        assert turn.gestures[0]["t"] == 450


class TestTicksAndGrab:
    def test_look_trigger_fires_after_pose_update(self):
        session = manager(auto_confirm=True).create_session()
        session.submit_prompt("create a lamp")
        src = ("program Watch { handler Glow { set lamp-1 illuminated true } "
               "method M { on lamp-1 OnLookEnter Glow } }")
        vp = sol.ValidatedProgram.check(sol.parse(src), session.scene)
        session.interpreter.execute(vp)
        session.update_pose(UserPose(position=Vec3(0, 0, 0), yaw=180))
        session.run_ticks(1)
        assert session.scene.get("lamp-1").illuminated is False
        session.update_pose(UserPose(position=Vec3(0, 0, 0), yaw=0, pitch=-35))
        session.run_ticks(1)
        assert session.scene.get("lamp-1").illuminated is True

    def test_grab_channel_drives_hold(self):
        session = manager(auto_confirm=True).create_session()
        session.submit_prompt(
            "create a table with a lamp on it. when someone grabs the lamp turn it on.")
        session.run_ticks(1)
        assert session.scene.get("lamp-1").illuminated is False
        session.run_ticks(2, grab="lamp-1")
        assert session.scene.get("lamp-1").illuminated is True
        session.run_ticks(2, grab=None)
        assert session.scene.get("lamp-1").illuminated is False


class TestStreaming:
    def test_fold_deltas_equals_state(self):
        session = manager(auto_confirm=True).create_session()
        for p in ("create a table", "create a lamp on the table", "make the lamp green"):
            session.submit_prompt(p)
        session.update_pose(UserPose(position=Vec3(0, 0, 0.2)))
        session.run_ticks(3)
        doc = {"objects": [], "triggers": [], "step": 0}
        for event in session.events:
            if event["type"] == "delta":
                doc = apply_delta(doc, event["delta"])
            elif event["type"] == "tick" and event.get("delta"):
                doc = apply_delta(doc, event["delta"])
        assert json.dumps(doc, sort_keys=True) == json.dumps(
            session.scene.authoring_doc(), sort_keys=True)

    def test_events_have_dense_sequence(self):
        session = manager(auto_confirm=True).create_session()
        session.submit_prompt("create a table")
        seqs = [e["seq"] for e in session.events]
        assert seqs == list(range(len(seqs)))

    def test_single_pending_under_concurrent_submits(self):
        session = manager().create_session()
        results = []

        def submit(i):
            try:
                session.submit_prompt(f"create a cube behind me")
                results.append("ok")
            except PendingTurnExists:
                results.append("pending")

        threads = [threading.Thread(target=submit, args=(i,)) for i in range(8)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert results.count("ok") == 1
        assert results.count("pending") == 7


class TestJournal:
    def test_restart_reproduces_state(self, tmp_path):
        path = str(tmp_path / "journal.jsonl")
        mgr = SessionManager(EngineConfig(auto_confirm=True), journal_path=path)
        session = mgr.create_session()
        session.submit_prompt("create a table with a lamp on it")
        session.submit_prompt("make the lamp red")
        session.inject_fault({"lamp-1": {"illuminated": True}})
        session.update_pose(UserPose(position=Vec3(0, 0, 0.5)))
        session.run_ticks(2)
        expected = session.scene.canonical_json()
        expected_turns = len(session.turns)

        reloaded = SessionManager(EngineConfig(auto_confirm=True), journal_path=path)
        clone = reloaded.get(session.id)
        assert clone.scene.canonical_json() == expected
        assert len(clone.turns) == expected_turns

    def test_journal_lines_are_json(self, tmp_path):
        path = str(tmp_path / "journal.jsonl")
        mgr = SessionManager(EngineConfig(auto_confirm=True), journal_path=path)
        session = mgr.create_session()
        session.submit_prompt("create a table")
        with open(path) as fh:
            lines = [json.loads(line) for line in fh if line.strip()]
        assert all("e" in line and "id" in line for line in lines)
        kinds = [line["e"] for line in lines]
        assert "session" in kinds and "turn" in kinds and "turn_result" in kinds

    def test_unknown_session(self):
        with pytest.raises(UnknownSession):
            manager().get("nope")
