import random

import pytest

from roomscript.errors import UnknownObject, UnvalidatedHandler
from roomscript.geometry import Ray, Vec3
from roomscript.pose import UserPose
from roomscript.scene import Scene
from roomscript.triggers import EventAction, TriggerEngine


def make_engine(scene=None, handlers=None):
    scene = scene or Scene()
    return TriggerEngine(scene, handlers=handlers or {}), scene


class TestBindings:
    def test_add_and_duplicate_is_noop(self):
        engine, scene = make_engine()
        scene.create_object("cube")
        engine.handlers["H"] = lambda name: None
        assert engine.add_trigger("cube-1", "OnPointEnter", "H") is not None
        assert engine.add_trigger("cube-1", "OnPointEnter", "H") is None
        assert len(scene.triggers) == 1

    def test_remove_absent_returns_false(self):
        engine, scene = make_engine()
        scene.create_object("cube")
        engine.handlers["H"] = lambda name: None
        assert engine.remove_trigger("cube-1", "OnPointEnter", "H") is False
        assert scene.authoring_doc()["triggers"] == []

    def test_unknown_object_and_unvalidated_handler(self):
        engine, scene = make_engine()
        scene.create_object("cube")
        engine.handlers["H"] = lambda name: None
        with pytest.raises(UnknownObject):
            engine.add_trigger("ghost", "OnPointEnter", "H")
        with pytest.raises(UnvalidatedHandler):
            engine.add_trigger("cube-1", "OnPointEnter", "Nope")


class TestTick:
    def test_no_bindings_empty_report(self):
        engine, scene = make_engine()
        report = engine.tick(UserPose())
        assert report.fired == [] and report.delta == {}

    def test_near_enter_once_while_静_exit(self):
        engine, scene = make_engine()
        chair = scene.create_object("chair", overrides={"position": Vec3(0, 0, 1.0)})
        log = []
        engine.handlers["H"] = lambda name: log.append(name)
        engine.add_trigger(chair.name, "OnNearEnter", "H")
        far = UserPose(position=Vec3(0, 0, -1.8))
        close = UserPose(position=Vec3(0, 0, 0.4))
        engine.tick(far)
        r1 = engine.tick(close)
        r2 = engine.tick(close)
        assert [f.event for f in r1.fired] == ["OnNearEnter"]
        assert r2.fired == []
        assert log == [chair.name]

    def test_touch_continuous_fires_enter_once(self):
        engine, scene = make_engine()
        lamp = scene.create_object("lamp", overrides={"position": Vec3(0, 0, 1.0)})
        fired = []
        engine.handlers["T"] = lambda name: fired.append(name)
        engine.add_trigger(lamp.name, "OnTouchEnter", "T")
        touching = UserPose(position=Vec3(0, 0, 0.5), hand=Vec3(0, 0.3, 0.86))
        for _ in range(10):
            engine.tick(touching)
        assert fired == [lamp.name]

    def test_hold_and_look_families(self):
        engine, scene = make_engine()
        cube = scene.create_object("cube", overrides={"position": Vec3(0, 1.35, 1.5),
                                                      "levitated": True})
        events = []
        engine.handlers["E"] = lambda name: events.append(name)
        engine.add_trigger(cube.name, "OnHoldEnter", "E")
        engine.add_trigger(cube.name, "OnLookEnter", "E")
        away = UserPose(position=Vec3(0, 0, 0), yaw=180)
        engine.tick(away)
        looking = UserPose(position=Vec3(0, 0, 0), yaw=0)
        r = engine.tick(looking, grab=cube.name)
        assert sorted(f.event for f in r.fired) == ["OnHoldEnter", "OnLookEnter"]

    def test_while_and_atalltimes(self):
        engine, scene = make_engine()
        cube = scene.create_object("cube", overrides={"position": Vec3(0, 0, 1.0)})
        count = {"while": 0, "always": 0}
        engine.handlers["W"] = lambda name: count.__setitem__("while", count["while"] + 1)
        engine.handlers["A"] = lambda name: count.__setitem__("always", count["always"] + 1)
        engine.add_trigger(cube.name, "WhileNear", "W")
        engine.add_trigger(cube.name, "AtAllTimes", "A")
        close = UserPose(position=Vec3(0, 0, 0.4))
        far = UserPose(position=Vec3(0, 0, -1.8))
        engine.tick(close)  # While fires on the enter tick itself
        engine.tick(close)
        engine.tick(far)
        assert count["while"] == 2
        assert count["always"] == 3

    def test_handler_isolation_and_disable(self):
        engine, scene = make_engine()
        cube = scene.create_object("cube", overrides={"position": Vec3(0, 0, 1.0)})
        other = scene.create_object("table", overrides={"position": Vec3(1.2, 0, 1.0)})

        def bad(name):
            scene.set_property(cube.name, "color", (1, 0, 0, 1))
            raise RuntimeError("boom")

        moved = []
        engine.handlers["BAD"] = bad
        engine.handlers["GOOD"] = lambda name: moved.append(name) or scene.set_property(
            other.name, "illuminated", True)
        engine.add_trigger(cube.name, "OnNearEnter", "BAD")
        engine.add_trigger(other.name, "OnNearEnter", "GOOD")
        close = UserPose(position=Vec3(0.6, 0, 0.6))
        report = engine.tick(close)
        # the bad handler's partial effect is rolled back, the good one applied
        assert scene.get(cube.name).color.r != 1.0 or scene.get(cube.name).color.g == 1.0
        assert scene.get(other.name).illuminated is True
        assert len(report.errors) == 1
        binding = [b for b in scene.triggers if b.handler == "BAD"][0]
        assert binding.enabled is False
        # disabled binding never fires again
        engine.tick(UserPose(position=Vec3(0, 0, -1.8)))
        r = engine.tick(close)
        assert all(f.handler != "BAD" for f in r.fired)

    def test_tick_report_doc_shape(self):
        engine, scene = make_engine()
        cube = scene.create_object("cube", overrides={"position": Vec3(0, 0, 1.0)})
        engine.handlers["H"] = lambda name: scene.set_property(name, "illuminated", True)
        engine.add_trigger(cube.name, "OnNearEnter", "H")
        doc = engine.tick(UserPose(position=Vec3(0, 0, 0.4))).to_doc()
        assert set(doc) == {"tick", "fired", "errors", "delta"}
        assert doc["fired"] == [{"object": "cube-1", "event": "OnNearEnter", "handler": "H"}]
        assert doc["delta"]["updated"][0]["illuminated"] is True


def brute_force_trace(scene, engine, poses, bindings):
    """Oracle: recompute the expected fired sequence from raw predicate traces."""
    from roomscript.spatial import evaluate_predicate

    latch = {}
    expected = []
    for pose in poses:
        fired_here = []
        current = {}
        for obj_name, family in {(b[0], b[1]) for b in bindings}:
            obj = scene.find_by_name(obj_name)
            current[(obj_name, family)] = evaluate_predicate("near", pose, obj, scene)
        for obj_name, family, event in bindings:
            prev = latch.get((obj_name, family), False)
            cur = current[(obj_name, family)]
            kind = "enter" if event.endswith("Enter") else ("exit" if event.endswith("Exit") else "while")
            if (kind == "enter" and cur and not prev) or \
               (kind == "exit" and prev and not cur) or \
               (kind == "while" and cur):
                fired_here.append((obj_name, event))
        latch.update(current)
        expected.append(fired_here)
    return expected


class TestPathSimulation:
    def test_enter_exit_enter_exit_with_oracle(self):
        engine, scene = make_engine()
        cube = scene.create_object("cube", overrides={"position": Vec3(0, 0, 0)})
        engine.handlers["N"] = lambda name: None
        engine.add_trigger(cube.name, "OnNearEnter", "N")
        engine.add_trigger(cube.name, "OnNearExit", "N")
        waypoints = [
            UserPose(position=Vec3(0, 0, -1.9)),
            UserPose(position=Vec3(0, 0, -0.3)),
            UserPose(position=Vec3(0, 0, -1.9)),
            UserPose(position=Vec3(0, 0, -0.3)),
            UserPose(position=Vec3(0, 0, -1.9)),
        ]
        reports = engine.simulate_path(waypoints, ticks_per_segment=6)
        events = [f.event for r in reports for f in r.fired]
        assert events == ["OnNearEnter", "OnNearExit", "OnNearEnter", "OnNearExit"]

        # oracle re-derivation over the same interpolated poses
        poses = []
        for a, b in zip(waypoints, waypoints[1:]):
            for i in range(1, 7):
                t = i / 6
                poses.append(UserPose(position=a.position + (b.position - a.position).scaled(t)))
        fresh_engine, _ = make_engine(scene)
        expected = brute_force_trace(
            scene, fresh_engine, poses,
            [(cube.name, "near", "OnNearEnter"), (cube.name, "near", "OnNearExit")])
        assert [e for step in expected for (_, e) in step] == events

    def test_path_never_near_is_silent(self):
        engine, scene = make_engine()
        cube = scene.create_object("cube", overrides={"position": Vec3(1.8, 0, 1.8)})
        engine.handlers["N"] = lambda name: None
        engine.add_trigger(cube.name, "OnNearEnter", "N")
        reports = engine.simulate_path(
            [UserPose(position=Vec3(-1.8, 0, -1.8)), UserPose(position=Vec3(-1.8, 0, 0))],
            ticks_per_segment=10)
        assert all(not r.fired for r in reports)

    def test_needs_two_waypoints(self):
        engine, scene = make_engine()
        with pytest.raises(ValueError):
            engine.simulate_path([UserPose()], ticks_per_segment=3)


class TestInvariants:
    def test_edge_alternation_random_walk(self):
        rng = random.Random(99)
        engine, scene = make_engine()
        names = []
        for i in range(5):
            obj = scene.create_object("cube", overrides={
                "position": Vec3(rng.uniform(-1.8, 1.8), 0, rng.uniform(-1.8, 1.8))})
            names.append(obj.name)
        engine.handlers["H"] = lambda name: None
        for name in names:
            engine.add_trigger(name, "OnNearEnter", "H")
            engine.add_trigger(name, "OnNearExit", "H")
            engine.add_trigger(name, "WhileNear", "H")

        history: dict[str, list[str]] = {}
        while_ok = True
        inside: dict[str, bool] = {n: False for n in names}
        x = z = 0.0
        for _ in range(2000):
            x = min(max(x + rng.uniform(-0.3, 0.3), -1.9), 1.9)
            z = min(max(z + rng.uniform(-0.3, 0.3), -1.9), 1.9)
            report = engine.tick(UserPose(position=Vec3(x, 0, z)))
            for f in report.fired:
                if f.event == "WhileNear":
                    enters = history.get(f.object, [])
                    while_ok = while_ok and (inside[f.object] or
                                             ("OnNearEnter", True) == (enters[-1], True)
                                             if enters else False)
                else:
                    history.setdefault(f.object, []).append(f.event)
                    inside[f.object] = f.event == "OnNearEnter"
        for name, seq in history.items():
            for i, event in enumerate(seq):
                expected = "OnNearEnter" if i % 2 == 0 else "OnNearExit"
                assert event == expected, f"{name}: {seq[:i + 1]}"

    def test_determinism_identical_logs(self):
        def run():
            rng = random.Random(5)
            engine, scene = make_engine()
            cube = scene.create_object("cube", overrides={"position": Vec3(0, 0, 0)})
            engine.handlers["H"] = lambda name: scene.set_property(name, "illuminated", True)
            engine.add_trigger(cube.name, "OnNearEnter", "H")
            engine.add_trigger(cube.name, "OnNearExit", "H")
            out = []
            for _ in range(500):
                pose = UserPose(position=Vec3(rng.uniform(-1.9, 1.9), 0, rng.uniform(-1.9, 1.9)))
                out.append(engine.tick(pose).to_doc())
            return out

        import json

        assert json.dumps(run(), sort_keys=True) == json.dumps(run(), sort_keys=True)
