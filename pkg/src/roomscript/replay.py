"""Scenario replay harness: machine-checkable scripts over the engine or service.

A scenario is JSON: an initial scene, an initial pose, and steps that submit
prompts (auto-confirmed), drive the pose/ticks, optionally inject a wrong
state first, and then assert on the resulting scene and event log.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

import jsonschema

from .catalog import nearest_color_term
from .config import EngineConfig
from .errors import ScenarioSchemaError
from .geometry import Vec3
from .pose import UserPose
from .scene import Scene
from .session import SessionManager
from .spatial import evaluate_predicate

SCENARIO_SCHEMA: dict = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "title": "roomscript scenario",
    "type": "object",
    "required": ["id", "title", "steps"],
    "additionalProperties": False,
    "properties": {
        "id": {"type": "string"},
        "title": {"type": "string"},
        "notes": {"type": "string"},
        "initialScene": {
            "oneOf": [
                {"const": "empty"},
                {
                    "type": "object",
                    "properties": {
                        "objects": {"type": "array", "items": {"type": "object"}},
                    },
                },
            ]
        },
        "initialPose": {"$ref": "#/definitions/pose"},
        "steps": {"type": "array", "items": {"$ref": "#/definitions/step"}},
    },
    "definitions": {
        "pose": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "position": {"$ref": "#/definitions/vec3"},
                "yaw": {"type": "number"},
                "pitch": {"type": "number"},
                "eyeHeight": {"type": "number"},
                "hand": {"$ref": "#/definitions/vec3"},
                "pointAt": {"$ref": "#/definitions/vec3"},
            },
        },
        "vec3": {"type": "array", "items": {"type": "number"},
                 "minItems": 3, "maxItems": 3},
        "gesture": {
            "type": "object",
            "required": ["t"],
            "additionalProperties": False,
            "properties": {
                "t": {"type": "number"},
                "pointAt": {"$ref": "#/definitions/vec3"},
                "origin": {"$ref": "#/definitions/vec3"},
                "direction": {"$ref": "#/definitions/vec3"},
            },
        },
        "step": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "note": {"type": "string"},
                "injectFault": {
                    "type": "object",
                    "required": ["sets"],
                    "additionalProperties": False,
                    "properties": {"sets": {"type": "object"}},
                },
                "pose": {"$ref": "#/definitions/pose"},
                "prompt": {"type": "string"},
                "tokenTimestamps": {"type": "array", "items": {"type": "number"}},
                "gestures": {"type": "array", "items": {"$ref": "#/definitions/gesture"}},
                "do": {"type": "array", "items": {"$ref": "#/definitions/action"}},
                "assertions": {"type": "array", "items": {"$ref": "#/definitions/assertion"}},
            },
        },
        "action": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "pose": {"$ref": "#/definitions/pose"},
                "grab": {"type": ["string", "null"]},
                "ticks": {"type": "integer", "minimum": 1},
                "walk": {
                    "type": "object",
                    "required": ["to", "ticks"],
                    "additionalProperties": False,
                    "properties": {
                        "to": {"$ref": "#/definitions/vec3"},
                        "ticks": {"type": "integer", "minimum": 1},
                    },
                },
            },
        },
        "selector": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "name": {"type": "string"},
                "kind": {"type": "string"},
                "color": {"type": "string"},
            },
        },
        "assertion": {
            "type": "object",
            "required": ["kind"],
            "properties": {
                "kind": {"enum": ["exists", "count", "property", "predicate",
                                  "eventFired", "sceneEquals"]},
            },
        },
    },
}


def validate_scenario(doc: dict) -> None:
    try:
        jsonschema.validate(doc, SCENARIO_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ScenarioSchemaError(f"scenario does not match the schema: {exc.message}") from exc


def load_scenario(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    validate_scenario(doc)
    return doc


# -- drivers -------------------------------------------------------------------------


class InProcessDriver:
    def __init__(self, config: EngineConfig | None = None):
        from dataclasses import replace

        config = replace(config or EngineConfig(), auto_confirm=True, journal_path=None)
        self.manager = SessionManager(config)
        self.session = None

    def reset(self, initial_scene: dict | None) -> None:
        self.session = self.manager.create_session(initial_scene=initial_scene,
                                                   auto_confirm=True)

    def pose(self, pose_doc: dict, grab="__keep__") -> None:
        self.session.update_pose(UserPose.from_doc(pose_doc), grab=grab)

    def submit(self, text: str, token_timestamps=None, gestures=None) -> dict:
        turn = self.session.submit_prompt(text, token_timestamps=token_timestamps,
                                          gestures=gestures)
        return turn.to_doc()

    def ticks(self, n: int, grab="__keep__") -> list[dict]:
        return self.session.run_ticks(n, grab=grab)

    def fault(self, sets: dict) -> dict:
        return self.session.inject_fault(sets).to_doc()

    def state(self) -> dict:
        return self.session.state_doc()


class HttpDriver:
    def __init__(self, base_url: str, client=None):
        import httpx

        self.client = client or httpx.Client(base_url=base_url, timeout=30.0)
        self.base_url = base_url
        self.sid = None

    def _check(self, resp):
        if resp.status_code >= 400:
            raise ScenarioSchemaError(
                f"service error {resp.status_code}: {resp.text[:300]}")
        return resp.json()

    def reset(self, initial_scene: dict | None) -> None:
        doc = self._check(self.client.post("/sessions", json={
            "autoConfirm": True, "initialScene": initial_scene}))
        self.sid = doc["sessionId"]

    def pose(self, pose_doc: dict, grab="__keep__") -> None:
        body = {"pose": pose_doc}
        if grab != "__keep__":
            body["grab"] = grab
        self._check(self.client.post(f"/sessions/{self.sid}/pose", json=body))

    def submit(self, text: str, token_timestamps=None, gestures=None) -> dict:
        return self._check(self.client.post(f"/sessions/{self.sid}/prompt", json={
            "text": text, "tokenTimestamps": token_timestamps, "gestures": gestures}))

    def ticks(self, n: int, grab="__keep__") -> list[dict]:
        body = {"n": n}
        if grab != "__keep__":
            body["grab"] = grab
        return self._check(self.client.post(f"/sessions/{self.sid}/ticks",
                                            json=body))["reports"]

    def fault(self, sets: dict) -> dict:
        return self._check(self.client.post(f"/sessions/{self.sid}/fault",
                                            json={"sets": sets}))

    def state(self) -> dict:
        return self._check(self.client.get(f"/sessions/{self.sid}/state"))


# -- pose plumbing ---------------------------------------------------------------------


def _pose_doc(spec: dict, current: dict) -> dict:
    doc = dict(current)
    if "position" in spec:
        doc["position"] = list(spec["position"])
    for key in ("yaw", "pitch", "eyeHeight"):
        if key in spec:
            doc[key] = spec[key]
    if "hand" in spec:
        doc["hand"] = list(spec["hand"])
    if "pointAt" in spec:
        origin = [doc["position"][0], doc["position"][1] + doc.get("eyeHeight", 1.6),
                  doc["position"][2]]
        target = spec["pointAt"]
        doc["pointing"] = {"origin": origin,
                           "direction": [target[0] - origin[0], target[1] - origin[1],
                                         target[2] - origin[2]]}
    elif "position" in spec or "pointAt" in spec:
        doc.pop("pointing", None)
    return doc


def _gesture_docs(gestures: list[dict], pose_doc: dict) -> list[dict]:
    docs = []
    for g in gestures:
        if "origin" in g and "direction" in g:
            docs.append({"t": g["t"], "origin": g["origin"], "direction": g["direction"]})
        else:
            origin = [pose_doc["position"][0],
                      pose_doc["position"][1] + pose_doc.get("eyeHeight", 1.6),
                      pose_doc["position"][2]]
            target = g["pointAt"]
            docs.append({"t": g["t"], "origin": origin,
                         "direction": [target[0] - origin[0], target[1] - origin[1],
                                       target[2] - origin[2]]})
    return docs


# -- assertions -----------------------------------------------------------------------


def _match_objects(selector: dict, state: dict) -> list[dict]:
    out = []
    for od in state["objects"]:
        if "name" in selector and od["name"] != selector["name"]:
            continue
        if "kind" in selector and od["kind"] != selector["kind"]:
            continue
        if "color" in selector:
            from .catalog import ColorRGBA

            term = nearest_color_term(ColorRGBA(od["color"]["r"], od["color"]["g"],
                                                od["color"]["b"], od["color"]["a"]))
            if term != selector["color"]:
                continue
        out.append(od)
    return out


def _lookup_path(doc: dict, path: str):
    cur = doc
    for part in path.split("."):
        key = {"w": "w", "h": "h", "d": "d"}.get(part, part)
        cur = cur[key]
    return cur


def _compare(cmp: str, actual, expected, tol: float) -> bool:
    if isinstance(expected, list):
        if not isinstance(actual, dict):
            return False
        keys = ["x", "y", "z"] if "x" in actual else list(actual)[:len(expected)]
        return all(_compare(cmp, actual[k], e, tol) for k, e in zip(keys, expected))
    if cmp == "eq":
        return actual == expected
    if cmp == "ne":
        return actual != expected
    if cmp == "approx":
        return abs(float(actual) - float(expected)) <= tol
    if cmp == "lt":
        return float(actual) < float(expected)
    if cmp == "le":
        return float(actual) <= float(expected)
    if cmp == "gt":
        return float(actual) > float(expected)
    if cmp == "ge":
        return float(actual) >= float(expected)
    raise ScenarioSchemaError(f"unknown comparison {cmp!r}")


def evaluate_assertion(assertion: dict, state: dict, fired: list[dict],
                       checkpoints: dict[str, dict]) -> tuple[bool, str]:
    kind = assertion["kind"]
    if kind == "exists":
        matches = _match_objects(assertion["selector"], state)
        return bool(matches), f"{len(matches)} match(es)"
    if kind == "count":
        matches = _match_objects(assertion["selector"], state)
        ok = len(matches) == assertion["n"]
        return ok, f"expected {assertion['n']}, found {len(matches)}"
    if kind == "property":
        matches = _match_objects(assertion["selector"], state)
        if not matches:
            return False, "no object matches the selector"
        actual = _lookup_path(matches[0], assertion["path"])
        ok = _compare(assertion.get("cmp", "eq"), actual, assertion["value"],
                      assertion.get("tol", 1e-6))
        return ok, f"{matches[0]['name']}.{assertion['path']} = {actual!r}"
    if kind == "predicate":
        scene = Scene.from_doc(state)
        b = _match_objects(assertion["b"], state)
        if not b:
            return False, "predicate referent not found"
        b_obj = scene.get(b[0]["name"])
        if assertion.get("a") == "user":
            a_operand = scene.user_pose
            a_label = "user"
        else:
            a_matches = _match_objects(assertion["a"], state)
            if not a_matches:
                return False, "predicate subject not found"
            a_operand = scene.get(a_matches[0]["name"])
            a_label = a_matches[0]["name"]
        ok = evaluate_predicate(assertion["relation"], a_operand, b_obj, scene)
        want = assertion.get("value", True)
        return ok == want, f"{assertion['relation']}({a_label}, {b[0]['name']}) = {ok}"
    if kind == "eventFired":
        count = sum(1 for f in fired
                    if f["object"] == assertion["object"] and f["event"] == assertion["event"])
        want = assertion.get("times")
        if want is None:
            return count > 0, f"fired {count} time(s)"
        return count == want, f"fired {count} time(s), expected {want}"
    if kind == "sceneEquals":
        reference = checkpoints[assertion["checkpoint"]]
        current = {"objects": state["objects"], "triggers": state["triggers"]}
        ref = {"objects": reference["objects"], "triggers": reference["triggers"]}
        ok = json.dumps(current, sort_keys=True) == json.dumps(ref, sort_keys=True)
        return ok, "scene matches checkpoint" if ok else "scene differs from checkpoint"
    raise ScenarioSchemaError(f"unknown assertion kind {kind!r}")


# -- runner ----------------------------------------------------------------------------


@dataclass
class StepResult:
    index: int
    prompt: str | None
    assertions: list[dict] = field(default_factory=list)
    prompt_ms: float = 0.0

    @property
    def ok(self) -> bool:
        return all(a["ok"] for a in self.assertions)


@dataclass
class Report:
    scenario: str
    title: str
    steps: list[StepResult] = field(default_factory=list)
    error: str | None = None
    total_ms: float = 0.0

    @property
    def ok(self) -> bool:
        return self.error is None and all(s.ok for s in self.steps)

    def to_doc(self) -> dict:
        return {
            "scenario": self.scenario,
            "title": self.title,
            "ok": self.ok,
            "error": self.error,
            "totalMs": round(self.total_ms, 3),
            "steps": [
                {
                    "index": s.index,
                    "prompt": s.prompt,
                    "ok": s.ok,
                    "promptMs": round(s.prompt_ms, 3),
                    "assertions": s.assertions,
                }
                for s in self.steps
            ],
        }


def run_scenario(scenario: dict | str, driver=None, config: EngineConfig | None = None,
                 service_url: str | None = None) -> Report:
    if isinstance(scenario, str):
        scenario = load_scenario(scenario)
    else:
        validate_scenario(scenario)

    if driver is None:
        driver = HttpDriver(service_url) if service_url else InProcessDriver(config)

    report = Report(scenario=scenario["id"], title=scenario["title"])
    started = time.perf_counter()

    initial = scenario.get("initialScene")
    driver.reset(None if initial in (None, "empty") else initial)

    pose_doc = UserPose().to_doc()
    if scenario.get("initialPose"):
        pose_doc = _pose_doc(scenario["initialPose"], pose_doc)
        driver.pose(pose_doc)

    checkpoints = {"initial": driver.state()}

    for i, step in enumerate(scenario["steps"]):
        result = StepResult(index=i, prompt=step.get("prompt"))
        report.steps.append(result)
        checkpoints["stepStart"] = driver.state()
        fired: list[dict] = []

        if step.get("injectFault"):
            driver.fault(step["injectFault"]["sets"])
        if step.get("pose"):
            pose_doc = _pose_doc(step["pose"], pose_doc)
            driver.pose(pose_doc)
        if step.get("prompt") is not None:
            gestures = _gesture_docs(step.get("gestures", []), pose_doc)
            t0 = time.perf_counter()
            turn = driver.submit(step["prompt"], step.get("tokenTimestamps"),
                                 gestures)
            result.prompt_ms = (time.perf_counter() - t0) * 1000.0
            if turn.get("status") == "failed":
                report.error = f"step {i}: turn failed: {turn.get('error')}"
                break
        for action in step.get("do", []):
            if "pose" in action:
                pose_doc = _pose_doc(action["pose"], pose_doc)
                driver.pose(pose_doc)
            if "grab" in action:
                driver.pose(pose_doc, grab=action["grab"])
            if "walk" in action:
                target = action["walk"]["to"]
                n = action["walk"]["ticks"]
                start = list(pose_doc["position"])
                for k in range(1, n + 1):
                    frac = k / n
                    pos = [start[j] + (target[j] - start[j]) * frac for j in range(3)]
                    pose_doc = _pose_doc({"position": pos}, pose_doc)
                    driver.pose(pose_doc)
                    for rep in driver.ticks(1):
                        fired.extend(rep["fired"])
            if "ticks" in action:
                for rep in driver.ticks(action["ticks"]):
                    fired.extend(rep["fired"])

        state = driver.state()
        for assertion in step.get("assertions", []):
            try:
                ok, detail = evaluate_assertion(assertion, state, fired, checkpoints)
            except Exception as exc:  # noqa: BLE001 - report, don't crash the run
                ok, detail = False, f"assertion error: {exc}"
            result.assertions.append({"kind": assertion["kind"], "ok": ok,
                                      "detail": detail, "assertion": assertion})

    report.total_ms = (time.perf_counter() - started) * 1000.0
    return report
