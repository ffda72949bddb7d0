"""LLM planner/coder backend with guard rails.

Speaks an OpenAI-compatible chat-completions wire format. Every response is
parsed and validated; parse or validation failures are fed back verbatim as a
user-role message and retried up to max_retries. Automated tests drive this
through a scripted mock server; live endpoints are an opt-in manual mode.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from importlib import resources

import httpx

from .config import LlmSettings, Thresholds
from .errors import BackendFailure, SolParseError
from .planner import PlannedTask, TaskPlan
from .pose import UserPose
from .scene import Scene
from .spatial import view_frustum_objects
from . import sol
from .sol.ast import merge_envelope_metadata

TASK_TYPES = ("Create", "Edit", "Interact")


def _prompt_asset(name: str) -> str:
    return resources.files("roomscript.prompts").joinpath(name).read_text(encoding="utf-8")


def tasker_system_prompt() -> str:
    return _prompt_asset("tasker_system.txt")


def coder_system_prompt() -> str:
    return _prompt_asset("coder_system.txt") + "\n\n" + _prompt_asset("sol_grammar.txt")


# -- scene summarization -------------------------------------------------------


def scene_summary(scene: Scene, pose: UserPose | None = None,
                  thresholds: Thresholds | None = None) -> str:
    """Deterministic, byte-stable textual context for the model."""
    pose = pose or scene.user_pose
    room = scene.room
    lines = [
        f"Room: {room.width:g}m wide (x, east-west) x {room.depth:g}m deep (z, north-south) "
        f"x {room.height:g}m high; (0,0,0) is the center of the floor.",
        "Walls: " + ", ".join(room.walls),
    ]
    in_view = set(view_frustum_objects(pose, scene, thresholds))
    lines.append(f"Objects ({len(scene.objects)}):")
    for o in scene.objects:
        flags = []
        if o.illuminated:
            flags.append(f"illuminated(intensity {o.luminous_intensity:g})")
        if o.levitated:
            flags.append("levitated")
        if o.wall_mounted:
            flags.append(f"mounted on {o.wall_mounted} wall")
        if o.name in in_view:
            flags.append("in view")
        lines.append(
            f"- {o.name}: {o.kind} at ({o.position.x:.3f}, {o.position.y:.3f}, {o.position.z:.3f})"
            f" yaw {o.rotation.yaw:g} size ({o.size.x:g} x {o.size.y:g} x {o.size.z:g})"
            f" color ({o.color.r:g}, {o.color.g:g}, {o.color.b:g}, {o.color.a:g})"
            + (" [" + ", ".join(flags) + "]" if flags else "")
        )
    lines.append(
        f"User: position ({pose.position.x:.3f}, {pose.position.y:.3f}, {pose.position.z:.3f})"
        f" yaw {pose.yaw:g} pitch {pose.pitch:g} eye height {pose.eye_height:g}"
    )
    return "\n".join(lines)


# -- chat transport ---------------------------------------------------------------


class ChatClient:
    """Minimal chat-completions client; transport injectable for tests."""

    def __init__(self, settings: LlmSettings, transport: httpx.BaseTransport | None = None):
        self.settings = settings
        timeout = settings.timeout_ms / 1000.0
        headers = {}
        key = settings.api_key()
        if key:
            headers["Authorization"] = f"Bearer {key}"
        self._client = httpx.Client(base_url=settings.endpoint, timeout=timeout,
                                    headers=headers, transport=transport)

    def complete(self, messages: list[dict], temperature: float) -> str:
        payload = {
            "model": self.settings.model,
            "messages": messages,
            "temperature": temperature,
        }
        try:
            resp = self._client.post("/chat/completions", json=payload)
        except httpx.TimeoutException as exc:
            raise BackendFailure("timeout", str(exc)) from exc
        except httpx.HTTPError as exc:
            raise BackendFailure("network", str(exc)) from exc
        if resp.status_code != 200:
            raise BackendFailure("network", f"HTTP {resp.status_code}: {resp.text[:200]}")
        try:
            return resp.json()["choices"][0]["message"]["content"]
        except (KeyError, IndexError, ValueError) as exc:
            raise BackendFailure("malformed", f"bad completion payload: {exc}") from exc

    def close(self) -> None:
        self._client.close()


class MockChatServer(httpx.BaseTransport):
    """A scripted chat-completions endpoint: pops one canned reply per request.

    Mounted as an httpx transport so tests exercise the exact wire format
    without sockets; every request payload is recorded for inspection.
    """

    def __init__(self, responses: list[str]):
        self.queue = list(responses)
        self.requests: list[dict] = []

    def handle_request(self, request: httpx.Request) -> httpx.Response:
        if not request.url.path.endswith("/chat/completions"):
            return httpx.Response(404, json={"error": "unknown endpoint"})
        payload = json.loads(request.read().decode("utf-8"))
        self.requests.append(payload)
        content = self.queue.pop(0) if self.queue else ""
        return httpx.Response(200, json={
            "id": f"mock-{len(self.requests)}",
            "object": "chat.completion",
            "model": payload.get("model", "mock"),
            "choices": [{"index": 0,
                         "message": {"role": "assistant", "content": content},
                         "finish_reason": "stop"}],
        })


def scripted_client(settings: LlmSettings, responses: list[str]) -> ChatClient:
    server = MockChatServer(responses)
    client = ChatClient(settings, transport=server)
    client.mock_server = server  # type: ignore[attr-defined]
    return client


# -- guard-rail traces ---------------------------------------------------------------


@dataclass
class Attempt:
    request_digest: str
    raw_response: str
    outcome: str  # ok | malformed | invalid
    error_fed_back: str = ""

    def to_doc(self) -> dict:
        return {
            "requestDigest": self.request_digest,
            "rawResponse": self.raw_response,
            "outcome": self.outcome,
            "errorFedBack": self.error_fed_back,
        }


@dataclass
class GuardRailTrace:
    attempts: list[Attempt] = field(default_factory=list)

    def to_doc(self) -> list[dict]:
        return [a.to_doc() for a in self.attempts]


def _digest(messages: list[dict]) -> str:
    return hashlib.sha256(json.dumps(messages, sort_keys=True).encode()).hexdigest()[:16]


def _extract_json(text: str) -> dict:
    """Parse the response as a JSON object, tolerating surrounding prose."""
    try:
        return json.loads(text)
    except ValueError:
        pass
    start = text.find("{")
    if start >= 0:
        depth = 0
        for i in range(start, len(text)):
            if text[i] == "{":
                depth += 1
            elif text[i] == "}":
                depth -= 1
                if depth == 0:
                    return json.loads(text[start:i + 1])
    raise ValueError("no JSON object found in the response")


def build_failure_feedback(succeeded: list[str], failing: str, remaining: list[str],
                           error: str) -> str:
    """The three-part retry message: done, broken, still to run."""
    parts = []
    if succeeded:
        parts.append("Methods already performed successfully (do not change them): "
                     + ", ".join(succeeded) + ".")
    else:
        parts.append("No methods have been performed yet.")
    parts.append(f"The method that caused the problem: {failing}.")
    if remaining:
        parts.append("Methods remaining to run: " + ", ".join(remaining) + ".")
    parts.append(f"Error: {error}")
    parts.append("Respond again with the full JSON envelope, fixing the problem.")
    return " ".join(parts)


# -- guarded calls ----------------------------------------------------------------------


def llm_plan(prompt_text: str, scene: Scene, pose: UserPose, client: ChatClient,
             history: list[dict] | None = None) -> tuple[TaskPlan, GuardRailTrace]:
    """Run the planning stage against the model; returns the plan plus its trace."""
    settings = client.settings
    trace = GuardRailTrace()
    messages = [
        {"role": "system", "content": tasker_system_prompt()},
        {"role": "system", "content": "Current scene:\n" + scene_summary(scene, pose)},
    ]
    for h in (history or [])[-settings.history_turns:]:
        messages.append(h)
    messages.append({"role": "user", "content": prompt_text})

    for _ in range(settings.max_retries + 1):
        raw = client.complete(messages, settings.tasker_temperature)
        digest = _digest(messages)
        try:
            doc = _extract_json(raw)
            instruction = doc["Instruction"]
            message = doc.get("Message", "")
            if isinstance(instruction, str) and instruction.strip().lower() == "null":
                instruction = None
        except (ValueError, KeyError, TypeError) as exc:
            error = f"Your response was not the required JSON envelope: {exc}"
            trace.attempts.append(Attempt(digest, raw, "malformed", error))
            messages.append({"role": "assistant", "content": raw})
            messages.append({"role": "user", "content": error})
            continue
        trace.attempts.append(Attempt(digest, raw, "ok"))
        tasks = _tasks_from_instruction(instruction, doc.get("Tasks"))
        return TaskPlan(instruction, message, tasks), trace
    raise BackendFailure("retries_exhausted",
                         f"no parseable plan after {settings.max_retries + 1} attempts", trace)


def _tasks_from_instruction(instruction: str | None, tasks_doc) -> list[PlannedTask]:
    if instruction is None:
        return []
    tasks: list[PlannedTask] = []
    if isinstance(tasks_doc, list):
        for i, t in enumerate(tasks_doc):
            ttype = t.get("type", "Edit")
            tasks.append(PlannedTask(i, ttype if ttype in TASK_TYPES else "Edit",
                                     t.get("description", ""), {"op": "llm"}))
        return tasks
    import re

    parts = re.split(r"\s*\d+\.\s+", instruction)
    idx = 0
    for part in parts:
        part = part.strip()
        if not part:
            continue
        lowered = part.lower()
        if lowered.startswith("create") or lowered.startswith("add"):
            ttype = "Create"
        elif lowered.startswith(("when", "if", "set up a", "create a trigger", "add a trigger")):
            ttype = "Interact"
        else:
            ttype = "Edit"
        tasks.append(PlannedTask(idx, ttype, part, {"op": "llm"}))
        idx += 1
    return tasks


def llm_code(plan: TaskPlan, scene: Scene, pose: UserPose, client: ChatClient,
             known_handlers: set[str] | None = None) -> tuple[sol.SolProgram, GuardRailTrace]:
    """Run the coding stage; the envelope's SourceCode must parse and validate."""
    if plan.instruction is None:
        raise BackendFailure("malformed", "cannot generate code for a null plan")
    settings = client.settings
    trace = GuardRailTrace()
    messages = [
        {"role": "system", "content": coder_system_prompt()},
        {"role": "system", "content": "Current scene:\n" + scene_summary(scene, pose)},
        {"role": "user", "content": plan.instruction},
    ]

    for _ in range(settings.max_retries + 1):
        raw = client.complete(messages, settings.coder_temperature)
        digest = _digest(messages)
        error = None
        program = None
        try:
            envelope = _extract_json(raw)
            source = envelope["SourceCode"]
            if not isinstance(source, str) or not source.strip():
                raise ValueError("SourceCode must be a non-empty string")
            program = sol.parse(source)
            if program.name != envelope.get("ClassName"):
                raise ValueError(
                    f"ClassName {envelope.get('ClassName')!r} does not match the "
                    f"program name {program.name!r} in SourceCode")
            missing = merge_envelope_metadata(program, envelope)
            if missing:
                raise ValueError(
                    "Methods listed in the envelope are absent from SourceCode: "
                    + ", ".join(missing))
        except (ValueError, KeyError, TypeError) as exc:
            error = f"Your response was not a valid program envelope: {exc}"
            outcome = "malformed"
        except SolParseError as exc:
            error = f"SourceCode failed to parse: {exc.message}"
            outcome = "malformed"

        if error is None:
            report = sol.validate(program, scene, known_handlers)
            if report.ok:
                trace.attempts.append(Attempt(digest, raw, "ok"))
                program.source_text = program.source_text or envelope["SourceCode"]
                return program, trace
            error = ("The program failed validation. Fix these issues and resend the "
                     "full envelope:\n" + report.format())
            outcome = "invalid"

        trace.attempts.append(Attempt(digest, raw, outcome, error))
        messages.append({"role": "assistant", "content": raw})
        messages.append({"role": "user", "content": error})

    raise BackendFailure("retries_exhausted",
                         f"no valid program after {settings.max_retries + 1} attempts", trace)
