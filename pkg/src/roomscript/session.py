"""Sessions: turn lifecycle, conversational memory, tick loop, journal, streaming.

Each session owns one scene behind one lock (single-writer); the staged
turn flow is prompt -> plan -> program -> feedback -> confirm/abort -> execute.
Every committed change appends exactly one event to the session feed, in
commit order, so folding the feed reproduces the scene.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass, field

from . import sol
from .compiler import compile_plan
from .config import EngineConfig
from .errors import (
    AmbiguousSelector,
    BackendFailure,
    CompileError,
    DeixisError,
    EngineError,
    NoHistory,
    NoMatch,
    NotPending,
    OutOfRoom,
    PendingTurnExists,
    UnknownSession,
)
from .llm import ChatClient, llm_code, llm_plan
from .planner import Planner, PromptContext, TaskPlan
from .pose import GestureSample, GestureTimeline, UserPose
from .scene import Scene, SceneSnapshot, scene_delta
from .triggers import TriggerEngine

GESTURE_WINDOW_MS = 10000.0
COMPACT_EVERY_TURNS = 50

# reference problems surfaced to the user as clarifications, not failures
_CLARIFICATION_ERRORS = (DeixisError, NoMatch, AmbiguousSelector, NoHistory, CompileError)


@dataclass
class Turn:
    index: int
    prompt: str
    token_timestamps: list[float] | None
    gestures: list[dict]
    status: str = "pending"  # pending | confirmed | executed | aborted | failed
    stages: dict = field(default_factory=dict)
    error: dict | None = None
    snapshot_before: SceneSnapshot | None = None
    snapshot_after: SceneSnapshot | None = None

    def to_doc(self) -> dict:
        return {
            "index": self.index,
            "prompt": self.prompt,
            "tokenTimestamps": self.token_timestamps,
            "gestures": self.gestures,
            "status": self.status,
            "stages": self.stages,
            "error": self.error,
            "snapshotBefore": self.snapshot_before.doc if self.snapshot_before else None,
            "snapshotAfter": self.snapshot_after.doc if self.snapshot_after else None,
        }


class Session:
    def __init__(self, session_id: str, config: EngineConfig, scene: Scene | None = None,
                 journal: "Journal | None" = None, llm_client: ChatClient | None = None):
        self.id = session_id
        self.config = config
        self.scene = scene or Scene()
        self.journal = journal
        self.llm_client = llm_client
        self.lock = threading.RLock()
        self.turns: list[Turn] = []
        self.events: list[dict] = []
        self.gesture_buffer: list[dict] = []
        self.grab: str | None = None
        self.tick_log: list[dict] = []
        self.interpreter = sol.Interpreter(self.scene, config.thresholds, memory=self)
        self.engine = TriggerEngine(self.scene, handlers=self.interpreter.handlers,
                                    thresholds=config.thresholds)
        self._staged_programs: dict[int, sol.ValidatedProgram] = {}
        self._creation_states: dict[str, dict] = {
            o["name"]: o for o in self.scene.authoring_doc()["objects"]
        }
        self._last_referent: str | None = None
        self._event_cond = threading.Condition(self.lock)

    # -- event feed -----------------------------------------------------------

    def _emit(self, type_: str, payload: dict) -> dict:
        event = {"seq": len(self.events), "type": type_, **payload}
        self.events.append(event)
        self._event_cond.notify_all()
        return event

    def events_since(self, seq: int) -> list[dict]:
        with self.lock:
            return self.events[seq:]

    def wait_for_events(self, seq: int, timeout: float = 0.5) -> list[dict]:
        with self._event_cond:
            if len(self.events) <= seq:
                self._event_cond.wait(timeout)
            return self.events[seq:]

    # -- MemoryProvider (interpreter restore support) ----------------------------

    def previous_scene_snapshot(self) -> SceneSnapshot:
        for turn in reversed(self.turns):
            if turn.status == "executed" and turn.snapshot_before and turn.snapshot_after \
                    and turn.snapshot_before.doc != turn.snapshot_after.doc:
                return turn.snapshot_before
        raise NoHistory("no previous change to go back to")

    def previous_object_states(self, names: list[str]) -> dict[str, dict]:
        for turn in reversed(self.turns):
            if turn.status != "executed" or not turn.snapshot_before or not turn.snapshot_after:
                continue
            before = {o["name"]: o for o in turn.snapshot_before.doc["objects"]}
            after = {o["name"]: o for o in turn.snapshot_after.doc["objects"]}
            if any(before.get(n) != after.get(n) for n in names):
                return {n: before[n] for n in names if n in before}
        raise NoHistory("these objects have no recorded changes")

    def original_object_states(self, names: list[str]) -> dict[str, dict]:
        missing = [n for n in names if n not in self._creation_states]
        if missing:
            raise NoHistory(f"no creation record for {', '.join(missing)}")
        return {n: self._creation_states[n] for n in names}

    # -- SessionView (compiler memory checks) ---------------------------------------

    def used_program_names(self) -> set[str]:
        names = set()
        for turn in self.turns:
            envelope = turn.stages.get("envelope")
            if envelope:
                names.add(envelope["ClassName"])
        return names

    def object_modified_since_creation(self, name: str) -> bool:
        created = self._creation_states.get(name)
        if created is None:
            return False
        obj = self.scene.find_by_name(name)
        if obj is None:
            return True
        from .scene import object_doc

        return object_doc(obj) != created

    def has_changing_turn(self) -> bool:
        try:
            self.previous_scene_snapshot()
            return True
        except NoHistory:
            return False

    def last_referent(self) -> str | None:
        return self._last_referent

    # -- embodiment inputs ------------------------------------------------------------

    def update_pose(self, pose: UserPose, grab: str | None = "__keep__") -> None:
        with self.lock:
            if not self.scene.room.contains_footprint(pose.position):
                raise OutOfRoom("the user pose lies outside the room footprint")
            self.scene.user_pose = pose
            if grab != "__keep__":
                self.grab = grab
            self._journal({"e": "pose", "pose": pose.to_doc(), "grab": self.grab})

    def append_gesture(self, sample: dict) -> None:
        """Buffer a gesture sample; `t` is milliseconds on the client's clock."""
        with self.lock:
            self.gesture_buffer.append(sample)
            self._journal({"e": "gesture", "sample": sample})

    def _collect_timeline(self, gestures: list[dict] | None,
                          prompt_start_ms: float | None) -> tuple[GestureTimeline | None, list[dict]]:
        if gestures is not None:
            # inline samples take precedence; the buffer still clears on submit
            self.gesture_buffer = []
            docs = list(gestures)
            return (GestureTimeline.from_doc(docs) if docs else None), docs
        if not self.gesture_buffer:
            return None, []
        submit_ms = max(s["t"] for s in self.gesture_buffer)
        start = prompt_start_ms if prompt_start_ms is not None else \
            min(s["t"] for s in self.gesture_buffer)
        kept = [s for s in self.gesture_buffer if s["t"] >= submit_ms - GESTURE_WINDOW_MS]
        docs = [{**s, "t": s["t"] - start} for s in kept]
        self.gesture_buffer = []
        return (GestureTimeline.from_doc(docs) if docs else None), docs

    # -- turn lifecycle ------------------------------------------------------------------

    def pending_turn(self) -> Turn | None:
        for turn in self.turns:
            if turn.status == "pending":
                return turn
        return None

    def submit_prompt(self, text: str, token_timestamps: list[float] | None = None,
                      gestures: list[dict] | None = None,
                      prompt_start_ms: float | None = None) -> Turn:
        with self.lock:
            if self.pending_turn() is not None:
                raise PendingTurnExists("confirm or abort the pending turn first")
            timeline, gesture_docs = self._collect_timeline(gestures, prompt_start_ms)
            turn = Turn(
                index=len(self.turns),
                prompt=text,
                token_timestamps=token_timestamps,
                gestures=gesture_docs,
                snapshot_before=self.scene.snapshot(len(self.turns)),
            )
            self.turns.append(turn)
            turn.stages["transcription"] = text
            self._emit("stage", {"turn": turn.index, "stage": "transcription", "payload": text})

            try:
                self._stage(turn, timeline)
            except _CLARIFICATION_ERRORS as exc:
                plan_doc = {"Instruction": None,
                            "Message": f"I need a clarification: {exc.message}", "Tasks": []}
                turn.stages["plan"] = plan_doc
                turn.status = "executed"
                turn.snapshot_after = turn.snapshot_before
                self._emit("stage", {"turn": turn.index, "stage": "plan", "payload": plan_doc})
                self._emit("turn", {"turn": turn.index, "status": turn.status})
            except (BackendFailure, EngineError) as exc:
                turn.status = "failed"
                turn.error = {"code": getattr(exc, "code", "EngineError"), "message": str(exc)}
                if isinstance(exc, BackendFailure) and exc.trace is not None:
                    turn.error["trace"] = exc.trace.to_doc()
                turn.snapshot_after = turn.snapshot_before
                self._emit("turn", {"turn": turn.index, "status": "failed", "error": turn.error})

            self._journal({"e": "turn", "turn": turn.to_doc()})
            if turn.status == "pending" and self.config.auto_confirm:
                self._confirm_locked(turn)
            return turn

    def _stage(self, turn: Turn, timeline: GestureTimeline | None) -> None:
        context = PromptContext(
            text=turn.prompt,
            token_timestamps=turn.token_timestamps,
            timeline=timeline,
            pose=self.scene.user_pose,
        )
        if self.config.planner_mode == "llm":
            if self.llm_client is None:
                raise BackendFailure("network", "no LLM client configured for this session")
            plan, plan_trace = llm_plan(turn.prompt, self.scene, self.scene.user_pose,
                                        self.llm_client, history=self._history_messages())
            turn.stages["plannerTrace"] = plan_trace.to_doc()
        else:
            plan = Planner(self.scene, thresholds=self.config.thresholds).plan(context)
        plan_doc = plan.to_doc()
        turn.stages["plan"] = plan_doc
        self._emit("stage", {"turn": turn.index, "stage": "plan", "payload": plan_doc})

        if plan.instruction is None:
            turn.status = "executed"  # conversational turn: message only, no changes
            turn.snapshot_after = turn.snapshot_before
            self._emit("turn", {"turn": turn.index, "status": turn.status})
            return

        if self.config.planner_mode == "llm":
            program, code_trace = llm_code(plan, self.scene, self.scene.user_pose,
                                           self.llm_client,
                                           known_handlers=set(self.interpreter.handlers))
            turn.stages["coderTrace"] = code_trace.to_doc()
            validated = sol.ValidatedProgram.check(program, self.scene,
                                                   set(self.interpreter.handlers))
            envelope = program.to_envelope()
        else:
            compiled = compile_plan(plan, context, self.scene,
                                    thresholds=self.config.thresholds, session=self)
            validated = sol.ValidatedProgram.check(compiled.program, self.scene,
                                                   set(self.interpreter.handlers))
            envelope = compiled.envelope
        explanations = sol.explain(validated.program)
        turn.stages["envelope"] = envelope
        turn.stages["explanations"] = explanations
        self._staged_programs[turn.index] = validated
        self._emit("stage", {"turn": turn.index, "stage": "envelope", "payload": envelope})
        self._emit("stage", {"turn": turn.index, "stage": "explanations",
                             "payload": explanations})

    def _history_messages(self) -> list[dict]:
        messages = []
        for turn in self.turns[:-1]:
            if turn.prompt:
                messages.append({"role": "user", "content": turn.prompt})
            plan = turn.stages.get("plan")
            if plan:
                messages.append({"role": "assistant", "content": json.dumps(
                    {"Instruction": plan["Instruction"], "Message": plan["Message"]})})
        return messages

    def confirm(self, turn_index: int) -> Turn:
        with self.lock:
            turn = self._pending_at(turn_index)
            return self._confirm_locked(turn)

    def _confirm_locked(self, turn: Turn) -> Turn:
        validated = self._staged_programs.pop(turn.index, None)
        if validated is None:
            raise NotPending(f"turn {turn.index} has no staged program")
        turn.status = "confirmed"
        try:
            result = self.interpreter.execute(validated, pose=self.scene.user_pose,
                                              grab=self.grab)
        except EngineError as exc:
            turn.status = "failed"
            turn.error = {"code": getattr(exc, "code", "EngineError"), "message": str(exc)}
            turn.snapshot_after = turn.snapshot_before
            self._emit("turn", {"turn": turn.index, "status": "failed", "error": turn.error})
            self._journal({"e": "turn_result", "turn": turn.index, "status": "failed",
                           "error": turn.error})
            return turn
        self.scene.step += 1
        turn.status = "executed"
        turn.snapshot_after = self.scene.snapshot(turn.index)
        self._record_creations(turn)
        # the streamed delta spans the whole turn including the step bump, so
        # folding the feed reproduces get_state exactly
        delta = scene_delta(turn.snapshot_before.doc, turn.snapshot_after.doc)
        self._emit("delta", {"turn": turn.index, "delta": delta,
                             "statements": result.statement_deltas})
        self._emit("turn", {"turn": turn.index, "status": "executed"})
        self._journal({"e": "turn_result", "turn": turn.index, "status": "executed"})
        self._maybe_compact()
        return turn

    def abort(self, turn_index: int) -> Turn:
        with self.lock:
            turn = self._pending_at(turn_index)
            self._staged_programs.pop(turn.index, None)
            turn.status = "aborted"
            turn.snapshot_after = turn.snapshot_before
            self._emit("turn", {"turn": turn.index, "status": "aborted"})
            self._journal({"e": "turn_result", "turn": turn.index, "status": "aborted"})
            return turn

    def _pending_at(self, turn_index: int) -> Turn:
        if turn_index >= len(self.turns) or self.turns[turn_index].status != "pending":
            raise NotPending(f"turn {turn_index} is not pending")
        return self.turns[turn_index]

    def _record_creations(self, turn: Turn) -> None:
        before = {o["name"] for o in turn.snapshot_before.doc["objects"]}
        last_touched = None
        after_objs = {o["name"]: o for o in turn.snapshot_after.doc["objects"]}
        before_objs = {o["name"]: o for o in turn.snapshot_before.doc["objects"]}
        for name, doc in after_objs.items():
            if name not in before:
                self._creation_states[name] = doc
                last_touched = name
            elif before_objs.get(name) != doc:
                last_touched = name
        if last_touched is not None:
            self._last_referent = last_touched

    # -- fault injection (replay harness) ---------------------------------------------------

    def inject_fault(self, sets: dict[str, dict]) -> Turn:
        """Apply a deliberately wrong state change as a committed turn.

        The fault is compiled to a real SOL program so history replay and undo
        see an ordinary turn. Relative specs resolve against the live scene:
        size {"scale": k}, position {"offset": [dx,dy,dz]}, rotation number=yaw.
        """
        from .scene import object_doc
        from .sol.ast import Method, SolProgram, Statement, ValueExpr
        from .sol.printer import print_program

        with self.lock:
            if self.pending_turn() is not None:
                raise PendingTurnExists("confirm or abort the pending turn first")
            statements: list[Statement] = []
            order = ["levitated", "size", "rotation", "position", "color",
                     "illuminated", "luminousIntensity"]
            for name, props in sets.items():
                obj = self.scene.get(name)
                for prop in sorted(props, key=order.index):
                    value = props[prop]
                    statements.append(Statement(
                        op="set", selector=name, prop=prop,
                        value=_fault_value(prop, value, obj)))
            base = "FaultInjection"
            used = self.used_program_names()
            pname, n = base, 1
            while pname in used:
                n += 1
                pname = f"{base}{n}"
            program = SolProgram(pname, [Method("ApplyFault", statements,
                                                description="Injected wrong state change",
                                                explanation="Applies a deliberately wrong change.")])
            program.source_text = print_program(program)
            validated = sol.ValidatedProgram.check(program, self.scene,
                                                   set(self.interpreter.handlers))
            turn = Turn(
                index=len(self.turns), prompt="[fault injection]",
                token_timestamps=None, gestures=[],
                snapshot_before=self.scene.snapshot(len(self.turns)),
            )
            turn.stages["plan"] = {"Instruction": "1. Apply an injected wrong change.",
                                   "Message": "Injecting a wrong change.", "Tasks": []}
            turn.stages["envelope"] = program.to_envelope()
            self.turns.append(turn)
            self._staged_programs[turn.index] = validated
            self._journal({"e": "fault", "sets": sets})
            return self._confirm_locked(turn)

    # -- ticking --------------------------------------------------------------------------

    def run_ticks(self, n: int, grab: str | None = "__keep__") -> list[dict]:
        with self.lock:
            if grab != "__keep__":
                self.grab = grab
            self.interpreter.set_grab(self.grab)
            reports = []
            for _ in range(n):
                report = self.engine.tick(self.scene.user_pose, grab=self.grab,
                                          dt=self.config.tick_dt_ms)
                doc = report.to_doc()
                reports.append(doc)
                self.tick_log.append(doc)
                if doc["fired"] or doc["errors"] or doc["delta"]:
                    self._emit("tick", doc)
            self._journal({"e": "ticks", "n": n, "grab": self.grab})
            return reports

    # -- views ------------------------------------------------------------------------------

    def state_doc(self) -> dict:
        with self.lock:
            return self.scene.to_doc()

    def history_doc(self) -> list[dict]:
        with self.lock:
            return [t.to_doc() for t in self.turns]

    # -- journaling ---------------------------------------------------------------------------

    def _journal(self, event: dict) -> None:
        if self.journal is not None:
            self.journal.append({"id": self.id, **event})

    def _maybe_compact(self) -> None:
        if self.journal is None:
            return
        executed = sum(1 for t in self.turns if t.status != "pending")
        if executed and executed % COMPACT_EVERY_TURNS == 0:
            self.journal.append({"id": self.id, "e": "dump", "state": self.dump()})

    def dump(self) -> dict:
        return {
            "config": {
                "planner_mode": self.config.planner_mode,
                "auto_confirm": self.config.auto_confirm,
                "tick_rate": self.config.tick_rate,
            },
            "scene": self.scene.to_doc(),
            "turns": [t.to_doc() for t in self.turns],
            "creationStates": self._creation_states,
            "lastReferent": self._last_referent,
            "grab": self.grab,
        }

    def load_dump(self, dump: dict) -> None:
        self.scene = Scene.from_doc(dump["scene"], catalog=self.scene.catalog)
        self.interpreter = sol.Interpreter(self.scene, self.config.thresholds, memory=self)
        self.engine = TriggerEngine(self.scene, handlers=self.interpreter.handlers,
                                    thresholds=self.config.thresholds)
        self.turns = []
        for td in dump["turns"]:
            turn = Turn(
                index=td["index"], prompt=td["prompt"],
                token_timestamps=td["tokenTimestamps"], gestures=td["gestures"],
                status=td["status"], stages=td["stages"], error=td["error"],
                snapshot_before=SceneSnapshot(td["snapshotBefore"], td["index"])
                if td["snapshotBefore"] else None,
                snapshot_after=SceneSnapshot(td["snapshotAfter"], td["index"])
                if td["snapshotAfter"] else None,
            )
            self.turns.append(turn)
            self._reinstall_program(turn)
        self._creation_states = dict(dump["creationStates"])
        self._last_referent = dump.get("lastReferent")
        self.grab = dump.get("grab")

    def _reinstall_program(self, turn: Turn) -> None:
        """Re-register handler methods of an executed turn's program."""
        envelope = turn.stages.get("envelope")
        if not envelope or turn.status != "executed":
            return
        try:
            program = sol.parse(envelope["SourceCode"])
        except EngineError:
            return
        self.interpreter._register(program)


def _fault_value(prop: str, value, obj):
    """Resolve a fault spec to a literal SOL value expression."""
    from .sol.ast import ValueExpr

    if prop == "position":
        if isinstance(value, dict) and "offset" in value:
            dx, dy, dz = value["offset"]
            pt = (obj.position.x + dx, obj.position.y + dy, obj.position.z + dz)
        else:
            pt = tuple(float(v) for v in value)
        return ValueExpr("point", numbers=pt)
    if prop == "size":
        if isinstance(value, dict) and "scale" in value:
            return ValueExpr("scale", number=float(value["scale"]))
        return ValueExpr("dims", numbers=tuple(float(v) for v in value))
    if prop == "rotation":
        yaw = float(value[0]) if isinstance(value, (list, tuple)) else float(value)
        return ValueExpr("yaw", number=yaw)
    if prop == "color":
        if isinstance(value, str):
            return ValueExpr("color", color=value)
        vals = list(value) + [1.0] * (4 - len(value))
        return ValueExpr("rgba", numbers=tuple(float(v) for v in vals))
    if prop in ("illuminated", "levitated"):
        return ValueExpr("bool", flag=bool(value))
    return ValueExpr("number", number=float(value))


class Journal:
    """Append-only JSON-lines event log; one event per line."""

    def __init__(self, path: str):
        self.path = path
        directory = os.path.dirname(path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        self._fh = open(path, "a", encoding="utf-8")
        self._lock = threading.Lock()

    def append(self, event: dict) -> None:
        line = json.dumps(event, separators=(",", ":"))
        with self._lock:
            self._fh.write(line + "\n")
            self._fh.flush()

    def close(self) -> None:
        self._fh.close()

    @staticmethod
    def read(path: str) -> list[dict]:
        events = []
        with open(path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    events.append(json.loads(line))
        return events


class SessionManager:
    def __init__(self, config: EngineConfig | None = None, journal_path: str | None = None,
                 llm_client_factory=None):
        self.config = config or EngineConfig()
        self.sessions: dict[str, Session] = {}
        self._counter = 0
        self._lock = threading.Lock()
        self.llm_client_factory = llm_client_factory
        journal_path = journal_path or self.config.journal_path
        self.journal: Journal | None = None
        if journal_path:
            if os.path.exists(journal_path):
                self._replay_journal(journal_path)
            self.journal = Journal(journal_path)
            for session in self.sessions.values():
                session.journal = self.journal

    # -- lifecycle -------------------------------------------------------------

    def create_session(self, planner_mode: str | None = None, auto_confirm: bool | None = None,
                       initial_scene: dict | None = None, session_id: str | None = None) -> Session:
        from dataclasses import replace

        with self._lock:
            self._counter += 1
            sid = session_id or f"s{self._counter}"
            config = self.config
            if planner_mode is not None or auto_confirm is not None:
                config = replace(
                    config,
                    planner_mode=planner_mode if planner_mode is not None else config.planner_mode,
                    auto_confirm=auto_confirm if auto_confirm is not None else config.auto_confirm,
                )
            scene = Scene.from_doc(initial_scene) if initial_scene else Scene()
            llm_client = None
            if config.planner_mode == "llm" and self.llm_client_factory is not None:
                llm_client = self.llm_client_factory(config.llm)
            session = Session(sid, config, scene=scene, journal=self.journal,
                              llm_client=llm_client)
            self.sessions[sid] = session
            if self.journal:
                self.journal.append({
                    "id": sid, "e": "session",
                    "planner_mode": config.planner_mode,
                    "auto_confirm": config.auto_confirm,
                    "initial_scene": initial_scene,
                })
            return session

    def get(self, session_id: str) -> Session:
        session = self.sessions.get(session_id)
        if session is None:
            raise UnknownSession(f"no session {session_id!r}")
        return session

    # -- journal replay ----------------------------------------------------------

    def _replay_journal(self, path: str) -> None:
        events = Journal.read(path)
        # a dump line supersedes everything before it for that session
        last_dump: dict[str, int] = {}
        for i, ev in enumerate(events):
            if ev.get("e") == "dump":
                last_dump[ev["id"]] = i
        skip_before = {sid: idx for sid, idx in last_dump.items()}

        for i, ev in enumerate(events):
            sid = ev.get("id")
            kind = ev.get("e")
            if sid in skip_before and i < skip_before[sid] and kind != "dump":
                continue
            if kind == "session":
                session = self.create_session(
                    planner_mode=ev.get("planner_mode"),
                    auto_confirm=False,  # replays confirm explicitly
                    initial_scene=ev.get("initial_scene"),
                    session_id=sid,
                )
                session.journal = None  # do not double-log during replay
                n = int(sid[1:]) if sid[1:].isdigit() else self._counter
                self._counter = max(self._counter, n)
            elif kind == "dump":
                session = self.sessions.get(sid) or self.create_session(session_id=sid)
                session.journal = None
                session.load_dump(ev["state"])
            elif sid in self.sessions:
                self._replay_event(self.sessions[sid], ev)
        for session in self.sessions.values():
            session.journal = self.journal

    def _replay_event(self, session: Session, ev: dict) -> None:
        kind = ev["e"]
        try:
            if kind == "pose":
                session.update_pose(UserPose.from_doc(ev["pose"]), grab=ev.get("grab"))
            elif kind == "gesture":
                session.append_gesture(ev["sample"])
            elif kind == "turn":
                td = ev["turn"]
                if td["status"] in ("pending", "executed", "confirmed", "failed"):
                    session.submit_prompt(td["prompt"], td["tokenTimestamps"],
                                          gestures=td["gestures"])
            elif kind == "turn_result":
                status = ev["status"]
                pending = session.pending_turn()
                if pending is None:
                    return
                if status == "executed":
                    session.confirm(pending.index)
                elif status == "aborted":
                    session.abort(pending.index)
            elif kind == "fault":
                session.inject_fault(ev["sets"])
            elif kind == "ticks":
                session.run_ticks(ev["n"], grab=ev.get("grab"))
        except EngineError:
            # journal replay is best-effort: a corrupt tail must not brick startup
            pass
