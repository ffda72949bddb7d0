"""Transactional SOL interpreter.

Programs execute atomically: any runtime failure rolls the scene (objects,
trigger bindings, handler registry) back to the pre-execution snapshot and
surfaces a RuntimeFailure. Execution requires a ValidatedProgram handle, so
unvalidated code can never run.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Protocol

from ..catalog import ColorRGBA, palette_color
from ..config import Thresholds
from ..errors import EngineError, InjectedFault, NoHistory, RuntimeFailure, UnknownObject
from ..geometry import Euler, Vec3
from ..pose import UserPose
from ..scene import Scene, SceneObject, SceneSnapshot, scene_delta
from ..spatial import (
    SpatialRelation,
    evaluate_predicate,
    pointing_target,
    resolve_placement,
    view_frustum_objects,
)
from .ast import Method, Placement, SolProgram, Statement, ValueExpr
from .validator import ValidationReport, validate


class MemoryProvider(Protocol):
    """Conversational-memory lookups the interpreter needs for `restore`."""

    def previous_scene_snapshot(self) -> SceneSnapshot: ...

    def previous_object_states(self, names: list[str]) -> dict[str, dict]: ...

    def original_object_states(self, names: list[str]) -> dict[str, dict]: ...


class NullMemory:
    def previous_scene_snapshot(self) -> SceneSnapshot:
        raise NoHistory("this session has no committed history")

    def previous_object_states(self, names):
        raise NoHistory("these objects have no recorded history")

    def original_object_states(self, names):
        raise NoHistory("these objects have no recorded history")


@dataclass(frozen=True)
class ValidatedProgram:
    """A program that passed validation; the only handle execute() accepts."""

    program: SolProgram
    report: ValidationReport

    @staticmethod
    def check(program: SolProgram, scene: Scene,
              known_handlers: set[str] | None = None) -> "ValidatedProgram":
        report = validate(program, scene, known_handlers)
        if not report.ok:
            raise ValueError("program failed validation:\n" + report.format())
        return ValidatedProgram(program, report)


@dataclass
class ExecutionResult:
    program_name: str
    delta: dict
    statement_deltas: list[dict] = field(default_factory=list)
    installed_handlers: list[str] = field(default_factory=list)


@dataclass
class _Ctx:
    pose: UserPose
    grab: str | None = None
    self_name: str | None = None


class Interpreter:
    def __init__(self, scene: Scene, thresholds: Thresholds | None = None,
                 memory: MemoryProvider | None = None,
                 handlers: dict | None = None):
        self.scene = scene
        self.th = thresholds or Thresholds()
        self.memory: MemoryProvider = memory or NullMemory()
        # shared registry: handler ref -> callable(object_name); TriggerEngine reads it
        self.handlers = handlers if handlers is not None else {}
        self._programs: dict[str, SolProgram] = {}

    # -- public entry points -------------------------------------------------

    def execute(self, validated: ValidatedProgram, pose: UserPose | None = None,
                grab: str | None = None, inject_fault_at: int | None = None) -> ExecutionResult:
        if not isinstance(validated, ValidatedProgram):
            raise TypeError("execute requires a ValidatedProgram handle")
        program = validated.program
        pose = pose or self.scene.user_pose
        pre = self.scene.snapshot()
        added_refs = self._register(program)
        result = ExecutionResult(program_name=program.name, delta={})
        counter = 0
        ctx = _Ctx(pose=pose, grab=grab)
        try:
            for method in program.entry_methods():
                for idx, stmt in enumerate(method.body):
                    if inject_fault_at is not None and counter == inject_fault_at:
                        raise RuntimeFailure(method.name, idx, InjectedFault("injected fault"))
                    before = self.scene.authoring_doc()
                    try:
                        self._run_statement(stmt, program, ctx)
                    except RuntimeFailure:
                        raise
                    except EngineError as exc:
                        raise RuntimeFailure(method.name, idx, exc) from exc
                    result.statement_deltas.append({
                        "method": method.name,
                        "statement": idx,
                        "op": stmt.op,
                        "delta": scene_delta(before, self.scene.authoring_doc()),
                    })
                    counter += 1
        except RuntimeFailure:
            self.scene.restore(pre)
            for ref in added_refs:
                self.handlers.pop(ref, None)
            self._programs.pop(program.name, None)
            raise
        result.delta = scene_delta(pre.doc, self.scene.authoring_doc())
        result.installed_handlers = added_refs
        return result

    def statement_count(self, program: SolProgram) -> int:
        return sum(len(m.body) for m in program.entry_methods())

    def run_handler(self, ref: str, self_name: str, pose: UserPose, grab: str | None = None) -> None:
        prog_name, method_name = ref.split(".", 1)
        program = self._programs[prog_name]
        method = program.method(method_name)
        ctx = _Ctx(pose=pose, grab=grab, self_name=self_name)
        for stmt in method.body:
            self._run_statement(stmt, program, ctx)

    # -- wiring ---------------------------------------------------------------

    def _register(self, program: SolProgram) -> list[str]:
        self._programs[program.name] = program
        added = []
        for method in program.methods:
            ref = f"{program.name}.{method.name}"
            if ref in self.handlers:
                continue

            def runner(self_name: str, _ref=ref):
                # pose/grab at invocation time come from the scene's live pose;
                # the trigger engine updates it before each tick
                self.run_handler(_ref, self_name, self.scene.user_pose, self._current_grab)

            self.handlers[ref] = runner
            added.append(ref)
        return added

    _current_grab: str | None = None

    def set_grab(self, grab: str | None) -> None:
        self._current_grab = grab

    # -- statement dispatch ------------------------------------------------------

    def _targets(self, selector: str, ctx: _Ctx) -> list[SceneObject]:
        if selector == "self":
            if ctx.self_name is None:
                raise UnknownObject("'self' used outside a handler")
            return [self.scene.get(ctx.self_name)]
        if selector == "all":
            return self.scene.objects
        obj = self.scene.find_by_name(selector)
        if obj is not None:
            return [obj]
        matches = [o for o in self.scene.objects
                   if o.kind == selector or self.scene.catalog.get(o.kind).category == selector]
        if not matches:
            raise UnknownObject(f"nothing in the scene matches {selector!r}")
        return matches

    def _referent(self, name: str, ctx: _Ctx) -> SceneObject:
        return self._targets(name, ctx)[0]

    def _placement_relation(self, p: Placement, ctx: _Ctx) -> SpatialRelation:
        ref = None
        if p.ref is not None:
            ref = self._referent(p.ref, ctx).name
        point = Vec3.of(p.point) if p.point is not None else None
        return SpatialRelation(tag=p.tag, ref=ref, wall=p.wall, wall2=p.wall2,
                               point=point, distance=p.distance)

    def _run_statement(self, stmt: Statement, program: SolProgram, ctx: _Ctx) -> None:
        runner = getattr(self, f"_exec_{stmt.op}", None)
        if runner is None:
            raise UnknownObject(f"unknown operation {stmt.raw or stmt.op!r}")
        runner(stmt, program, ctx)

    def _exec_create(self, stmt: Statement, program: SolProgram, ctx: _Ctx) -> None:
        overrides: dict = {}
        if stmt.placement is not None:
            p = stmt.placement
            if p.tag == "on_wall":
                overrides["wallMounted"] = p.wall
            else:
                rel = self._placement_relation(p, ctx)
                subject_size = self.scene.catalog.get(stmt.kind).size
                pos = resolve_placement(rel, subject_size, self.scene, ctx.pose, self.th)
                overrides["position"] = pos
                if p.tag == "against_wall":
                    overrides["rotation"] = Euler(self.scene.room.wall_inward_yaw(p.wall))
        self.scene.create_object(stmt.kind, name=stmt.name, overrides=overrides)

    def _exec_grid(self, stmt: Statement, program: SolProgram, ctx: _Ctx) -> None:
        self.scene.create_grid(stmt.kind, stmt.rows, stmt.cols, stmt.wall)

    def _exec_set(self, stmt: Statement, program: SolProgram, ctx: _Ctx) -> None:
        for obj in self._targets(stmt.selector, ctx):
            self.scene.set_property(obj.name, stmt.prop, _value_for(stmt.value, obj, stmt.prop))

    def _exec_moveTo(self, stmt: Statement, program: SolProgram, ctx: _Ctx) -> None:  # noqa: N802
        for obj in self._targets(stmt.selector, ctx):
            p = stmt.placement
            if p.tag == "on_wall":
                self.scene.mount_on_wall(obj.name, p.wall)
                continue
            rel = self._placement_relation(p, ctx)
            pos = resolve_placement(rel, obj.size, self.scene, ctx.pose, self.th,
                                    subject_name=obj.name)
            if p.tag == "align_y":
                pos = Vec3(obj.position.x, pos.y, obj.position.z)
            elif obj.wall_mounted is not None:
                # floor placements take a mounted object off its wall
                obj.wall_mounted = None
            if p.tag == "against_wall":
                obj.rotation = Euler(self.scene.room.wall_inward_yaw(p.wall))
            self.scene.set_property(obj.name, "position", pos)

    def _exec_restore(self, stmt: Statement, program: SolProgram, ctx: _Ctx) -> None:
        if stmt.selector == "all" and stmt.checkpoint == "previous":
            snap = self.memory.previous_scene_snapshot()
            self.scene.restore(snap)
            self.scene.resettle_all()
            return
        names = [o.name for o in self._targets(stmt.selector, ctx)]
        if stmt.checkpoint == "original":
            states = self.memory.original_object_states(names)
        else:
            states = self.memory.previous_object_states(names)
        for name in names:
            if name in states:
                self.scene.restore_object_state(states[name])
        self.scene.resettle_all()

    def _exec_on(self, stmt: Statement, program: SolProgram, ctx: _Ctx) -> None:
        ref = stmt.method if "." in stmt.method else f"{program.name}.{stmt.method}"
        if ref not in self.handlers:
            raise UnknownObject(f"handler {ref!r} is not registered")
        for obj in self._targets(stmt.selector, ctx):
            self.scene.add_binding(obj.name, stmt.event, ref)

    def _exec_off(self, stmt: Statement, program: SolProgram, ctx: _Ctx) -> None:
        ref = stmt.method if "." in stmt.method else f"{program.name}.{stmt.method}"
        for obj in self._targets(stmt.selector, ctx):
            self.scene.remove_binding(obj.name, stmt.event, ref)

    def _exec_toggle(self, stmt: Statement, program: SolProgram, ctx: _Ctx) -> None:
        for obj in self._targets(stmt.selector, ctx):
            current = getattr(obj, "illuminated" if stmt.prop == "illuminated" else "levitated")
            self.scene.set_property(obj.name, stmt.prop, not current)

    def _exec_when(self, stmt: Statement, program: SolProgram, ctx: _Ctx) -> None:
        pred, selector = stmt.predicate
        target = self._referent(selector, ctx)
        truth = self._eval_predicate(pred, target, ctx)
        branch = stmt.then if truth else (stmt.orelse or [])
        for inner in branch:
            self._run_statement(inner, program, ctx)

    def _exec_unknown(self, stmt: Statement, program: SolProgram, ctx: _Ctx) -> None:
        raise UnknownObject(f"unknown operation {stmt.raw!r}")

    def _eval_predicate(self, pred: str, target: SceneObject, ctx: _Ctx) -> bool:
        if pred in ("near", "touching"):
            return evaluate_predicate(pred, ctx.pose, target, self.scene, self.th)
        if pred == "looking_at":
            return target.name in view_frustum_objects(ctx.pose, self.scene, self.th)
        if pred == "pointing_at":
            return pointing_target(ctx.pose.pointing, self.scene).object_name == target.name
        if pred == "holding":
            return ctx.grab == target.name
        raise UnknownObject(f"unknown predicate {pred!r}")


def _value_for(value: ValueExpr, obj: SceneObject, prop: str):
    if value.tag == "point":
        return Vec3.of(value.numbers)
    if value.tag == "yaw":
        return Euler(value.number, obj.rotation.pitch, obj.rotation.roll)
    if value.tag == "spin":
        return Euler(obj.rotation.yaw + value.number, obj.rotation.pitch, obj.rotation.roll)
    if value.tag == "scale":
        k = value.number
        return Vec3(obj.size.x * k, obj.size.y * k, obj.size.z * k)
    if value.tag == "scale_w":
        return Vec3(obj.size.x * value.number, obj.size.y, obj.size.z)
    if value.tag == "scale_h":
        return Vec3(obj.size.x, obj.size.y * value.number, obj.size.z)
    if value.tag == "scale_d":
        return Vec3(obj.size.x, obj.size.y, obj.size.z * value.number)
    if value.tag == "dims":
        return Vec3.of(value.numbers)
    if value.tag == "rgba":
        return ColorRGBA(*value.numbers)
    if value.tag == "color":
        return palette_color(value.color)
    if value.tag == "bool":
        return value.flag
    return value.number
