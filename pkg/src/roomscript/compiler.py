"""Compile a TaskPlan into a validated SOL program envelope.

Deictic tokens are resolved here, at compile time, against the prompt's
gesture timeline; selectors resolve to concrete object names so the emitted
program is fully grounded in the current scene.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Protocol

from .catalog import Catalog
from .config import Thresholds
from .errors import CompileError, NoHistory, NoMatch
from .geometry import forward_from_yaw, right_from_yaw
from .planner import PlannedTask, PromptContext, TaskPlan
from .scene import Scene
from .sol.ast import Method, Placement, SolProgram, Statement, ValueExpr
from .sol.explainer import summarize_body
from .sol.printer import print_method, print_program
from .sol.validator import validate
from .spatial import Selector, resolve_deictic, resolve_selector


class SessionView(Protocol):
    """What the compiler needs to know about session history."""

    def used_program_names(self) -> set[str]: ...

    def object_modified_since_creation(self, name: str) -> bool: ...

    def has_changing_turn(self) -> bool: ...

    def last_referent(self) -> str | None: ...


class NullSessionView:
    def used_program_names(self) -> set[str]:
        return set()

    def object_modified_since_creation(self, name: str) -> bool:
        return False

    def has_changing_turn(self) -> bool:
        return False

    def last_referent(self) -> str | None:
        return None


def resolve_memory_reference(phrase: str, names: list[str], session: SessionView) -> str:
    """Map a memory phrase to a checkpoint token, enforcing NoHistory."""
    checkpoint = "previous" if phrase == "previous" else "original"
    if not any(session.object_modified_since_creation(n) for n in names):
        raise NoHistory(
            f"{', '.join(names)} ha{'s' if len(names) == 1 else 've'} not been changed "
            "since creation, so there is nothing to put back"
        )
    return checkpoint


def _camel(text: str) -> str:
    return "".join(p.capitalize() for p in re.split(r"[^a-zA-Z0-9]+", text) if p)


_EVENT_BY_FAMILY = {
    "near": ("OnNearEnter", "OnNearExit"),
    "touch": ("OnTouchEnter", "OnTouchExit"),
    "point": ("OnPointEnter", "OnPointExit"),
    "look": ("OnLookEnter", "OnLookExit"),
    "hold": ("OnHoldEnter", "OnHoldExit"),
}

_SIZE_ADJ_VALUES = {
    "small": ("scale", 0.7),
    "big": ("scale", 1.4),
    "short": ("scale_h", 0.7),
    "squat": ("scale_h", 0.6),
    "tall": ("scale_h", 1.3),
    "wide": ("scale_w", 1.3),
}


@dataclass
class CompiledProgram:
    program: SolProgram
    envelope: dict
    source: str


class Compiler:
    def __init__(self, scene: Scene, context: PromptContext,
                 catalog: Catalog | None = None, thresholds: Thresholds | None = None,
                 session: SessionView | None = None):
        self.scene = scene
        self.context = context
        self.catalog = catalog or scene.catalog
        self.th = thresholds or Thresholds()
        self.session = session or NullSessionView()
        self.reserved: set[str] = set()
        self.created_by_task: dict[int, str] = {}
        self.last_name: str | None = None
        self._default_create_count = 0
        self.method_names: set[str] = set()

    # -- selector / placement grounding -------------------------------------

    def _resolve_selector(self, sel: Selector, task_index: int) -> list[str]:
        if sel.name == "__anaphor__":
            if self.last_name is not None:
                return [self.last_name]
            recent = self.session.last_referent()
            if recent is not None and self.scene.find_by_name(recent) is not None:
                return [recent]
            if len(self.scene.objects) == 1:
                return [self.scene.objects[0].name]
            raise CompileError("I'm not sure what 'it' refers to", task_index)
        try:
            objs = resolve_selector(sel, self.scene, self.context.pose, self.th,
                                    timeline=self.context.timeline)
            return [o.name for o in objs]
        except NoMatch:
            # objects created earlier in this same plan are referenceable too
            planned = self._planned_matches(sel)
            if planned:
                return planned
            raise

    def _planned_matches(self, sel: Selector) -> list[str]:
        if sel.name:
            return [sel.name] if sel.name in self.reserved else []
        if sel.kind is None:
            return []
        out = []
        for name in self.created_by_task.values():
            kind = name.rsplit("-", 1)[0]
            if kind == sel.kind or (
                    self.catalog.has(kind) and self.catalog.get(kind).category == sel.kind):
                out.append(name)
        return out

    def _resolve_one(self, sel: Selector, task_index: int) -> str:
        names = self._resolve_selector(sel, task_index)
        return names[0]

    def _ground_placement(self, placement: dict | None, task_index: int) -> Placement | None:
        if placement is None:
            return None
        tag = placement.get("tag")
        if tag == "floor":
            return None
        if tag == "deictic":
            hit = resolve_deictic(placement["token"], placement.get("ts", 0.0),
                                  self.context.timeline, self.scene, self.th)
            if hit.object_name is not None:
                return Placement(tag="on_top_of", ref=hit.object_name)
            p = hit.floor_point
            return Placement(tag="at_point",
                             point=(round(p.x, 9), round(p.y, 9), round(p.z, 9)))
        ref = placement.get("ref")
        ref_name = None
        if isinstance(ref, Selector):
            ref_name = self._resolve_one(ref, task_index)
        elif isinstance(ref, dict) and "created_task" in ref:
            ref_name = self.created_by_task.get(ref["created_task"])
            if ref_name is None:
                raise CompileError("a placement refers to an object that was never created",
                                   task_index)
        elif isinstance(ref, str):
            ref_name = ref
        return Placement(tag=tag, ref=ref_name, wall=placement.get("wall"),
                         wall2=placement.get("wall2"),
                         distance=placement.get("distance"))

    # -- naming ----------------------------------------------------------------

    def _method_name(self, base: str) -> str:
        name = base
        n = 1
        while name in self.method_names:
            n += 1
            name = f"{base}{n}"
        self.method_names.add(name)
        return name

    # -- task lowering -----------------------------------------------------------

    def lower_task(self, task: PlannedTask) -> list[Method]:
        action = task.action
        op = action["op"]
        if op == "create":
            return [self._lower_create(task)]
        if op == "grid":
            return [self._lower_grid(task)]
        if op == "set":
            return [self._lower_set(task)]
        if op == "move":
            return [self._lower_move(task)]
        if op == "restore":
            return [self._lower_restore(task)]
        if op == "interact":
            return self._lower_interact(task)
        if op == "trigger_effect":  # folded into the preceding interact lowering
            return []
        raise CompileError(f"task {op!r} has no SOL lowering", task.index)

    def _lower_create(self, task: PlannedTask) -> Method:
        action = task.action
        kind = action["kind"]
        name = self.scene.peek_auto_names(kind, 1, self.reserved)[0]
        self.reserved.add(name)
        self.created_by_task[task.index] = name
        self.last_name = name
        placement = self._ground_placement(action.get("placement"), task.index)
        if placement is None:
            # several default-placed objects in one plan line up side by side
            # in front of the user instead of piling onto the same spot
            k = self._default_create_count
            self._default_create_count += 1
            if k > 0:
                lateral = 0.8 * ((k + 1) // 2) * (1 if k % 2 == 1 else -1)
                pose = self.context.pose
                spot = (pose.position + forward_from_yaw(pose.yaw).scaled(self.th.user_reach_m)
                        + right_from_yaw(pose.yaw).scaled(lateral))
                half_w = self.scene.room.width / 2 - 0.1
                half_d = self.scene.room.depth / 2 - 0.1
                x = min(max(spot.x, -half_w), half_w)
                z = min(max(spot.z, -half_d), half_d)
                placement = Placement(tag="at_point", point=(round(x, 9), 0.0, round(z, 9)))
        statements = [Statement(op="create", kind=kind, name=name, placement=placement)]
        overrides = action.get("overrides", {})
        if overrides.get("color"):
            statements.append(Statement(op="set", selector=name, prop="color",
                                        value=ValueExpr("color", color=overrides["color"])))
        if overrides.get("size_adj"):
            tag, factor = _SIZE_ADJ_VALUES[overrides["size_adj"]]
            statements.append(Statement(op="set", selector=name, prop="size",
                                        value=ValueExpr(tag, number=factor)))
        return Method(name=self._method_name(f"Create{_camel(name)}"), body=statements,
                      description=task.description)

    def _lower_grid(self, task: PlannedTask) -> Method:
        action = task.action
        names = self.scene.peek_auto_names(action["kind"], action["rows"] * action["cols"],
                                           self.reserved)
        self.reserved.update(names)
        self.last_name = names[-1]
        stmt = Statement(op="grid", kind=action["kind"], rows=action["rows"],
                         cols=action["cols"], wall=action.get("wall"))
        return Method(name=self._method_name(f"CreateGridOf{_camel(action['kind'])}s"),
                      body=[stmt], description=task.description)

    def _value_expr(self, value: dict) -> ValueExpr:
        tag = value["tag"]
        if tag == "bool":
            return ValueExpr("bool", flag=value["flag"])
        if tag == "color":
            return ValueExpr("color", color=value["term"])
        if tag in ("scale", "scale_w", "scale_h", "scale_d"):
            return ValueExpr(tag, number=value["factor"])
        if tag in ("yaw", "spin"):
            return ValueExpr(tag, number=value["deg"])
        if tag == "intensity":
            return ValueExpr("number", number=value["v"])
        raise CompileError(f"unsupported value {tag!r}", 0)

    def _lower_set(self, task: PlannedTask) -> Method:
        action = task.action
        names = self._resolve_selector(action["selector"], task.index)
        value = self._value_expr(action["value"])
        statements = [Statement(op="set", selector=n, prop=action["prop"], value=value)
                      for n in names]
        self.last_name = names[-1]
        base = {
            "illuminated": "Switch", "levitated": "Levitate", "color": "Recolor",
            "size": "Resize", "rotation": "Rotate", "luminousIntensity": "Dim",
        }.get(action["prop"], "Edit")
        return Method(name=self._method_name(f"{base}{_camel(names[0])}"), body=statements,
                      description=task.description)

    def _lower_move(self, task: PlannedTask) -> Method:
        action = task.action
        names = self._resolve_selector(action["selector"], task.index)
        placement = self._ground_placement(action["placement"], task.index)
        if placement is None:
            raise CompileError("this move has no destination", task.index)
        statements = [Statement(op="moveTo", selector=n, placement=placement) for n in names]
        self.last_name = names[-1]
        return Method(name=self._method_name(f"Move{_camel(names[0])}"), body=statements,
                      description=task.description)

    def _lower_restore(self, task: PlannedTask) -> Method:
        action = task.action
        if action.get("scope") == "scene":
            if not self.session.has_changing_turn():
                raise NoHistory("there is no previous change to undo")
            stmt = Statement(op="restore", selector="all", checkpoint="previous")
            return Method(name=self._method_name("UndoLastChange"), body=[stmt],
                          description=task.description)
        names = self._resolve_selector(action["selector"], task.index)
        checkpoint = resolve_memory_reference(action["checkpoint"], names, self.session)
        statements = [Statement(op="restore", selector=n, checkpoint=checkpoint) for n in names]
        self.last_name = names[-1]
        return Method(name=self._method_name(f"Restore{_camel(names[0])}"), body=statements,
                      description=task.description)

    def _handler_statements(self, specs: list[dict], task_index: int) -> list[Statement]:
        statements = []
        for spec in specs:
            selector = spec["selector"]
            if isinstance(selector, Selector):
                selector = self._resolve_one(selector, task_index)
            if spec["kind"] == "set":
                statements.append(Statement(op="set", selector=selector, prop=spec["prop"],
                                            value=ValueExpr("bool", flag=spec["flag"])))
            elif spec["kind"] == "set_rotation":
                statements.append(Statement(op="set", selector=selector, prop="rotation",
                                            value=ValueExpr(spec["mode"], number=spec["deg"])))
            elif spec["kind"] == "move":
                placement = self._ground_placement(spec["placement"], task_index)
                statements.append(Statement(op="moveTo", selector=selector, placement=placement))
            else:
                raise CompileError(f"unsupported trigger effect {spec['kind']!r}", task_index)
        return statements

    def _handler_base_name(self, specs: list[dict], target: str) -> str:
        spec = specs[0]
        if spec["kind"] == "set" and spec["prop"] == "illuminated":
            return ("TurnOn" if spec["flag"] else "TurnOff") + _camel(target)
        if spec["kind"] == "set" and spec["prop"] == "levitated":
            return ("Levitate" if spec["flag"] else "Ground") + _camel(target)
        if spec["kind"] == "set_rotation":
            return ("Open" if spec["mode"] == "yaw" else "Spin") + _camel(target)
        if spec["kind"] == "move":
            return "Move" + _camel(target)
        return "Affect" + _camel(target)

    def _lower_interact(self, task: PlannedTask) -> list[Method]:
        action = task.action
        target: Selector = action["target"]
        if getattr(target, "_indefinite", False) or not target.singular:
            if target.kind is None:
                raise CompileError("I can't tell which objects this trigger should watch",
                                   task.index)
            binding_selector = target.kind
            names = self._resolve_selector(
                Selector(kind=target.kind, color=target.color, singular=False), task.index)
            handler_target = names[0]
        else:
            binding_selector = self._resolve_one(target, task.index)
            handler_target = binding_selector
        enter_event, exit_event = _EVENT_BY_FAMILY[action["family"]]

        methods: list[Method] = []
        on_statements: list[Statement] = []
        enter_stmts = self._handler_statements(action["enter"], task.index)
        enter_name = self._method_name(self._handler_base_name(action["enter"], handler_target))
        methods.append(Method(name=enter_name, body=enter_stmts, is_handler=True))
        on_statements.append(Statement(op="on", selector=binding_selector,
                                       event=enter_event, method=enter_name))
        if action.get("exit"):
            exit_stmts = self._handler_statements(action["exit"], task.index)
            exit_name = self._method_name(self._handler_base_name(action["exit"], handler_target))
            methods.append(Method(name=exit_name, body=exit_stmts, is_handler=True))
            on_statements.append(Statement(op="on", selector=binding_selector,
                                           event=exit_event, method=exit_name))
        setup = Method(
            name=self._method_name(f"Setup{_camel(action['family'])}Trigger{_camel(binding_selector)}"),
            body=on_statements, description=task.description)
        methods.append(setup)
        return methods


def compile_plan(plan: TaskPlan, context: PromptContext, scene: Scene,
                 catalog: Catalog | None = None, thresholds: Thresholds | None = None,
                 session: SessionView | None = None) -> CompiledProgram:
    if plan.instruction is None:
        raise CompileError("a null plan cannot be compiled", 0)
    compiler = Compiler(scene, context, catalog, thresholds, session)
    methods: list[Method] = []
    for task in plan.tasks:
        methods.extend(compiler.lower_task(task))

    first = plan.tasks[0]
    sel = first.action.get("selector") or first.action.get("target")
    topic = first.action.get("kind") or (
        (sel.kind or sel.name or "object") if isinstance(sel, Selector) else first.action["op"])
    base = f"{first.type}{_camel(topic)}Plan"
    used = (session or NullSessionView()).used_program_names() | compiler.method_names
    name = base
    n = 1
    while name in used:
        n += 1
        name = f"{base}{n}"

    program = SolProgram(name=name, methods=methods)
    program.source_text = print_program(program)
    for m in program.methods:
        if not m.description:
            m.description = "; ".join(
                line.strip() for line in print_method(m, 0)[1:-1]) or m.name
        if not m.explanation:
            m.explanation = summarize_body(m.body, program)

    report = validate(program, scene)
    if not report.ok:
        raise CompileError("compiled program failed validation:\n" + report.format(), 0)
    return CompiledProgram(program=program, envelope=program.to_envelope(), source=program.source_text)
