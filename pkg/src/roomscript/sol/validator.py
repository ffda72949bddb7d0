"""SOL static validation against a scene, the catalog, and the trigger vocabulary.

The validator is the guard-rail core: it resolves every identifier, checks
every range, and rejects hallucinated operations/methods before anything can
execute. A program that validates ok cannot hit UnknownObject/UnknownMethod/
range failures against the validation-time scene.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..catalog import PALETTE
from ..scene import WALL_IDS, Scene
from ..triggers import EVENT_NAMES
from .ast import Method, Placement, SolProgram, Statement, ValueExpr


@dataclass(frozen=True)
class Issue:
    severity: str  # error | warning
    code: str
    line: int
    col: int
    message: str

    def format(self) -> str:
        return f"{self.line}:{self.col} {self.code}: {self.message}"


@dataclass
class ValidationReport:
    issues: list[Issue] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not any(i.severity == "error" for i in self.issues)

    def errors(self) -> list[Issue]:
        return [i for i in self.issues if i.severity == "error"]

    def format(self) -> str:
        return "\n".join(i.format() for i in self.issues) or "ok"

    def to_doc(self) -> dict:
        return {
            "ok": self.ok,
            "issues": [
                {"severity": i.severity, "code": i.code, "line": i.line,
                 "col": i.col, "message": i.message}
                for i in self.issues
            ],
        }


class _Env:
    """Names visible at a given point of validation."""

    def __init__(self, scene: Scene):
        self.scene = scene
        self.catalog = scene.catalog
        self.names: dict[str, str] = {o.name: o.kind for o in scene.objects}

    def add(self, name: str, kind: str) -> None:
        self.names[name] = kind

    def has_name(self, name: str) -> bool:
        return name in self.names

    def kind_instances(self, term: str) -> int:
        count = 0
        for kind in self.names.values():
            if kind == term:
                count += 1
            elif self.catalog.has(kind) and self.catalog.get(kind).category == term:
                count += 1
        return count


class _Validator:
    def __init__(self, program: SolProgram, scene: Scene,
                 known_handlers: set[str] | None = None):
        self.program = program
        self.env = _Env(scene)
        self.known_handlers = known_handlers or set()
        self.issues: list[Issue] = []
        self.method_names = {m.name for m in program.methods}
        self.atalltimes_bound = {
            s.method
            for m in program.methods
            for s in _walk(m.body)
            if s.op == "on" and s.event == "AtAllTimes"
        }
        self.otherwise_bound = {
            s.method
            for m in program.methods
            for s in _walk(m.body)
            if s.op == "on" and s.event != "AtAllTimes"
        }

    def error(self, code: str, stmt_or_method, message: str) -> None:
        self.issues.append(Issue("error", code, stmt_or_method.line, stmt_or_method.col, message))

    # -- helpers ----------------------------------------------------------

    def check_selector(self, sel: str, stmt: Statement, in_handler: bool) -> None:
        if sel == "self":
            if not in_handler:
                self.error("TypeError", stmt, "'self' is only meaningful inside a handler")
            return
        if sel == "all":
            return
        if self.env.has_name(sel):
            return
        if self.env.catalog.has(sel) or sel in self.env.catalog.categories:
            if self.env.kind_instances(sel) == 0:
                self.error("UnknownObject", stmt, f"no {sel} exists in the scene")
            return
        self.error("UnknownObject", stmt, f"no object, kind, or category named {sel!r}")

    def check_placement(self, p: Placement, stmt: Statement, in_handler: bool,
                        subject_kind: str | None = None) -> None:
        if p.ref is not None:
            self.check_selector(p.ref, stmt, in_handler)
        for wall in (p.wall, p.wall2):
            if wall is not None and wall not in WALL_IDS:
                self.error("RangeError", stmt, f"unknown wall {wall!r}")
        if p.tag == "at_point" and p.point is not None:
            x, _, z = p.point
            room = self.env.scene.room
            if abs(x) > room.width / 2 + 1e-9 or abs(z) > room.depth / 2 + 1e-9:
                self.error("RangeError", stmt, f"point ({x}, {z}) lies outside the room")
        if p.tag == "on_wall" and subject_kind is not None and self.env.catalog.has(subject_kind):
            if not self.env.catalog.get(subject_kind).wall_mountable:
                self.error("TypeError", stmt, f"{subject_kind} cannot be mounted on a wall")

    def check_value(self, prop: str, value: ValueExpr, stmt: Statement) -> None:
        if prop == "luminousIntensity" and value.tag == "number":
            if not (1.0 <= value.number <= 10.0):
                self.error("RangeError", stmt,
                           f"luminousIntensity {value.number:g} outside [1, 10]")
        elif value.tag == "rgba":
            for ch in value.numbers:
                if not (0.0 <= ch <= 1.0):
                    self.error("RangeError", stmt, f"color channel {ch:g} outside [0, 1]")
        elif value.tag == "color":
            if value.color not in PALETTE:
                self.error("RangeError", stmt, f"unknown color name {value.color!r}")
        elif value.tag in ("scale", "scale_w", "scale_h", "scale_d"):
            if value.number <= 0:
                self.error("RangeError", stmt, f"scale factor {value.number:g} must be positive")
        elif value.tag == "dims":
            if any(n <= 0 for n in value.numbers):
                self.error("RangeError", stmt, "size components must be positive")

    # -- statement walk -----------------------------------------------------

    def check_statement(self, stmt: Statement, method: Method) -> None:
        in_handler = method.is_handler
        if stmt.op == "unknown":
            self.error("UnknownOp", stmt, f"unknown operation: {stmt.raw}")
            return
        if stmt.op == "create":
            if not self.env.catalog.has(stmt.kind):
                self.error("UnknownKind", stmt, f"unknown object kind {stmt.kind!r}")
            if stmt.name is not None:
                if self.env.has_name(stmt.name):
                    self.error("NameCollision", stmt,
                               f"an object named {stmt.name!r} already exists")
                else:
                    self.env.add(stmt.name, stmt.kind)
            elif self.env.catalog.has(stmt.kind):
                # auto-named object becomes visible to later statements by kind
                auto = self.env.scene.peek_auto_names(stmt.kind, 1, set(self.env.names))[0]
                self.env.add(auto, stmt.kind)
            if stmt.placement is not None:
                self.check_placement(stmt.placement, stmt, in_handler, stmt.kind)
            return
        if stmt.op == "grid":
            if not self.env.catalog.has(stmt.kind):
                self.error("UnknownKind", stmt, f"unknown object kind {stmt.kind!r}")
            if stmt.rows < 1 or stmt.cols < 1:
                self.error("RangeError", stmt, f"grid needs rows, cols >= 1, got {stmt.rows}x{stmt.cols}")
            if stmt.wall is not None:
                if stmt.wall not in WALL_IDS:
                    self.error("RangeError", stmt, f"unknown wall {stmt.wall!r}")
                elif self.env.catalog.has(stmt.kind) and not self.env.catalog.get(stmt.kind).wall_mountable:
                    self.error("TypeError", stmt, f"{stmt.kind} cannot be mounted on a wall")
            if self.env.catalog.has(stmt.kind) and stmt.rows >= 1 and stmt.cols >= 1:
                for auto in self.env.scene.peek_auto_names(
                        stmt.kind, stmt.rows * stmt.cols, set(self.env.names)):
                    self.env.add(auto, stmt.kind)
            return
        if stmt.op == "set":
            self.check_selector(stmt.selector, stmt, in_handler)
            self.check_value(stmt.prop, stmt.value, stmt)
            return
        if stmt.op == "moveTo":
            self.check_selector(stmt.selector, stmt, in_handler)
            kind = self.env.names.get(stmt.selector, stmt.selector)
            self.check_placement(stmt.placement, stmt, in_handler,
                                 kind if self.env.catalog.has(kind) else None)
            return
        if stmt.op == "restore":
            self.check_selector(stmt.selector, stmt, in_handler)
            return
        if stmt.op in ("on", "off"):
            self.check_selector(stmt.selector, stmt, in_handler)
            if stmt.event not in EVENT_NAMES:
                self.error("UnknownOp", stmt, f"unknown trigger event {stmt.event!r}")
            if stmt.method not in self.method_names and stmt.method not in self.known_handlers:
                self.error("UnknownMethod", stmt, f"method {stmt.method!r} is not defined")
            return
        if stmt.op == "toggle":
            self.check_selector(stmt.selector, stmt, in_handler)
            return
        if stmt.op == "when":
            if not in_handler:
                self.error("TypeError", stmt,
                           "when-statements are only legal inside AtAllTimes handlers")
            elif method.name in self.otherwise_bound:
                self.error("TypeError", stmt,
                           f"method {method.name!r} contains a when-statement but is bound "
                           "to a non-AtAllTimes event")
            if stmt.orelse is None:
                self.error("WhenWithoutElse", stmt, "every when must have an else branch")
            _, sel = stmt.predicate
            self.check_selector(sel, stmt, in_handler)
            for inner in stmt.then:
                self.check_statement(inner, method)
            for inner in stmt.orelse or []:
                self.check_statement(inner, method)
            return

    def run(self) -> ValidationReport:
        if any(m.name == self.program.name for m in self.program.methods):
            self.issues.append(Issue(
                "error", "NameCollision", self.program.line, self.program.col,
                f"the program name {self.program.name!r} must differ from every method name",
            ))
        seen = set()
        for m in self.program.methods:
            if m.name in seen:
                self.issues.append(Issue("error", "NameCollision", m.line, m.col,
                                         f"duplicate method name {m.name!r}"))
            seen.add(m.name)

        # entry methods execute in declaration order and grow the name space;
        # handlers run later and see every creation in the program
        for m in self.program.entry_methods():
            for stmt in m.body:
                self.check_statement(stmt, m)
        for m in self.program.handler_methods():
            for stmt in m.body:
                self.check_statement(stmt, m)

        self.issues.sort(key=lambda i: (i.line, i.col, i.code))
        return ValidationReport(self.issues)


def _walk(statements: list[Statement]):
    for s in statements:
        yield s
        if s.op == "when":
            yield from _walk(s.then)
            if s.orelse:
                yield from _walk(s.orelse)


def validate(program: SolProgram, scene: Scene,
             known_handlers: set[str] | None = None) -> ValidationReport:
    return _Validator(program, scene, known_handlers).run()
