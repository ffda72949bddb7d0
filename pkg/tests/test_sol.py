import json

import pytest
from hypothesis import given, settings, strategies as st

from roomscript import sol
from roomscript.errors import NoHistory, RuntimeFailure, SolParseError
from roomscript.geometry import Vec3
from roomscript.pose import UserPose
from roomscript.scene import Scene
from roomscript.sol.ast import Method, Placement, SolProgram, Statement, ValueExpr
from roomscript.sol.printer import print_program


def make_scene():
    scene = Scene()
    scene.create_object("table", overrides={"position": Vec3(0, 0, 0)})
    scene.create_object("lamp", overrides={"position": Vec3(0, 2, 0)})
    scene.create_object("cabinet", name="cabinet-1", overrides={"position": Vec3(1.5, 0, 1.5)})
    return scene


class TestParse:
    def test_minimal_program(self):
        prog = sol.parse("program P { method m { create table } }")
        assert prog.name == "P"
        assert [s.op for s in prog.methods[0].body] == ["create"]

    def test_comments_and_whitespace_insensitive(self):
        src = "program P{// a comment\nmethod m{create    table//x\n}}"
        prog = sol.parse(src)
        assert prog.methods[0].body[0].kind == "table"

    def test_parse_error_carries_location_and_expectation(self):
        with pytest.raises(SolParseError) as err:
            sol.parse("program P { method m { set } }")
        assert err.value.line == 1
        assert err.value.col > 0
        assert err.value.expected

    def test_when_without_else_parses(self):
        prog = sol.parse(
            "program P { handler h { when near(user, table-1) { moveTo table-1 away_from_user } } }")
        stmt = prog.methods[0].body[0]
        assert stmt.op == "when" and stmt.orelse is None

    def test_unknown_op_is_captured_not_fatal(self):
        prog = sol.parse("program P { method m { Teleport ( cube , 1 2 3 ) create table } }")
        ops = [s.op for s in prog.methods[0].body]
        assert ops == ["unknown", "create"]

    def test_trailing_garbage_rejected(self):
        with pytest.raises(SolParseError):
            sol.parse("program P { method m { create table } } extra")


class TestValidate:
    def test_ok_program(self):
        scene = make_scene()
        prog = sol.parse("program Levitation { method Lift { set cabinet-1 levitated true } }")
        assert sol.validate(prog, scene).ok

    def test_name_collision_program_method(self):
        scene = make_scene()
        prog = sol.parse("program P { method P { create table } }")
        report = sol.validate(prog, scene)
        assert not report.ok
        assert any(i.code == "NameCollision" for i in report.issues)

    def test_when_without_else_flagged(self):
        scene = make_scene()
        prog = sol.parse(
            "program P { handler H { when near(user, table-1) { toggle table-1 illuminated } } "
            "method M { on table-1 AtAllTimes H } }")
        report = sol.validate(prog, scene)
        assert any(i.code == "WhenWithoutElse" for i in report.issues)

    def test_unknown_method_is_hallucination_detector(self):
        scene = make_scene()
        prog = sol.parse("program P { method M { on table-1 OnPointEnter FlyAway } }")
        report = sol.validate(prog, scene)
        assert any(i.code == "UnknownMethod" for i in report.issues)

    def test_unknown_op_reported_with_location(self):
        scene = make_scene()
        prog = sol.parse("program P { method M { Teleport ( lamp-1 ) } }")
        report = sol.validate(prog, scene)
        issue = [i for i in report.issues if i.code == "UnknownOp"][0]
        assert "Teleport" in issue.message and issue.line == 1

    def test_range_error_intensity(self):
        scene = make_scene()
        prog = sol.parse("program P { method M { set lamp-1 luminousIntensity 12 } }")
        report = sol.validate(prog, scene)
        assert any(i.code == "RangeError" for i in report.issues)

    def test_unknown_object_and_kind(self):
        scene = make_scene()
        report = sol.validate(sol.parse("program P { method M { set ghost color red } }"), scene)
        assert any(i.code == "UnknownObject" for i in report.issues)
        report = sol.validate(sol.parse("program P { method M { create throne } }"), scene)
        assert any(i.code == "UnknownKind" for i in report.issues)

    def test_created_names_visible_to_later_statements(self):
        scene = Scene()
        prog = sol.parse(
            "program P { method M { create table as t1  create lamp as l1 at on_top_of t1 } }")
        assert sol.validate(prog, scene).ok

    def test_unknown_event_flagged(self):
        scene = make_scene()
        prog = sol.parse("program P { handler H { toggle self illuminated } "
                         "method M { on lamp-1 OnWiggle H } }")
        report = sol.validate(prog, scene)
        assert any(i.code == "UnknownOp" for i in report.issues)

    def test_issues_ordered_by_location(self):
        scene = make_scene()
        src = "program P {\n method M {\n set ghost color red\n create throne\n } }"
        report = sol.validate(sol.parse(src), scene)
        lines = [i.line for i in report.issues]
        assert lines == sorted(lines)


class TestExecute:
    def test_execute_requires_validated_handle(self):
        scene = make_scene()
        prog = sol.parse("program P { method M { create table } }")
        interp = sol.Interpreter(scene)
        with pytest.raises(TypeError):
            interp.execute(prog)

    def test_create_table_then_lamp_on_top(self):
        scene = Scene()
        src = ("program TableLamp { method Build { "
               "create table as t1  create lamp as l1 at on_top_of t1 } }")
        vp = sol.ValidatedProgram.check(sol.parse(src), scene)
        sol.Interpreter(scene).execute(vp)
        assert scene.get("l1").position.y == scene.get("t1").size.y

    def test_empty_program_empty_delta(self):
        scene = make_scene()
        vp = sol.ValidatedProgram.check(sol.parse("program P { method M { } }"), scene)
        result = sol.Interpreter(scene).execute(vp)
        assert result.delta == {}

    def test_runtime_failure_rolls_back_everything(self):
        scene = make_scene()
        # validates against a scene where cabinet-1 exists, then the scene changes
        src = ("program P { handler H { toggle self illuminated } method M { "
               "create cube as c1  on cabinet-1 OnPointEnter H  set ghost color red } }")
        prog = sol.parse(src)
        report = sol.validate(prog, scene)
        assert not report.ok  # ghost is unknown statically too; bypass via direct handle
        # build a program that passes validation, then break the scene before running
        src2 = ("program P2 { handler H { toggle self illuminated } method M { "
                "create cube as c1  on cabinet-1 OnPointEnter H  moveTo cabinet-1 on_top_of c1 "
                "set cabinet-1 luminousIntensity 9 } }")
        vp = sol.ValidatedProgram.check(sol.parse(src2), scene)
        interp = sol.Interpreter(scene)
        before = scene.snapshot().canonical()
        with pytest.raises(RuntimeFailure):
            interp.execute(vp, inject_fault_at=3)
        assert scene.snapshot().canonical() == before
        assert "P2.H" not in interp.handlers

    def test_fault_sweep_all_positions(self):
        src = ("program Sweep { handler Glow { set self illuminated true } method Build { "
               "create table as t  create lamp as l at on_top_of t  "
               "on l OnTouchEnter Glow  set l color yellow  toggle l levitated } }")
        total = len(sol.parse(src).methods[1].body)
        for fault_at in range(total):
            scene = Scene()
            vp = sol.ValidatedProgram.check(sol.parse(src), scene)
            interp = sol.Interpreter(scene)
            before = scene.snapshot().canonical()
            with pytest.raises(RuntimeFailure):
                interp.execute(vp, inject_fault_at=fault_at)
            assert scene.snapshot().canonical() == before, f"fault at {fault_at}"

    def test_on_duplicate_binding_is_noop(self):
        scene = make_scene()
        src = ("program Dup { handler Red { set self color red } method M { "
               "on lamp-1 OnPointEnter Red  on lamp-1 OnPointEnter Red } }")
        vp = sol.ValidatedProgram.check(sol.parse(src), scene)
        sol.Interpreter(scene).execute(vp)
        assert len(scene.triggers) == 1

    def test_restore_without_history_fails_cleanly(self):
        scene = make_scene()
        vp = sol.ValidatedProgram.check(
            sol.parse("program R { method M { restore lamp-1 original } }"), scene)
        interp = sol.Interpreter(scene)
        before = scene.snapshot().canonical()
        with pytest.raises(RuntimeFailure) as err:
            interp.execute(vp)
        assert isinstance(err.value.cause, NoHistory)
        assert scene.snapshot().canonical() == before

    def test_when_branches(self):
        scene = make_scene()
        src = ("program W { handler Check { when near(user, table-1) "
               "{ set table-1 illuminated true } else { set table-1 illuminated false } } "
               "method M { on table-1 AtAllTimes Check } }")
        vp = sol.ValidatedProgram.check(sol.parse(src), scene)
        interp = sol.Interpreter(scene)
        interp.execute(vp)
        from roomscript.triggers import TriggerEngine

        engine = TriggerEngine(scene, handlers=interp.handlers)
        scene.user_pose = UserPose(position=Vec3(0, 0, -0.8))
        engine.tick(scene.user_pose)
        assert scene.get("table-1").illuminated is True
        scene.user_pose = UserPose(position=Vec3(0, 0, -1.9))
        engine.tick(scene.user_pose)
        assert scene.get("table-1").illuminated is False

    def test_statement_deltas_recorded(self):
        scene = Scene()
        src = "program D { method M { create cube as c1  set c1 color red } }"
        vp = sol.ValidatedProgram.check(sol.parse(src), scene)
        result = sol.Interpreter(scene).execute(vp)
        assert len(result.statement_deltas) == 2
        assert result.statement_deltas[0]["op"] == "create"


class TestExplain:
    def test_single_create_sentence(self):
        prog = sol.parse("program P { method M { create table } }")
        out = sol.explain(prog)
        assert out[-1]["plainLanguage"] == "Creates a table in front of you."

    def test_touch_toggle_mentions_trigger_and_light(self):
        src = ("program L { handler On { set lamp-1 illuminated true } "
               "method M { on lamp-1 OnTouchEnter On } }")
        out = sol.explain(sol.parse(src))
        text = out[-1]["plainLanguage"]
        assert "touch" in text and "light" in text

    def test_totality_every_method_nonempty(self):
        src = "program T { handler H { } method A { } method B { grid lamp 2 2 on north } }"
        out = sol.explain(sol.parse(src))
        assert len(out) == 3
        assert all(entry["plainLanguage"] for entry in out)

    def test_two_methods_in_order(self):
        src = "program T { method A { create cube } method B { create table } }"
        out = sol.explain(sol.parse(src))
        assert [e["methodName"] for e in out] == ["A", "B"]


class TestEnvelope:
    def test_field_names_bit_compatible(self):
        src = "program Env { handler H { } method M { create cube } }"
        prog = sol.parse(src)
        prog.source_text = src
        for m in prog.methods:
            m.description = "d"
            m.explanation = "e"
        env = prog.to_envelope()
        assert list(env) == ["ClassName", "Methods", "SourceCode"]
        assert list(env["Methods"][0]) == ["MethodName", "Description", "Explanation"]
        # handlers are not listed in the envelope
        assert [m["MethodName"] for m in env["Methods"]] == ["M"]
        json.loads(prog.to_envelope_json())


# -- parse/print round trip ------------------------------------------------------

idents = st.sampled_from(["table-1", "lamp-1", "cube", "chair", "self", "all"])
walls = st.sampled_from(["north", "south", "east", "west"])
numbers = st.floats(min_value=-10, max_value=10, allow_nan=False,
                    allow_infinity=False).map(lambda x: round(x, 3))

placements = st.one_of(
    st.builds(Placement, tag=st.sampled_from(
        ["in_front_of_user", "behind_user", "left_of_user", "right_of_user", "center_of_room"])),
    st.builds(Placement, tag=st.sampled_from(["in_front_of", "next_to", "on_top_of", "align_y"]),
              ref=idents),
    st.builds(Placement, tag=st.sampled_from(["against_wall", "on_wall"]), wall=walls),
    st.builds(Placement, tag=st.just("corner"), wall=walls, wall2=walls),
    st.builds(Placement, tag=st.just("at_point"),
              point=st.tuples(numbers, numbers, numbers)),
    st.builds(Placement, tag=st.just("away_from_user"),
              distance=st.one_of(st.none(), numbers.map(abs))),
)

values = st.one_of(
    st.builds(ValueExpr, tag=st.just("point"), numbers=st.tuples(numbers, numbers, numbers)),
    st.builds(ValueExpr, tag=st.sampled_from(["yaw", "spin", "scale", "scale_w", "scale_h",
                                              "scale_d"]), number=numbers),
    st.builds(ValueExpr, tag=st.just("dims"), numbers=st.tuples(numbers, numbers, numbers)),
    st.builds(ValueExpr, tag=st.just("rgba"),
              numbers=st.tuples(numbers.map(abs), numbers.map(abs), numbers.map(abs),
                                numbers.map(abs))),
    st.builds(ValueExpr, tag=st.just("color"), color=st.sampled_from(["red", "blue", "white"])),
    st.builds(ValueExpr, tag=st.just("bool"), flag=st.booleans()),
    st.builds(ValueExpr, tag=st.just("number"), number=numbers),
)

_prop_for_value = {
    "point": "position", "yaw": "rotation", "spin": "rotation",
    "scale": "size", "scale_w": "size", "scale_h": "size", "scale_d": "size",
    "dims": "size", "rgba": "color", "color": "color", "bool": "illuminated",
    "number": "luminousIntensity",
}


def _set_statement(value: ValueExpr, selector: str) -> Statement:
    return Statement(op="set", selector=selector, prop=_prop_for_value[value.tag], value=value)


statements = st.one_of(
    st.builds(Statement, op=st.just("create"),
              kind=st.sampled_from(["table", "lamp", "cube"]),
              name=st.one_of(st.none(), st.just("obj-1")),
              placement=st.one_of(st.none(), placements)),
    st.builds(Statement, op=st.just("grid"), kind=st.just("lamp"),
              rows=st.integers(1, 4), cols=st.integers(1, 4),
              wall=st.one_of(st.none(), walls)),
    st.builds(_set_statement, values, idents),
    st.builds(Statement, op=st.just("moveTo"), selector=idents, placement=placements),
    st.builds(Statement, op=st.just("restore"), selector=idents,
              checkpoint=st.sampled_from(["original", "previous"])),
    st.builds(Statement, op=st.sampled_from(["on", "off"]), selector=idents,
              event=st.sampled_from(["OnPointEnter", "AtAllTimes", "OnNearExit"]),
              method=st.just("Handler1")),
    st.builds(Statement, op=st.just("toggle"), selector=idents,
              prop=st.sampled_from(["illuminated", "levitated"])),
)

whens = st.builds(
    Statement, op=st.just("when"),
    predicate=st.tuples(st.sampled_from(["near", "touching", "looking_at",
                                         "pointing_at", "holding"]), idents),
    then=st.lists(statements, max_size=2),
    orelse=st.one_of(st.none(), st.lists(statements, max_size=2)),
)

methods = st.builds(
    Method,
    name=st.sampled_from(["MethodA", "MethodB", "Handler1"]),
    body=st.lists(st.one_of(statements, whens), max_size=4),
    is_handler=st.booleans(),
)

programs = st.builds(
    SolProgram,
    name=st.just("GeneratedProgram"),
    methods=st.lists(methods, min_size=1, max_size=3),
)


def _strip(program: SolProgram) -> list:
    out = []
    for m in program.methods:
        out.append((m.name, m.is_handler, [_strip_stmt(s) for s in m.body]))
    return out


def _strip_stmt(s: Statement):
    return (
        s.op, s.kind, s.name, s.selector, s.prop,
        (s.value.tag, s.value.number, s.value.numbers, s.value.color, s.value.flag)
        if s.value else None,
        (s.placement.tag, s.placement.ref, s.placement.wall, s.placement.wall2,
         s.placement.point, s.placement.distance) if s.placement else None,
        s.rows, s.cols, s.wall, s.event, s.method, s.checkpoint, s.predicate,
        [_strip_stmt(x) for x in s.then],
        [_strip_stmt(x) for x in s.orelse] if s.orelse is not None else None,
    )


@settings(max_examples=150, deadline=None)
@given(programs)
def test_parse_print_round_trip(program):
    printed = print_program(program)
    reparsed = sol.parse(printed)
    assert _strip(reparsed) == _strip(program)
    assert print_program(reparsed) == printed
