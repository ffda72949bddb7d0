"""Canonical SOL pretty-printer (the inverse of parse, up to formatting)."""

from __future__ import annotations

from .ast import Method, Placement, SolProgram, Statement, ValueExpr


def _fmt_num(x: float) -> str:
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(round(float(x), 9))


def _fmt_placement(p: Placement) -> str:
    if p.ref is not None:
        return f"{p.tag} {p.ref}"
    if p.tag == "corner":
        return f"corner {p.wall} {p.wall2}"
    if p.wall is not None:
        return f"{p.tag} {p.wall}"
    if p.tag == "at_point":
        return "at_point " + " ".join(_fmt_num(v) for v in p.point)
    if p.tag == "away_from_user" and p.distance is not None:
        return f"away_from_user {_fmt_num(p.distance)}"
    return p.tag


def _fmt_value(v: ValueExpr) -> str:
    if v.tag == "point":
        return "point " + " ".join(_fmt_num(n) for n in v.numbers)
    if v.tag == "dims":
        return "dims " + " ".join(_fmt_num(n) for n in v.numbers)
    if v.tag == "rgba":
        return "rgba " + " ".join(_fmt_num(n) for n in v.numbers)
    if v.tag == "color":
        return v.color
    if v.tag == "bool":
        return "true" if v.flag else "false"
    if v.tag in ("yaw", "spin", "scale", "scale_w", "scale_h", "scale_d"):
        return f"{v.tag} {_fmt_num(v.number)}"
    return _fmt_num(v.number)


def _fmt_statement(s: Statement, indent: int) -> list[str]:
    pad = "  " * indent
    if s.op == "create":
        text = f"create {s.kind}"
        if s.name:
            text += f" as {s.name}"
        if s.placement:
            text += f" at {_fmt_placement(s.placement)}"
        return [pad + text]
    if s.op == "grid":
        text = f"grid {s.kind} {s.rows} {s.cols}"
        if s.wall:
            text += f" on {s.wall}"
        return [pad + text]
    if s.op == "set":
        return [pad + f"set {s.selector} {s.prop} {_fmt_value(s.value)}"]
    if s.op == "moveTo":
        return [pad + f"moveTo {s.selector} {_fmt_placement(s.placement)}"]
    if s.op == "restore":
        return [pad + f"restore {s.selector} {s.checkpoint}"]
    if s.op in ("on", "off"):
        return [pad + f"{s.op} {s.selector} {s.event} {s.method}"]
    if s.op == "toggle":
        return [pad + f"toggle {s.selector} {s.prop}"]
    if s.op == "when":
        pred, sel = s.predicate
        lines = [pad + f"when {pred}(user, {sel}) {{"]
        for inner in s.then:
            lines.extend(_fmt_statement(inner, indent + 1))
        lines.append(pad + "}")
        if s.orelse is not None:
            lines.append(pad + "else {")
            for inner in s.orelse:
                lines.extend(_fmt_statement(inner, indent + 1))
            lines.append(pad + "}")
        return lines
    return [pad + (s.raw or s.op)]


def print_method(m: Method, indent: int = 1) -> list[str]:
    pad = "  " * indent
    head = "handler" if m.is_handler else "method"
    lines = [pad + f"{head} {m.name} {{"]
    for s in m.body:
        lines.extend(_fmt_statement(s, indent + 1))
    lines.append(pad + "}")
    return lines


def print_program(program: SolProgram) -> str:
    lines = [f"program {program.name} {{"]
    for m in program.methods:
        lines.extend(print_method(m))
    lines.append("}")
    return "\n".join(lines) + "\n"
