"""Plain-language explanations of SOL methods for the staged feedback panel."""

from __future__ import annotations

from .ast import Method, Placement, SolProgram, Statement

_EVENT_PHRASES = {
    "OnPointEnter": "you point at",
    "OnPointExit": "you stop pointing at",
    "WhilePointing": "while you point at",
    "OnLookEnter": "you look at",
    "OnLookExit": "you look away from",
    "WhileLooking": "while you look at",
    "OnHoldEnter": "you grab",
    "OnHoldExit": "you let go of",
    "WhileHolding": "while you hold",
    "OnTouchEnter": "you touch",
    "OnTouchExit": "you stop touching",
    "WhileTouching": "while you touch",
    "OnNearEnter": "you get near",
    "OnNearExit": "you move away from",
    "WhileNear": "while you are near",
    "AtAllTimes": "at all times",
}


def _sel_phrase(sel: str | None) -> str:
    if sel in (None, "self"):
        return "it"
    if sel == "all":
        return "everything"
    return f"the {sel}"


def placement_phrase(p: Placement | None) -> str:
    if p is None:
        return "in front of you"
    tag = p.tag
    if tag == "in_front_of_user":
        return "in front of you"
    if tag == "behind_user":
        return "behind you"
    if tag == "left_of_user":
        return "to your left"
    if tag == "right_of_user":
        return "to your right"
    if tag == "in_front_of":
        return f"in front of the {p.ref}"
    if tag == "behind":
        return f"behind the {p.ref}"
    if tag == "next_to":
        return f"next to the {p.ref}"
    if tag == "near":
        return f"near the {p.ref}"
    if tag == "on_top_of":
        return f"on top of the {p.ref}"
    if tag == "align_y":
        return f"level with the {p.ref}"
    if tag == "against_wall":
        return f"against the {p.wall} wall"
    if tag == "on_wall":
        return f"on the {p.wall} wall"
    if tag == "center_of_room":
        return "in the middle of the room"
    if tag == "corner":
        return f"in the {p.wall}-{p.wall2} corner"
    if tag == "at_point":
        return "at the spot you pointed at"
    if tag == "away_from_user":
        return "away from you"
    return tag


def _num(x: float) -> str:
    return f"{x:g}"


def _statement_sentence(s: Statement, program: SolProgram) -> str:
    if s.op == "create":
        return f"Creates a {s.kind} {placement_phrase(s.placement)}."
    if s.op == "grid":
        where = f" on the {s.wall} wall" if s.wall else " on the floor"
        return f"Creates a {s.rows} by {s.cols} grid of {s.kind}s{where}."
    if s.op == "set":
        sel = _sel_phrase(s.selector)
        v = s.value
        if s.prop == "illuminated":
            return f"Turns {sel} {'on' if v.flag else 'off'} as a light."
        if s.prop == "levitated":
            return f"Makes {sel} float in the air." if v.flag else f"Sets {sel} back down."
        if s.prop == "color":
            name = v.color if v.tag == "color" else "a custom color"
            return f"Changes the color of {sel} to {name}."
        if s.prop == "size":
            if v.tag == "scale":
                if v.number > 1:
                    return f"Makes {sel} {_num(v.number)} times bigger."
                return f"Makes {sel} smaller."
            if v.tag == "scale_w":
                return f"Makes {sel} {'wider' if v.number > 1 else 'narrower'}."
            if v.tag == "scale_h":
                return f"Makes {sel} {'taller' if v.number > 1 else 'shorter'}."
            if v.tag == "scale_d":
                return f"Makes {sel} {'deeper' if v.number > 1 else 'shallower'}."
            return f"Resizes {sel}."
        if s.prop == "rotation":
            if v.tag == "spin":
                return f"Spins {sel} by {_num(v.number)} degrees."
            return f"Rotates {sel} to {_num(v.number)} degrees."
        if s.prop == "luminousIntensity":
            return f"Sets the brightness of {sel} to {_num(v.number)}."
        return f"Moves {sel} to a fixed spot."
    if s.op == "moveTo":
        return f"Moves {_sel_phrase(s.selector)} {placement_phrase(s.placement)}."
    if s.op == "restore":
        sel = "everything" if s.selector == "all" else _sel_phrase(s.selector)
        if s.checkpoint == "original":
            return f"Puts {sel} back the way it started."
        return f"Puts {sel} back to how it was before the last change."
    if s.op == "on":
        handler = program.method(s.method)
        effect = summarize_body(handler.body, program) if handler else "something happens"
        phrase = _EVENT_PHRASES.get(s.event, s.event)
        if s.event == "AtAllTimes":
            return f"At all times, {_lower(effect)}"
        return f"When {phrase} {_sel_phrase(s.selector)}, {_lower(effect)}"
    if s.op == "off":
        phrase = _EVENT_PHRASES.get(s.event, s.event)
        return f"Stops reacting when {phrase} {_sel_phrase(s.selector)}."
    if s.op == "toggle":
        what = "light" if s.prop == "illuminated" else "floating"
        return f"Toggles the {what} of {_sel_phrase(s.selector)}."
    if s.op == "when":
        pred, sel = s.predicate
        then = summarize_body(s.then, program)
        other = summarize_body(s.orelse or [], program)
        nice = {"near": "you are near", "touching": "you are touching",
                "looking_at": "you are looking at", "pointing_at": "you are pointing at",
                "holding": "you are holding"}.get(pred, pred)
        return f"While {nice} {_sel_phrase(sel)}: {_lower(then)} Otherwise: {_lower(other)}"
    return "Does something the engine does not recognize."


def _lower(text: str) -> str:
    return text[:1].lower() + text[1:] if text else "nothing happens."


def summarize_body(body: list[Statement], program: SolProgram) -> str:
    sentences = [_statement_sentence(s, program) for s in body]
    if not sentences:
        return "Performs no visible change."
    return " ".join(sentences)


def explain_method(method: Method, program: SolProgram) -> str:
    if method.explanation:
        return method.explanation
    return summarize_body(method.body, program)


def explain(program: SolProgram) -> list[dict]:
    """One plain-language entry per method, in declaration order."""
    return [
        {"methodName": m.name, "plainLanguage": explain_method(m, program)}
        for m in program.methods
    ]
