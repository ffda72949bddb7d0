"""SOL lexer and recursive-descent parser.

Whitespace-insensitive, `//` comments. Unknown statement keywords parse into
`unknown` nodes so the validator can report them as UnknownOp with a precise
location instead of aborting the whole parse.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import SolParseError
from .ast import Method, Placement, SolProgram, Statement, ValueExpr

STATEMENT_KEYWORDS = {"create", "grid", "set", "moveTo", "restore", "on", "off", "toggle", "when"}
WALLS = {"north", "south", "east", "west"}

PLACEMENT_NO_ARG = {"in_front_of_user", "behind_user", "left_of_user", "right_of_user", "center_of_room"}
PLACEMENT_REF = {"in_front_of", "behind", "next_to", "near", "on_top_of", "align_y"}
PLACEMENT_WALL = {"against_wall", "on_wall"}
PREDICATES = {"near", "touching", "looking_at", "pointing_at", "holding"}
PROPERTIES = {"position", "rotation", "size", "color", "illuminated", "luminousIntensity", "levitated"}


@dataclass(frozen=True)
class Token:
    kind: str  # ident | number | sym | eof
    text: str
    line: int
    col: int


def _lex(source: str) -> list[Token]:
    tokens: list[Token] = []
    line, col, i = 1, 1, 0
    n = len(source)
    while i < n:
        ch = source[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch.isspace():
            i += 1
            col += 1
            continue
        if ch == "/" and i + 1 < n and source[i + 1] == "/":
            while i < n and source[i] != "\n":
                i += 1
            continue
        start_line, start_col = line, col
        if ch in "{}(),":
            tokens.append(Token("sym", ch, start_line, start_col))
            i += 1
            col += 1
            continue
        if ch.isdigit() or (ch == "-" and i + 1 < n and (source[i + 1].isdigit() or source[i + 1] == ".")):
            j = i + 1
            while j < n and (source[j].isdigit() or source[j] == "."):
                j += 1
            text = source[i:j]
            try:
                float(text)
            except ValueError:
                raise SolParseError(f"bad number {text!r}", start_line, start_col, ("number",))
            tokens.append(Token("number", text, start_line, start_col))
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i + 1
            while j < n and (source[j].isalnum() or source[j] in "_-"):
                j += 1
            # a trailing hyphen belongs to the next token, not the ident
            while source[j - 1] == "-":
                j -= 1
            tokens.append(Token("ident", source[i:j], start_line, start_col))
            col += j - i
            i = j
            continue
        raise SolParseError(f"unexpected character {ch!r}", start_line, start_col, ())
    tokens.append(Token("eof", "", line, col))
    return tokens


class _Parser:
    def __init__(self, source: str):
        self.source = source
        self.tokens = _lex(source)
        self.pos = 0

    # -- token helpers -----------------------------------------------------

    def peek(self, offset: int = 0) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def expect(self, kind: str, text: str | None = None, expected: str = "") -> Token:
        tok = self.peek()
        if tok.kind != kind or (text is not None and tok.text != text):
            want = expected or (text if text is not None else kind)
            raise SolParseError(
                f"expected {want}, found {tok.text or 'end of input'!r}",
                tok.line, tok.col, (want,),
            )
        return self.advance()

    def ident(self, expected: str = "identifier") -> str:
        return self.expect("ident", expected=expected).text

    def number(self) -> float:
        return float(self.expect("number", expected="number").text)

    # -- grammar -----------------------------------------------------------

    def program(self) -> SolProgram:
        head = self.expect("ident", "program")
        name = self.ident("program name")
        self.expect("sym", "{")
        methods: list[Method] = []
        while self.peek().text != "}":
            methods.append(self.method())
        self.expect("sym", "}")
        tail = self.peek()
        if tail.kind != "eof":
            raise SolParseError(
                f"unexpected trailing input {tail.text!r}", tail.line, tail.col, ("end of input",)
            )
        return SolProgram(name=name, methods=methods, source_text=self.source,
                          line=head.line, col=head.col)

    def method(self) -> Method:
        tok = self.peek()
        if tok.text not in ("method", "handler"):
            raise SolParseError(
                f"expected 'method' or 'handler', found {tok.text or 'end of input'!r}",
                tok.line, tok.col, ("method", "handler"),
            )
        self.advance()
        name = self.ident("method name")
        self.expect("sym", "{")
        body = self.block_statements()
        self.expect("sym", "}")
        return Method(name=name, body=body, is_handler=(tok.text == "handler"),
                      line=tok.line, col=tok.col)

    def block_statements(self) -> list[Statement]:
        stmts = []
        while self.peek().text != "}" and self.peek().kind != "eof":
            stmts.append(self.statement())
        return stmts

    def statement(self) -> Statement:
        tok = self.peek()
        if tok.kind != "ident":
            raise SolParseError(
                f"expected a statement, found {tok.text or 'end of input'!r}",
                tok.line, tok.col, tuple(sorted(STATEMENT_KEYWORDS)),
            )
        handler = getattr(self, f"_stmt_{tok.text}", None)
        if tok.text in STATEMENT_KEYWORDS and handler is not None:
            self.advance()
            return handler(tok)
        return self._stmt_unknown(tok)

    def _stmt_unknown(self, tok: Token) -> Statement:
        # consume the unknown op and its argument soup for a precise UnknownOp report
        self.advance()
        parts = [tok.text]
        depth = 0
        while True:
            nxt = self.peek()
            if nxt.kind == "eof":
                break
            if nxt.kind == "sym":
                if nxt.text == "(":
                    depth += 1
                elif nxt.text == ")":
                    if depth == 0:
                        break
                    depth -= 1
                elif nxt.text in "{}":
                    break
                parts.append(self.advance().text)
                continue
            if depth == 0 and nxt.kind == "ident" and (
                nxt.text in STATEMENT_KEYWORDS or nxt.text in ("method", "handler", "else")
            ):
                break
            parts.append(self.advance().text)
        return Statement(op="unknown", line=tok.line, col=tok.col, raw=" ".join(parts))

    def _stmt_create(self, tok: Token) -> Statement:
        kind = self.ident("object kind")
        name = None
        placement = None
        if self.peek().text == "as":
            self.advance()
            name = self.ident("object name")
        if self.peek().text == "at":
            self.advance()
            placement = self.placement()
        return Statement(op="create", line=tok.line, col=tok.col, kind=kind,
                         name=name, placement=placement)

    def _stmt_grid(self, tok: Token) -> Statement:
        kind = self.ident("object kind")
        rows = int(self.number())
        cols = int(self.number())
        wall = None
        # "on" opens the wall clause only when a wall name follows; otherwise it
        # starts the next (trigger) statement
        if self.peek().text == "on" and self.peek(1).text in WALLS:
            self.advance()
            wall = self.ident("wall id")
        return Statement(op="grid", line=tok.line, col=tok.col, kind=kind,
                         rows=rows, cols=cols, wall=wall)

    def _stmt_set(self, tok: Token) -> Statement:
        selector = self.ident("selector")
        prop_tok = self.peek()
        prop = self.ident("property")
        if prop not in PROPERTIES:
            raise SolParseError(
                f"unknown property {prop!r}", prop_tok.line, prop_tok.col, tuple(sorted(PROPERTIES))
            )
        value = self.value_for(prop)
        return Statement(op="set", line=tok.line, col=tok.col, selector=selector,
                         prop=prop, value=value)

    def value_for(self, prop: str) -> ValueExpr:
        tok = self.peek()
        if prop == "position":
            self.expect("ident", "point")
            return ValueExpr("point", numbers=(self.number(), self.number(), self.number()))
        if prop == "rotation":
            word = self.ident("'yaw' or 'spin'")
            if word not in ("yaw", "spin"):
                raise SolParseError(f"expected 'yaw' or 'spin', found {word!r}",
                                    tok.line, tok.col, ("yaw", "spin"))
            return ValueExpr(word, number=self.number())
        if prop == "size":
            word = self.ident("size expression")
            if word == "dims":
                return ValueExpr("dims", numbers=(self.number(), self.number(), self.number()))
            if word in ("scale", "scale_w", "scale_h", "scale_d"):
                return ValueExpr(word, number=self.number())
            raise SolParseError(f"expected a size expression, found {word!r}",
                                tok.line, tok.col, ("scale", "scale_w", "scale_h", "scale_d", "dims"))
        if prop == "color":
            if self.peek().text == "rgba":
                self.advance()
                return ValueExpr("rgba", numbers=(self.number(), self.number(),
                                                  self.number(), self.number()))
            return ValueExpr("color", color=self.ident("color name"))
        if prop in ("illuminated", "levitated"):
            word = self.ident("'true' or 'false'")
            if word not in ("true", "false"):
                raise SolParseError(f"expected 'true' or 'false', found {word!r}",
                                    tok.line, tok.col, ("true", "false"))
            return ValueExpr("bool", flag=(word == "true"))
        # luminousIntensity
        return ValueExpr("number", number=self.number())

    def _stmt_moveTo(self, tok: Token) -> Statement:  # noqa: N802 - keyword spelling
        selector = self.ident("selector")
        placement = self.placement()
        return Statement(op="moveTo", line=tok.line, col=tok.col, selector=selector,
                         placement=placement)

    def _stmt_restore(self, tok: Token) -> Statement:
        selector = self.ident("selector")
        cp_tok = self.peek()
        checkpoint = self.ident("'original' or 'previous'")
        if checkpoint not in ("original", "previous"):
            raise SolParseError(f"expected 'original' or 'previous', found {checkpoint!r}",
                                cp_tok.line, cp_tok.col, ("original", "previous"))
        return Statement(op="restore", line=tok.line, col=tok.col, selector=selector,
                         checkpoint=checkpoint)

    def _stmt_on(self, tok: Token) -> Statement:
        selector = self.ident("selector")
        event = self.ident("event name")
        method = self.ident("method name")
        return Statement(op="on", line=tok.line, col=tok.col, selector=selector,
                         event=event, method=method)

    def _stmt_off(self, tok: Token) -> Statement:
        selector = self.ident("selector")
        event = self.ident("event name")
        method = self.ident("method name")
        return Statement(op="off", line=tok.line, col=tok.col, selector=selector,
                         event=event, method=method)

    def _stmt_toggle(self, tok: Token) -> Statement:
        selector = self.ident("selector")
        prop_tok = self.peek()
        prop = self.ident("boolean property")
        if prop not in ("illuminated", "levitated"):
            raise SolParseError(f"toggle needs a boolean property, found {prop!r}",
                                prop_tok.line, prop_tok.col, ("illuminated", "levitated"))
        return Statement(op="toggle", line=tok.line, col=tok.col, selector=selector, prop=prop)

    def _stmt_when(self, tok: Token) -> Statement:
        pred_tok = self.peek()
        pred = self.ident("predicate")
        if pred not in PREDICATES:
            raise SolParseError(f"unknown predicate {pred!r}", pred_tok.line, pred_tok.col,
                                tuple(sorted(PREDICATES)))
        self.expect("sym", "(")
        self.expect("ident", "user")
        self.expect("sym", ",")
        selector = self.ident("selector")
        self.expect("sym", ")")
        self.expect("sym", "{")
        then = self.block_statements()
        self.expect("sym", "}")
        orelse = None
        if self.peek().text == "else":
            self.advance()
            self.expect("sym", "{")
            orelse = self.block_statements()
            self.expect("sym", "}")
        return Statement(op="when", line=tok.line, col=tok.col,
                         predicate=(pred, selector), then=then, orelse=orelse)

    def placement(self) -> Placement:
        tok = self.peek()
        word = self.ident("placement")
        if word in PLACEMENT_NO_ARG:
            return Placement(tag=word)
        if word in PLACEMENT_REF:
            return Placement(tag=word, ref=self.ident("referent name"))
        if word in PLACEMENT_WALL:
            return Placement(tag=word, wall=self.ident("wall id"))
        if word == "corner":
            return Placement(tag="corner", wall=self.ident("wall id"), wall2=self.ident("wall id"))
        if word == "at_point":
            return Placement(tag="at_point", point=(self.number(), self.number(), self.number()))
        if word == "away_from_user":
            dist = self.number() if self.peek().kind == "number" else None
            return Placement(tag="away_from_user", distance=dist)
        raise SolParseError(f"unknown placement {word!r}", tok.line, tok.col, ("placement",))


def parse(source: str) -> SolProgram:
    """Parse SOL source into a program AST; raises SolParseError on bad syntax."""
    return _Parser(source).program()
