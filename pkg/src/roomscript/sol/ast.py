"""SOL abstract syntax tree and the JSON program envelope."""

from __future__ import annotations

import json
from dataclasses import dataclass, field


@dataclass
class Placement:
    tag: str
    ref: str | None = None
    wall: str | None = None
    wall2: str | None = None
    point: tuple[float, float, float] | None = None
    distance: float | None = None


@dataclass
class ValueExpr:
    """Typed value on a `set` statement.

    tag is one of: point, yaw, spin, scale, scale_w, scale_h, scale_d, dims,
    rgba, color, bool, number.
    """

    tag: str
    number: float | None = None
    numbers: tuple[float, ...] | None = None
    color: str | None = None
    flag: bool | None = None


@dataclass
class Statement:
    op: str  # create | grid | set | moveTo | restore | on | off | toggle | when | unknown
    line: int = 0
    col: int = 0
    kind: str | None = None
    name: str | None = None
    selector: str | None = None
    prop: str | None = None
    value: ValueExpr | None = None
    placement: Placement | None = None
    rows: int | None = None
    cols: int | None = None
    wall: str | None = None
    event: str | None = None
    method: str | None = None
    checkpoint: str | None = None
    predicate: tuple[str, str] | None = None  # (predicate tag, selector)
    then: list["Statement"] = field(default_factory=list)
    orelse: list["Statement"] | None = None
    raw: str | None = None  # unknown-op text for diagnostics


@dataclass
class Method:
    name: str
    body: list[Statement]
    is_handler: bool = False
    description: str = ""
    explanation: str = ""
    line: int = 0
    col: int = 0


@dataclass
class SolProgram:
    name: str
    methods: list[Method]
    source_text: str = ""
    line: int = 0
    col: int = 0

    def entry_methods(self) -> list[Method]:
        return [m for m in self.methods if not m.is_handler]

    def handler_methods(self) -> list[Method]:
        return [m for m in self.methods if m.is_handler]

    def method(self, name: str) -> Method | None:
        for m in self.methods:
            if m.name == name:
                return m
        return None

    def to_envelope(self) -> dict:
        """The wire envelope: ClassName / Methods / SourceCode."""
        return {
            "ClassName": self.name,
            "Methods": [
                {
                    "MethodName": m.name,
                    "Description": m.description,
                    "Explanation": m.explanation,
                }
                for m in self.entry_methods()
            ],
            "SourceCode": self.source_text,
        }

    def to_envelope_json(self) -> str:
        return json.dumps(self.to_envelope(), separators=(",", ":"))


def merge_envelope_metadata(program: SolProgram, envelope: dict) -> list[str]:
    """Attach Description/Explanation from an envelope onto parsed methods.

    Returns the method names listed in the envelope that the source does not
    declare (callers report those as validation issues).
    """
    missing = []
    for entry in envelope.get("Methods", []):
        name = entry.get("MethodName", "")
        m = program.method(name)
        if m is None:
            missing.append(name)
            continue
        m.description = entry.get("Description", "") or m.description
        m.explanation = entry.get("Explanation", "") or m.explanation
    return missing
