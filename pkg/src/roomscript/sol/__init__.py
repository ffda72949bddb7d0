"""SOL, the Scene Operation Language: a small, safe, validated DSL whose
programs create objects, edit properties, wire triggers, and restore
checkpoints. Programs are parsed, validated, and interpreted transactionally;
nothing executes without passing validation first.
"""

from .ast import Method, Placement, SolProgram, Statement, ValueExpr
from .explainer import explain
from .interpreter import ExecutionResult, Interpreter, MemoryProvider, ValidatedProgram
from .parser import parse
from .printer import print_program
from .validator import Issue, ValidationReport, validate

__all__ = [
    "ExecutionResult",
    "Interpreter",
    "Issue",
    "MemoryProvider",
    "Method",
    "Placement",
    "SolProgram",
    "Statement",
    "ValidatedProgram",
    "ValidationReport",
    "ValueExpr",
    "explain",
    "parse",
    "print_program",
    "validate",
]
