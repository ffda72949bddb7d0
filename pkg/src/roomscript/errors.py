"""Exception types shared across the engine.

Every engine-raised error derives from EngineError and carries a stable
``code`` string that service responses and validation reports reuse.
"""

from __future__ import annotations


class EngineError(Exception):
    code = "EngineError"

    def __init__(self, message: str = ""):
        super().__init__(message)
        self.message = message


# --- scene-core ---------------------------------------------------------

class UnknownKind(EngineError):
    code = "UnknownKind"


class DuplicateName(EngineError):
    code = "DuplicateName"


class OutOfRoom(EngineError):
    code = "OutOfRoom"


class RangeError(EngineError):
    code = "RangeError"


class UnknownObject(EngineError):
    code = "UnknownObject"


class NotWallMountable(EngineError):
    code = "NotWallMountable"


class UnknownSnapshot(EngineError):
    code = "UnknownSnapshot"


# --- spatial-semantics --------------------------------------------------

class UnknownReferent(EngineError):
    code = "UnknownReferent"


class NoFreeSide(EngineError):
    code = "NoFreeSide"


class DeixisError(EngineError):
    code = "DeixisError"


class NoGestureInWindow(DeixisError):
    code = "NoGestureInWindow"


class TargetKindMismatch(DeixisError):
    code = "TargetKindMismatch"


class NoMatch(EngineError):
    code = "NoMatch"


class AmbiguousSelector(EngineError):
    """Singular reference with several survivors; surfaced as a clarification."""

    code = "Ambiguous"


# --- trigger-engine -----------------------------------------------------

class UnvalidatedHandler(EngineError):
    code = "UnvalidatedHandler"


# --- sol ----------------------------------------------------------------

class SolParseError(EngineError):
    code = "ParseError"

    def __init__(self, message: str, line: int, col: int, expected: tuple[str, ...] = ()):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col
        self.expected = expected


class RuntimeFailure(EngineError):
    code = "RuntimeFailure"

    def __init__(self, method_name: str, statement_index: int, cause: Exception):
        super().__init__(
            f"method {method_name!r} failed at statement {statement_index}: {cause}"
        )
        self.method_name = method_name
        self.statement_index = statement_index
        self.cause = cause


class InjectedFault(EngineError):
    """Raised by the interpreter's test-only fault hook."""

    code = "InjectedFault"


# --- planner ------------------------------------------------------------

class EmptyAfterNormalize(EngineError):
    code = "EmptyAfterNormalize"


class CompileError(EngineError):
    code = "CompileError"

    def __init__(self, message: str, task_index: int):
        super().__init__(message)
        self.task_index = task_index


class NoHistory(EngineError):
    code = "NoHistory"


# --- llm-backend --------------------------------------------------------

class BackendFailure(EngineError):
    code = "BackendFailure"

    def __init__(self, kind: str, message: str, trace=None):
        super().__init__(f"{kind}: {message}")
        self.kind = kind  # network | timeout | malformed | retries_exhausted
        self.trace = trace


# --- session-service ----------------------------------------------------

class PendingTurnExists(EngineError):
    code = "PendingTurnExists"


class NotPending(EngineError):
    code = "NotPending"


class UnknownSession(EngineError):
    code = "UnknownSession"


# --- replay-cli ---------------------------------------------------------

class ScenarioSchemaError(EngineError):
    code = "SchemaError"
