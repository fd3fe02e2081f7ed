"""Exception types shared across the workbench."""

from __future__ import annotations


class WorkbenchError(Exception):
    """Base class for all workbench errors."""


class UnknownOperatorError(WorkbenchError):
    pass


class UnboundVariableError(WorkbenchError):
    pass


class ArityMismatchError(WorkbenchError):
    pass


class DuplicateNameError(WorkbenchError):
    pass


class BudgetExceededError(WorkbenchError):
    """An enumeration exceeded its configured bound."""


class StaleProofError(WorkbenchError):
    """A recursion target whose satisfaction proof no longer holds."""


class FiberMismatchError(WorkbenchError):
    """A dependent step produced a value outside the asserted fiber."""


class CoherenceError(WorkbenchError):
    """Dependent elimination refused: the coherence premise failed."""


class ReplayError(WorkbenchError):
    """A proof-forest derivation failed to re-derive from its justification."""


class SchemaError(WorkbenchError):
    """Base class for declaration-language errors, carrying a source position."""

    def __init__(self, message: str, line: int = 0, col: int = 0):
        super().__init__(message)
        self.line = line
        self.col = col

    def __str__(self) -> str:
        base = super().__str__()
        if self.line:
            return f"{self.line}:{self.col}: {base}"
        return base


class DeclSyntaxError(SchemaError):
    pass


class ScopeError(SchemaError):
    pass


class DuplicateBinderError(ScopeError):
    pass


class DuplicateConstructorError(SchemaError):
    pass


class PositivityError(SchemaError):
    pass


class ConditionalUnsupportedError(SchemaError):
    pass


class NonFinitaryConstantError(SchemaError):
    pass


class UnsupportedSchemeError(SchemaError):
    pass
