"""Exception hierarchy.

Every error carries a stable ``code`` string so that CLI reports and tests can
match on it without depending on message wording.
"""

from __future__ import annotations


class ConesheafError(Exception):
    code = "ERROR"


class CompositionMismatch(ConesheafError):
    code = "COMPOSITION_MISMATCH"


class SearchBudgetExceeded(ConesheafError):
    code = "SEARCH_BUDGET_EXCEEDED"

    def __init__(self, message: str, nodes: int = 0):
        super().__init__(message)
        self.nodes = nodes


class ArityError(ConesheafError):
    code = "ARITY"


class NotEffectiveMonic(ConesheafError):
    code = "NOT_EFFECTIVE_MONIC"


class NotNormal(ConesheafError):
    code = "NOT_NORMAL"


class DomainGap(ConesheafError):
    code = "DOMAIN_GAP"


class NonCommuting(ConesheafError):
    code = "NONCOMMUTING"

    def __init__(self, message: str, pair=None, residual: float = 0.0):
        super().__init__(message)
        self.pair = pair
        self.residual = residual


class SpaceMismatch(ConesheafError):
    code = "SPACE_MISMATCH"


class NotCompatible(ConesheafError):
    code = "NOT_COMPATIBLE"

    def __init__(self, message: str, pair=None, residual: float = 0.0):
        super().__init__(message)
        self.pair = pair
        self.residual = residual


class NotSeparating(ConesheafError):
    code = "NOT_SEPARATING"


class NotALift(ConesheafError):
    code = "NOT_A_LIFT"


class NotUnitary(ConesheafError):
    code = "NOT_UNITARY"


class PreconditionFailed(ConesheafError):
    code = "PRECONDITION_FAILED"


class GeneratorRelationsFail(ConesheafError):
    code = "GENERATOR_RELATIONS_FAIL"

    def __init__(self, message: str, residuals: dict | None = None):
        super().__init__(message)
        self.residuals = residuals or {}


class NotCommuting(ConesheafError):
    code = "NOT_COMMUTING"


class InvalidGroup(ConesheafError):
    code = "INVALID_GROUP"


class InputError(ConesheafError):
    code = "INPUT_ERROR"
