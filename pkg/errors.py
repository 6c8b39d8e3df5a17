"""
Exception types raised by the Leibniz workbench.

Report-style checks (validate, check_cocycle, check_system, ...) never raise
for a violation; they return report objects. The exceptions below are for
refused preconditions and failed searches.
"""


class WorkbenchError(Exception):
    """Base class for every error raised by the workbench."""


class InputError(WorkbenchError, ValueError):
    """A document, argument or expression could not be used as given."""


class ParseError(InputError):
    """Expression text does not follow the grammar."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class UnknownIdentifierError(ParseError):
    """An identifier is not one of the field generators."""

    def __init__(self, name: str, position: int):
        super().__init__(f"Unknown identifier '{name}'", position)
        self.name = name


class FieldDivisionError(WorkbenchError, ZeroDivisionError):
    """Division by the zero element of the field."""


class EmbeddingError(InputError):
    """A numeric embedding does not assign every generator."""


class PoleError(WorkbenchError, ArithmeticError):
    """The denominator vanishes at the requested embedding."""


class ZeroEntryError(WorkbenchError, ValueError):
    """A gamma table or vector has a zero where a nonzero value is required."""

    def __init__(self, message: str, index):
        super().__init__(message)
        self.index = index


class InvalidGammaVectorError(InputError):
    """A gamma vector does not start with 1."""


class CocycleError(WorkbenchError):
    """The gamma table fails the cocycle identity; extension is refused."""

    def __init__(self, message: str, violations):
        super().__init__(message)
        self.violations = violations


class PrefixCheckError(WorkbenchError):
    """The prefix handed to the solver does not satisfy the system."""

    def __init__(self, message: str, report):
        super().__init__(message)
        self.report = report


class InconsistencyError(WorkbenchError):
    """An internal consistency check failed (e.g. a residual is not a derivation)."""


class SearchExhaustedError(WorkbenchError):
    """The witness search spent its budget without a certificate."""


class DensitySearchFailure(WorkbenchError):
    """The density search did not reach the requested accuracy."""


class SingularSelectionError(DensitySearchFailure):
    """The image vectors of the basis do not span the target space numerically."""


class RetriesExhaustedError(DensitySearchFailure):
    """Rational rounding never got below eps within the retry bound."""

    def __init__(self, message: str, best_error: float):
        super().__init__(message)
        self.best_error = best_error
