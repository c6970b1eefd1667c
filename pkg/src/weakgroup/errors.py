"""Exception hierarchy.

Errors split into two families so callers (and the CLI exit codes) can tell
"this input does not admit the requested object" from "the floating point
computation became unreliable".
"""


class GInverseError(Exception):
    """Base class for every error raised by this package."""


class InputError(GInverseError, ValueError):
    """The input violates a precondition of the requested operation."""


class ShapeMismatch(InputError):
    pass


class ZeroWeight(InputError):
    pass


class NotComplementary(InputError):
    pass


class Singular(InputError):
    pass


class IndexTooLarge(InputError):
    pass


class NotConsistent(InputError):
    pass


class ParseError(InputError):
    def __init__(self, message, line=None, offset=None):
        self.line = line
        self.offset = offset
        where = []
        if line is not None:
            where.append(f"line {line}")
        if offset is not None:
            where.append(f"offset {offset}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)


class ShapeError(InputError):
    pass


class NumericalError(GInverseError, ArithmeticError):
    """A rank or stability decision could not be made reliably."""


class IndexOverflow(NumericalError):
    pass


class DecompositionFailure(NumericalError):
    pass


class DegenerateDraw(NumericalError):
    pass


class EquivalenceViolation(NumericalError):
    """Conditions that must be equivalent evaluated differently."""
