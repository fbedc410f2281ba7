"""Exception hierarchy shared by every module."""

from __future__ import annotations


class PeriodicHomologyError(Exception):
    """Base class for domain failures (CLI exit code 1)."""


class InfiniteIndex(PeriodicHomologyError):
    """A lattice is rank deficient, so its index in Z^d is infinite."""


class ParseError(PeriodicHomologyError):
    """Input document is malformed."""


class DimensionMismatch(ParseError):
    pass


class UnknownVertex(ParseError):
    pass


class InvalidPath(PeriodicHomologyError):
    pass


class NotACycle(PeriodicHomologyError):
    pass


class InfiniteComponents(PeriodicHomologyError):
    """Some component of a quotient graph lifts to infinitely many components."""


class InvalidComplex(PeriodicHomologyError):
    pass


class NotAChainMap(PeriodicHomologyError):
    pass


class TemplateError(PeriodicHomologyError):
    """Base class for template validation failures."""


class DanglingFace(TemplateError):
    pass


class DimensionError(TemplateError):
    pass


class BoundarySquareNonzero(TemplateError):
    def __init__(self, cell: str, face: str, shift: tuple[int, ...], coefficient: int):
        self.cell = cell
        self.face = face
        self.shift = shift
        self.coefficient = coefficient
        super().__init__(
            f"boundary of boundary of cell {cell!r} has coefficient {coefficient} "
            f"on face {face!r} at shift {list(shift)}"
        )


class DivisibilityError(PeriodicHomologyError):
    pass


class ArityOverflow(PeriodicHomologyError):
    pass


class AnticommutationFailure(PeriodicHomologyError):
    pass


class LiftFailure(PeriodicHomologyError):
    pass


class MismatchWithDirectHomology(PeriodicHomologyError):
    pass


class ClassNotFound(PeriodicHomologyError):
    pass


class InsufficientData(PeriodicHomologyError):
    pass
