"""Exception types shared across the solver."""

from __future__ import annotations


class DdarError(Exception):
    """Base class for every error raised by this package."""


class ProblemSyntaxError(DdarError):
    """Source text that does not follow the problem or catalog grammar."""

    def __init__(self, message: str, line_no: int | None = None, line: str | None = None):
        self.line_no = line_no
        self.line = line
        if line_no is not None:
            message = f"{message} (line {line_no}: {line!r})"
        super().__init__(message)


class UnknownConstructor(ProblemSyntaxError):
    pass


class ArityMismatch(ProblemSyntaxError):
    pass


class UndeclaredPoint(ProblemSyntaxError):
    pass


class DuplicatePoint(ProblemSyntaxError):
    pass


class MissingGoal(ProblemSyntaxError):
    pass


class CatalogError(DdarError):
    """Malformed or invalid rule catalog."""


class DiagramError(DdarError):
    pass


class DegenerateProblem(DiagramError):
    """No attempt produced a well-separated, unambiguous diagram."""


class UnsolvableConstruction(DiagramError):
    """An intersection step was empty on every sampling attempt."""

    def __init__(self, message: str, step: int | None = None):
        self.step = step
        super().__init__(message)


class ExtensionDisabled(DdarError):
    """A statement needs sine variables but the law-of-sines flag is off."""


class InconsistentSystem(DdarError):
    """A linear table derived 0 = c with c != 0; inputs were unsound.

    Numerically filtered inputs should never trigger this, so it is treated
    as a hard fault rather than a refutation of the goal.  ``bundle`` holds
    a reproduction record (problem text, seed, equation log).
    """

    def __init__(self, message: str, bundle: dict | None = None):
        self.bundle = bundle or {}
        super().__init__(message)


class GoalNotProven(DdarError):
    """Proof extraction was asked for a goal that is not established."""
