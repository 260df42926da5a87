"""Exception types shared across the engine."""


class VgsbError(Exception):
    pass


class FuelExhausted(VgsbError):
    """Reduction ran out of its step budget.

    Carries the partially reduced combination so callers can inspect how far
    the reduction got.  Signals either genuine non-termination or an
    insufficient fuel setting.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class UnorientableRelation(VgsbError):
    """A relation has no strictly largest word, so it cannot become a rule."""


class UnorientableDifference(UnorientableRelation):
    """A fork difference discovered during completion cannot be oriented."""


class WindowTooSmall(VgsbError):
    """A rule instance needed by the dimension oracle escapes the word set."""


class NotGraded(VgsbError):
    """The presentation carries no (usable) weight grading."""


class TruncationUnsound(VgsbError):
    """An internal sum in a state product failed to vanish within the cap."""


class AxiomViolation(VgsbError):
    """A conformal-algebra axiom failed; carries the failing instance."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class NovikovViolation(VgsbError):
    """A Novikov identity failed on some basis triple."""


class ParseError(VgsbError):
    """DSL syntax or semantic error with position information."""

    def __init__(self, message, line=None, col=None, token=None):
        if line is not None:
            message = "line %d, col %d: %s" % (line, col, message)
        super().__init__(message)
        self.line = line
        self.col = col
        self.token = token
