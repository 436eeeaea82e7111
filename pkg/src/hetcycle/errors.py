"""Exception hierarchy shared by the library and the command line."""


class HetcycleError(Exception):
    """Base class for all library errors."""


class InputError(HetcycleError, ValueError):
    """Malformed user input: bad game file, out-of-range point, bad flag."""


class NonGenericError(HetcycleError):
    """The game violates a genericity assumption (zero eigenvalue, degenerate orientation)."""


class NotStructuralError(HetcycleError):
    """An edge set misses at least one heteroclinic cycle."""

    def __init__(self, message, cycle=None):
        super().__init__(message)
        self.cycle = cycle


class ConvergenceError(HetcycleError):
    """An iterative solver did not reach its tolerance."""


class NoSignChangeError(HetcycleError):
    """A bracket handed to a bisection routine has no sign change."""


class InsufficientDataError(HetcycleError):
    """Not enough repetitions in an itinerary to estimate a rate."""


class IndeterminateError(HetcycleError):
    """The parameter sits inside a bifurcation band and no verdict is given."""

    def __init__(self, message, bracket=None):
        super().__init__(message)
        self.bracket = bracket
