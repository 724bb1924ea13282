"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: validation problems exit 2,
infeasible synthesis exits 3, internal cross-check failures exit 4.
"""


class DaqcError(Exception):
    """Base class for package-specific errors."""


class ValidationError(DaqcError, ValueError):
    """Input violates a documented precondition or format."""


class SimulabilityError(ValidationError):
    """A nonzero target coupling has no nonzero source coupling behind it."""


class PatternExhaustionError(DaqcError):
    """More distinct gate patterns requested than the alphabet provides."""


class SynthesisInfeasibleError(DaqcError):
    """No nonnegative block-time assignment exists, even with every pattern."""


class LpSolverStallError(DaqcError):
    """Simplex exceeded its pivot budget without reaching a verdict."""


class OracleLimitError(ValidationError):
    """Brute-force oracle refused an instance above its size limits."""


class InternalConsistencyError(DaqcError):
    """Two independent computations of the same quantity disagree."""
