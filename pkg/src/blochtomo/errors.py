"""Exception hierarchy for blochtomo.

``InvariantViolation`` subclasses signal numerically invalid data (bad
Bloch vectors, non-Hermitian matrices, inconsistent moments); the CLI
maps them to exit code 4.  The remaining classes are usage/flow errors
with their own exit codes where noted.
"""


class BlochTomoError(Exception):
    """Base class for all blochtomo exceptions."""


class InvariantViolation(BlochTomoError):
    """A numerical invariant of a domain type was violated."""


class BallViolation(InvariantViolation):
    """Bloch vector lies outside the unit ball."""


class DimMismatch(InvariantViolation):
    """Operator dimensions are incompatible with the operation."""


class NotHermitian(InvariantViolation):
    """Matrix is not Hermitian within tolerance."""


class MomentInconsistency(InvariantViolation):
    """Moment pair (x, tau) does not correspond to a physical state."""


class EmptyList(BlochTomoError):
    """Operation requires a nonempty sequence."""


class ZeroCount(BlochTomoError):
    """Requested a particle ensemble of size zero."""


class WeightSumViolation(BlochTomoError):
    """Weights are negative or do not sum to one."""


class NotUnitDirection(BlochTomoError):
    """Line direction is not a unit vector."""


class AllZeroWeight(BlochTomoError):
    """Reweighting annihilated every particle (zero total weight)."""


class DimCap(BlochTomoError):
    """Requested tensor power exceeds the supported dimension cap."""


class OptimizerStall(BlochTomoError):
    """Axis optimization failed to reach the required agreement."""


class ZeroProbabilityBranch(BlochTomoError):
    """Conditional state undefined: measurement branch has probability ~0."""


class ZeroEvidence(BlochTomoError):
    """Observed data is impossible under the prior support.  Exit code 3."""


class ConfigError(BlochTomoError):
    """Experiment configuration is missing or malformed.  Exit code 2."""
