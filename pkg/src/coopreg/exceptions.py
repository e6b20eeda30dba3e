"""Exception types shared across the package."""


class CoopRegError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(CoopRegError, ValueError):
    """Matrix or vector dimensions are inconsistent with the operation."""


class SingularMatrixError(CoopRegError, ValueError):
    """Matrix is singular or too ill-conditioned for a reliable solve."""


class AssumptionViolation(CoopRegError):
    """A solvability assumption does not hold for the given data."""


class EmptyIntervalError(CoopRegError):
    """A gain interval is empty; no admissible gain exists for this data."""


class GainError(CoopRegError, ValueError):
    """A feedback or coupling gain fails its stability requirement."""


class ScenarioError(CoopRegError, ValueError):
    """A scenario file is malformed.  ``key_path`` names the offending entry."""

    def __init__(self, key_path: str, message: str):
        self.key_path = key_path
        super().__init__(f"{key_path}: {message}")
