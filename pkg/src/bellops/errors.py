"""Exception types raised across the package.

All of them derive from ``ValueError`` so callers that only care about
"bad input" can catch that.
"""


class DimensionError(ValueError):
    """Operands have incompatible shapes."""


class InvalidStateError(ValueError):
    """A matrix that should be a density operator is not one."""


class NotUnitaryError(ValueError):
    """A matrix that should be unitary is not."""


class IncompleteError(ValueError):
    """A family of operators fails a completeness / resolution-of-identity test."""


class InjectivityError(ValueError):
    """An eigenvalue labelling assigns (nearly) equal values to distinct outcomes."""

    def __init__(self, collisions):
        self.collisions = list(collisions)
        pairs = ", ".join(f"{a!r}~{b!r}" for a, b in self.collisions)
        super().__init__(f"labelling is not injective; colliding labels: {pairs}")


class ConsistencyError(RuntimeError):
    """Two independent evaluation routes disagree beyond tolerance."""
