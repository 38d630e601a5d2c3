"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Invalid sketch or chain parameters (m, d, g, T, ...)."""


class InvalidEventError(ValueError):
    """A (v, c) selection event outside the admissible range for a state."""


class NonConvergenceError(RuntimeError):
    """Power iteration failed to reach the requested tolerance."""

    def __init__(self, message: str, residual: float, iterations: int):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class InternalConsistencyError(RuntimeError):
    """A structural invariant (state closure, row sums, ...) was violated.

    Raising this always indicates an implementation bug, never bad input.
    """


class OracleSizeError(ValueError):
    """Brute-force enumeration would exceed the configured size guard."""
