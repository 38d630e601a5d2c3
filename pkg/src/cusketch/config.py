"""Global sketch parameters."""

from dataclasses import dataclass

from .errors import ConfigurationError


@dataclass(frozen=True)
class SketchConfig:
    """The pair (m, d): m counters, d of them selected per step."""

    m: int
    d: int

    def __post_init__(self):
        if self.m < 2:
            raise ConfigurationError(f"m must be >= 2, got {self.m}")
        if not 1 <= self.d <= self.m:
            raise ConfigurationError(f"d must be in [1, m={self.m}], got {self.d}")
