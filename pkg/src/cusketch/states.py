"""Enumeration of the gap-capped offset-histogram state space.

A state is the vector k = (k_0, ..., k_g) where k_l counts the counters
exactly l above the current minimum. Valid states satisfy

    sum(k) = m,   k_0 >= 1,   k_{L(k)} >= d,   L(k) <= g,

with L(k) the highest occupied level. The number of such states is
C(m + g - d, g).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .errors import ConfigurationError

DeltaState = tuple[int, ...]


def state_space_size(m: int, d: int, g: int) -> int:
    return math.comb(m + g - d, g)


def _compositions(total: int, parts: int):
    """All ways to write `total` as an ordered sum of `parts` non-negatives."""
    if parts == 1:
        yield (total,)
        return
    for cuts in combinations(range(total + parts - 1), parts - 1):
        prev = -1
        comp = []
        for c in cuts:
            comp.append(c - prev - 1)
            prev = c
        comp.append(total + parts - 2 - prev)
        yield tuple(comp)


def _validate_params(m: int, d: int, g: int) -> None:
    if m < 2:
        raise ConfigurationError(f"m must be >= 2, got {m}")
    if not 1 <= d <= m:
        raise ConfigurationError(f"d must be in [1, m={m}], got {d}")
    if g < 1:
        raise ConfigurationError(
            f"gap cap g must be >= 1, got {g} (the capped update rules are "
            "undefined for g = 0)"
        )


@dataclass
class StateSpace:
    """Indexed enumeration of all valid offset histograms for (m, d, g)."""

    m: int
    d: int
    g: int
    states: np.ndarray  # shape (N, g + 1), int64
    index_of: dict[DeltaState, int] = field(repr=False)

    def __len__(self) -> int:
        return len(self.states)

    def state(self, i: int) -> DeltaState:
        return tuple(int(x) for x in self.states[i])

    def index(self, k: DeltaState) -> int:
        return self.index_of[self.pad(k)]

    def pad(self, k: DeltaState) -> DeltaState:
        """Extend a trimmed offset histogram to the fixed g + 1 length."""
        if len(k) > self.g + 1:
            raise ConfigurationError(f"state {k} exceeds gap cap g={self.g}")
        return tuple(k) + (0,) * (self.g + 1 - len(k))

    @property
    def initial_index(self) -> int:
        return 0


def enumerate_states(m: int, d: int, g: int) -> StateSpace:
    """Build the full state space in a deterministic order.

    States are grouped by highest occupied level L ascending and sorted in
    descending lexicographic order within each group, so index 0 is always
    the all-at-minimum start state (m, 0, ..., 0).
    """
    _validate_params(m, d, g)
    states: list[DeltaState] = [(m,) + (0,) * g]
    for level in range(1, g + 1):
        spare = m - 1 - d
        if spare < 0:
            break  # d = m: the top level can never hold d counters unless L = 0
        block = []
        for comp in _compositions(spare, level + 1):
            k = (1 + comp[0],) + comp[1:level] + (d + comp[level],)
            block.append(k + (0,) * (g - level))
        block.sort(reverse=True)
        states.extend(block)

    expected = state_space_size(m, d, g)
    if len(states) != expected:
        raise AssertionError(
            f"enumerated {len(states)} states, expected C({m + g - d},{g}) = {expected}"
        )
    arr = np.array(states, dtype=np.int64)
    index_of = {k: i for i, k in enumerate(states)}
    return StateSpace(m=m, d=d, g=g, states=arr, index_of=index_of)
