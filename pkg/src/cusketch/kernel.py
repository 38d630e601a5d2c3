"""Transition and conditional-error kernels of the gap-capped chains.

An update step is summarized by the event (v, c): v is the offset level of
the selected minimum and c the number of selected counters at that level.
Given the event, the next state is deterministic (the Gamma maps below);
the event probability depends only on the current state, and the beta
kernel gives the conditional probability that an absent item's estimate
grows by one during the transition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np
import scipy.sparse as sp

from .errors import ConfigurationError, InternalConsistencyError, InvalidEventError
from .states import DeltaState, StateSpace

ROW_SUM_TOL = 1e-12


def _check_event(k: DeltaState, v: int, c: int, d: int) -> None:
    g = len(k) - 1
    if not 0 <= v <= g:
        raise InvalidEventError(f"level v={v} outside [0, {g}]")
    if not 1 <= c <= min(d, k[v]):
        raise InvalidEventError(f"count c={c} outside [1, min(d={d}, k_v={k[v]})]")


def gamma_lb(k: DeltaState, v: int, c: int, d: int) -> DeltaState:
    """Next state of the LB chain after event (v, c)."""
    _check_event(k, v, c, d)
    g = len(k) - 1
    if v == g and c == d:
        return tuple(k)  # frozen step
    if v == 0 and c == k[0]:
        # every minimum counter increments: the whole histogram shifts down
        return (k[0] + k[1],) + tuple(k[2:]) + (0,)
    out = list(k)
    out[v] -= c
    out[v + 1] += c
    return tuple(out)


def gamma_ub(k: DeltaState, v: int, c: int, d: int) -> DeltaState:
    """Next state of the UB chain; differs from LB only at the (g, d) event."""
    _check_event(k, v, c, d)
    g = len(k) - 1
    if v == g and c == d:
        m = sum(k)
        if g == 1:
            return (m - d, d)
        return (k[0] + k[1],) + tuple(k[2 : g]) + (k[g] - d, d)
    return gamma_lb(k, v, c, d)


def transition_prob(k: DeltaState, v: int, c: int, m: int, d: int) -> float:
    """Probability of event (v, c) from state k; same for both chains."""
    _check_event(k, v, c, d)
    above = sum(k[v + 1 :])
    return math.comb(k[v], c) * math.comb(above, d - c) / math.comb(m, d)


def beta_lb(k: DeltaState, v: int, c: int, m: int, d: int) -> float:
    """Conditional error-increment probability for the LB chain."""
    _check_event(k, v, c, d)
    g = len(k) - 1
    if v == g and c == d:
        return 0.0  # frozen step: no counter moves
    above = sum(k[v + 1 :])
    return (math.comb(above + c, d) - math.comb(above, d)) / math.comb(m, d)


def beta_ub(k: DeltaState, v: int, c: int, m: int, d: int) -> float:
    """Conditional error-increment probability for the UB chain."""
    _check_event(k, v, c, d)
    g = len(k) - 1
    if v == g and c == d:
        # the absent item's estimate grows if its subset is exactly the d
        # boosted maxima, or touches any of the k_0 boosted minima
        return (1 + math.comb(m, d) - math.comb(m - k[0], d)) / math.comb(m, d)
    return beta_lb(k, v, c, m, d)


@dataclass
class TransitionKernel:
    """Sparse event-level edge list for one chain variant.

    Edges are stored per (v, c) event and never merged: two events sharing a
    target keep separate entries, so each edge maps 1:1 to a case of the
    Gamma analysis.
    """

    space: StateSpace
    variant: str  # "lb" or "ub"
    src: np.ndarray
    dst: np.ndarray
    v: np.ndarray
    c: np.ndarray
    p: np.ndarray
    beta: np.ndarray

    @property
    def n_edges(self) -> int:
        return len(self.src)

    def transition_matrix(self) -> sp.csr_matrix:
        n = len(self.space)
        return sp.csr_matrix((self.p, (self.src, self.dst)), shape=(n, n))

    def expected_increment(self) -> np.ndarray:
        """Per-state expected error increment: row sums of P element-wise B."""
        n = len(self.space)
        out = np.zeros(n)
        np.add.at(out, self.src, self.p * self.beta)
        return out

    def edges_from(self, i: int) -> Iterator[tuple[int, int, int, float, float]]:
        mask = self.src == i
        for j in np.flatnonzero(mask):
            yield (
                int(self.dst[j]),
                int(self.v[j]),
                int(self.c[j]),
                float(self.p[j]),
                float(self.beta[j]),
            )

    def to_dict(self) -> dict:
        """JSON-serializable layout: {m, d, g, variant, states, edges}."""
        return {
            "m": self.space.m,
            "d": self.space.d,
            "g": self.space.g,
            "variant": self.variant,
            "states": self.space.states.tolist(),
            "edges": [
                [int(s), int(t), int(v), int(c), float(p), float(b)]
                for s, t, v, c, p, b in zip(
                    self.src, self.dst, self.v, self.c, self.p, self.beta
                )
            ],
        }


def _comb_table(nmax: int, rmax: int) -> np.ndarray:
    """C(n, r) for n in [0, nmax], r in [0, rmax], as float64.

    Entries are exact while below 2**53, which covers every r <= d at desk
    scale; beyond that the double-precision ratio is still accurate to
    ~1e-15 relative, well inside every tolerance used here.
    """
    table = np.zeros((nmax + 1, rmax + 1))
    for n in range(nmax + 1):
        for r in range(min(n, rmax) + 1):
            table[n, r] = float(math.comb(n, r))
    return table


def _pack_keys(states: np.ndarray, base: int) -> np.ndarray:
    """Collapse each state row to a single integer key for fast lookup."""
    weights = base ** np.arange(states.shape[1], dtype=np.int64)
    return states @ weights


def build_kernel(space: StateSpace, variant: str) -> TransitionKernel:
    """Construct all positive-probability edges, vectorized across states.

    For every candidate event (v, c) one pass over the full state array
    computes probabilities, betas, and target states; targets are resolved
    to indices via packed integer keys. Any target outside the state space
    aborts: the Gamma maps are closed on it by construction.
    """
    if variant not in ("lb", "ub"):
        raise ConfigurationError(f"variant must be 'lb' or 'ub', got {variant!r}")
    m, d, g = space.m, space.d, space.g
    states = space.states
    n = len(space)
    comb = _comb_table(m, d)
    denom = float(math.comb(m, d))

    if (m + 1) ** (g + 1) < 2**62:
        keys = np.sort(_pack_keys(states, m + 1))
        order = np.argsort(_pack_keys(states, m + 1), kind="stable")

        def lookup(targets: np.ndarray) -> np.ndarray:
            tk = _pack_keys(targets, m + 1)
            pos = np.searchsorted(keys, tk)
            bad = (pos >= n) | (keys[np.minimum(pos, n - 1)] != tk)
            if bad.any():
                raise InternalConsistencyError(
                    f"transition target left the state space: "
                    f"{targets[np.flatnonzero(bad)[0]].tolist()}"
                )
            return order[pos]

    else:  # fall back to dict lookup for very large m

        def lookup(targets: np.ndarray) -> np.ndarray:
            out = np.empty(len(targets), dtype=np.int64)
            for i, row in enumerate(targets):
                key = tuple(int(x) for x in row)
                if key not in space.index_of:
                    raise InternalConsistencyError(
                        f"transition target left the state space: {key}"
                    )
                out[i] = space.index_of[key]
            return out

    suffix = np.cumsum(states[:, ::-1], axis=1)[:, ::-1]  # suffix[:, v] = sum_{l>=v}
    src_parts, dst_parts, v_parts, c_parts, p_parts, b_parts = [], [], [], [], [], []

    for v in range(g + 1):
        kv = states[:, v]
        above = suffix[:, v + 1] if v + 1 <= g else np.zeros(n, dtype=np.int64)
        for c in range(1, d + 1):
            p = comb[kv, c] * comb[above, d - c] / denom
            rows = np.flatnonzero(p > 0)
            if len(rows) == 0:
                continue
            beta = (comb[above[rows] + c, d] - comb[above[rows], d]) / denom

            targets = states[rows].copy()
            if v == g and c == d:
                if variant == "lb":
                    # frozen: self-loop, no error growth
                    beta = np.zeros(len(rows))
                else:
                    shifted = np.roll(targets, -1, axis=1)
                    shifted[:, 0] += targets[:, 0]
                    shifted[:, -1] = 0
                    shifted[:, g - 1] = targets[:, g] - d if g > 1 else 0
                    shifted[:, g] = d
                    if g == 1:
                        shifted[:, 0] = m - d
                    beta = (1 + denom - comb[m - targets[:, 0], d]) / denom
                    targets = shifted
            elif v == 0:
                full_min = targets[:, 0] == c
                moved = ~full_min
                shifted = np.roll(targets[full_min], -1, axis=1)
                shifted[:, 0] += targets[full_min, 0]
                shifted[:, -1] = 0
                targets[moved, 0] -= c
                targets[moved, 1] += c
                targets[full_min] = shifted
            else:
                targets[:, v] -= c
                targets[:, v + 1] += c

            src_parts.append(rows)
            dst_parts.append(lookup(targets))
            v_parts.append(np.full(len(rows), v, dtype=np.int32))
            c_parts.append(np.full(len(rows), c, dtype=np.int32))
            p_parts.append(p[rows])
            b_parts.append(beta)

    kernel = TransitionKernel(
        space=space,
        variant=variant,
        src=np.concatenate(src_parts),
        dst=np.concatenate(dst_parts),
        v=np.concatenate(v_parts),
        c=np.concatenate(c_parts),
        p=np.concatenate(p_parts),
        beta=np.concatenate(b_parts),
    )

    row_sums = np.zeros(n)
    np.add.at(row_sums, kernel.src, kernel.p)
    worst = float(np.abs(row_sums - 1.0).max())
    if worst > ROW_SUM_TOL:
        raise InternalConsistencyError(f"kernel row sums deviate from 1 by {worst:.3e}")
    if kernel.beta.min() < 0 or kernel.beta.max() > 1:
        raise InternalConsistencyError("beta values escaped [0, 1]")
    return kernel
