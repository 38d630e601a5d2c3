"""Pure-Python trajectory stepper.

Backend contract (shared with the compiled twin in ``_speedups``): given a
counter list and a (T, d) array of uniform floats, drive T update steps of
the chosen variant and return the per-step gap trace. The selection at step
t is derived from row t of the float array by a partial Fisher-Yates
shuffle, so both backends produce bit-identical trajectories for the same
float input.

Variant codes: 0 = plain conservative update, 1 = LB (freeze at the cap),
2 = UB (boost the minima at the cap).
"""

from __future__ import annotations

import numpy as np

VARIANT_CU = 0
VARIANT_LB = 1
VARIANT_UB = 2


def run_steps(
    values: list[int],
    d: int,
    variant: int,
    g: int,
    u: np.ndarray,
) -> np.ndarray:
    """Advance `values` in place by u.shape[0] steps; return the gap trace."""
    m = len(values)
    T = u.shape[0]
    vmin = min(values)
    vmax = max(values)
    nmin = sum(1 for x in values if x == vmin)
    gap_trace = np.empty(T, dtype=np.int64)
    pool = list(range(m))

    for t in range(T):
        for j in range(m):
            pool[j] = j
        row = u[t]
        for j in range(d):
            r = j + min(int(row[j] * (m - j)), m - j - 1)
            pool[j], pool[r] = pool[r], pool[j]
        sel = pool[:d]

        sel_min = values[sel[0]]
        for j in range(1, d):
            x = values[sel[j]]
            if x < sel_min:
                sel_min = x

        at_cap = (vmax - vmin) == g and sel_min == vmax
        if variant == VARIANT_LB and at_cap:
            gap_trace[t] = vmax - vmin
            continue

        n_inc = 0
        for i in sel:
            if values[i] == sel_min:
                values[i] += 1
                n_inc += 1
        if sel_min + 1 > vmax:
            vmax = sel_min + 1
        if sel_min == vmin:
            nmin -= n_inc
            if nmin == 0:
                # the minimum level emptied; rescan (amortized O(1) per step)
                vmin = min(values)
                nmin = sum(1 for x in values if x == vmin)

        if variant == VARIANT_UB and at_cap:
            for i in range(m):
                if values[i] == vmin:
                    values[i] += 1
            vmin = min(values)
            nmin = sum(1 for x in values if x == vmin)

        gap_trace[t] = vmax - vmin

    return gap_trace
