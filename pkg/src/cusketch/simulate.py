"""Seeded Monte-Carlo engine and the exact brute-force oracle.

Trajectories are driven through the backend stepper (compiled when
available). The estimation error of an absent item is never sampled:
conditionally on the final counters, its expectation over the item's
uniformly random d-subset has the exact order-statistic form

    E[min over a random d-subset] =
        sum_{r=1}^{m-d+1} y_(r) * C(m-r, d-1) / C(m, d)

with y_(1) <= ... <= y_(m) the ascending-sorted counters. Summing over
sorted positions rather than distinct values makes ties a non-issue.

Reproducibility: every run r derives its own generator from the master
seed through the splitmix64 finalizer applied to seed + r * golden-gamma,
so runs can be computed in any order (or in parallel) without changing
results.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Hashable, Sequence

import numpy as np

from . import _backend
from .config import SketchConfig
from .errors import ConfigurationError, OracleSizeError
from .sketch import (
    CappedSketch,
    IdealHashTable,
    cu_update,
    lb_update,
    ub_update,
    uniform_select,
    zero_counters,
)

GAP_HISTOGRAM_LEVELS = 10
ORACLE_LEAF_GUARD = 10**6

_VARIANT_CODES = {"cu": _backend.VARIANT_CU, "lb": _backend.VARIANT_LB, "ub": _backend.VARIANT_UB}

_GOLDEN_GAMMA = 0x9E3779B97F4A7C15
_MASK64 = (1 << 64) - 1


def mix64(seed: int, run_index: int) -> int:
    """splitmix64 finalizer over seed + run * golden-gamma; the documented
    per-run substream derivation."""
    z = (seed + run_index * _GOLDEN_GAMMA) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def substream(seed: int, run_index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(mix64(seed, run_index)))


@dataclass(frozen=True)
class SimConfig:
    m: int
    d: int
    T: int
    runs: int
    seed: int
    variant: str = "cu"  # "cu", "lb", or "ub"
    g: int | None = None  # required for lb/ub
    retain_per_run: bool = True

    def __post_init__(self):
        SketchConfig(self.m, self.d)
        if self.T < 1:
            raise ConfigurationError(f"T must be >= 1, got {self.T}")
        if self.runs < 1:
            raise ConfigurationError(f"runs must be >= 1, got {self.runs}")
        if self.variant not in _VARIANT_CODES:
            raise ConfigurationError(f"variant must be one of cu/lb/ub, got {self.variant!r}")
        if self.variant != "cu" and (self.g is None or self.g < 1):
            raise ConfigurationError("lb/ub simulation requires a gap cap g >= 1")


@dataclass(frozen=True)
class TrajectoryResult:
    values: np.ndarray
    gap_trace: np.ndarray
    conditional_error: float

    @property
    def counter_rate(self) -> float:
        T = len(self.gap_trace)
        return float(self.values.sum()) / (T * len(self.values))


@dataclass
class SimStats:
    config: SimConfig
    mean_error_rate: float
    stderr_error_rate: float
    mean_counter_rate: float
    gap_histogram: dict[int, float]  # level -> fraction of steps with gap >= level
    per_run_errors: list[float] = field(default_factory=list)
    per_run_counter_rates: list[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "mean_error_rate": self.mean_error_rate,
            "stderr_error_rate": self.stderr_error_rate,
            "mean_counter_rate": self.mean_counter_rate,
            "gap_histogram": {str(k): v for k, v in self.gap_histogram.items()},
        }

    def to_csv(self) -> str:
        """Per-run rows then histogram rows; column order fixed."""
        lines = ["run,error,counter_rate"]
        for i, (e, c) in enumerate(zip(self.per_run_errors, self.per_run_counter_rates)):
            lines.append(f"{i},{e!r},{c!r}")
        lines.append("g,fraction")
        for level in sorted(self.gap_histogram):
            lines.append(f"{level},{self.gap_histogram[level]!r}")
        return "\n".join(lines) + "\n"


def expected_min_over_subsets(values: Sequence[int], d: int) -> float:
    """Exact E[min over a uniformly random d-subset] of the given counters."""
    y = sorted(values)
    m = len(y)
    total = math.comb(m, d)
    return sum(y[r - 1] * math.comb(m - r, d - 1) for r in range(1, m - d + 2)) / total


def _expected_min_exact(values: Sequence[int], d: int) -> Fraction:
    y = sorted(values)
    m = len(y)
    total = math.comb(m, d)
    num = sum(y[r - 1] * math.comb(m - r, d - 1) for r in range(1, m - d + 2))
    return Fraction(num, total)


def run_trajectory(config: SimConfig, run_index: int = 0) -> TrajectoryResult:
    """One seeded trajectory; exact conditional error from the final counters."""
    rng = substream(config.seed, run_index)
    u = rng.random((config.T, config.d))
    values = [0] * config.m
    gap_trace = _backend.run_steps(
        values, config.d, _VARIANT_CODES[config.variant], config.g or 0, u
    )
    arr = np.asarray(values, dtype=np.int64)
    return TrajectoryResult(
        values=arr,
        gap_trace=gap_trace,
        conditional_error=expected_min_over_subsets(arr, config.d),
    )


def _run_one(config: SimConfig, run_index: int) -> tuple[float, float, np.ndarray]:
    traj = run_trajectory(config, run_index)
    tail_counts = np.array(
        [(traj.gap_trace >= level).sum() for level in range(1, GAP_HISTOGRAM_LEVELS + 1)],
        dtype=np.int64,
    )
    return traj.conditional_error, traj.counter_rate, tail_counts


def _worker_count() -> int:
    raw = os.environ.get("CU_BOUND_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def estimate_error(config: SimConfig) -> SimStats:
    """Average the exact conditional errors over independent seeded runs."""
    workers = _worker_count()
    indices = range(config.runs)
    if workers > 1 and config.runs > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_one, [config] * config.runs, indices, chunksize=8))
    else:
        results = [_run_one(config, i) for i in indices]

    errors = [err / config.T for err, _, _ in results]
    rates = [rate for _, rate, _ in results]
    tails = np.sum([t for _, _, t in results], axis=0)

    mean = math.fsum(errors) / len(errors)
    if len(errors) > 1:
        var = math.fsum((e - mean) ** 2 for e in errors) / (len(errors) - 1)
        stderr = math.sqrt(var / len(errors))
    else:
        stderr = float("nan")
    histogram = {
        level: float(tails[level - 1]) / (config.T * config.runs)
        for level in range(1, GAP_HISTOGRAM_LEVELS + 1)
    }
    return SimStats(
        config=config,
        mean_error_rate=mean,
        stderr_error_rate=stderr,
        mean_counter_rate=math.fsum(rates) / len(rates),
        gap_histogram=histogram,
        per_run_errors=errors if config.retain_per_run else [],
        per_run_counter_rates=rates if config.retain_per_run else [],
    )


@dataclass(frozen=True)
class SandwichReport:
    ok: bool
    first_violation: tuple[int, int] | None = None  # (step, counter index)

    def __bool__(self) -> bool:
        return self.ok


def sandwich_trace(m: int, d: int, g: int, T: int, seed: int) -> SandwichReport:
    """Drive LB(g), LB(g+1), CU, UB(g+1), UB(g) on one selection sequence.

    Verifies the element-wise ordering
    LB(g) <= LB(g+1) <= CU <= UB(g+1) <= UB(g) after every step.
    """
    if g < 1:
        raise ConfigurationError(f"g must be >= 1, got {g}")
    config = SketchConfig(m, d)
    rng = substream(seed, 0)
    cu = zero_counters(config)
    lo = CappedSketch(zero_counters(config), g, "lb")
    lo2 = CappedSketch(zero_counters(config), g + 1, "lb")
    hi2 = CappedSketch(zero_counters(config), g + 1, "ub")
    hi = CappedSketch(zero_counters(config), g, "ub")
    for t in range(1, T + 1):
        s = uniform_select(config, rng)
        cu = cu_update(cu, s)
        lo = lb_update(lo, s)
        lo2 = lb_update(lo2, s)
        hi2 = ub_update(hi2, s)
        hi = ub_update(hi, s)
        chain = [lo.counters.values, lo2.counters.values, cu.values,
                 hi2.counters.values, hi.counters.values]
        for a, b in zip(chain, chain[1:]):
            bad = np.flatnonzero(a > b)
            if len(bad):
                return SandwichReport(ok=False, first_violation=(t, int(bad[0])))
    return SandwichReport(ok=True)


def _drive_cu_inplace(values: list[int], selections: Sequence[Sequence[int]]) -> None:
    for sel in selections:
        vmin = min(values[i] for i in sel)
        for i in sel:
            if values[i] == vmin:
                values[i] += 1


@dataclass(frozen=True)
class ProbeItemStats:
    item: Hashable
    count: int
    mean_error: float
    stderr: float


@dataclass(frozen=True)
class WorstCaseReport:
    items: list[ProbeItemStats]
    absent_mean: float
    absent_stderr: float
    ok: bool  # every present-item mean <= absent mean + 3 combined stderr


def worst_case_probe(
    m: int, d: int, stream: Sequence[Hashable], runs: int, seed: int
) -> WorstCaseReport:
    """Compare present-item errors against the absent-item error on a stream.

    Hash assignments are redrawn each run (memoized within a run); the
    absent item's error uses the exact subset expectation, present items
    use their assigned subsets.
    """
    config = SketchConfig(m, d)
    T = len(stream)
    counts: dict[Hashable, int] = {}
    for item in stream:
        counts[item] = counts.get(item, 0) + 1
    distinct = list(counts)

    sums = {item: 0.0 for item in distinct}
    sqsums = {item: 0.0 for item in distinct}
    absent_sum = 0.0
    absent_sq = 0.0

    for run in range(runs):
        rng = substream(seed, run)
        table = IdealHashTable(config)
        selections = [table.select(item, rng) for item in stream]
        values = [0] * m
        _drive_cu_inplace(values, selections)
        arr = np.asarray(values)
        for item in distinct:
            err = float(arr[list(table.assignments[item])].min()) - counts[item]
            sums[item] += err
            sqsums[item] += err * err
        abs_err = expected_min_over_subsets(values, d)
        absent_sum += abs_err
        absent_sq += abs_err * abs_err

    def _stats(total: float, sq: float) -> tuple[float, float]:
        mean = total / runs
        var = max(0.0, (sq - runs * mean * mean) / (runs - 1)) if runs > 1 else float("nan")
        return mean, math.sqrt(var / runs) if runs > 1 else float("nan")

    absent_mean, absent_se = _stats(absent_sum, absent_sq)
    items = []
    ok = True
    for item in distinct:
        mean, se = _stats(sums[item], sqsums[item])
        items.append(ProbeItemStats(item=item, count=counts[item], mean_error=mean, stderr=se))
        margin = 3.0 * math.hypot(se, absent_se) if runs > 1 else 0.0
        if mean > absent_mean + margin:
            ok = False
    return WorstCaseReport(items=items, absent_mean=absent_mean, absent_stderr=absent_se, ok=ok)


def gap_tail_probe(m: int, T: int, seed: int) -> dict[int, float]:
    """Empirical gap-tail fractions along one long CU trajectory at d = m - 1."""
    config = SimConfig(m=m, d=m - 1, T=T, runs=1, seed=seed, variant="cu")
    traj = run_trajectory(config, 0)
    return {
        level: float((traj.gap_trace >= level).sum()) / T
        for level in range(1, GAP_HISTOGRAM_LEVELS + 1)
    }


@dataclass(frozen=True)
class OracleResult:
    m: int
    d: int
    T: int
    exact_expected_error: Fraction

    @property
    def value(self) -> float:
        return float(self.exact_expected_error)

    @property
    def per_step(self) -> Fraction:
        return self.exact_expected_error / self.T


def brute_force_expected_error(m: int, d: int, T: int) -> OracleResult:
    """Exact E[error at horizon T] by enumerating every selection sequence.

    Averages the exact conditional subset expectation uniformly over all
    C(m, d)^T equally likely sequences; the result is an exact rational.
    """
    SketchConfig(m, d)
    if T < 1:
        raise ConfigurationError(f"T must be >= 1, got {T}")
    n_subsets = math.comb(m, d)
    leaves = n_subsets**T
    if leaves > ORACLE_LEAF_GUARD:
        raise OracleSizeError(
            f"C({m},{d})^{T} = {leaves} sequences exceeds the {ORACLE_LEAF_GUARD} guard"
        )
    subsets = list(combinations(range(m), d))
    total = Fraction(0)
    for sequence in product(subsets, repeat=T):
        values = [0] * m
        _drive_cu_inplace(values, sequence)
        total += _expected_min_exact(values, d)
    return OracleResult(m=m, d=d, T=T, exact_expected_error=total / leaves)
