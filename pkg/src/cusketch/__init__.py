"""Conservative-update count-min sketches with provable error bounds.

Public surface: sketch update rules and selection models (`sketch`), the
gap-capped Markov chain machinery (`states`, `kernel`, `bounds`), closed
forms for d = m - 1 (`closed_form`), the Monte-Carlo engine and brute-force
oracle (`simulate`), and a CLI (`cusketch`).
"""

from ._backend import BACKEND
from .bounds import (
    BoundResult,
    asymptotic_error,
    compute_bounds,
    evolve_occupancy,
    expected_error,
    stationary,
)
from .config import SketchConfig
from .kernel import (
    TransitionKernel,
    beta_lb,
    beta_ub,
    build_kernel,
    gamma_lb,
    gamma_ub,
    transition_prob,
)
from .simulate import (
    OracleResult,
    SimConfig,
    SimStats,
    brute_force_expected_error,
    estimate_error,
    gap_tail_probe,
    run_trajectory,
    sandwich_trace,
    worst_case_probe,
)
from .sketch import (
    CappedSketch,
    CounterArray,
    IdealHashTable,
    cu_update,
    delta_of,
    gap,
    lb_update,
    query,
    ub_update,
    uniform_select,
    zero_counters,
)
from .states import StateSpace, enumerate_states, state_space_size

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BoundResult",
    "CappedSketch",
    "CounterArray",
    "IdealHashTable",
    "OracleResult",
    "SimConfig",
    "SimStats",
    "SketchConfig",
    "StateSpace",
    "TransitionKernel",
    "asymptotic_error",
    "beta_lb",
    "beta_ub",
    "brute_force_expected_error",
    "build_kernel",
    "compute_bounds",
    "cu_update",
    "delta_of",
    "enumerate_states",
    "estimate_error",
    "evolve_occupancy",
    "expected_error",
    "gamma_lb",
    "gamma_ub",
    "gap",
    "gap_tail_probe",
    "lb_update",
    "query",
    "run_trajectory",
    "sandwich_trace",
    "state_space_size",
    "stationary",
    "transition_prob",
    "ub_update",
    "uniform_select",
    "worst_case_probe",
    "zero_counters",
]
