"""Command-line front end.

Subcommands:
    bounds       finite-horizon lower/upper error bounds for (m, d, g, T)
    asymptotic   T -> infinity limits of the bounds
    closed-form  d = m - 1 birth-death results and g = 1 limits
    simulate     seeded Monte-Carlo estimate of the average error
    oracle       exact expected error by brute-force enumeration
    table1       bound table for m=50, d=4, T=250 over a range of g
    verify       run the cross-check suites (exit 3 on any failure)

Every command emits one machine-readable record (JSON by default, CSV with
--format csv) containing the echoed command, its parameters, the results
with numbers rendered as full-precision decimal strings, and the wall time.
Exit codes: 0 success, 1 invalid arguments, 2 numeric non-convergence,
3 verification failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from . import closed_form as cf
from .bounds import asymptotic_error, compute_bounds
from .errors import (
    ConfigurationError,
    InvalidEventError,
    NonConvergenceError,
    OracleSizeError,
)
from .kernel import build_kernel
from .simulate import (
    SimConfig,
    brute_force_expected_error,
    estimate_error,
    sandwich_trace,
)
from .states import enumerate_states, state_space_size

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NO_CONVERGENCE = 2
EXIT_VERIFY_FAILED = 3


class _CliError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 1 on bad flags, not argparse's default 2
        raise _CliError(message)


def _fmt(x):
    if isinstance(x, float):
        return format(x, ".17g")
    return x


def _stringify(obj):
    if isinstance(obj, dict):
        return {k: _stringify(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_stringify(v) for v in obj]
    return _fmt(obj)


def _flatten(obj, prefix=""):
    rows = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            rows.extend(_flatten(v, f"{prefix}{k}." if prefix else f"{k}."))
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            rows.extend(_flatten(v, f"{prefix}{i}."))
    else:
        rows.append((prefix[:-1], _fmt(obj)))
    return rows


def _emit(record: dict, fmt: str) -> None:
    if fmt == "json":
        print(json.dumps(_stringify(record), indent=2))
    else:
        print("key,value")
        for key, value in _flatten(record):
            print(f"{key},{value}")


def _record(command: str, parameters: dict, results: dict, started: float) -> dict:
    return {
        "command": command,
        "parameters": parameters,
        "results": results,
        "wall_time_s": time.perf_counter() - started,
    }


def _cmd_bounds(args) -> int:
    started = time.perf_counter()
    variants = ["lb", "ub"] if args.variant == "both" else [args.variant]
    space = enumerate_states(args.m, args.d, args.g)
    results: dict = {"n_states": len(space)}
    for variant in variants:
        t0 = time.perf_counter()
        kernel = build_kernel(space, variant)
        from .bounds import expected_error_from_kernel

        value = expected_error_from_kernel(kernel, args.t)
        results["lower" if variant == "lb" else "upper"] = value
        results[f"{variant}_edges"] = kernel.n_edges
        results[f"{variant}_seconds"] = time.perf_counter() - t0
        if args.dump_kernel:
            path = args.dump_kernel
            if len(variants) > 1:
                path = f"{path}.{variant}.json" if not path.endswith(".json") else path.replace(
                    ".json", f".{variant}.json"
                )
            with open(path, "w") as fh:
                json.dump(kernel.to_dict(), fh)
            results[f"{variant}_kernel_dump"] = path
    record = _record(
        "bounds",
        {"m": args.m, "d": args.d, "g": args.g, "t": args.t, "variant": args.variant},
        results,
        started,
    )
    _emit(record, args.format)
    return EXIT_OK


def _cmd_asymptotic(args) -> int:
    started = time.perf_counter()
    variants = ["lb", "ub"] if args.variant == "both" else [args.variant]
    results = {"n_states": state_space_size(args.m, args.d, args.g), "tol": args.tol}
    for variant in variants:
        value = asymptotic_error(args.m, args.d, args.g, variant, tol=args.tol)
        results["lower" if variant == "lb" else "upper"] = value
    record = _record(
        "asymptotic",
        {"m": args.m, "d": args.d, "g": args.g, "variant": args.variant, "tol": args.tol},
        results,
        started,
    )
    _emit(record, args.format)
    return EXIT_OK


def _cmd_closed_form(args) -> int:
    started = time.perf_counter()
    summary = cf.summarize(args.m)
    gmax = args.g if args.g is not None else 10
    results = {
        "pi": [cf.bd_limiting(args.m, f) for f in range(11)],
        "error_rate": summary.error_rate,
        "counter_rate": summary.counter_rate,
        "gap_tail": {str(g): cf.bd_gap_tail(args.m, g) for g in range(1, gmax + 1)},
        "g1_lower": summary.g1_lower,
        "g1_upper": summary.g1_upper,
    }
    record = _record("closed-form", {"m": args.m, "g": args.g}, results, started)
    _emit(record, args.format)
    return EXIT_OK


def _cmd_simulate(args) -> int:
    started = time.perf_counter()
    config = SimConfig(
        m=args.m,
        d=args.d,
        T=args.t,
        runs=args.runs,
        seed=args.seed,
        variant=args.variant,
        g=args.cap,
    )
    stats = estimate_error(config)
    if args.format == "csv":
        print(stats.to_csv(), end="")
        return EXIT_OK
    record = _record(
        "simulate",
        {
            "m": args.m,
            "d": args.d,
            "t": args.t,
            "runs": args.runs,
            "seed": args.seed,
            "variant": args.variant,
            "cap": args.cap,
        },
        stats.to_dict(),
        started,
    )
    _emit(record, "json")
    return EXIT_OK


def _cmd_oracle(args) -> int:
    started = time.perf_counter()
    result = brute_force_expected_error(args.m, args.d, args.t)
    record = _record(
        "oracle",
        {"m": args.m, "d": args.d, "t": args.t},
        {
            "expected_error": float(result.exact_expected_error),
            "expected_error_exact": str(result.exact_expected_error),
            "expected_error_per_step": float(result.per_step),
        },
        started,
    )
    _emit(record, args.format)
    return EXIT_OK


def _cmd_table1(args) -> int:
    started = time.perf_counter()
    if args.gmax >= 4:
        print(
            "warning: g >= 4 can take minutes to hours depending on hardware",
            file=sys.stderr,
        )
    rows = []
    for g in range(1, args.gmax + 1):
        res = compute_bounds(m=50, d=4, g=g, T=250)
        rows.append(
            {
                "g": g,
                "lower": res.lower,
                "upper": res.upper,
                "lower_seconds": res.lower_seconds,
                "upper_seconds": res.upper_seconds,
            }
        )
        print(
            f"g={g}  lower={res.lower:.5f}  upper={res.upper:.5f}  "
            f"({res.lower_seconds + res.upper_seconds:.2f} s)",
            file=sys.stderr,
        )
    record = _record(
        "table1", {"m": 50, "d": 4, "t": 250, "gmax": args.gmax}, {"rows": rows}, started
    )
    _emit(record, args.format)
    return EXIT_OK


def _verify_checks(level: str):
    """Yield (name, passed) pairs for the cross-check suite."""
    from .bounds import expected_error

    oracle_cases = [(3, 2, 1), (3, 2, 2), (4, 2, 1)]
    if level == "full":
        oracle_cases = [(m, 2, T) for m in (3, 4) for T in (1, 2, 3)]
    for m, d, T in oracle_cases:
        exact = float(brute_force_expected_error(m, d, T).per_step)
        ok = all(
            abs(expected_error(m, d, T, T, variant) - exact) <= 1e-10
            for variant in ("lb", "ub")
        )
        yield f"oracle-equivalence m={m} d={d} T={T}", ok

    rng = np.random.Generator(np.random.PCG64(12345))
    n_sandwich = 1000 if level == "full" else 100
    ok = True
    for _ in range(n_sandwich):
        m = int(rng.integers(2, 9))
        d = int(rng.integers(1, m + 1))
        g = int(rng.integers(1, 4))
        T = int(rng.integers(1, 51 if level == "full" else 31))
        if not sandwich_trace(m, d, g, T, seed=int(rng.integers(0, 2**63))).ok:
            ok = False
            break
    yield f"pathwise-sandwich x{n_sandwich}", ok

    ok = True
    for m in range(3, 9):
        for d in (2, m - 1):
            for g in (1, 2, 3):
                space = enumerate_states(m, d, g)
                for variant in ("lb", "ub"):
                    build_kernel(space, variant)  # raises on any inconsistency
    yield "kernel-soundness m<=8", ok

    mmax = 20 if level == "full" else 8
    ok = True
    for m in range(3, mmax + 1):
        lo, hi = cf.g1_asymptotic(m)
        if abs(asymptotic_error(m, m - 1, 1, "lb") - lo) > 1e-10:
            ok = False
        if abs(asymptotic_error(m, m - 1, 1, "ub") - hi) > 1e-10:
            ok = False
    yield f"closed-form-vs-markov m<={mmax}", ok

    if level == "full":
        config = SimConfig(m=10, d=9, T=10**5, runs=1, seed=7, variant="cu")
        stats = estimate_error(config)
        ok = (
            abs(stats.mean_error_rate - 0.5) < 0.01
            and abs(stats.mean_counter_rate - 0.5) < 0.01
        )
        yield "long-run-rates m=10 d=9", ok


def _cmd_verify(args) -> int:
    started = time.perf_counter()
    failures = []
    for name, ok in _verify_checks(args.level):
        print(f"{'ok  ' if ok else 'FAIL'}  {name}")
        if not ok:
            failures.append(name)
    print(f"verify {args.level}: {len(failures)} failure(s) "
          f"in {time.perf_counter() - started:.1f} s")
    return EXIT_VERIFY_FAILED if failures else EXIT_OK


def _build_parser() -> _Parser:
    parser = _Parser(prog="cusketch", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p, t_flag=True):
        p.add_argument("--m", type=int, required=True)
        p.add_argument("--d", type=int, required=True)
        p.add_argument("--format", choices=("json", "csv"), default="json")
        if t_flag:
            p.add_argument("--t", type=int, required=True)

    p = sub.add_parser("bounds", help="finite-horizon error bounds")
    common(p)
    p.add_argument("--g", type=int, required=True)
    p.add_argument("--variant", choices=("lb", "ub", "both"), default="both")
    p.add_argument("--dump-kernel", metavar="PATH", default=None)
    p.set_defaults(func=_cmd_bounds)

    p = sub.add_parser("asymptotic", help="long-run error bounds")
    common(p, t_flag=False)
    p.add_argument("--g", type=int, required=True)
    p.add_argument("--variant", choices=("lb", "ub", "both"), default="both")
    p.add_argument("--tol", type=float, default=1e-12)
    p.set_defaults(func=_cmd_asymptotic)

    p = sub.add_parser("closed-form", help="d = m - 1 closed-form results")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--g", type=int, default=None)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=_cmd_closed_form)

    p = sub.add_parser("simulate", help="Monte-Carlo error estimate")
    common(p)
    p.add_argument("--runs", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--variant", choices=("cu", "lb", "ub"), default="cu")
    p.add_argument("--cap", type=int, default=None, help="gap cap g for lb/ub")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("oracle", help="exact brute-force expected error")
    common(p)
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("table1", help="bound table for m=50, d=4, T=250")
    p.add_argument("--gmax", type=int, default=3)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=_cmd_table1)

    p = sub.add_parser("verify", help="run the cross-check suites")
    p.add_argument("--level", choices=("quick", "full"), default="quick")
    p.set_defaults(func=_cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.subcommand == "table1" and not 1 <= args.gmax <= 5:
            raise _CliError("--gmax must be in [1, 5]")
        return args.func(args)
    except _CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConfigurationError, InvalidEventError, OracleSizeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NonConvergenceError as exc:
        print(f"error: {exc} (residual {exc.residual:.3e})", file=sys.stderr)
        return EXIT_NO_CONVERGENCE


if __name__ == "__main__":
    sys.exit(main())
