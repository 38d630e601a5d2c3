import math
from fractions import Fraction

import numpy as np
import pytest

from cusketch.closed_form import bd_gap_tail
from cusketch.errors import ConfigurationError, OracleSizeError
from cusketch.simulate import (
    SimConfig,
    brute_force_expected_error,
    estimate_error,
    expected_min_over_subsets,
    gap_tail_probe,
    mix64,
    run_trajectory,
    sandwich_trace,
    substream,
    worst_case_probe,
)


class TestSubstreams:
    def test_mix64_is_deterministic_and_64_bit(self):
        a = mix64(12345, 7)
        assert a == mix64(12345, 7)
        assert 0 <= a < 2**64

    def test_runs_get_distinct_streams(self):
        outputs = {mix64(42, r) for r in range(1000)}
        assert len(outputs) == 1000

    def test_substream_replays(self):
        x = substream(9, 3).random(5)
        y = substream(9, 3).random(5)
        assert (x == y).all()


class TestSimConfig:
    def test_capped_variant_requires_g(self):
        with pytest.raises(ConfigurationError):
            SimConfig(m=4, d=2, T=10, runs=1, seed=0, variant="lb")

    def test_bad_variant(self):
        with pytest.raises(ConfigurationError):
            SimConfig(m=4, d=2, T=10, runs=1, seed=0, variant="min")

    def test_bad_horizon(self):
        with pytest.raises(ConfigurationError):
            SimConfig(m=4, d=2, T=0, runs=1, seed=0)


class TestExpectedMinOverSubsets:
    def test_two_ones_one_zero(self):
        assert expected_min_over_subsets([1, 1, 0], 2) == pytest.approx(1 / 3)

    def test_full_selection_returns_minimum(self):
        assert expected_min_over_subsets([5, 3, 9], 3) == 3.0

    def test_singleton_selection_returns_mean(self):
        vals = [2, 7, 1, 4]
        assert expected_min_over_subsets(vals, 1) == pytest.approx(np.mean(vals))

    def test_matches_direct_enumeration(self, rng):
        from itertools import combinations

        for _ in range(20):
            m = int(rng.integers(3, 8))
            d = int(rng.integers(1, m + 1))
            vals = rng.integers(0, 10, size=m).tolist()
            direct = np.mean([min(vals[i] for i in s) for s in combinations(range(m), d)])
            assert expected_min_over_subsets(vals, d) == pytest.approx(direct, abs=1e-12)

    def test_ties_handled(self):
        assert expected_min_over_subsets([2, 2, 2, 2], 2) == 2.0


class TestTrajectories:
    def test_deterministic_for_fixed_seed(self):
        config = SimConfig(m=6, d=3, T=500, runs=1, seed=77)
        a = run_trajectory(config, 0)
        b = run_trajectory(config, 0)
        assert (a.values == b.values).all()
        assert (a.gap_trace == b.gap_trace).all()

    def test_counter_sum_bounded_by_steps(self):
        config = SimConfig(m=5, d=2, T=300, runs=1, seed=3)
        traj = run_trajectory(config, 0)
        total = int(traj.values.sum())
        assert config.T <= total <= config.T * config.d
        assert traj.counter_rate == pytest.approx(total / (config.T * config.m))

    def test_capped_variants_respect_cap(self):
        for variant in ("lb", "ub"):
            config = SimConfig(m=5, d=2, T=400, runs=1, seed=11, variant=variant, g=2)
            traj = run_trajectory(config, 0)
            assert traj.gap_trace.max() <= 2
            assert int(traj.values.max() - traj.values.min()) <= 2


class TestEstimateError:
    def test_stats_shape_and_determinism(self):
        config = SimConfig(m=5, d=2, T=200, runs=8, seed=21)
        s1 = estimate_error(config)
        s2 = estimate_error(config)
        assert s1.mean_error_rate == s2.mean_error_rate
        assert len(s1.per_run_errors) == 8
        assert 0.0 <= s1.mean_error_rate <= 1.0
        assert s1.gap_histogram[1] >= s1.gap_histogram[2]

    def test_parallel_matches_serial(self, monkeypatch):
        config = SimConfig(m=5, d=2, T=100, runs=6, seed=4)
        serial = estimate_error(config)
        monkeypatch.setenv("CU_BOUND_THREADS", "3")
        parallel = estimate_error(config)
        assert parallel.mean_error_rate == serial.mean_error_rate
        assert parallel.per_run_errors == serial.per_run_errors

    def test_retain_flag_drops_per_run_lists(self):
        config = SimConfig(m=4, d=2, T=50, runs=3, seed=5, retain_per_run=False)
        stats = estimate_error(config)
        assert stats.per_run_errors == []

    def test_csv_layout(self):
        config = SimConfig(m=4, d=2, T=50, runs=2, seed=5)
        text = estimate_error(config).to_csv()
        lines = text.strip().splitlines()
        assert lines[0] == "run,error,counter_rate"
        assert lines[3] == "g,fraction"
        assert lines[1].startswith("0,")


class TestSandwich:
    def test_ordering_holds_on_seeded_traces(self):
        for seed in range(10):
            report = sandwich_trace(m=6, d=2, g=2, T=80, seed=seed)
            assert report.ok and report.first_violation is None

    def test_invalid_cap(self):
        with pytest.raises(ConfigurationError):
            sandwich_trace(m=4, d=2, g=0, T=10, seed=0)


class TestWorstCaseProbe:
    def test_distinct_stream_matches_absent_error(self):
        stream = [f"x{i}" for i in range(60)]
        report = worst_case_probe(m=12, d=3, stream=stream, runs=200, seed=19)
        assert report.ok
        assert len(report.items) == 60

    def test_repeated_item_error_stays_below_absent(self):
        stream = ["hot"] * 100
        report = worst_case_probe(m=10, d=3, stream=stream, runs=200, seed=23)
        assert report.ok
        hot = report.items[0]
        assert hot.count == 100
        assert hot.mean_error <= report.absent_mean + 3 * math.hypot(
            hot.stderr, report.absent_stderr
        )


class TestGapTail:
    def test_long_run_matches_birth_death_tail(self):
        m, T = 8, 200_000
        tails = gap_tail_probe(m=m, T=T, seed=2024)
        for g in (1, 2, 3):
            expected = bd_gap_tail(m, g)
            stderr = math.sqrt(expected * (1 - expected) / T)
            assert abs(tails[g] - expected) < 4 * stderr + 1e-3


class TestBruteForceOracle:
    def test_single_step(self):
        res = brute_force_expected_error(3, 2, 1)
        assert res.exact_expected_error == Fraction(1, 3)

    def test_two_steps(self):
        res = brute_force_expected_error(3, 2, 2)
        assert res.exact_expected_error == Fraction(8, 9)
        assert res.per_step == Fraction(4, 9)

    def test_guard_on_huge_enumerations(self):
        with pytest.raises(OracleSizeError):
            brute_force_expected_error(10, 5, 4)

    def test_monte_carlo_agrees_with_oracle(self):
        exact = brute_force_expected_error(4, 2, 3)
        config = SimConfig(m=4, d=2, T=3, runs=4000, seed=31)
        stats = estimate_error(config)
        mc = stats.mean_error_rate * config.T  # undo the per-step scaling
        stderr = stats.stderr_error_rate * config.T
        assert abs(mc - exact.value) < 4 * stderr
