import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cusketch.errors import InvalidEventError
from cusketch.kernel import (
    beta_lb,
    beta_ub,
    build_kernel,
    gamma_lb,
    gamma_ub,
    transition_prob,
)
from cusketch.states import enumerate_states


class TestGammaLb:
    def test_identity_on_capped_full_selection(self):
        assert gamma_lb((1, 2), 1, 2, d=2) == (1, 2)

    def test_full_minimum_shifts_down(self):
        assert gamma_lb((1, 2), 0, 1, d=2) == (3, 0)

    def test_partial_move_between_levels(self):
        assert gamma_lb((1, 2, 2), 1, 1, d=2) == (1, 1, 3)

    def test_invalid_event_rejected(self):
        with pytest.raises(InvalidEventError):
            gamma_lb((1, 2), 1, 3, d=2)  # c > d
        with pytest.raises(InvalidEventError):
            gamma_lb((1, 2), 0, 2, d=2)  # c > k_0
        with pytest.raises(InvalidEventError):
            gamma_lb((1, 2), 2, 1, d=2)  # v > g


class TestGammaUb:
    def test_boost_at_cap_g1(self):
        assert gamma_ub((1, 2), 1, 2, d=2) == (1, 2)  # (m - d, d) = (1, 2)

    def test_matches_lb_off_cap(self):
        assert gamma_ub((1, 2), 0, 1, d=2) == gamma_lb((1, 2), 0, 1, d=2) == (3, 0)

    def test_boost_at_cap_g2(self):
        assert gamma_ub((1, 2, 4), 2, 2, d=2) == (3, 2, 2)

    def test_boost_at_cap_g3(self):
        # (k0+k1, k2, k3-d, d)
        assert gamma_ub((1, 1, 2, 3), 3, 3, d=3) == (2, 2, 0, 3)


class TestTransitionProb:
    def test_examples(self):
        assert transition_prob((1, 2), 0, 1, m=3, d=2) == pytest.approx(2 / 3)
        assert transition_prob((1, 2), 1, 2, m=3, d=2) == pytest.approx(1 / 3)
        assert transition_prob((1, 2), 1, 1, m=3, d=2) == 0.0

    def test_events_from_a_state_sum_to_one(self):
        for m, d, g in [(5, 2, 2), (6, 3, 2), (7, 4, 3)]:
            space = enumerate_states(m, d, g)
            for i in range(len(space)):
                k = space.state(i)
                total = sum(
                    transition_prob(k, v, c, m, d)
                    for v in range(g + 1)
                    if k[v] >= 1
                    for c in range(1, min(d, k[v]) + 1)
                )
                assert total == pytest.approx(1.0, abs=1e-12)


class TestBeta:
    def test_lb_examples(self):
        assert beta_lb((3, 0), 0, 2, m=3, d=2) == pytest.approx(1 / 3)
        assert beta_lb((1, 2), 0, 1, m=3, d=2) == pytest.approx(2 / 3)
        assert beta_lb((1, 2), 1, 2, m=3, d=2) == 0.0

    def test_ub_examples(self):
        assert beta_ub((1, 2), 1, 2, m=3, d=2) == pytest.approx(1.0)
        assert beta_ub((1, 2), 0, 1, m=3, d=2) == pytest.approx(2 / 3)
        assert beta_ub((1, 4), 1, 2, m=5, d=2) == pytest.approx(5 / 10)

    def test_all_betas_within_unit_interval(self):
        for m, d, g in [(4, 2, 1), (6, 3, 2), (8, 7, 3), (5, 5, 2)]:
            space = enumerate_states(m, d, g)
            for variant, beta in (("lb", beta_lb), ("ub", beta_ub)):
                for i in range(len(space)):
                    k = space.state(i)
                    for v in range(g + 1):
                        if k[v] < 1:
                            continue
                        for c in range(1, min(d, k[v]) + 1):
                            assert 0.0 <= beta(k, v, c, m, d) <= 1.0


class TestBuildKernel:
    def test_lb_rows_for_two_state_chain(self):
        space = enumerate_states(3, 2, 1)
        kernel = build_kernel(space, "lb")
        start = sorted(kernel.edges_from(0))
        assert start == [(1, 0, 2, pytest.approx(1.0), pytest.approx(1 / 3))]
        other = sorted(kernel.edges_from(1))
        assert other == [
            (0, 0, 1, pytest.approx(2 / 3), pytest.approx(2 / 3)),
            (1, 1, 2, pytest.approx(1 / 3), 0.0),
        ]

    def test_ub_rows_for_two_state_chain(self):
        space = enumerate_states(3, 2, 1)
        kernel = build_kernel(space, "ub")
        other = sorted(kernel.edges_from(1))
        assert other == [
            (0, 0, 1, pytest.approx(2 / 3), pytest.approx(2 / 3)),
            (1, 1, 2, pytest.approx(1 / 3), pytest.approx(1.0)),
        ]

    def test_matches_scalar_functions(self):
        m, d, g = 6, 3, 2
        space = enumerate_states(m, d, g)
        for variant, gamma, beta in (("lb", gamma_lb, beta_lb), ("ub", gamma_ub, beta_ub)):
            kernel = build_kernel(space, variant)
            for src, dst, v, c, p, b in zip(
                kernel.src, kernel.dst, kernel.v, kernel.c, kernel.p, kernel.beta
            ):
                k = space.state(src)
                assert space.index(gamma(k, v, c, d)) == dst
                assert p == pytest.approx(transition_prob(k, v, c, m, d), abs=1e-14)
                assert b == pytest.approx(beta(k, v, c, m, d), abs=1e-14)

    @settings(max_examples=30, deadline=None)
    @given(
        m=st.integers(2, 10),
        d_frac=st.floats(0.01, 1.0),
        g=st.integers(1, 4),
        variant=st.sampled_from(["lb", "ub"]),
    )
    def test_rows_stochastic_and_closed(self, m, d_frac, g, variant):
        d = max(1, round(d_frac * m))
        space = enumerate_states(m, d, g)
        kernel = build_kernel(space, variant)  # raises on closure/row-sum bugs
        sums = np.zeros(len(space))
        np.add.at(sums, kernel.src, kernel.p)
        assert np.abs(sums - 1.0).max() < 1e-12
        assert kernel.n_edges <= m * len(space)

    def test_edge_count_bound_per_row(self):
        space = enumerate_states(7, 3, 2)
        kernel = build_kernel(space, "lb")
        for i in range(len(space)):
            k = space.state(i)
            bound = sum(min(3, kv) for kv in k if kv >= 1)
            assert len(list(kernel.edges_from(i))) <= bound


class TestSerialization:
    def test_dump_layout_round_trips(self, tmp_path):
        space = enumerate_states(4, 2, 2)
        kernel = build_kernel(space, "ub")
        payload = kernel.to_dict()
        path = tmp_path / "kernel.json"
        path.write_text(json.dumps(payload))
        loaded = json.loads(path.read_text())
        assert loaded["m"] == 4 and loaded["d"] == 2 and loaded["g"] == 2
        assert loaded["variant"] == "ub"
        assert len(loaded["states"]) == len(space)
        assert len(loaded["edges"]) == kernel.n_edges
        src, dst, v, c, p, beta = loaded["edges"][0]
        assert 0 <= src < len(space) and 0 <= dst < len(space)
        assert math.isclose(sum(e[4] for e in loaded["edges"]), len(space))
