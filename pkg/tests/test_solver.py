import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tugofwar import (
    barrier_bounds,
    build_segment,
    build_star,
    dpp_apply,
    largest_subsolution_below,
    residual,
    residual_vector,
    segment_value,
    smallest_supersolution_above,
    solve,
)

from util import random_segment, random_star


def test_dpp_apply_flat_neighborhood():
    spec = build_segment(1, 0, 0, 1)
    assert dpp_apply(spec, np.array([0.0, 99.0, 0.0]), 1) == 1.0


def test_dpp_apply_wide_gap():
    spec = build_segment(1, 0, 20, 1)
    assert dpp_apply(spec, np.array([0.0, 0.0, 20.0]), 1) == 10.0


def test_dpp_apply_tied_branches():
    spec = build_segment(1, 0, 2, 1)
    assert dpp_apply(spec, np.array([0.0, 0.0, 2.0]), 1) == 1.0


def test_dpp_apply_rejects_terminal_node():
    spec = build_segment(1, 0, 2, 1)
    with pytest.raises(ValueError):
        dpp_apply(spec, np.zeros(3), 0)


@pytest.mark.parametrize(
    "ui,expected", [(1.0, 0.0), (0.0, -1.0), (2.0, 1.0)]
)
def test_residual_signs(ui, expected):
    spec = build_segment(1, 0, 0, 1)
    u = np.array([0.0, ui, 0.0])
    assert residual(spec, u, 1) == pytest.approx(expected, abs=1e-15)


def test_residual_matches_update_identity():
    rng = np.random.default_rng(0)
    for _ in range(50):
        spec = random_star(rng) if rng.random() < 0.5 else random_segment(rng)
        u = rng.uniform(-5, 5, size=spec.graph.num_nodes)
        for i in spec.graph.interior:
            assert residual(spec, u, i) == pytest.approx(
                u[i] - dpp_apply(spec, u, i), abs=1e-12
            )


def test_barrier_bounds_segment():
    lower, upper = barrier_bounds(build_segment(2, 0, 30, 1))
    assert upper.tolist() == [30, 31, 31, 30]
    assert lower.tolist() == [-30, -29, -29, -30]


def test_barrier_bounds_terminal_is_k():
    lower, upper = barrier_bounds(build_segment(3, -7, 2, 1))
    assert upper[0] == 7 and lower[0] == -7
    assert upper[4] == 7 and lower[4] == -7


def test_barrier_bounds_symmetric_zero_payoffs():
    _, upper = barrier_bounds(build_segment(3, 0, 0, 1))
    assert upper.tolist() == [0, 1, 2, 1, 0]


def test_solve_single_node():
    rep = solve(build_segment(1, 0, 10, 1))
    assert rep.converged
    assert rep.values[1] == pytest.approx(5.0, abs=1e-9)


def test_solve_classical_regime():
    rep = solve(build_segment(2, 0, 30, 1), tol=1e-12)
    assert np.allclose(rep.values, [0, 10, 20, 30], atol=1e-9)


def test_solve_handover_regime():
    rep = solve(build_segment(2, 0, 2, 1), tol=1e-12)
    assert np.allclose(rep.values, [0, 1, 2, 2], atol=1e-9)


def test_solve_terminals_pinned_and_residual_small():
    spec = build_star([3, 2, 4], [1.0, -2.0, 5.0], 0.5)
    rep = solve(spec, tol=1e-11)
    assert rep.converged
    for t in spec.graph.terminal:
        assert rep.values[t] == spec.graph.payoffs[t]
    assert rep.max_residual <= 10 * 1e-11


def test_solve_within_barriers():
    rng = np.random.default_rng(3)
    for _ in range(20):
        spec = random_segment(rng, max_n=20)
        rep = solve(spec, tol=1e-12)
        lower, upper = barrier_bounds(spec)
        assert np.all(rep.values <= upper + 1e-12)
        assert np.all(rep.values >= lower - 1e-12)


def test_solve_matches_closed_form_on_segments():
    rng = np.random.default_rng(4)
    for _ in range(25):
        spec = random_segment(rng, max_n=25)
        rep = solve(spec, tol=1e-12)
        assert rep.converged
        assert np.max(np.abs(rep.values - segment_value(spec).values)) < 1e-9


def test_solve_mirror_symmetry():
    a = solve(build_segment(5, -3, 8, 0.7), tol=1e-12).values
    b = solve(build_segment(5, 8, -3, 0.7), tol=1e-12).values
    assert np.allclose(a, b[::-1], atol=1e-9)


def test_solve_reports_non_convergence():
    with pytest.warns(RuntimeWarning):
        rep = solve(build_segment(30, 0, 100, 1), tol=1e-14, max_iter=3)
    assert not rep.converged
    assert rep.iterations == 3


@given(
    n=st.integers(1, 8),
    shift=st.floats(-50, 50),
    seed=st.integers(0, 10**6),
)
@settings(max_examples=60, deadline=None)
def test_update_monotone_and_shift_invariant(n, shift, seed):
    rng = np.random.default_rng(seed)
    spec = build_segment(n, -1.0, 2.0, 1.0)
    u = rng.uniform(-5, 5, size=n + 2)
    v = u + rng.uniform(0, 3, size=n + 2)
    for i in spec.graph.interior:
        assert dpp_apply(spec, u, i) <= dpp_apply(spec, v, i) + 1e-12
        assert dpp_apply(spec, u + shift, i) == pytest.approx(
            dpp_apply(spec, u, i) + shift, abs=1e-9
        )


def test_clamp_down_yields_subsolution_below():
    rng = np.random.default_rng(9)
    spec = build_star([2, 3, 1], [0.0, 4.0, -1.0], 1.0)
    u0 = solve(spec, tol=1e-12).values
    bumped = u0.copy()
    bumped[list(spec.graph.interior)] -= rng.uniform(0, 2, size=len(spec.graph.interior))
    sub = largest_subsolution_below(spec, bumped)
    assert np.all(sub <= bumped + 1e-12)
    assert np.all(residual_vector(spec, sub) <= 1e-10)


def test_clamp_up_yields_supersolution_above():
    rng = np.random.default_rng(10)
    spec = build_segment(6, 1.0, -2.0, 0.5)
    u0 = solve(spec, tol=1e-12).values
    bumped = u0.copy()
    bumped[list(spec.graph.interior)] += rng.uniform(0, 2, size=len(spec.graph.interior))
    sup = smallest_supersolution_above(spec, bumped)
    assert np.all(sup >= bumped - 1e-12)
    assert np.all(residual_vector(spec, sup) >= -1e-10)
