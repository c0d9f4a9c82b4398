import numpy as np
import pytest

from tugofwar import (
    DegenerateInputError,
    PreconditionError,
    barrier_bounds,
    build_segment,
    classify,
    comparison_test,
    residual_vector,
    solve,
    strictify,
)

from util import random_segment, random_star, random_sub_super_pair


def test_solver_output_classifies_as_solution():
    rng = np.random.default_rng(1)
    for _ in range(10):
        spec = random_star(rng)
        assert classify(spec, solve(spec, tol=1e-12).values).kind == "solution"


def test_constant_min_payoff_is_subsolution():
    spec = build_segment(3, -2, 5, 1)
    u = np.full(5, -2.0)
    cls = classify(spec, u)
    assert cls.kind == "subsolution"
    assert np.all(cls.residuals == -1.0)  # each G = min(-eps, 0)


def test_upper_barrier_is_supersolution():
    spec = build_segment(4, -3, 7, 1)
    _, upper = barrier_bounds(spec)
    assert classify(spec, upper).kind in ("supersolution", "solution")


def test_classify_neither():
    spec = build_segment(2, 0, 0, 1)
    u = np.array([0.0, 5.0, -5.0, 0.0])
    assert classify(spec, u).kind == "neither"


def test_strictify_frozen_example():
    # v = [0,1,2,2] on the n=2 segment with payoffs {0,2} and eps=1:
    # C=2, g(a) = 1.1a - 0.0125a^2, mu = 0.05*min(1, 1/8)
    spec = build_segment(2, 0, 2, 1)
    res = strictify(spec, np.array([0.0, 1.0, 2.0, 2.0]), delta=0.1)
    assert res.tilde_values[1] == pytest.approx(1.0875, abs=1e-12)
    assert res.tilde_values[2] == pytest.approx(2.15, abs=1e-12)
    assert res.mu == pytest.approx(0.00625, abs=1e-15)
    assert np.min(residual_vector(spec, res.tilde_values)) >= res.mu - 1e-12


def test_strictify_delta_to_zero_limit():
    spec = build_segment(2, 0, 2, 1)
    v = np.array([0.0, 1.0, 2.0, 2.0])
    last_disp, last_mu = np.inf, np.inf
    for delta in (0.2, 0.1, 0.05, 0.025, 0.0125):
        res = strictify(spec, v, delta)
        disp = np.max(np.abs(res.tilde_values - v))
        assert disp < last_disp and res.mu < last_mu
        last_disp, last_mu = disp, res.mu
    assert last_disp < 0.05 and last_mu < 1e-3


def test_strictify_shifted_barrier():
    spec = build_segment(3, 0, 0, 1)
    _, upper = barrier_bounds(spec)
    res = strictify(spec, upper + 1.0, delta=0.05)
    assert res.mu > 0
    assert np.min(residual_vector(spec, res.tilde_values)) >= res.mu - 1e-12


def test_strictify_rejects_degenerate_c():
    spec = build_segment(1, -1, 1, 1)
    v = np.array([-1.0, 0.0, 1.0])  # supersolution? G = min(0-(-1)-1, 0-0) = 0, yes
    with pytest.raises(DegenerateInputError):
        strictify(spec, v, delta=0.1)


def test_strictify_rejects_subsolution():
    spec = build_segment(2, 0, 2, 1)
    with pytest.raises(PreconditionError):
        strictify(spec, np.array([0.0, -3.0, -3.0, 2.0]), delta=0.1)


def test_transform_slope_positive_on_value_range():
    # g'(a) = (1+delta) - (delta/(2C)) a stays positive for |a| <= C
    for delta in (0.01, 0.1, 0.5):
        for C in (0.5, 2.0, 40.0):
            a = np.linspace(-C, C, 101)
            slope = (1 + delta) - (delta / (2 * C)) * a
            assert np.all(slope > 0)


def test_comparison_solution_vs_barrier():
    spec = build_segment(4, -2, 6, 1)
    u = solve(spec, tol=1e-12).values
    _, upper = barrier_bounds(spec)
    assert comparison_test(spec, u, upper)


def test_comparison_constant_vs_solution():
    spec = build_segment(3, 1, 4, 1)
    u = solve(spec, tol=1e-12).values
    assert comparison_test(spec, np.full(5, 1.0), u)


def test_comparison_strictified_dominates():
    spec = build_segment(3, 1, 4, 0.5)
    u = solve(spec, tol=1e-12).values
    res = strictify(spec, u + 0.5, delta=0.05)
    assert comparison_test(spec, u, res.tilde_values)


def test_comparison_rejects_unordered_terminals():
    spec = build_segment(2, 0, 2, 1)
    u = solve(spec, tol=1e-12).values
    v = u.copy()
    v[3] -= 1.0
    with pytest.raises(PreconditionError) as err:
        comparison_test(spec, u, v)
    assert 3 in err.value.nodes


def test_comparison_randomized_pairs():
    rng = np.random.default_rng(42)
    for _ in range(60):
        spec = random_segment(rng, max_n=15) if rng.random() < 0.5 else random_star(rng)
        sub, sup = random_sub_super_pair(spec, rng)
        assert comparison_test(spec, sub, sup)
