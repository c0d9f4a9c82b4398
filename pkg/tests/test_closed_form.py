import numpy as np
import pytest

from tugofwar import (
    LET,
    StarReductionError,
    build_segment,
    build_star,
    exact_expected,
    q_parameter,
    residual_vector,
    segment_strategies,
    segment_value,
    solve,
    star_value,
)

from util import random_star


def q_grid(n: int, count: int = 40) -> list[float]:
    """Q values covering every regime and every boundary for this n."""
    boundaries = [float(2 * k - n + 1) for k in range(1, n)] + [float(n + 1)]
    qs = set(boundaries)
    qs.update(b - 0.5 for b in boundaries if b - 0.5 >= 0)
    qs.update([0.0, n + 1.5, n + 2.0, 2.0 * (n + 1)])
    grid = np.linspace(0.0, n + 3.0, max(count - len(qs), 8))
    qs.update(float(x) for x in grid)
    return sorted(qs)


@pytest.mark.parametrize(
    "f0,fn1,eps,expected",
    [(0, 30, 1, 30.0), (5, 5, 2, 0.0), (0, 2, 1, 2.0), (4, 0, 2, 2.0)],
)
def test_q_parameter(f0, fn1, eps, expected):
    assert q_parameter(build_segment(2, f0, fn1, eps)) == expected


def test_q_parameter_rejects_non_segment():
    with pytest.raises(ValueError):
        q_parameter(build_star([1, 1, 1], [0, 0, 0], 1))


def test_case_a_linear_interpolation():
    sol = segment_value(build_segment(2, 0, 30, 1))
    assert sol.case_label == "a"
    assert sol.values.tolist() == [0, 10, 20, 30]


def test_case_b_handover_ladder():
    sol = segment_value(build_segment(2, 0, 2, 1))
    assert sol.case_label == "b"
    assert sol.values.tolist() == [0, 1, 2, 2]


def test_case_c_symmetric():
    sol = segment_value(build_segment(3, 0, 0, 1))
    assert sol.case_label == "c"
    assert sol.k == 1
    assert sol.values.tolist() == [0, 1, 2, 1, 0]


def test_case_c_even_parity_switch():
    sol = segment_value(build_segment(4, 0, 0, 1))
    assert sol.case_label == "c" and sol.k == 2
    assert sol.values.tolist() == [0, 1, 2, 2, 1, 0]


def test_mirrored_inputs():
    sol = segment_value(build_segment(2, 30, 0, 1))
    assert sol.mirrored
    assert sol.values.tolist() == [30, 20, 10, 0]


def test_n1_covers_q_up_to_two():
    for q, case in [(0.0, "b"), (1.0, "b"), (2.0, "b"), (2.5, "a")]:
        sol = segment_value(build_segment(1, 0, q, 1))
        assert sol.case_label == case
        assert np.max(np.abs(residual_vector(build_segment(1, 0, q, 1), sol.values))) < 1e-12


@pytest.mark.parametrize("n", [1, 2, 3, 5, 8, 13])
@pytest.mark.parametrize("eps", [0.1, 1.0, 3.0])
def test_values_null_residual_across_regimes(n, eps):
    for q in q_grid(n):
        spec = build_segment(n, 0.0, q * eps, eps)
        sol = segment_value(spec)
        res = residual_vector(spec, sol.values)
        assert np.max(np.abs(res)) <= 1e-12 * max(1.0, q * eps), (n, eps, q)


def test_family_range_at_handover_boundary():
    sol = segment_value(build_segment(4, 0, 5, 1))
    assert sol.case_label == "b" and sol.q == 5.0
    assert sol.family_j_range == (0, 4)


def test_family_range_at_switch_boundary():
    # n=4, Q=1 hits 2k-n+1 at k=2; j range is [0, min(k, n-2)]
    sol = segment_value(build_segment(4, 0, 1, 1))
    assert sol.case_label == "c" and sol.k == 2
    assert sol.family_j_range == (0, 2)


def test_boundary_snapping_within_tolerance():
    eps = 0.1
    sol = segment_value(build_segment(4, 0.0, 5 * eps + 1e-14, eps))
    assert sol.q == 5.0
    assert sol.family_j_range == (0, 4)


def test_strategies_case_a():
    sol = segment_value(build_segment(2, 0, 30, 1))
    pair = segment_strategies(sol)
    assert pair.p1_target[1] == 2 and pair.p1_target[2] == 3
    assert pair.p2_target[1] == 0 and pair.p2_target[2] == 1


def test_strategies_case_b_default():
    sol = segment_value(build_segment(2, 0, 2, 1))
    pair = segment_strategies(sol)
    assert pair.p1_target[1] == LET and pair.p1_target[2] == LET
    assert pair.p2_target[1] == 0 and pair.p2_target[2] == 1


def test_strategies_case_c_split():
    sol = segment_value(build_segment(3, 0, 0, 1))
    pair = segment_strategies(sol)
    assert all(pair.p1_target[i] == LET for i in (1, 2, 3))
    assert pair.p2_target[1] == 0  # retreat left of the switch
    assert pair.p2_target[2] == 3 and pair.p2_target[3] == 4  # run right of it


def test_strategies_mirrored():
    sol = segment_value(build_segment(2, 30, 0, 1))
    pair = segment_strategies(sol)
    # oriented case (a) pulls to the rich end, which is node 0 here
    assert pair.p1_target[1] == 0 and pair.p1_target[2] == 1
    assert pair.p2_target[1] == 2 and pair.p2_target[2] == 3


def test_strategies_realize_values():
    for n, f0, fn1, eps in [(2, 0, 30, 1), (2, 0, 2, 1), (3, 0, 0, 1), (5, 2, -7, 0.5)]:
        spec = build_segment(n, f0, fn1, eps)
        sol = segment_value(spec)
        got = exact_expected(spec, segment_strategies(sol))
        assert np.max(np.abs(got - sol.values)) < 1e-12


def test_family_members_realize_values():
    # handover boundary on n=3 (Q=4) and switch boundary (Q=2, k=2)
    for fn1 in (4.0, 2.0):
        spec = build_segment(3, 0, fn1, 1)
        sol = segment_value(spec)
        lo, hi = sol.family_j_range
        for j in range(lo, hi + 1):
            got = exact_expected(spec, segment_strategies(sol, family_j=j))
            assert np.max(np.abs(got - sol.values)) < 1e-12, (fn1, j)


def test_family_j_out_of_range():
    sol = segment_value(build_segment(3, 0, 4, 1))
    with pytest.raises(ValueError):
        segment_strategies(sol, family_j=7)
    sol_inner = segment_value(build_segment(3, 0, 3.5, 1))
    with pytest.raises(ValueError):
        segment_strategies(sol_inner, family_j=0)


def test_star_two_arms_matches_segment():
    star = build_star([2, 3], [1.0, -4.0], 0.5)
    values, _ = star_value(star)
    seg = segment_value(build_segment(4, 1.0, -4.0, 0.5))
    # star node order: hub, arm nodes outward; map onto the path
    path = [2, 1, 0, 3, 4, 5]
    assert np.allclose(values[path], seg.values, atol=1e-12)


def test_star_y_frozen_example():
    values, pair = star_value(build_star([1, 1, 1], [0, 0, 6], 1))
    assert values[0] == pytest.approx(3.0, abs=1e-12)
    assert set(pair).issubset({1, 2, 3})


def test_star_symmetric_y():
    values, _ = star_value(build_star([1, 1, 1], [0, 0, 0], 1))
    assert values[0] == pytest.approx(1.0, abs=1e-12)


def test_star_agrees_with_solver():
    rng = np.random.default_rng(11)
    for _ in range(25):
        spec = random_star(rng, arms=int(rng.integers(3, 5)))
        values, _ = star_value(spec)
        rep = solve(spec, tol=1e-12)
        assert np.max(np.abs(values - rep.values)) < 1e-8


def test_star_rejects_non_star():
    cyclic = build_segment(2, 0, 1, 1)
    g = cyclic.graph
    from tugofwar import GameGraph, GameSpec

    square = GameSpec(
        GameGraph.from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 4)], {4: 1.0}),
        1.0,
    )
    with pytest.raises(ValueError):
        star_value(square)
    assert g is not None


def test_star_error_type_exists():
    assert issubclass(StarReductionError, RuntimeError)
