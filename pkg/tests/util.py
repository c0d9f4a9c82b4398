"""Shared helpers: random boards and certified sub/supersolution pairs."""

from __future__ import annotations

import numpy as np

from tugofwar import (
    GameSpec,
    build_segment,
    build_star,
    largest_subsolution_below,
    smallest_supersolution_above,
    solve,
)


def random_segment(rng: np.random.Generator, max_n: int = 30) -> GameSpec:
    n = int(rng.integers(1, max_n + 1))
    f0, fn1 = rng.uniform(-10, 10, size=2)
    eps = float(rng.choice([0.1, 0.5, 1.0, 3.0]))
    return build_segment(n, f0, fn1, eps)


def random_star(rng: np.random.Generator, arms: int = 3, max_len: int = 5) -> GameSpec:
    lengths = [int(rng.integers(1, max_len + 1)) for _ in range(arms)]
    payoffs = rng.uniform(-10, 10, size=arms)
    eps = float(rng.choice([0.5, 1.0]))
    return build_star(lengths, payoffs, eps)


def random_sub_super_pair(
    spec: GameSpec, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """A (subsolution, supersolution) pair ordered on the terminals.

    Starts from the solved value, perturbs down (up) on interior nodes,
    lifts the supersolution's terminals by a nonnegative amount, then
    clamps each vector back to the required one-sided class.
    """
    u = solve(spec, tol=1e-12).values
    interior = list(spec.graph.interior)
    terminals = list(spec.graph.terminal)
    sub = u.copy()
    sub[interior] -= rng.uniform(0.0, 2.0, size=len(interior))
    sub = largest_subsolution_below(spec, sub)
    sup = u.copy()
    sup[interior] += rng.uniform(0.0, 2.0, size=len(interior))
    sup[terminals] += rng.uniform(0.0, 1.0, size=len(terminals))
    sup = smallest_supersolution_above(spec, sup)
    return sub, sup
