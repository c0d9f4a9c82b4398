"""Fixed-point solver for the game's dynamic programming equation.

The value u of the game satisfies, at every interior node i,

    u_i = max( min_j u_j + eps,  (max_j u_j + min_j u_j) / 2 )

with the max/min over the neighbors of i and u = F on terminal nodes.
Equivalently G[u]_i = 0 where

    G[u]_i = min( u_i - min_j u_j - eps,  u_i - (max_j u_j + min_j u_j)/2 ).

The update operator is monotone and invariant under adding constants, and
``eps * dist(i, terminals) + max|F|`` is an explicit supersolution, so a
Gauss-Seidel iteration started there decreases componentwise to the
(unique) fixed point.  No contraction argument is needed; convergence
follows from monotone boundedness.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import ValidationError
from .graphs import GameSpec, require_valid

__all__ = [
    "SolveReport",
    "dpp_apply",
    "residual",
    "residual_vector",
    "barrier_bounds",
    "solve",
]


@dataclass(frozen=True)
class SolveReport:
    """Outcome of :func:`solve`.

    ``converged`` means the last sweep changed no node by more than the
    tolerance; ``max_residual`` is max |G[u]| over interior nodes at exit.
    """

    values: np.ndarray
    iterations: int
    max_residual: float
    converged: bool


def _neighbor_extremes(spec: GameSpec, u: np.ndarray, i: int) -> tuple[float, float]:
    nbrs = spec.graph.neighbors[i]
    vals = [u[j] for j in nbrs]
    return min(vals), max(vals)


def dpp_apply(spec: GameSpec, u: np.ndarray, i: int) -> float:
    """One-node update: max(min_j u_j + eps, (max_j u_j + min_j u_j)/2).

    The first branch is Player I buying a forced move (Player II goes to the
    worst neighbor, Player I pockets eps); the second is a fair coin round.
    """
    if spec.graph.is_terminal(i):
        raise ValueError(f"node {i} is terminal; the update applies to interior nodes")
    lo, hi = _neighbor_extremes(spec, u, i)
    return max(lo + spec.eps, 0.5 * (hi + lo))


def residual(spec: GameSpec, u: np.ndarray, i: int) -> float:
    """G[u] at node i: min(u_i - min_j u_j - eps, u_i - (max_j+min_j)/2).

    Identical to ``u[i] - dpp_apply(spec, u, i)`` by max/min duality; the
    identity is asserted (to round-off) on every call.
    """
    if spec.graph.is_terminal(i):
        raise ValueError(f"node {i} is terminal; G is defined on interior nodes")
    lo, hi = _neighbor_extremes(spec, u, i)
    g = min(u[i] - lo - spec.eps, u[i] - 0.5 * (hi + lo))
    scale = 1.0 + abs(u[i]) + abs(lo) + abs(hi)
    assert abs(g - (u[i] - dpp_apply(spec, u, i))) <= 1e-12 * scale
    return g


def residual_vector(spec: GameSpec, u: np.ndarray) -> np.ndarray:
    """G[u] at every interior node, aligned with ``spec.graph.interior``."""
    indptr, indices = spec.graph.csr()
    interior = np.asarray(spec.graph.interior, dtype=np.int64)
    out = np.empty(len(interior), dtype=np.float64)
    _kernels.graph_residuals(
        np.asarray(u, dtype=np.float64), indptr, indices, interior, spec.eps, out
    )
    return out


def barrier_bounds(spec: GameSpec) -> tuple[np.ndarray, np.ndarray]:
    """Explicit bounds eps*d_i -/+ K with d_i the hop distance to a terminal.

    K is max|F|.  On a segment d_i = min(i, n+1-i) and both bounds solve the
    fixed-point equation with constant boundary data -/+K; on general boards
    the same formulas remain super/subsolutions and the solver's output is
    checked against them.
    """
    require_valid(spec)
    g = spec.graph
    K = max(abs(g.payoffs[t]) for t in g.terminal)
    dist = np.full(g.num_nodes, -1, dtype=np.int64)
    frontier = list(g.terminal)
    for t in frontier:
        dist[t] = 0
    while frontier:
        nxt: list[int] = []
        for j in frontier:
            for i in g.neighbors[j]:
                if dist[i] < 0:
                    dist[i] = dist[j] + 1
                    nxt.append(i)
        frontier = nxt
    d = dist.astype(np.float64)
    return spec.eps * d - K, spec.eps * d + K


def solve(spec: GameSpec, tol: float = 1e-10, max_iter: int = 10**6) -> SolveReport:
    """Solve G[u] = 0 with u = F on terminals by monotone Gauss-Seidel.

    Starts from the upper barrier of :func:`barrier_bounds` on interior
    nodes (a supersolution) with terminals pinned to their payoffs, then
    sweeps interior nodes in ascending index order, in place, until the
    largest update of a sweep is at most ``tol``.  Every sweep is checked to
    be componentwise non-increasing, which the monotonicity of the update
    guarantees below a supersolution.

    Non-convergence within ``max_iter`` sweeps is reported, not raised.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    _, upper = barrier_bounds(spec)
    g = spec.graph
    u = upper.copy()
    for t in g.terminal:
        u[t] = g.payoffs[t]
    indptr, indices = g.csr()
    interior = np.asarray(g.interior, dtype=np.int64)
    if len(interior) == 0:
        return SolveReport(u, 0, 0.0, True)
    slack = 1e-12 * (1.0 + float(np.max(np.abs(u))))
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        change, up_move = _kernels.graph_sweep(
            u, indptr, indices, interior, spec.eps, _kernels.SET
        )
        if up_move > slack:
            raise AssertionError(
                f"sweep {iterations} increased a node by {up_move:.3e}; "
                "the iteration must be non-increasing from the upper barrier"
            )
        if change <= tol:
            converged = True
            break
    res = residual_vector(spec, u)
    max_res = float(np.max(np.abs(res))) if len(res) else 0.0
    if not converged:
        warnings.warn(
            f"no convergence in {max_iter} sweeps (last change {change:.3e})",
            RuntimeWarning,
        )
    return SolveReport(u, iterations, max_res, converged)


def largest_subsolution_below(spec: GameSpec, u: np.ndarray, max_iter: int = 10**6) -> np.ndarray:
    """Clamp ``u`` down until G[u] <= 0 everywhere (terminals untouched).

    Repeatedly replaces u_i by min(u_i, update(u)_i); the sequence is
    componentwise non-increasing and converges to the largest subsolution
    below the input.
    """
    return _clamp(spec, u, _kernels.CLAMP_DOWN, max_iter)


def smallest_supersolution_above(spec: GameSpec, u: np.ndarray, max_iter: int = 10**6) -> np.ndarray:
    """Clamp ``u`` up until G[u] >= 0 everywhere (terminals untouched)."""
    return _clamp(spec, u, _kernels.CLAMP_UP, max_iter)


def _clamp(spec: GameSpec, u: np.ndarray, mode: int, max_iter: int) -> np.ndarray:
    require_valid(spec)
    out = np.array(u, dtype=np.float64, copy=True)
    indptr, indices = spec.graph.csr()
    interior = np.asarray(spec.graph.interior, dtype=np.int64)
    for _ in range(max_iter):
        change, _ = _kernels.graph_sweep(out, indptr, indices, interior, spec.eps, mode)
        if change == 0.0:
            return out
    raise ValidationError(["clamping iteration did not reach a fixed point"])
