"""Exact game values on segments and star boards, with optimal strategies.

On a path with n interior nodes and end payoffs F0 <= Fn1 everything is
governed by the payoff gap in units of the forced-move fee,
Q = (Fn1 - F0) / eps, and splits into three regimes:

  (a) Q > n+1:   both players fight coin rounds; the value interpolates the
                 end payoffs linearly.
  (b) n-1 < Q <= n+1:  Player I always hands the move over and Player II
                 retreats to the cheap end; the value is F0 + i*eps.
  (c) otherwise there is a unique switch index k in [1, n-1] with
                 2k-n-1 < Q <= 2k-n+1; Player II retreats left of it and
                 runs right of it, and the value is F0 + i*eps up to k,
                 then Fn1 + (n+1-i)*eps.

At the regime boundaries Q = n+1 and Q = 2k-n+1 whole families of pairs
realize the same value; family members are exposed through an index j.

A star board reduces to segments: pick goal terminals for the two players,
solve the connecting path, freeze the hub value, solve each remaining arm
against it, and accept the assignment if the hub satisfies the fixed-point
equation over all its neighbors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import StarReductionError
from .graphs import GameSpec, build_segment
from .play import LET, UNUSED, StrategyPair
from .solver import dpp_apply

__all__ = [
    "SegmentSolution",
    "q_parameter",
    "segment_value",
    "segment_strategies",
    "star_value",
    "BOUNDARY_TOL",
]

# |Q - boundary| below this counts as sitting exactly on a regime boundary
BOUNDARY_TOL = 1e-12

HUB_RESIDUAL_TOL = 1e-9


@dataclass(frozen=True)
class SegmentSolution:
    """Value and regime data for a segment game.

    ``values`` is in the original orientation (index 0 .. n+1).  ``q`` is
    the oriented payoff gap over eps, ``case_label`` one of "a"/"b"/"c",
    ``k`` the case-(c) switch index, ``family_j_range`` the inclusive range
    of alternative-strategy indices when Q sits on a boundary, and
    ``mirrored`` records that the inputs were reflected to get F0 <= Fn1.
    """

    values: np.ndarray
    q: float
    case_label: str
    k: int | None
    family_j_range: tuple[int, int] | None
    mirrored: bool
    n: int
    eps: float
    f0: float
    fn1: float


def _segment_interior_count(spec: GameSpec) -> int:
    """The n of a canonical segment board, or raise."""
    g = spec.graph
    N = g.num_nodes
    ok = (
        N >= 3
        and set(g.terminal) == {0, N - 1}
        and all(g.neighbors[i] == tuple(x for x in (i - 1, i + 1) if 0 <= x < N) for i in range(N))
    )
    if not ok:
        raise ValueError("spec is not a segment board (nodes 0..n+1 with edges {i,i+1})")
    return N - 2


def q_parameter(spec: GameSpec) -> float:
    """Payoff gap over eps, oriented so it is nonnegative."""
    n = _segment_interior_count(spec)
    f0 = spec.graph.payoffs[0]
    fn1 = spec.graph.payoffs[n + 1]
    return abs(fn1 - f0) / spec.eps


def _snap(q: float, n: int) -> float:
    """Snap q onto a regime boundary when within BOUNDARY_TOL of one."""
    boundaries = [float(n + 1)] + [float(2 * k - n + 1) for k in range(1, n)]
    for b in boundaries:
        if abs(q - b) <= BOUNDARY_TOL:
            return b
    return q


def segment_value(spec: GameSpec) -> SegmentSolution:
    """Exact value of a segment game via the three-regime classification."""
    n = _segment_interior_count(spec)
    eps = spec.eps
    f0 = spec.graph.payoffs[0]
    fn1 = spec.graph.payoffs[n + 1]
    mirrored = f0 > fn1
    a, b = (fn1, f0) if mirrored else (f0, fn1)
    q = _snap((b - a) / eps, n)

    idx = np.arange(n + 2, dtype=np.float64)
    k: int | None = None
    family: tuple[int, int] | None = None
    if q > n + 1:
        case = "a"
        values = ((n + 1 - idx) * a + idx * b) / (n + 1)
    elif n == 1 or q > n - 1:
        # for n = 1 the switch-index regime is empty and this formula covers
        # all of 0 <= q <= 2 (it satisfies the fixed-point equation there)
        case = "b"
        values = a + idx * eps
        if q == float(n + 1):
            family = (0, n)
    else:
        case = "c"
        k = int(np.ceil((q + n - 1) / 2.0))
        k = min(max(k, 1), n - 1)
        if not (2 * k - n - 1 < q <= 2 * k - n + 1):
            raise AssertionError(f"regime classification failed: q={q}, n={n}, k={k}")
        values = np.where(idx <= k, a + idx * eps, b + (n + 1 - idx) * eps)
        if q == float(2 * k - n + 1):
            family = (0, min(k, n - 2))
    values = np.asarray(values, dtype=np.float64)
    values[0], values[n + 1] = a, b
    if mirrored:
        values = values[::-1].copy()
    return SegmentSolution(values, q, case, k, family, mirrored, n, eps, f0, fn1)


def segment_strategies(
    solution: SegmentSolution, family_j: int | None = None
) -> StrategyPair:
    """A stationary pair realizing ``solution.values``.

    Without ``family_j`` this is the base pair of the regime: coin rounds
    pulling to the rich end against retreat-to-the-cheap-end in case (a),
    hand-over everywhere otherwise.  On a regime boundary, ``family_j``
    selects an alternative member: hand-over on 1..j, coin rounds on the
    middle block, and (in case c) hand-over toward the rich end past k.
    """
    n = solution.n
    if family_j is not None:
        if solution.family_j_range is None:
            raise ValueError("this solution's Q is not on a regime boundary; no family")
        lo, hi = solution.family_j_range
        if not lo <= family_j <= hi:
            raise ValueError(f"family_j={family_j} outside [{lo}, {hi}]")

    # oriented frame: payoffs increase with the index
    p1 = [UNUSED] * (n + 2)
    p2 = [UNUSED] * (n + 2)
    if solution.case_label == "a":
        for i in range(1, n + 1):
            p1[i] = i + 1
            p2[i] = i - 1
    elif solution.case_label == "b":
        j = n if family_j is None else family_j
        for i in range(1, n + 1):
            p1[i] = LET if i <= j else i + 1
            p2[i] = i - 1
    else:
        k = solution.k
        j = k if family_j is None else family_j
        for i in range(1, n + 1):
            if i <= j:
                p1[i] = LET
            elif i <= k:
                p1[i] = i + 1
            else:
                p1[i] = LET
            p2[i] = i - 1 if i <= k else i + 1
    if solution.mirrored:
        m = n + 1
        mp1 = [UNUSED] * (n + 2)
        mp2 = [UNUSED] * (n + 2)
        for i in range(1, n + 1):
            mp1[m - i] = p1[i] if p1[i] == LET else m - p1[i]
            mp2[m - i] = m - p2[i]
        p1, p2 = mp1, mp2
    return StrategyPair(tuple(p1), tuple(p2))


def _star_decompose(spec: GameSpec) -> tuple[int, list[list[int]]]:
    """Hub node and arms (each arm: nodes from hub outward, terminal last)."""
    g = spec.graph
    degrees = [len(nb) for nb in g.neighbors]
    hubs = [i for i in g.interior if degrees[i] >= 3]
    if len(hubs) > 1:
        raise ValueError("spec is not a star board (multiple branch nodes)")
    if hubs:
        hub = hubs[0]
    else:
        # a path: any interior node can serve as the hub of a two-arm star
        if not g.interior:
            raise ValueError("spec has no interior nodes")
        hub = g.interior[0]
    for t in g.terminal:
        if degrees[t] != 1:
            raise ValueError(f"terminal node {t} must have degree 1 on a star board")
    arms: list[list[int]] = []
    for first in g.neighbors[hub]:
        arm = [first]
        prev = hub
        cur = first
        while not g.is_terminal(cur):
            if degrees[cur] != 2:
                raise ValueError(f"interior node {cur} off the hub must have degree 2")
            nxt = [x for x in g.neighbors[cur] if x != prev]
            prev, cur = cur, nxt[0]
            arm.append(cur)
        arms.append(arm)
    if len(arms) < 2:
        raise ValueError("a star board needs at least two arms")
    if 1 + sum(len(a) for a in arms) != g.num_nodes:
        raise ValueError("spec is not a star board (disconnected or cyclic)")
    return hub, arms


def star_value(spec: GameSpec) -> tuple[np.ndarray, tuple[int, int]]:
    """Value on a star board by reduction to segments.

    Tries unordered pairs of terminal goals in order of decreasing payoff
    gap; the first assignment whose hub value satisfies the fixed-point
    equation over every hub neighbor (residual <= 1e-9) wins.  At most
    k(k-1)/2 pairs are tried; if none passes, a
    :class:`~tugofwar.errors.StarReductionError` reports every hub residual.
    """
    hub, arms = _star_decompose(spec)
    g = spec.graph
    eps = spec.eps
    payoff = [g.payoffs[arm[-1]] for arm in arms]
    pairs = sorted(
        (
            (p, q)
            for p in range(len(arms))
            for q in range(p + 1, len(arms))
        ),
        key=lambda pq: (-abs(payoff[pq[0]] - payoff[pq[1]]), pq),
    )
    residuals: dict[tuple[int, int], float] = {}
    for p, q in pairs:
        values = np.full(g.num_nodes, np.nan)
        for t in g.terminal:
            values[t] = g.payoffs[t]
        # the connecting path: arm p reversed, hub, arm q
        path = list(reversed(arms[p])) + [hub] + arms[q]
        m = len(path) - 2
        seg = segment_value(build_segment(m, payoff[p], payoff[q], eps))
        for node, val in zip(path, seg.values):
            values[node] = val
        hub_value = values[hub]
        for r, arm in enumerate(arms):
            if r in (p, q):
                continue
            if len(arm) == 1:
                continue  # bare terminal, already assigned
            sub = segment_value(build_segment(len(arm) - 1, hub_value, payoff[r], eps))
            for node, val in zip([hub] + arm, sub.values):
                if node != hub:
                    values[node] = val
        res = values[hub] - dpp_apply(spec, values, hub)
        residuals[(arms[p][-1], arms[q][-1])] = float(res)
        if abs(res) <= HUB_RESIDUAL_TOL:
            return values, (arms[p][-1], arms[q][-1])
    raise StarReductionError(residuals)
