"""Playing the game: strategies, episodes, estimates, and exhaustive search.

Strategies here are stationary (positional): the action at a node depends
on nothing but the node.  Player I either hands the move to Player II for
an ``eps`` payment or names a pull target for a fair-coin round; Player II
keeps one move target per node, used both when forced to move and when
winning a toss (the two decisions are the same minimization problem).

For a fixed pair the game is an absorbing Markov chain, so expectations
come from a direct linear solve (:func:`exact_expected`); Monte Carlo
(:func:`estimate`) and exhaustive maximin (:func:`brute_force_value`)
cross-check it and the fixed-point solver against each other.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import EstimateUndefinedError, ValidationError
from .graphs import GameSpec, require_valid
from .rng import GAMMA, SplitMix64, _mix64_vec, episode_seed, episode_seeds

__all__ = [
    "LET",
    "UNUSED",
    "StrategyPair",
    "EpisodeOutcome",
    "Estimate",
    "Divergent",
    "run_episode",
    "estimate",
    "exact_expected",
    "brute_force_value",
    "stationary_values",
]

LET = -1  # Player I hands the move to Player II (for an eps payment)
UNUSED = -2  # placeholder at terminal nodes


@dataclass(frozen=True)
class StrategyPair:
    """One stationary action per interior node for each player.

    ``p1_target[i]`` is the node Player I pulls toward in a coin round, or
    ``LET`` to hand the move over; ``p2_target[i]`` is where Player II moves
    when deciding.  Entries at terminal nodes are ``UNUSED``.
    """

    p1_target: tuple[int, ...]
    p2_target: tuple[int, ...]

    @staticmethod
    def from_actions(
        spec: GameSpec,
        p1: Mapping[int, int | None],
        p2: Mapping[int, int],
    ) -> "StrategyPair":
        """Build from per-node mappings; ``None`` means hand the move over."""
        n = spec.graph.num_nodes
        p1t = [UNUSED] * n
        p2t = [UNUSED] * n
        for i in spec.graph.interior:
            a = p1.get(i, None)
            p1t[i] = LET if a is None else int(a)
            if i not in p2:
                raise ValidationError([f"player2 action missing for interior node {i}"])
            p2t[i] = int(p2[i])
        pair = StrategyPair(tuple(p1t), tuple(p2t))
        violations = pair.check(spec)
        if violations:
            raise ValidationError(violations)
        return pair

    def check(self, spec: GameSpec) -> list[str]:
        """Report violations: actions at every interior node, targets adjacent."""
        g = spec.graph
        out: list[str] = []
        if len(self.p1_target) != g.num_nodes or len(self.p2_target) != g.num_nodes:
            return [f"strategy arrays must have length {g.num_nodes}"]
        for i in g.interior:
            a = self.p1_target[i]
            if a != LET and a not in g.neighbors[i]:
                out.append(f"player1 target {a} not adjacent to node {i}")
            b = self.p2_target[i]
            if b not in g.neighbors[i]:
                out.append(f"player2 target {b} not adjacent to node {i}")
        return out


@dataclass(frozen=True)
class EpisodeOutcome:
    """One playout.  ``total_payoff`` is F + k_tau*eps, NaN when truncated."""

    terminal_payoff: float
    k_tau: int
    steps: int
    terminated: bool
    total_payoff: float


@dataclass(frozen=True)
class Estimate:
    """Monte Carlo summary over the terminated episodes of a run."""

    mean: float
    std_error: float
    episodes: int
    truncated_fraction: float


@dataclass(frozen=True)
class Divergent:
    """Marker: from ``nodes`` the game survives forever with positive probability.

    ``values`` carries the expectations at the remaining (absorbing) nodes,
    NaN at ``nodes``.  ``unbounded_payment[j]`` says whether play surviving
    from ``nodes[j]`` accrues forced-move payments forever: ``True`` if
    every reachable recurrent class contains a hand-over node, ``False`` if
    none does, ``None`` when both kinds are reachable.
    """

    nodes: tuple[int, ...]
    values: np.ndarray
    unbounded_payment: tuple[bool | None, ...]


def _check_pair(spec: GameSpec, pair: StrategyPair) -> None:
    violations = pair.check(spec)
    if violations:
        raise ValidationError(violations)


def run_episode(
    spec: GameSpec,
    pair: StrategyPair,
    start: int,
    rng_seed: int,
    max_steps: int = 10_000,
) -> EpisodeOutcome:
    """Simulate one playout from ``start`` with a SplitMix64 coin stream.

    Each coin round consumes exactly one 64-bit draw and the top bit decides
    it: 1 sends the token to Player I's target, 0 to Player II's.  Hand-over
    turns consume no randomness.  Stops at a terminal node or, truncated,
    after ``max_steps`` turns (``terminal_payoff`` then holds a placeholder
    0 and ``total_payoff`` is NaN; check ``terminated``).
    """
    require_valid(spec)
    _check_pair(spec, pair)
    if spec.graph.is_terminal(start):
        raise ValueError(f"start node {start} is terminal")
    if max_steps < 1:
        raise ValueError("max_steps must be >= 1")
    rng = SplitMix64(rng_seed)
    g = spec.graph
    pos = start
    k = 0
    steps = 0
    while steps < max_steps:
        a = pair.p1_target[pos]
        if a == LET:
            pos = pair.p2_target[pos]
            k += 1
        else:
            pos = a if rng.coin() else pair.p2_target[pos]
        steps += 1
        if g.is_terminal(pos):
            f = g.payoffs[pos]
            return EpisodeOutcome(f, k, steps, True, f + k * spec.eps)
    return EpisodeOutcome(0.0, k, steps, False, float("nan"))


def estimate(
    spec: GameSpec,
    pair: StrategyPair,
    start: int,
    episodes: int,
    seed: int,
    max_steps: int = 10_000,
) -> Estimate:
    """Monte Carlo mean and standard error of F + k_tau*eps from ``start``.

    Episode ``i`` runs on its own SplitMix64 stream seeded from
    ``(seed, i)``, so the result is independent of batching and execution
    order and bit-identical to ``run_episode`` called per episode.  Only
    terminated episodes enter the mean; a positive ``truncated_fraction``
    triggers a warning because survival makes the worst-case payoff
    convention, not the sample mean, the relevant value.
    """
    require_valid(spec)
    _check_pair(spec, pair)
    if spec.graph.is_terminal(start):
        raise ValueError(f"start node {start} is terminal")
    if episodes < 1:
        raise ValueError("episodes must be >= 1")
    g = spec.graph
    p1 = np.asarray(pair.p1_target, dtype=np.int64)
    p2 = np.asarray(pair.p2_target, dtype=np.int64)
    payoff_at = np.nan_to_num(g.payoff_array(), nan=0.0)
    is_term = np.zeros(g.num_nodes, dtype=bool)
    is_term[list(g.terminal)] = True

    states = episode_seeds(seed, episodes)
    pos = np.full(episodes, start, dtype=np.int64)
    k_tau = np.zeros(episodes, dtype=np.int64)
    payoff = np.zeros(episodes, dtype=np.float64)
    terminated = np.zeros(episodes, dtype=bool)
    alive = np.arange(episodes)

    for _ in range(max_steps):
        if alive.size == 0:
            break
        cur = pos[alive]
        lets = p1[cur] == LET
        nxt = np.empty(alive.size, dtype=np.int64)
        if np.any(lets):
            nxt[lets] = p2[cur[lets]]
            k_tau[alive[lets]] += 1
        coins = ~lets
        if np.any(coins):
            sel = alive[coins]
            states[sel] += np.uint64(GAMMA)
            draws = _mix64_vec(states[sel])
            heads = (draws >> np.uint64(63)).astype(bool)
            nxt[coins] = np.where(heads, p1[cur[coins]], p2[cur[coins]])
        pos[alive] = nxt
        done = is_term[nxt]
        if np.any(done):
            done_idx = alive[done]
            terminated[done_idx] = True
            payoff[done_idx] = payoff_at[pos[done_idx]] + k_tau[done_idx] * spec.eps
            alive = alive[~done]

    n_term = int(np.count_nonzero(terminated))
    truncated_fraction = (episodes - n_term) / episodes
    if n_term == 0:
        raise EstimateUndefinedError(truncated_fraction=1.0)
    if truncated_fraction > 0:
        warnings.warn(
            f"{episodes - n_term} of {episodes} episodes never terminated; "
            "the survival payoff convention (+/-inf) applies rather than the mean",
            RuntimeWarning,
        )
    sample = payoff[terminated]
    mean = float(np.mean(sample))
    std_error = 0.0 if n_term < 2 else float(np.std(sample, ddof=1) / np.sqrt(n_term))
    return Estimate(mean, std_error, episodes, truncated_fraction)


def _transition_structure(spec: GameSpec, pair: StrategyPair):
    """Per interior node: (is_let, targets tuple) under the pair."""
    out = {}
    for i in spec.graph.interior:
        a = pair.p1_target[i]
        if a == LET:
            out[i] = (True, (pair.p2_target[i],))
        else:
            b = pair.p2_target[i]
            out[i] = (False, (a,) if a == b else (a, b))
    return out


def _reach_closure(num_nodes: int, succ: dict[int, tuple[int, ...]]) -> np.ndarray:
    reach = np.eye(num_nodes, dtype=bool)
    for i, targets in succ.items():
        for j in targets:
            reach[i, j] = True
    while True:
        nxt = reach @ reach
        if np.array_equal(nxt, reach):
            return reach
        reach = nxt


def exact_expected(spec: GameSpec, pair: StrategyPair) -> np.ndarray | Divergent:
    """Expected F + k_tau*eps per start node under a fixed pair.

    Hand-over nodes move deterministically with reward ``eps``; coin nodes
    split 1/2 between the two targets with no reward.  Where absorption is
    certain the expectation solves v = r + P v with v = F on terminals.
    Starts that can reach a region with no path to a terminal survive
    forever with positive probability; those come back in a
    :class:`Divergent` marker instead of a full vector.
    """
    require_valid(spec)
    _check_pair(spec, pair)
    g = spec.graph
    N = g.num_nodes
    structure = _transition_structure(spec, pair)
    succ = {i: t for i, (_, t) in structure.items()}
    reach = _reach_closure(N, succ)
    terminals = list(g.terminal)
    can_end = reach[:, terminals].any(axis=1)
    trapped = ~can_end  # no path to any terminal at all
    non_absorbing = sorted(
        i for i in g.interior if trapped[i] or reach[i, trapped].any()
    )

    values = np.full(N, np.nan)
    for t in terminals:
        values[t] = g.payoffs[t]
    absorbing = [i for i in g.interior if i not in set(non_absorbing)]
    if absorbing:
        index = {i: p for p, i in enumerate(absorbing)}
        m = len(absorbing)
        A = np.eye(m)
        r = np.zeros(m)
        for i in absorbing:
            is_let, targets = structure[i]
            w = 1.0 if len(targets) == 1 else 0.5
            if is_let:
                r[index[i]] += spec.eps
            for j in targets:
                if g.is_terminal(j):
                    r[index[i]] += w * g.payoffs[j]
                else:
                    A[index[i], index[j]] -= w
        try:
            sol = np.linalg.solve(A, r)
        except np.linalg.LinAlgError as exc:  # unreachable when absorption holds
            raise RuntimeError("singular absorbing system") from exc
        for i in absorbing:
            values[i] = sol[index[i]]
    if not non_absorbing:
        return values

    # classify survival: does every recurrent class reachable from the node
    # pay forced-move fees forever, none of them, or some of each?
    trapped_nodes = [i for i in range(N) if trapped[i]]
    classes: list[tuple[list[int], bool]] = []
    seen: set[int] = set()
    for i in trapped_nodes:
        if i in seen:
            continue
        comp = [j for j in trapped_nodes if reach[i, j] and reach[j, i]]
        seen.update(comp)
        closed = all(k in comp for j in comp for k in succ[j])
        if closed:
            pays = any(structure[j][0] for j in comp)
            classes.append((comp, pays))
    flags: list[bool | None] = []
    for i in non_absorbing:
        kinds = {
            pays
            for comp, pays in classes
            if any(reach[i, c] for c in comp)
        }
        if kinds == {True}:
            flags.append(True)
        elif kinds == {False}:
            flags.append(False)
        else:
            flags.append(None)
    return Divergent(tuple(non_absorbing), values, tuple(flags))


def stationary_values(
    spec: GameSpec, max_interior: int = 6
) -> tuple[np.ndarray, np.ndarray]:
    """(maximin, minimax) over all stationary pairs, per start node.

    Survival from a start is scored by the worst-case payoff convention:
    on Player I's side (inner min over Player II) it counts -inf, except
    that survival which forces hand-over payments forever counts +inf,
    since the accrued fees grow without bound; on Player II's side all
    survival counts +inf.  Terminal entries hold the payoffs.
    """
    require_valid(spec)
    g = spec.graph
    interior = list(g.interior)
    if len(interior) > max_interior:
        raise ValueError(
            f"{len(interior)} interior nodes exceed max_interior={max_interior}"
        )
    p1_options = [[LET] + list(g.neighbors[i]) for i in interior]
    p2_options = [list(g.neighbors[i]) for i in interior]
    p2_choices = list(itertools.product(*p2_options))
    n1 = int(np.prod([len(o) for o in p1_options]))
    n2 = len(p2_choices)
    V1 = np.empty((n1, n2, len(interior)))
    V2 = np.empty((n1, n2, len(interior)))
    base1 = [UNUSED] * g.num_nodes
    base2 = [UNUSED] * g.num_nodes
    for s1, acts1 in enumerate(itertools.product(*p1_options)):
        p1t = list(base1)
        for i, a in zip(interior, acts1):
            p1t[i] = a
        for s2, acts2 in enumerate(p2_choices):
            p2t = list(base2)
            for i, b in zip(interior, acts2):
                p2t[i] = b
            outcome = exact_expected(spec, StrategyPair(tuple(p1t), tuple(p2t)))
            if isinstance(outcome, Divergent):
                v1 = outcome.values[interior].copy()
                v2 = outcome.values[interior].copy()
                for node, pays in zip(outcome.nodes, outcome.unbounded_payment):
                    if pays is None:
                        raise RuntimeError(
                            f"start {node} reaches both paying and non-paying "
                            "recurrent classes; its survival payoff is undefined"
                        )
                    pos = interior.index(node)
                    v1[pos] = np.inf if pays else -np.inf
                    v2[pos] = np.inf
                V1[s1, s2] = v1
                V2[s1, s2] = v2
            else:
                V1[s1, s2] = outcome[interior]
                V2[s1, s2] = outcome[interior]
    maximin = V1.min(axis=1).max(axis=0)
    minimax = V2.max(axis=0).min(axis=0)
    lo, up = np.full(g.num_nodes, np.nan), np.full(g.num_nodes, np.nan)
    for t in g.terminal:
        lo[t] = up[t] = g.payoffs[t]
    lo[interior] = maximin
    up[interior] = minimax
    return lo, up


def brute_force_value(spec: GameSpec, max_interior: int = 6) -> np.ndarray:
    """Game value per node by exhaustive stationary maximin.

    Also computes the minimax and insists the two agree (the game has a
    unique value); disagreement raises rather than returning a guess.
    """
    maximin, minimax = stationary_values(spec, max_interior)
    if not np.all(
        (maximin == minimax) | (np.abs(maximin - minimax) <= 1e-9)
    ):
        raise RuntimeError(
            f"stationary maximin != minimax: {maximin} vs {minimax}"
        )
    return maximin
