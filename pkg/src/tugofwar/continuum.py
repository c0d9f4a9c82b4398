"""Lattice solver for the eps-ball game on an interval or rectangle.

Here the token moves anywhere within Euclidean distance ``eps``, the
forced-move fee is ``lam * eps``, and the value function satisfies, at
every x in the open domain,

    min variant:  u(x) = max( inf_B u + lam*eps,  (sup_B u + inf_B u)/2 )
    max variant:  u(x) = min( sup_B u - lam*eps,  (sup_B u + inf_B u)/2 )

with B the closed eps-ball around x intersected with the closed domain and
u = F on the boundary.  The two variants are the discrete counterparts of
the extremal equations min(|grad u| - lam, -Lap_inf u) = 0 and
max(lam - |grad u|, -Lap_inf u) = 0, and as eps -> 0 the lattice values
approach their viscosity solutions; :func:`convergence_study` measures
that approach against the explicit 1D solutions of :func:`analytic_1d`.

The sup/inf are sampled over all lattice points inside the ball *plus* the
exact boundary portion within reach (sampled at spacing <= h along the
boundary, plus the closest-point projection).  Skipping the exact boundary
would bias the operator by O(h) in the layer near the walls.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import _kernels

__all__ = [
    "GridProblem",
    "GridValues",
    "GridSolveReport",
    "ConvergenceRow",
    "neighborhood",
    "ball_dpp_apply",
    "grid_solve",
    "jensen_residual",
    "analytic_1d",
    "convergence_study",
]

_SNAP = 1e-9


@dataclass(frozen=True)
class GridProblem:
    """The eps-ball game on [0, L] or [0, Lx] x [0, Ly].

    ``lengths`` has one entry (interval) or two (rectangle).  ``boundary``
    is evaluated at boundary sample points: called with a float in 1D and
    an (x, y) tuple in 2D; a bare number means a constant payoff, a tuple
    of numbers means per-end (1D: left, right) or per-side (2D: x=0, x=Lx,
    y=0, y=Ly, with vertical sides claiming the corners).

    Invariants: lam > 0, h <= eps/10 (ball sampling error must stay
    subdominant), eps < half the smallest extent, and h must divide every
    extent.
    """

    lengths: tuple[float, ...]
    h: float
    eps: float
    lam: float
    boundary: Callable | float | tuple
    variant: str = "min"

    def __post_init__(self):
        lengths = tuple(float(x) for x in self.lengths)
        object.__setattr__(self, "lengths", lengths)
        if len(lengths) not in (1, 2) or any(L <= 0 for L in lengths):
            raise ValueError("lengths must be one or two positive extents")
        if self.variant not in ("min", "max"):
            raise ValueError("variant must be 'min' or 'max'")
        if not self.lam > 0:
            raise ValueError("lam must be positive")
        if not 0 < self.h <= self.eps / 10 + _SNAP:
            raise ValueError("need 0 < h <= eps/10")
        if not self.eps < min(lengths) / 2:
            raise ValueError("need eps < min extent / 2")
        for L in lengths:
            if abs(L / self.h - round(L / self.h)) > _SNAP * max(1.0, L / self.h):
                raise ValueError(f"h={self.h} must divide the extent {L}")

    @property
    def dim(self) -> int:
        return len(self.lengths)

    def boundary_value(self, point) -> float:
        """Evaluate the boundary payoff at a boundary point."""
        b = self.boundary
        if callable(b):
            return float(b(point))
        if isinstance(b, (int, float)):
            return float(b)
        vals = tuple(float(v) for v in b)
        if self.dim == 1:
            if len(vals) != 2:
                raise ValueError("1D tuple boundary needs (left, right)")
            return vals[0] if point <= 0.5 * self.lengths[0] else vals[1]
        if len(vals) != 4:
            raise ValueError("2D tuple boundary needs (x=0, x=Lx, y=0, y=Ly)")
        x, y = point
        if abs(x) <= _SNAP:
            return vals[0]
        if abs(x - self.lengths[0]) <= _SNAP:
            return vals[1]
        return vals[2] if abs(y) <= _SNAP else vals[3]


class _Lattice:
    """Index bookkeeping for the aligned lattice of a problem."""

    def __init__(self, problem: GridProblem):
        self.problem = problem
        self.nx = round(problem.lengths[0] / problem.h)
        self.hx = problem.lengths[0] / self.nx
        if problem.dim == 2:
            self.ny = round(problem.lengths[1] / problem.h)
            self.hy = problem.lengths[1] / self.ny
        else:
            self.ny = 0
            self.hy = self.hx
        self.stride = self.ny + 1
        self.num_points = (self.nx + 1) * (self.ny + 1)

    def coords(self) -> np.ndarray:
        """Point coordinates, shape (num_points,) in 1D or (num_points, 2)."""
        xs = np.arange(self.nx + 1) * self.hx
        if self.problem.dim == 1:
            return xs
        ys = np.arange(self.ny + 1) * self.hy
        gx, gy = np.meshgrid(xs, ys, indexing="ij")
        return np.column_stack([gx.ravel(), gy.ravel()])

    def interior_flat(self) -> np.ndarray:
        idx = []
        for ix in range(1, self.nx):
            if self.problem.dim == 1:
                idx.append(ix)
            else:
                for iy in range(1, self.ny):
                    idx.append(ix * self.stride + iy)
        return np.asarray(idx, dtype=np.int64)

    def boundary_flat(self) -> np.ndarray:
        interior = set(self.interior_flat().tolist())
        return np.asarray(
            [p for p in range(self.num_points) if p not in interior], dtype=np.int64
        )

    def point(self, p: int):
        ix, iy = divmod(p, self.stride)
        if self.problem.dim == 1:
            return ix * self.hx
        return (ix * self.hx, iy * self.hy)

    def locate(self, x) -> tuple[int, int]:
        """Lattice indices of a point, which must sit on the lattice."""
        if self.problem.dim == 1:
            xv, yv = float(x), 0.0
        else:
            xv, yv = float(x[0]), float(x[1])
        ix = round(xv / self.hx)
        iy = round(yv / self.hy) if self.problem.dim == 2 else 0
        ok = (
            0 <= ix <= self.nx
            and 0 <= iy <= self.ny
            and abs(xv - ix * self.hx) <= _SNAP
            and abs(yv - iy * self.hy) <= _SNAP
        )
        if not ok:
            raise ValueError(f"{x} is not a lattice point of this problem")
        return ix, iy

    def ball_offsets(self) -> tuple[np.ndarray, np.ndarray]:
        """Index offsets (dx, dy) whose displacement stays within eps."""
        eps = self.problem.eps
        rx = int(math.floor(eps / self.hx + _SNAP))
        dxs, dys = [], []
        if self.problem.dim == 1:
            for dx in range(-rx, rx + 1):
                dxs.append(dx)
                dys.append(0)
        else:
            ry = int(math.floor(eps / self.hy + _SNAP))
            for dx in range(-rx, rx + 1):
                for dy in range(-ry, ry + 1):
                    if (dx * self.hx) ** 2 + (dy * self.hy) ** 2 <= eps**2 * (1 + _SNAP):
                        dxs.append(dx)
                        dys.append(dy)
        return np.asarray(dxs, dtype=np.int64), np.asarray(dys, dtype=np.int64)

    def dist_to_boundary(self) -> np.ndarray:
        """Exact distance from every lattice point to the domain boundary."""
        c = self.coords()
        if self.problem.dim == 1:
            return np.minimum(c, self.problem.lengths[0] - c)
        dx = np.minimum(c[:, 0], self.problem.lengths[0] - c[:, 0])
        dy = np.minimum(c[:, 1], self.problem.lengths[1] - c[:, 1])
        return np.minimum(dx, dy)

    def boundary_samples(self, ix: int, iy: int) -> list:
        """Exact boundary points within eps of lattice point (ix, iy).

        1D boundaries are lattice points already, so this is only nonempty
        in 2D: per rectangle side within reach, the chord it cuts from the
        ball is sampled at spacing <= h including both chord endpoints and
        the projection of the point onto the side.
        """
        problem = self.problem
        eps = problem.eps
        if problem.dim == 1:
            return []
        x = ix * self.hx
        y = iy * self.hy
        Lx, Ly = problem.lengths
        out: list[tuple[float, float]] = []

        def chord(dist, lo, hi, center, make_point):
            if dist > eps:
                return
            half = math.sqrt(max(eps**2 - dist**2, 0.0))
            a, b = max(lo, center - half), min(hi, center + half)
            if a > b:
                return
            m = max(1, int(math.ceil((b - a) / problem.h - _SNAP)))
            for t in range(m + 1):
                out.append(make_point(a + (b - a) * t / m))
            if lo <= center <= hi:
                out.append(make_point(center))  # closest-point projection

        chord(x, 0.0, Ly, y, lambda s: (0.0, s))
        chord(Lx - x, 0.0, Ly, y, lambda s: (Lx, s))
        chord(y, 0.0, Lx, x, lambda s: (s, 0.0))
        chord(Ly - y, 0.0, Lx, x, lambda s: (s, Ly))
        return out


@dataclass(frozen=True)
class GridValues:
    """Lattice values of a problem: one float per lattice point (flat).

    Boundary lattice points carry the boundary payoff; ``coords`` aligns
    point coordinates with ``values``.
    """

    problem: GridProblem
    values: np.ndarray

    @property
    def coords(self) -> np.ndarray:
        return _Lattice(self.problem).coords()

    def at(self, x) -> float:
        lat = _Lattice(self.problem)
        ix, iy = lat.locate(x)
        return float(self.values[ix * lat.stride + iy])


@dataclass(frozen=True)
class GridSolveReport:
    iterations: int
    max_residual: float
    converged: bool


def _boundary_data(problem: GridProblem, lat: _Lattice):
    """Fixed data for the sweeps: boundary lattice values, bmin/bmax, K."""
    values = np.zeros(lat.num_points)
    boundary = lat.boundary_flat()
    for p in boundary:
        values[p] = problem.boundary_value(lat.point(p))
    bmin = np.full(lat.num_points, np.inf)
    bmax = np.full(lat.num_points, -np.inf)
    K = float(np.max(np.abs(values[boundary])))
    if problem.dim == 2:
        interior = lat.interior_flat()
        near = interior[lat.dist_to_boundary()[interior] <= problem.eps + _SNAP]
        for p in near:
            ix, iy = divmod(p, lat.stride)
            samples = lat.boundary_samples(ix, iy)
            if samples:
                vals = [problem.boundary_value(s) for s in samples]
                bmin[p] = min(vals)
                bmax[p] = max(vals)
                K = max(K, max(abs(v) for v in vals))
    return values, bmin, bmax, K


def neighborhood(problem: GridProblem, x) -> np.ndarray:
    """All points sampled by the ball operator at the lattice point ``x``.

    Lattice points of the closed domain within distance eps (including x
    itself), plus in 2D the exact boundary samples within reach.  Returns
    coordinates: shape (m,) in 1D, (m, 2) in 2D.
    """
    lat = _Lattice(problem)
    ix, iy = lat.locate(x)
    dxs, dys = lat.ball_offsets()
    pts = []
    for dx, dy in zip(dxs, dys):
        jx, jy = ix + dx, iy + dy
        if 0 <= jx <= lat.nx and 0 <= jy <= lat.ny:
            pts.append(lat.point(jx * lat.stride + jy))
    extra = lat.boundary_samples(ix, iy)
    if problem.dim == 1:
        return np.asarray(sorted(pts))
    seen = {(round(px / _SNAP), round(py / _SNAP)) for px, py in pts}
    for s in extra:
        key = (round(s[0] / _SNAP), round(s[1] / _SNAP))
        if key not in seen:
            seen.add(key)
            pts.append(s)
    return np.asarray(pts)


def _extremes(problem: GridProblem, u: GridValues, x) -> tuple[float, float]:
    lat = _Lattice(problem)
    ix, iy = lat.locate(x)
    dxs, dys = lat.ball_offsets()
    lo, hi = np.inf, -np.inf
    for s in lat.boundary_samples(ix, iy):
        v = problem.boundary_value(s)
        lo, hi = min(lo, v), max(hi, v)
    vals = u.values
    for dx, dy in zip(dxs, dys):
        jx, jy = ix + dx, iy + dy
        if 0 <= jx <= lat.nx and 0 <= jy <= lat.ny:
            v = vals[jx * lat.stride + jy]
            lo, hi = min(lo, v), max(hi, v)
    return float(lo), float(hi)


def ball_dpp_apply(problem: GridProblem, u: GridValues, x) -> float:
    """The variant's one-point update at lattice point ``x``."""
    lo, hi = _extremes(problem, u, x)
    if problem.variant == "max":
        return min(hi - problem.lam * problem.eps, 0.5 * (hi + lo))
    return max(lo + problem.lam * problem.eps, 0.5 * (hi + lo))


def jensen_residual(problem: GridProblem, u: GridValues, x, variant: str) -> float:
    """Monotone-scheme residual for the extremal equations at ``x``.

    ``variant='min'`` gives min((u - inf - eps*lam)/eps, (2u - sup - inf)/eps^2),
    ``variant='max'`` gives max((u - sup + eps*lam)/eps, (2u - sup - inf)/eps^2).
    The first branch is the ball-operator residual scaled by 1/eps; the
    second rescales the averaging branch by 2/eps^2.
    """
    if variant not in ("min", "max"):
        raise ValueError("variant must be 'min' or 'max'")
    lo, hi = _extremes(problem, u, x)
    eps, lam = problem.eps, problem.lam
    uval = u.at(x)
    second = (2.0 * uval - hi - lo) / eps**2
    if variant == "max":
        return max((uval - hi + eps * lam) / eps, second)
    return min((uval - lo - eps * lam) / eps, second)


def grid_solve(
    problem: GridProblem,
    tol: float = 1e-10,
    max_iter: int = 10**5,
    start: str = "auto",
) -> tuple[GridValues, GridSolveReport]:
    """Solve the lattice fixed point by alternating-direction Gauss-Seidel.

    Parameters
    ----------
    problem : GridProblem
    tol : float
        Stop when a full sweep changes no point by more than this.
    max_iter : int
        Sweep budget; exhaustion is reported (``converged=False``), not
        raised.
    start : str
        "upper" starts from lam*dist(x, boundary) + max|F| + lam*eps, a
        supersolution of both variants on these convex domains, and the
        iteration decreases monotonically; "lower" starts from its
        negative-mirror subsolution and increases.  "auto" picks "upper"
        for the min variant and "lower" for the max variant.  Running both
        and comparing is the practical uniqueness check.

    Sweeps alternate lexicographic and reverse-lexicographic point order so
    boundary information propagates both ways through the fee branch.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    if start not in ("auto", "upper", "lower"):
        raise ValueError("start must be 'auto', 'upper' or 'lower'")
    if start == "auto":
        start = "upper" if problem.variant == "min" else "lower"
    lat = _Lattice(problem)
    values, bmin, bmax, K = _boundary_data(problem, lat)
    interior = lat.interior_flat()
    dist = lat.dist_to_boundary()
    barrier = problem.lam * dist + K + problem.lam * problem.eps
    values[interior] = barrier[interior] if start == "upper" else -barrier[interior]
    expect_down = start == "upper"

    orders = (interior, interior[::-1].copy())
    dxs, dys = lat.ball_offsets()
    lam_eps = problem.lam * problem.eps
    is_max = problem.variant == "max"
    slack = 1e-12 * (1.0 + float(np.max(np.abs(values))))
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        change, against = _kernels.grid_sweep(
            values,
            orders[(iterations - 1) % 2],
            lat.nx,
            lat.ny,
            dxs,
            dys,
            bmin,
            bmax,
            lam_eps,
            is_max,
            expect_down,
        )
        if against > slack:
            raise AssertionError(
                f"sweep {iterations} moved a point {against:.3e} against the "
                f"monotone direction of the {start} start"
            )
        if change <= tol:
            converged = True
            break
    res = np.empty(len(interior))
    _kernels.grid_residuals(
        values, interior, lat.nx, lat.ny, dxs, dys, bmin, bmax, lam_eps, is_max, res
    )
    max_res = float(np.max(np.abs(res))) if len(res) else 0.0
    if not converged:
        warnings.warn(
            f"grid solve: no convergence in {max_iter} sweeps", RuntimeWarning
        )
    return GridValues(problem, values), GridSolveReport(iterations, max_res, converged)


def analytic_1d(a: float, b: float, lam: float, L: float) -> Callable[[np.ndarray], np.ndarray]:
    """Closed-form min-variant limit on [0, L] with boundary values a, b.

    When the data gap dominates the fee rate (|b - a| >= lam*L) the solution
    is the straight line between the endpoints; otherwise it is the tent
    rising from both ends with slope lam, peaking at (b - a + lam*L)/(2*lam)
    with value (a + b + lam*L)/2.
    """
    if not (L > 0 and lam > 0):
        raise ValueError("need L > 0 and lam > 0")
    if abs(b - a) >= lam * L:

        def line(x):
            x = np.asarray(x, dtype=np.float64)
            return a + (b - a) * x / L

        return line

    def tent(x):
        x = np.asarray(x, dtype=np.float64)
        return np.minimum(a + lam * x, b + lam * (L - x))

    return tent


@dataclass(frozen=True)
class ConvergenceRow:
    eps: float
    h: float
    error: float
    order: float
    iterations: int
    converged: bool


def convergence_study(
    lengths: Sequence[float],
    boundary,
    lam: float,
    eps_list: Sequence[float],
    variant: str = "min",
    h_ratio: float = 0.1,
    tol: float = 1e-10,
    max_iter: int = 10**5,
    reference: Callable | None = None,
) -> list[ConvergenceRow]:
    """Errors of the lattice values over a decreasing eps sequence.

    For each eps the problem is solved with h = h_ratio * eps and compared
    in the sup norm over interior lattice points against ``reference``.
    When no reference is given, 1D problems use :func:`analytic_1d` (the
    max variant via negation duality) and 2D problems self-converge against
    the finest solution, whose own row then reports NaN error.  ``order``
    is log(e_k / e_{k+1}) / log(eps_k / eps_{k+1}), NaN on the first row.
    """
    eps_list = [float(e) for e in eps_list]
    if len(eps_list) < 3 or any(
        e2 >= e1 for e1, e2 in zip(eps_list, eps_list[1:])
    ):
        raise ValueError("eps_list must be strictly decreasing with >= 3 entries")
    lengths = tuple(float(x) for x in lengths)
    dim = len(lengths)
    solutions: list[GridValues] = []
    reports: list[GridSolveReport] = []
    for eps in eps_list:
        problem = GridProblem(lengths, h_ratio * eps, eps, lam, boundary, variant)
        sol, rep = grid_solve(problem, tol=tol, max_iter=max_iter)
        solutions.append(sol)
        reports.append(rep)

    def interior_error(sol: GridValues, ref: Callable) -> float:
        lat = _Lattice(sol.problem)
        idx = lat.interior_flat()
        pts = lat.coords()[idx]
        return float(np.max(np.abs(sol.values[idx] - np.asarray(ref(pts)))))

    if reference is None and dim == 1:
        probe = GridProblem(lengths, h_ratio * eps_list[0], eps_list[0], lam, boundary, variant)
        a = probe.boundary_value(0.0)
        b = probe.boundary_value(lengths[0])
        if variant == "min":
            reference = analytic_1d(a, b, lam, lengths[0])
        else:
            neg = analytic_1d(-a, -b, lam, lengths[0])
            reference = lambda x: -neg(x)  # noqa: E731  (negation duality)

    errors: list[float] = []
    if reference is not None:
        for sol in solutions:
            errors.append(interior_error(sol, reference))
    else:
        fine = solutions[-1]
        fine_lat = _Lattice(fine.problem)
        for sol in solutions[:-1]:
            lat = _Lattice(sol.problem)
            idx = lat.interior_flat()
            diffs = []
            for p in idx:
                pt = lat.point(p)
                jx, jy = fine_lat.locate(pt)
                diffs.append(
                    sol.values[p] - fine.values[jx * fine_lat.stride + jy]
                )
            errors.append(float(np.max(np.abs(diffs))))
        errors.append(float("nan"))

    rows: list[ConvergenceRow] = []
    for i, eps in enumerate(eps_list):
        if i == 0 or not (errors[i] > 0 and errors[i - 1] > 0):
            order = float("nan")
        else:
            order = math.log(errors[i - 1] / errors[i]) / math.log(
                eps_list[i - 1] / eps
            )
        rows.append(
            ConvergenceRow(
                eps,
                h_ratio * eps,
                errors[i],
                order,
                reports[i].iterations,
                reports[i].converged,
            )
        )
    return rows
