"""Numba inner loops for the Gauss-Seidel sweeps.

The sequential ascending-index sweep is the hot path of both the graph and
lattice solvers; everything else in the package stays in plain numpy.  Each
kernel reports the largest absolute update of the sweep and the largest
update against the expected monotone direction, so callers can assert the
monotonicity the initialization guarantees.
"""

from __future__ import annotations

import numpy as np
from numba import njit

# update modes for the graph sweep
SET = 0  # u_i <- T(u)_i            (the solver)
CLAMP_DOWN = 1  # u_i <- min(u_i, T(u)_i)  (largest subsolution below u)
CLAMP_UP = 2  # u_i <- max(u_i, T(u)_i)  (smallest supersolution above u)


@njit(cache=True)
def graph_sweep(values, indptr, indices, order, eps, mode):
    """One in-place sweep of u_i <- max(min_j u_j + eps, (max_j+min_j)/2).

    Returns (max_change, max_up_move): the largest |update| and the largest
    increase any node took (0.0 for a monotone non-increasing sweep).
    """
    max_change = 0.0
    max_up = 0.0
    for t in range(order.shape[0]):
        i = order[t]
        lo = values[indices[indptr[i]]]
        hi = lo
        for p in range(indptr[i] + 1, indptr[i + 1]):
            v = values[indices[p]]
            if v < lo:
                lo = v
            elif v > hi:
                hi = v
        cand = lo + eps
        half = 0.5 * (hi + lo)
        if half > cand:
            cand = half
        if mode == 1:
            if cand > values[i]:
                continue
        elif mode == 2:
            if cand < values[i]:
                continue
        d = cand - values[i]
        if d > max_up:
            max_up = d
        ad = -d if d < 0.0 else d
        if ad > max_change:
            max_change = ad
        values[i] = cand
    return max_change, max_up


@njit(cache=True)
def graph_residuals(values, indptr, indices, interior, eps, out):
    """G[u] at every interior node: min(u_i - min_j - eps, u_i - (max_j+min_j)/2)."""
    for t in range(interior.shape[0]):
        i = interior[t]
        lo = values[indices[indptr[i]]]
        hi = lo
        for p in range(indptr[i] + 1, indptr[i + 1]):
            v = values[indices[p]]
            if v < lo:
                lo = v
            elif v > hi:
                hi = v
        a = values[i] - lo - eps
        b = values[i] - 0.5 * (hi + lo)
        out[t] = a if a < b else b


@njit(cache=True)
def ball_extremes(values, ix, iy, nx, ny, dxs, dys, lo0, hi0):
    """(min, max) of ``values`` over the stencil around lattice point (ix, iy).

    ``values`` is the flat lattice array with row stride ``ny + 1`` (use
    ny = 0 for a 1D lattice); (dxs, dys) enumerate the in-ball index
    offsets, clipped here against the lattice bounds.  lo0/hi0 seed the
    extremes with the fixed boundary-sample values (+inf/-inf when none).
    """
    lo = lo0
    hi = hi0
    stride = ny + 1
    for s in range(dxs.shape[0]):
        jx = ix + dxs[s]
        if jx < 0 or jx > nx:
            continue
        jy = iy + dys[s]
        if jy < 0 or jy > ny:
            continue
        v = values[jx * stride + jy]
        if v < lo:
            lo = v
        if v > hi:
            hi = v
    return lo, hi


@njit(cache=True)
def grid_sweep(values, order, nx, ny, dxs, dys, bmin, bmax, lam_eps, is_max_variant, expect_down):
    """One in-place lattice sweep of the ball operator along ``order``.

    ``order`` holds flat interior indices; boundary lattice points stay
    fixed.  Min variant updates with max(inf + lam_eps, (sup+inf)/2), max
    variant with min(sup - lam_eps, (sup+inf)/2), where sup/inf run over
    the closed eps-ball: the lattice stencil plus the cached boundary
    extremes bmin/bmax.

    Returns (max_change, max_against): largest |update| and largest move
    against the expected monotone direction (``expect_down`` for sweeps
    started from an upper barrier, which must be non-increasing).
    """
    max_change = 0.0
    max_against = 0.0
    stride = ny + 1
    for t in range(order.shape[0]):
        p = order[t]
        ix = p // stride
        iy = p - ix * stride
        lo, hi = ball_extremes(values, ix, iy, nx, ny, dxs, dys, bmin[p], bmax[p])
        half = 0.5 * (hi + lo)
        if is_max_variant:
            cand = hi - lam_eps
            if half < cand:
                cand = half
        else:
            cand = lo + lam_eps
            if half > cand:
                cand = half
        d = cand - values[p]
        against = d if expect_down else -d
        if against > max_against:
            max_against = against
        ad = -d if d < 0.0 else d
        if ad > max_change:
            max_change = ad
        values[p] = cand
    return max_change, max_against


@njit(cache=True)
def grid_residuals(values, order, nx, ny, dxs, dys, bmin, bmax, lam_eps, is_max_variant, out):
    """u - (ball operator applied to u), per point of ``order``."""
    stride = ny + 1
    for t in range(order.shape[0]):
        p = order[t]
        ix = p // stride
        iy = p - ix * stride
        lo, hi = ball_extremes(values, ix, iy, nx, ny, dxs, dys, bmin[p], bmax[p])
        half = 0.5 * (hi + lo)
        if is_max_variant:
            cand = hi - lam_eps
            if half < cand:
                cand = half
        else:
            cand = lo + lam_eps
            if half > cand:
                cand = half
        out[t] = values[p] - cand
    return out
