"""Sub/supersolution classification and the comparison machinery.

A vector u is a subsolution when G[u] <= 0 at every interior node, a
supersolution when G[u] >= 0, and a solution when both.  Ordered boundary
data then forces subsolution <= supersolution everywhere, which is what
makes the game value unique.  The key device is a quadratic change of
variables that turns a supersolution into a *strict* one with a computable
margin, and that transform is provided here in executable form together
with a direct comparison check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError, PreconditionError
from .graphs import GameSpec
from .solver import residual_vector

__all__ = ["Classification", "StrictifyResult", "classify", "strictify", "comparison_test"]

KINDS = ("solution", "subsolution", "supersolution", "neither")


@dataclass(frozen=True)
class Classification:
    """Where a value vector sits relative to the fixed-point equation.

    ``residuals`` holds G[u] per interior node (aligned with ``interior``);
    ``kind`` summarizes their signs at the tolerance used.
    """

    kind: str
    interior: tuple[int, ...]
    residuals: np.ndarray


@dataclass(frozen=True)
class StrictifyResult:
    """A strict supersolution built from a plain one.

    ``tilde_values`` is g(v) nodewise with g(a) = (1+delta)a - delta*a^2/(4C)
    and C = max interior |v|; ``mu`` is the guaranteed margin
    (delta/2)*eps*min(1, eps/(4C)) with G[g(v)] >= mu checked at every
    interior node.  ``gamma_bound`` bounds how far g moves values:
    g(v)-v <= gamma_bound on interior nodes and >= -gamma_bound on
    terminals, which is exactly what the comparison argument consumes.  (A
    terminal whose value exceeds C can overshoot the upper bound; g is
    calibrated to the interior range.)
    """

    tilde_values: np.ndarray
    mu: float
    delta: float
    gamma_bound: float


def classify(spec: GameSpec, u: np.ndarray, tol: float = 1e-10) -> Classification:
    """Classify ``u`` by the signs of G[u] over interior nodes."""
    res = residual_vector(spec, u)
    sub = bool(np.all(res <= tol))
    sup = bool(np.all(res >= -tol))
    if sub and sup:
        kind = "solution"
    elif sub:
        kind = "subsolution"
    elif sup:
        kind = "supersolution"
    else:
        kind = "neither"
    return Classification(kind, spec.graph.interior, res)


def strictify(spec: GameSpec, v: np.ndarray, delta: float) -> StrictifyResult:
    """Turn a supersolution into one with a strictly positive margin.

    Applies g(a) = (1+delta)a - (delta/(4C)) a^2 at *every* node (the margin
    estimate evaluates g at neighbors, which may be terminal) with
    C = max_{interior} |v|.  Requires v to be a supersolution and C > 0; for
    C = 0 shift v by a constant first (the equation is shift-invariant).

    The returned margin mu = (delta/2) * eps * min(1, eps/(4C)) and the
    displacement bound gamma_bound = delta * max(3C/4, D(1 + D/(4C))) with
    D = |min over terminals of v| are both verified against the transformed
    vector before returning.
    """
    if not delta > 0:
        raise ValueError("delta must be positive")
    v = np.asarray(v, dtype=np.float64)
    cls = classify(spec, v, tol=1e-10)
    if cls.kind not in ("supersolution", "solution"):
        raise PreconditionError(
            f"strictify needs a supersolution, got {cls.kind}",
            [i for i, r in zip(cls.interior, cls.residuals) if r < -1e-10],
        )
    interior = list(spec.graph.interior)
    C = float(np.max(np.abs(v[interior])))
    if C == 0.0:
        raise DegenerateInputError(
            "v vanishes on all interior nodes; shift it by a constant before strictify"
        )
    eps = spec.eps
    tilde = (1.0 + delta) * v - (delta / (4.0 * C)) * v * v
    mu = 0.5 * delta * eps * min(1.0, eps / (4.0 * C))
    terminals = list(spec.graph.terminal)
    D = abs(float(np.min(v[terminals])))
    gamma_bound = delta * max(0.75 * C, D * (1.0 + D / (4.0 * C)))

    res = residual_vector(spec, tilde)
    slack = 1e-12 * (1.0 + float(np.max(np.abs(tilde))))
    if np.min(res) < mu - slack:
        bad = [i for i, r in zip(interior, res) if r < mu - slack]
        raise AssertionError(
            f"transformed vector misses the margin: min G = {np.min(res):.3e} < mu = {mu:.3e}"
            f" at nodes {bad}"
        )
    diff = tilde - v
    if np.max(diff[interior]) > gamma_bound + slack:
        raise AssertionError("interior displacement exceeds gamma_bound above")
    if np.min(diff[terminals]) < -gamma_bound - slack:
        raise AssertionError("terminal displacement exceeds gamma_bound below")
    return StrictifyResult(tilde, mu, delta, gamma_bound)


def comparison_test(
    spec: GameSpec, u: np.ndarray, v: np.ndarray, tol: float = 1e-10
) -> bool:
    """Check u <= v + tol everywhere for a (subsolution, supersolution) pair.

    Preconditions (raised as :class:`PreconditionError` when unmet): u is a
    subsolution, v is a supersolution, and u <= v + tol on terminal nodes.
    Under those the comparison principle makes a ``False`` return a genuine
    counterexample, i.e. a bug.
    """
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    cu = classify(spec, u, tol)
    if cu.kind not in ("subsolution", "solution"):
        raise PreconditionError(
            "u is not a subsolution",
            [i for i, r in zip(cu.interior, cu.residuals) if r > tol],
        )
    cv = classify(spec, v, tol)
    if cv.kind not in ("supersolution", "solution"):
        raise PreconditionError(
            "v is not a supersolution",
            [i for i, r in zip(cv.interior, cv.residuals) if r < -tol],
        )
    terminals = list(spec.graph.terminal)
    bad = [t for t in terminals if u[t] > v[t] + tol]
    if bad:
        raise PreconditionError("u > v on terminal nodes", bad)
    return bool(np.all(u <= v + tol))
