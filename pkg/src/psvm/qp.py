"""Dual quadratic program shared by the linear and kernel fits.

The problem is::

    maximize   1'a - 1/4 (a*y)' G (a*y)
    subject to 0 <= a <= C,  y'a = 0

with ``G`` symmetric positive semidefinite and ``y`` in {-1, +1}.  The 1/4
comes from the primal penalty ``zeta'zeta`` (no 1/2); it is deliberate.

It is solved by sequential minimal optimization with maximal-violating-pair
working-set selection.  Internally we minimize ``f(a) = 1/2 a'Qa - 1'a`` with
``Q = 1/2 (y y') * G``; the pair update and gradient refresh are closed form.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numba
import numpy as np

from .exceptions import ConvergenceWarning, InfeasibleLabels, MaxIterExceeded, NoSupportVectors

__all__ = [
    "DualProblem",
    "DualSolution",
    "solve_dual",
    "dual_objective",
    "dual_gradient",
    "recover_intercept",
    "SOLVER_NAME",
]

SOLVER_NAME = "smo"
_CURVATURE_FLOOR = 1e-12


@dataclass(frozen=True)
class DualProblem:
    G: np.ndarray
    labels: np.ndarray
    C: float

    def __post_init__(self):
        G = np.ascontiguousarray(self.G, dtype=float)
        y = np.ascontiguousarray(self.labels, dtype=float).ravel()
        if G.ndim != 2 or G.shape[0] != G.shape[1] or G.shape[0] != y.size:
            raise ValueError("G must be square with one row per label")
        if not np.all(np.abs(y) == 1):
            raise ValueError("labels must be -1 or +1; drop zero labels first")
        if not (y.max() > 0 and y.min() < 0):
            raise InfeasibleLabels("all labels share one sign")
        if not self.C > 0:
            raise ValueError("box bound C must be positive")
        scale = max(1.0, float(np.abs(G).max()))
        if np.abs(G - G.T).max() > 1e-10 * scale:
            raise ValueError("G is not symmetric")
        object.__setattr__(self, "G", G)
        object.__setattr__(self, "labels", y)
        object.__setattr__(self, "C", float(self.C))

    @property
    def m(self) -> int:
        return self.labels.size


@dataclass
class DualSolution:
    alpha: np.ndarray
    objective: float
    kkt_violation: float
    iterations: int
    converged: bool
    support: np.ndarray
    history: np.ndarray | None = field(default=None, repr=False)


@numba.njit(cache=True)
def _smo(G, y, C, tol, max_iter, record, second_order):
    m = y.size
    alpha = np.zeros(m)
    grad = -np.ones(m)
    hist = np.zeros(max_iter + 1 if record else 0)
    if record:
        hist[0] = 0.0
    it = 0
    gap = 0.0
    while True:
        # maximal violating pair: i maximizes -y g over I_up, j minimizes it over I_low
        i = -1
        j = -1
        gmax = -np.inf
        gmin = np.inf
        for t in range(m):
            v = -y[t] * grad[t]
            if (y[t] > 0 and alpha[t] < C) or (y[t] < 0 and alpha[t] > 0):
                if v > gmax:
                    gmax = v
                    i = t
            if (y[t] < 0 and alpha[t] < C) or (y[t] > 0 and alpha[t] > 0):
                if v < gmin:
                    gmin = v
                    j = t
        if i < 0 or j < 0:
            gap = 0.0
            break
        gap = gmax - gmin
        if gap <= tol or it >= max_iter:
            break
        if second_order:
            # Fan, Chen & Lin (2005): keep i, pick j maximizing the guaranteed decrease
            best = np.inf
            for t in range(m):
                if (y[t] < 0 and alpha[t] < C) or (y[t] > 0 and alpha[t] > 0):
                    b = gmax + y[t] * grad[t]
                    if b > 0:
                        a = 0.5 * (G[i, i] + G[t, t] - 2.0 * G[i, t])
                        if a < _CURVATURE_FLOOR:
                            a = _CURVATURE_FLOOR
                        v = -b * b / a
                        if v < best:
                            best = v
                            j = t
        curv = 0.5 * (G[i, i] + G[j, j] - 2.0 * G[i, j])
        if curv < _CURVATURE_FLOOR:
            curv = _CURVATURE_FLOOR
        step = (gmax + y[j] * grad[j]) / curv
        bi = C - alpha[i] if y[i] > 0 else alpha[i]
        bj = alpha[j] if y[j] > 0 else C - alpha[j]
        step = min(step, bi, bj)
        hit_i = step >= bi
        hit_j = step >= bj
        alpha[i] += y[i] * step
        alpha[j] -= y[j] * step
        if hit_i:
            alpha[i] = C if y[i] > 0 else 0.0
        if hit_j:
            alpha[j] = 0.0 if y[j] > 0 else C
        half = 0.5 * step
        for t in range(m):
            grad[t] += half * y[t] * (G[t, i] - G[t, j])
        it += 1
        if record:
            s = 0.0
            for t in range(m):
                s += alpha[t] * (1.0 - grad[t])
            hist[it] = 0.5 * s
    return alpha, grad, it, gap, hist


def dual_objective(p: DualProblem, alpha: np.ndarray) -> float:
    """``1'a - 1/4 (a*y)' G (a*y)``; feasibility is not checked."""
    ay = np.asarray(alpha, dtype=float) * p.labels
    return float(np.sum(alpha) - 0.25 * ay @ p.G @ ay)


def dual_gradient(p: DualProblem, alpha: np.ndarray) -> np.ndarray:
    ay = np.asarray(alpha, dtype=float) * p.labels
    return 1.0 - 0.5 * p.labels * (p.G @ ay)


def solve_dual(
    p: DualProblem,
    tol: float = 1e-6,
    max_iter: int | None = None,
    record_history: bool = False,
    strict: bool = False,
    selection: str = "mvp",
) -> DualSolution:
    """Solve the box- and equality-constrained dual by SMO.

    ``tol`` bounds the maximal pairwise KKT violation.  When ``max_iter``
    (default ``100 m^2``) is hit, the last iterate is returned with
    ``converged=False`` and a :class:`ConvergenceWarning`; ``strict=True``
    raises :class:`MaxIterExceeded` instead.  ``selection="wss2"`` keeps
    the maximal violator ``i`` but picks ``j`` by second-order gain.
    """
    if selection not in ("mvp", "wss2"):
        raise ValueError("selection must be 'mvp' or 'wss2'")
    m = p.m
    if max_iter is None:
        max_iter = 100 * m * m
    alpha, grad, iters, gap, hist = _smo(
        p.G, p.labels, p.C, float(tol), int(max_iter), bool(record_history), selection == "wss2"
    )
    converged = gap <= tol
    if not converged:
        msg = f"SMO stopped after {iters} iterations with KKT violation {gap:.3g}"
        if strict:
            raise MaxIterExceeded(msg)
        warnings.warn(msg, ConvergenceWarning, stacklevel=2)
    objective = float(0.5 * np.sum(alpha * (1.0 - grad)))
    return DualSolution(
        alpha=alpha,
        objective=objective,
        kkt_violation=float(gap),
        iterations=int(iters),
        converged=bool(converged),
        support=np.flatnonzero(alpha > 0),
        history=hist[: iters + 1] if record_history else None,
    )


def recover_intercept(p: DualProblem, sol: DualSolution, margins: np.ndarray) -> float:
    """Intercept ``t`` of the primal constraint ``y (s - t) >= 1 - xi``.

    ``margins`` are the primal scores ``s_i`` at the solution.  Free
    support vectors give ``t = mean(s - y)``; without any, ``t`` is the
    midpoint of the interval allowed by the bound multipliers.
    """
    alpha = sol.alpha
    s = np.asarray(margins, dtype=float)
    y = p.labels
    C = p.C
    if not np.any(alpha > 0):
        raise NoSupportVectors("alpha is identically zero")
    slack = 1e-8 * C
    free = (alpha > slack) & (alpha < C - slack)
    if np.any(free):
        return float(np.mean(s[free] - y[free]))
    at_zero = alpha <= slack
    at_upper = ~at_zero
    # alpha = 0: y (s - t) >= 1;  alpha = C: y (s - t) <= 1
    lower = np.concatenate([s[at_zero & (y < 0)] + 1, s[at_upper & (y > 0)] - 1])
    upper = np.concatenate([s[at_zero & (y > 0)] - 1, s[at_upper & (y < 0)] + 1])
    lo = lower.max() if lower.size else None
    hi = upper.min() if upper.size else None
    if lo is None and hi is None:
        return 0.0
    if lo is None:
        return float(hi)
    if hi is None:
        return float(lo)
    return float(0.5 * (lo + hi))
