"""Structural dimension: the BIC-type criterion and its cross-validated tuning."""

from __future__ import annotations

import csv
import logging
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .baselines import fit_dr, fit_save, fit_sir
from .dataset import Dataset, dividing_points
from .exceptions import ConvergenceWarning, DegenerateSplit
from .linear import DEFAULT_LVR_SLICES, box_bound, fit
from .qp import DualProblem, recover_intercept, solve_dual
from .simulate import rng_for

__all__ = ["BicConfig", "CvbicResult", "bic_select", "bic_criterion", "cvbic", "write_misclassification_csv"]

log = logging.getLogger(__name__)


def default_a_grid() -> tuple[float, ...]:
    return tuple(float(a) for a in np.logspace(-2, 1, 20))


@dataclass(frozen=True)
class BicConfig:
    """Penalty multipliers to try and the training fraction of the split.

    The penalty is ``a * lambda_1 * c1(n) * c2(k)`` with ``c1(n) = log(n)/sqrt(n)``
    and ``c2(k) = k``.
    """

    a_grid: tuple[float, ...] = field(default_factory=default_a_grid)
    train_fraction: float = 0.5

    def __post_init__(self):
        grid = tuple(float(a) for a in self.a_grid)
        if not grid:
            raise ValueError("a_grid is empty")
        if not all(np.isfinite(a) and a > 0 for a in grid):
            raise ValueError("a_grid entries must be positive")
        if not 0 < self.train_fraction < 1:
            raise ValueError("train_fraction must lie in (0, 1)")
        object.__setattr__(self, "a_grid", tuple(sorted(grid)))


def bic_criterion(eigvals: np.ndarray, n: int, a: float) -> np.ndarray:
    """``G_n(k)`` for ``k = 0..p``."""
    lam = np.clip(np.asarray(eigvals, dtype=float), 0.0, None)
    if n < 2:
        raise ValueError("n must be at least 2")
    lead = lam[0] if lam.size else 0.0
    k = np.arange(lam.size + 1)
    gain = np.concatenate([[0.0], np.cumsum(lam)])
    return gain - a * lead * np.log(n) / np.sqrt(n) * k


def bic_select(eigvals: np.ndarray, n: int, a: float) -> int:
    """Maximizer of the criterion over ``k = 0..p``; ties go to the smaller ``k``."""
    g = bic_criterion(eigvals, n, a)
    # relative tolerance so that float noise in the cumulative sums cannot break ties
    best = g.max()
    tol = 1e-12 * max(1.0, abs(best), float(np.abs(eigvals).max()) if len(eigvals) else 0.0)
    return int(np.flatnonzero(g >= best - tol)[0])


@dataclass(frozen=True)
class CvbicResult:
    d: int
    a: float
    table: tuple[dict, ...]
    full_eigvals: np.ndarray
    skipped_points: tuple[float, ...] = ()


_FITTERS = {"psvm": None, "sir": fit_sir, "save": fit_save, "dr": fit_dr}


def _full_fit(d: Dataset, method: str, options: dict):
    if method == "psvm":
        return fit(d, dim=d.p, **options)
    return _FITTERS[method](d, dim=d.p, **options)


def _svm_predict(x_tr, lab_tr, x_te, cost: float, cost_form: str) -> np.ndarray:
    """Plain soft-margin linear SVM with intercept; returns +-1 predictions."""
    prob = DualProblem(x_tr @ x_tr.T, lab_tr, box_bound(cost, x_tr.shape[0], cost_form))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConvergenceWarning)
        sol = solve_dual(prob)
    w = 0.5 * (sol.alpha * lab_tr) @ x_tr
    t = recover_intercept(prob, sol, x_tr @ w)
    return np.where(x_te @ w - t > 0, 1.0, -1.0)


def cvbic(
    d: Dataset,
    method: str = "psvm",
    bic: BicConfig | None = None,
    seed: int | np.random.Generator = 0,
    h: int = DEFAULT_LVR_SLICES,
    cost: float = 1.0,
    cost_form: str = "package",
    options: dict | None = None,
    validation: str = "holdout",
) -> CvbicResult:
    """Choose ``a`` by held-out slice-label misclassification, then apply BIC to the full data.

    The data are split at random into training and test parts.  For each
    ``a`` the training fit gives ``k``; at every dividing point of the
    training response a plain linear SVM is trained on the first ``k``
    training predictors and scored on the test predictors.  ``k = 0``
    predicts the majority training label.  Dividing points that leave a
    part with a single class are skipped and logged.

    ``validation="resubstitution"`` trains and scores the SVM on the test
    part itself; it is kept for comparison only, since it rewards large ``k``.
    """
    bic = bic or BicConfig()
    if validation not in ("holdout", "resubstitution"):
        raise ValueError("validation must be 'holdout' or 'resubstitution'")
    method = method.lower()
    if method not in _FITTERS:
        raise ValueError(f"unknown method {method!r}")
    options = dict(options or {})
    if method == "psvm":
        options.setdefault("h", h)
        options.setdefault("lam", cost)
        options.setdefault("cost_form", cost_form)
    n = d.n
    n_tr = int(round(bic.train_fraction * n))
    if n_tr < 2 or n - n_tr < 2:
        raise DegenerateSplit("too few observations to split")
    rng = seed if isinstance(seed, np.random.Generator) else rng_for(seed, 0)
    perm = rng.permutation(n)
    tr, te = np.sort(perm[:n_tr]), np.sort(perm[n_tr:])
    d_tr = Dataset(d.x[tr], d.y[tr], categorical=d.categorical)
    fit_tr = _full_fit(d_tr, method, options)
    V = fit_tr.directions
    x_tr, x_te = d.x[tr] @ V, d.x[te] @ V
    y_tr, y_te = d.y[tr], d.y[te]

    points, skipped = [], []
    for q in dividing_points(y_tr, h):
        l_tr = np.where(y_tr > q, 1.0, -1.0)
        l_te = np.where(y_te > q, 1.0, -1.0)
        if np.unique(l_tr).size < 2 or np.unique(l_te).size < 2:
            log.info("cvbic: dividing point %g leaves a part with one class; skipped", q)
            skipped.append(float(q))
            continue
        points.append((l_tr, l_te))
    if not points:
        raise DegenerateSplit("every dividing point leaves a part with one class")

    errors_by_k: dict[int, int] = {}

    def errors(k: int) -> int:
        if k not in errors_by_k:
            total = 0
            for l_tr, l_te in points:
                if k == 0:
                    guess = 1.0 if np.sum(l_tr > 0) > np.sum(l_tr < 0) else -1.0
                    pred = np.full(l_te.shape, guess)
                elif validation == "resubstitution":
                    pred = _svm_predict(x_te[:, :k], l_te, x_te[:, :k], cost, cost_form)
                else:
                    pred = _svm_predict(x_tr[:, :k], l_tr, x_te[:, :k], cost, cost_form)
                total += int(np.sum(pred != l_te))
            errors_by_k[k] = total
        return errors_by_k[k]

    table = []
    for a in bic.a_grid:
        k = bic_select(fit_tr.eigvals, n_tr, a)
        table.append({"a": a, "k": k, "errors": errors(k)})
    best = min(table, key=lambda row: (row["errors"], row["a"]))
    full = _full_fit(d, method, options)
    d_hat = bic_select(full.eigvals, n, best["a"])
    return CvbicResult(d=d_hat, a=best["a"], table=tuple(table), full_eigvals=full.eigvals, skipped_points=tuple(skipped))


def write_misclassification_csv(result: CvbicResult, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["a", "k", "errors", "chosen"])
        for row in result.table:
            w.writerow([repr(row["a"]), row["k"], row["errors"], int(row["a"] == result.a)])
