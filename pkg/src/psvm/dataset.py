"""Samples, moments and slice labels.

Conventions fixed here and used throughout the package:

* sample covariance uses denominator ``n``;
* marginal standardization uses the ``n - 1`` standard deviation;
* dividing points are type-7 (linear interpolation) sample quantiles;
* an observation equal to a dividing point goes to the left slice.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace
from itertools import combinations
from pathlib import Path

import numpy as np

from .exceptions import (
    DataError,
    DegenerateColumn,
    DimensionMismatch,
    EmptySide,
    EmptySlice,
    FileFormat,
    NotPSD,
    SingularCovariance,
)

__all__ = [
    "Dataset",
    "MomentSummary",
    "SlicePair",
    "standardize",
    "moments",
    "dividing_points",
    "slice_index",
    "lvr_slices",
    "ova_slices",
    "make_slices",
    "read_csv",
]


@dataclass(frozen=True)
class Dataset:
    """A sample ``(X_i, Y_i)``, optionally marginally standardized.

    ``col_means`` and ``col_sds`` are set by :func:`standardize` and are
    reused to transform out-of-sample rows.
    """

    x: np.ndarray
    y: np.ndarray
    standardized: bool = False
    col_means: np.ndarray | None = None
    col_sds: np.ndarray | None = None
    categorical: bool = False

    def __post_init__(self):
        x = np.array(self.x, dtype=float)
        if x.ndim == 1:
            x = x[:, None]
        y = np.array(self.y, dtype=float).ravel()
        if x.ndim != 2:
            raise DimensionMismatch("x must be a 2-d array")
        if x.shape[0] != y.shape[0]:
            raise DimensionMismatch(
                f"x has {x.shape[0]} rows but y has {y.shape[0]} entries"
            )
        if x.shape[0] < 2 or x.shape[1] < 1:
            raise DataError("need n >= 2 observations and p >= 1 predictors")
        if not np.all(np.isfinite(x)):
            raise DataError("x contains non-finite values")
        if not np.all(np.isfinite(y)):
            raise DataError("y contains non-finite values")
        x.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def p(self) -> int:
        return self.x.shape[1]

    def apply_standardization(self, x_new: np.ndarray) -> np.ndarray:
        """Map new rows through the stored ``(x - mu) / sigma`` transform."""
        x_new = np.atleast_2d(np.asarray(x_new, dtype=float))
        if x_new.shape[1] != self.p:
            raise DimensionMismatch(f"expected {self.p} columns, got {x_new.shape[1]}")
        if not self.standardized:
            return x_new
        return (x_new - self.col_means) / self.col_sds


@dataclass(frozen=True)
class MomentSummary:
    mean: np.ndarray
    cov: np.ndarray
    sqrt: np.ndarray
    inv_sqrt: np.ndarray
    ridge: float

    def whiten(self, x: np.ndarray) -> np.ndarray:
        """Return ``Z = Sigma^{-1/2} (x - mean)`` row-wise."""
        return (np.asarray(x, dtype=float) - self.mean) @ self.inv_sqrt


@dataclass(frozen=True)
class SlicePair:
    """Labels in {-1, 0, +1} induced by two disjoint response regions.

    ``scheme`` is ``("lvr", r)`` or ``("ova", r, s)`` with 1-based slice
    indices as in the usual notation.
    """

    labels: np.ndarray
    scheme: tuple
    cuts: tuple = field(default=())

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=float)
        if not (np.any(labels > 0) and np.any(labels < 0)):
            raise EmptySide(f"slice pair {self.scheme} lacks one of the two sides")
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)

    @property
    def active(self) -> np.ndarray:
        """Indices of the observations with a nonzero label."""
        return np.flatnonzero(self.labels)


def standardize(d: Dataset) -> Dataset:
    """Marginally standardize each predictor column.

    Raises :class:`DegenerateColumn` for a constant column.
    """
    mu = d.x.mean(axis=0)
    sd = d.x.std(axis=0, ddof=1)
    bad = np.flatnonzero(~(sd > 0))
    if bad.size:
        raise DegenerateColumn(f"constant predictor column(s): {bad.tolist()}")
    x = (d.x - mu) / sd
    if d.standardized:
        # compose with the stored transform so out-of-sample rows still map
        # from the original scale
        mu = d.col_means + mu * d.col_sds
        sd = d.col_sds * sd
    return replace(d, x=x, standardized=True, col_means=mu, col_sds=sd)


def moments(d: Dataset | np.ndarray, ridge: float | None = None) -> MomentSummary:
    """Sample mean, covariance (denominator ``n``) and its symmetric roots.

    Eigenvalues of the covariance are floored at ``ridge`` before taking
    roots.  With ``ridge=None`` the floor is ``1e-8 * trace / p``, applied
    only when the smallest eigenvalue falls below it.
    """
    x = d.x if isinstance(d, Dataset) else np.asarray(d, dtype=float)
    n, p = x.shape
    mean = x.mean(axis=0)
    xc = x - mean
    cov = xc.T @ xc / n
    cov = (cov + cov.T) / 2
    evals, evecs = np.linalg.eigh(cov)
    scale = max(1.0, float(evals[-1]))
    if evals[0] < -1e-8 * scale:
        raise NotPSD(f"covariance has eigenvalue {evals[0]:.3g}")
    if ridge is None:
        floor = 1e-8 * np.trace(cov) / p
        ridge = floor if evals[0] < floor else 0.0
    elif ridge < 0:
        raise ValueError("ridge must be nonnegative")
    lam = np.maximum(evals, ridge)
    if not np.all(lam > 0):
        raise SingularCovariance("covariance is singular; pass a positive ridge")
    root = np.sqrt(lam)
    sqrt = (evecs * root) @ evecs.T
    inv_sqrt = (evecs / root) @ evecs.T
    return MomentSummary(
        mean=mean,
        cov=cov,
        sqrt=(sqrt + sqrt.T) / 2,
        inv_sqrt=(inv_sqrt + inv_sqrt.T) / 2,
        ridge=float(ridge),
    )


def dividing_points(y: np.ndarray, h: int) -> np.ndarray:
    """The ``h - 1`` equally spaced type-7 sample quantiles of ``y``."""
    if h < 2:
        raise ValueError("h must be at least 2")
    probs = np.arange(1, h) / h
    return np.quantile(np.asarray(y, dtype=float), probs, method="linear")


def slice_index(y: np.ndarray, h: int, categorical: bool = False) -> np.ndarray:
    """0-based slice membership for ``h`` slices.

    Slice ``r`` (1-based) is ``q_{r-1} < y <= q_r``, with the minimum of
    ``y`` put in the first slice.  For a categorical response the slices
    are the sorted distinct levels and ``h`` must equal their count.
    """
    y = np.asarray(y, dtype=float)
    if categorical:
        levels = np.unique(y)
        if levels.size != h:
            raise EmptySlice(f"categorical response has {levels.size} levels, not h={h}")
        return np.searchsorted(levels, y)
    q = dividing_points(y, h)
    idx = np.searchsorted(q, y, side="left")
    counts = np.bincount(idx, minlength=h)
    if np.any(counts == 0):
        raise EmptySlice(f"empty slice(s) {np.flatnonzero(counts == 0).tolist()}")
    return idx


def lvr_slices(d: Dataset | np.ndarray, h: int) -> list[SlicePair]:
    """Left-versus-right pairs at the ``h - 1`` dividing points."""
    y = d.y if isinstance(d, Dataset) else np.asarray(d, dtype=float)
    pairs = []
    for r, q in enumerate(dividing_points(y, h), start=1):
        labels = np.where(y > q, 1.0, -1.0)
        if labels.min() == labels.max():
            raise EmptySide(f"dividing point q_{r}={q:g} leaves one side empty")
        pairs.append(SlicePair(labels, ("lvr", r), (float(q),)))
    return pairs


def ova_slices(d: Dataset | np.ndarray, h: int, categorical: bool | None = None) -> list[SlicePair]:
    """One-versus-another pairs over all ``C(h, 2)`` slice combinations."""
    if isinstance(d, Dataset):
        y = d.y
        categorical = d.categorical if categorical is None else categorical
    else:
        y = np.asarray(d, dtype=float)
    idx = slice_index(y, h, categorical=bool(categorical))
    pairs = []
    for r, s in combinations(range(h), 2):
        labels = (idx == s).astype(float) - (idx == r).astype(float)
        pairs.append(SlicePair(labels, ("ova", r + 1, s + 1)))
    return pairs


def make_slices(d: Dataset, scheme: str, h: int) -> list[SlicePair]:
    scheme = scheme.lower()
    if scheme == "lvr":
        return lvr_slices(d, h)
    if scheme == "ova":
        return ova_slices(d, h)
    raise ValueError(f"unknown slicing scheme {scheme!r}")


def _is_number(s: str) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True


def read_csv(
    path: str | Path,
    response: str | int,
    header: bool | None = None,
    categorical: bool = False,
) -> tuple[Dataset | None, list[str]]:
    """Read a comma-delimited numeric table.

    ``response`` selects the response column by name (requires a header) or
    by 0-based index.  All other columns become predictors.  ``header=None``
    sniffs: the first row is a header when any of its cells is non-numeric.
    Returns ``(dataset, predictor_names)``; the dataset is ``None`` when the
    file has no data rows.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [row for row in csv.reader(fh) if row and any(c.strip() for c in row)]
    if not rows:
        return None, []
    if header is None:
        header = not all(_is_number(c) for c in rows[0])
    names = [c.strip() for c in rows[0]] if header else [f"x{i}" for i in range(len(rows[0]))]
    body = rows[1:] if header else rows
    if isinstance(response, str) and not response.lstrip("-").isdigit():
        if not header:
            raise FileFormat("response given by name but the file has no header")
        if response not in names:
            raise FileFormat(f"response column {response!r} not found in {names}")
        ridx = names.index(response)
    else:
        ridx = int(response)
        if not -len(names) <= ridx < len(names):
            raise FileFormat(f"response index {ridx} out of range")
        ridx %= len(names)
    pred_names = [nm for i, nm in enumerate(names) if i != ridx]
    if not body:
        return None, pred_names
    try:
        table = np.array([[float(c) for c in row] for row in body], dtype=float)
    except ValueError as exc:
        raise FileFormat(f"non-numeric cell: {exc}") from None
    if table.ndim != 2 or table.shape[1] != len(names):
        raise FileFormat("rows have inconsistent column counts")
    y = table[:, ridx]
    x = np.delete(table, ridx, axis=1)
    return Dataset(x, y, categorical=categorical), pred_names


def read_matrix_csv(path: str | Path, header: bool | None = None) -> tuple[np.ndarray, list[str]]:
    """Read a numeric CSV with no response column (for prediction)."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [row for row in csv.reader(fh) if row and any(c.strip() for c in row)]
    if not rows:
        return np.empty((0, 0)), []
    if header is None:
        header = not all(_is_number(c) for c in rows[0])
    names = [c.strip() for c in rows[0]] if header else [f"x{i}" for i in range(len(rows[0]))]
    body = rows[1:] if header else rows
    if not body:
        return np.empty((0, len(names))), names
    try:
        table = np.array([[float(c) for c in row] for row in body], dtype=float)
    except ValueError as exc:
        raise FileFormat(f"non-numeric cell: {exc}") from None
    if table.ndim != 2:
        raise FileFormat("rows have inconsistent column counts")
    return table, names
