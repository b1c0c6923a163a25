"""Classical inverse-regression baselines: SIR, SAVE and directional regression.

All three work on whitened predictors ``Z`` and equal-count response slices.
With slice proportions ``p_h``, slice means ``m_h`` and slice covariances
``V_h`` of ``Z`` (denominator ``n_h``), the candidate matrices are

* SIR  (Li, 1991):            ``sum p_h m_h m_h'``
* SAVE (Cook & Weisberg, 1991): ``sum p_h (I - V_h)^2``
* DR   (Li & Wang, 2007):     ``2 sum p_h (E[ZZ'|h] - I)^2 + 2 (sum p_h m_h m_h')^2
  + 2 (sum p_h m_h'm_h) (sum p_h m_h m_h')``

Directions are ``Sigma^{-1/2}`` times the leading eigenvectors, then
orthonormalized in order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from ._linalg import orthonormalize, sym_eig_desc
from .dataset import Dataset, moments, slice_index
from .exceptions import EmptySlice
from .linear import SdrFit, project

__all__ = [
    "SliceStats",
    "slice_stats",
    "fit_sir",
    "fit_save",
    "fit_dr",
    "SlicedInverseRegression",
    "SlicedAverageVariance",
    "DirectionalRegression",
]


@dataclass(frozen=True)
class SliceStats:
    proportions: np.ndarray
    means: np.ndarray  # h x p
    covs: np.ndarray  # h x p x p


def slice_stats(Z: np.ndarray, y: np.ndarray, h: int, categorical: bool = False, need_cov: bool = False) -> SliceStats:
    idx = slice_index(y, h, categorical=categorical)
    n, p = Z.shape
    counts = np.bincount(idx, minlength=h)
    if np.any(counts == 0):
        raise EmptySlice("empty slice")
    if need_cov and np.any(counts < 2):
        raise EmptySlice("slices need at least 2 observations for a covariance")
    means = np.zeros((h, p))
    covs = np.zeros((h, p, p))
    for k in range(h):
        zk = Z[idx == k]
        means[k] = zk.mean(axis=0)
        zc = zk - means[k]
        covs[k] = zc.T @ zc / zk.shape[0]
    return SliceStats(counts / n, means, covs)


def _finish(method: str, d: Dataset, mom, M: np.ndarray, dim: int, h: int) -> SdrFit:
    if not 1 <= dim <= d.p:
        raise ValueError(f"dim must lie in [1, {d.p}]")
    M = (M + M.T) / 2
    evals, evecs = sym_eig_desc(M)
    B = mom.inv_sqrt @ evecs[:, :dim]
    return SdrFit(
        method=method,
        m_hat=M,
        eigvals=evals,
        directions=orthonormalize(B),
        h=int(h),
        moments=mom,
    )


def _prepare(d: Dataset, h: int, need_cov: bool):
    mom = moments(d)
    Z = mom.whiten(d.x)
    return mom, slice_stats(Z, d.y, h, categorical=d.categorical, need_cov=need_cov)


def _sir_matrix(st: SliceStats) -> np.ndarray:
    return np.einsum("h,hi,hj->ij", st.proportions, st.means, st.means)


def fit_sir(d: Dataset, h: int = 8, dim: int = 1) -> SdrFit:
    mom, st = _prepare(d, h, need_cov=False)
    return _finish("sir", d, mom, _sir_matrix(st), dim, h)


def fit_save(d: Dataset, h: int = 4, dim: int = 1) -> SdrFit:
    mom, st = _prepare(d, h, need_cov=True)
    eye = np.eye(d.p)
    M = sum(ph * (eye - V) @ (eye - V) for ph, V in zip(st.proportions, st.covs))
    return _finish("save", d, mom, M, dim, h)


def fit_dr(d: Dataset, h: int = 4, dim: int = 1) -> SdrFit:
    mom, st = _prepare(d, h, need_cov=True)
    eye = np.eye(d.p)
    second = np.zeros((d.p, d.p))
    for ph, m, V in zip(st.proportions, st.means, st.covs):
        A = V + np.outer(m, m) - eye
        second += ph * A @ A
    S = _sir_matrix(st)
    mm = float(np.sum(st.proportions * np.sum(st.means**2, axis=1)))
    M = 2 * second + 2 * S @ S + 2 * mm * S
    return _finish("dr", d, mom, M, dim, h)


class _InverseRegression(TransformerMixin, BaseEstimator):
    _fitter = None

    def __init__(self, n_components=1, n_slices=4, categorical=False):
        self.n_components = n_components
        self.n_slices = n_slices
        self.categorical = categorical

    def fit(self, X, y):
        X, y = check_X_y(X, y, y_numeric=True)
        d = Dataset(X, y, categorical=self.categorical)
        h = np.unique(y).size if self.categorical else self.n_slices
        self.fit_ = type(self)._fitter(d, h=h, dim=self.n_components)
        self.n_features_in_ = X.shape[1]
        self.directions_ = self.fit_.directions
        self.components_ = self.directions_.T
        self.eigenvalues_ = self.fit_.eigvals
        return self

    def transform(self, X):
        check_is_fitted(self, "fit_")
        return project(self.fit_, check_array(X))


class SlicedInverseRegression(_InverseRegression):
    _fitter = staticmethod(fit_sir)

    def __init__(self, n_components=1, n_slices=8, categorical=False):
        super().__init__(n_components, n_slices, categorical)


class SlicedAverageVariance(_InverseRegression):
    _fitter = staticmethod(fit_save)


class DirectionalRegression(_InverseRegression):
    _fitter = staticmethod(fit_dr)
