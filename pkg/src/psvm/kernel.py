"""Kernel principal support vector machine with the invariant kernel.

The basis functions are the leading eigenfunctions of the sample covariance
operator of the kernel feature map.  With ``w_r`` the unit eigenvectors of
the doubly centered Gram matrix ``Q K Q`` and ``lambda_r`` their eigenvalues,

    psi_r(x) = (1/lambda_r) sum_i w_ri [k(x, X_i) - mean_j k(X_j, X_i)],

so that ``psi_r(X_j) = w_rj`` on the training sample.  The design matrix is
``Psi = (w_1, ..., w_k)``, hence ``Psi'Psi = I`` and the invariant kernel is
``P = Psi Psi'``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np
from scipy.spatial.distance import cdist, pdist
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from ._linalg import fix_signs, sym_eig_desc
from .dataset import Dataset, SlicePair, make_slices, standardize
from .exceptions import DimensionMismatch, RankDeficient, RankDeficientWarning, ZeroSpread
from .qp import DualProblem, solve_dual
from .simulate import rng_for

__all__ = [
    "KernelSpec",
    "KernelBasis",
    "KernelFit",
    "gram",
    "gamma_sample",
    "gamma_population",
    "build_basis",
    "basis_functions",
    "fit_pair_kernel",
    "fit_kernel",
    "evaluate_predictor",
    "KernelPSVM",
]

EIGEN_FLOOR = 1e-10


@dataclass(frozen=True)
class KernelSpec:
    """``gaussian``: ``exp(-gamma |a - b|^2)``; ``polynomial``: ``(a'b + coef0)^degree``."""

    kind: str = "gaussian"
    gamma: float = 1.0
    coef0: float = 1.0
    degree: int = 2

    def __post_init__(self):
        kind = {"poly": "polynomial", "rbf": "gaussian"}.get(self.kind, self.kind)
        object.__setattr__(self, "kind", kind)
        if kind == "gaussian":
            if not (np.isfinite(self.gamma) and self.gamma > 0):
                raise ValueError("gaussian kernel needs a finite gamma > 0")
        elif kind == "polynomial":
            if not (np.isfinite(self.coef0) and self.coef0 >= 0):
                raise ValueError("polynomial kernel needs coef0 >= 0")
            if int(self.degree) != self.degree or self.degree < 1:
                raise ValueError("polynomial degree must be a positive integer")
            object.__setattr__(self, "degree", int(self.degree))
        else:
            raise ValueError(f"unknown kernel {self.kind!r}")

    def to_dict(self) -> dict:
        if self.kind == "gaussian":
            return {"kind": "gaussian", "gamma": float(self.gamma)}
        return {"kind": "polynomial", "coef0": float(self.coef0), "degree": int(self.degree)}


def gram(spec: KernelSpec, rows_a: np.ndarray, rows_b: np.ndarray) -> np.ndarray:
    a = np.atleast_2d(np.asarray(rows_a, dtype=float))
    b = np.atleast_2d(np.asarray(rows_b, dtype=float))
    if a.shape[1] != b.shape[1]:
        raise DimensionMismatch("kernel arguments differ in dimension")
    if spec.kind == "gaussian":
        return np.exp(-spec.gamma * cdist(a, b, "sqeuclidean"))
    return (a @ b.T + spec.coef0) ** spec.degree


def gamma_sample(d: Dataset | np.ndarray, statistic: str = "mean") -> float:
    """``1 / tau^2`` with ``tau`` the mean (or median) pairwise distance."""
    x = d.x if isinstance(d, Dataset) else np.atleast_2d(np.asarray(d, dtype=float))
    if x.shape[0] < 2:
        raise ValueError("need at least two rows")
    dist = pdist(x)
    tau = float(np.median(dist) if statistic == "median" else np.mean(dist))
    if tau == 0:
        raise ZeroSpread("all rows are identical")
    return 1.0 / tau**2


@lru_cache(maxsize=64)
def _gamma_population(p: int, mc_draws: int, seed: int) -> tuple[float, float]:
    rng = rng_for(seed, p)
    dist = np.empty(mc_draws)
    chunk = 50_000
    for start in range(0, mc_draws, chunk):
        m = min(chunk, mc_draws - start)
        diff = rng.standard_normal((m, p)) - rng.standard_normal((m, p))
        dist[start : start + m] = np.sqrt(np.einsum("ij,ij->i", diff, diff))
    mean = float(dist.mean())
    se = float(dist.std(ddof=1) / np.sqrt(mc_draws))
    return 1.0 / mean**2, 2.0 * se / mean**3


def gamma_population(p: int, mc_draws: int = 200_000, seed: int = 0, return_se: bool = False):
    """Monte Carlo ``1 / (E|X - X'|)^2`` for independent ``N(0, I_p)`` vectors.

    With ``return_se`` the delta-method standard error is returned as well.
    """
    if mc_draws < 10_000:
        raise ValueError("use at least 10^4 Monte Carlo draws")
    gamma, se = _gamma_population(int(p), int(mc_draws), int(seed))
    return (gamma, se) if return_se else gamma


@dataclass(frozen=True)
class KernelBasis:
    spec: KernelSpec
    anchors: np.ndarray = field(repr=False)
    eigvals: np.ndarray
    w: np.ndarray = field(repr=False)  # n x k, orthonormal columns
    kbar: np.ndarray = field(repr=False)  # column means of the training Gram matrix
    rank_deficient: bool = False

    @property
    def k(self) -> int:
        return self.w.shape[1]

    @property
    def n(self) -> int:
        return self.w.shape[0]

    @property
    def psi(self) -> np.ndarray:
        return self.w

    @property
    def projection(self) -> np.ndarray:
        return self.w @ self.w.T


def build_basis(d: Dataset | np.ndarray, spec: KernelSpec, k: int | None = None) -> KernelBasis:
    """Leading eigenpairs of ``Q K Q`` (``Q = I - J/n``); default ``k = n // 2``.

    Eigenvalues below ``lambda_1 * 1e-10`` are discarded.  If fewer than
    ``k`` survive, the achievable basis is returned with
    ``rank_deficient=True`` and a :class:`RankDeficientWarning`; if none
    survive, :class:`RankDeficient` is raised.
    """
    x = d.x if isinstance(d, Dataset) else np.atleast_2d(np.asarray(d, dtype=float))
    n = x.shape[0]
    if k is None:
        k = n // 2
    if not 1 <= k < n:
        raise ValueError(f"k must lie in [1, {n - 1}]")
    K = gram(spec, x, x)
    K = (K + K.T) / 2
    kbar = K.mean(axis=0)
    # Decompose inside the complement of the constants, so that the kept
    # eigenvectors are centered to machine precision even when their
    # eigenvalues are tiny.  H holds the last n - 1 columns of the
    # Householder reflector that maps e_1 to -1/sqrt(n).
    v = np.ones(n)
    v[0] += np.sqrt(n)
    H = np.eye(n)[:, 1:] - np.outer(v, v[1:]) * (2.0 / (v @ v))
    evals, evecs = sym_eig_desc(H.T @ K @ H)
    evecs = H @ evecs
    top = evals[0]
    # rounding noise of the reduction is about n * eps * max|K|
    noise = n * np.finfo(float).eps * float(np.abs(K).max())
    keep = int(np.sum(evals > top * EIGEN_FLOOR)) if top > noise else 0
    if keep == 0:
        raise RankDeficient("centered Gram matrix is numerically zero")
    deficient = keep < k
    if deficient:
        warnings.warn(f"only {keep} of {k} requested basis functions are available", RankDeficientWarning, stacklevel=2)
        k = keep
    w = fix_signs(evecs[:, :k])
    return KernelBasis(spec=spec, anchors=x.copy(), eigvals=evals[:k].copy(), w=w, kbar=kbar, rank_deficient=deficient)


def basis_functions(basis: KernelBasis, x_new: np.ndarray, normalized: bool = True) -> np.ndarray:
    """``psi_r(x)`` for each new row, shape ``(m, k)``.

    With ``normalized=False`` the ``1/lambda_r`` factor is dropped, giving
    ``sum_i w_ri [k(x, X_i) - mean_j k(X_j, X_i)]``, which equals
    ``lambda_r w_r`` at the training rows.
    """
    x_new = np.atleast_2d(np.asarray(x_new, dtype=float))
    if x_new.shape[1] != basis.anchors.shape[1]:
        raise DimensionMismatch(f"expected {basis.anchors.shape[1]} columns, got {x_new.shape[1]}")
    Kx = gram(basis.spec, x_new, basis.anchors)
    vals = Kx @ basis.w - basis.kbar @ basis.w
    return vals / basis.eigvals if normalized else vals


def fit_pair_kernel(
    basis: KernelBasis,
    pair: SlicePair,
    lam: float = 1.0,
    tol: float = 1e-6,
    max_iter: int | None = None,
) -> np.ndarray:
    """Coefficient vector ``c = 1/2 Psi'(y * alpha)`` for one slice pair.

    The dual uses the invariant kernel restricted to nonzero-label rows and
    the box ``0 <= alpha <= lam``.
    """
    if not lam > 0:
        raise ValueError("cost must be positive")
    idx = pair.active
    Wa = basis.w[idx]
    ya = pair.labels[idx]
    sol = solve_dual(DualProblem(Wa @ Wa.T, ya, lam), tol=tol, max_iter=max_iter)
    return 0.5 * Wa.T @ (ya * sol.alpha)


@dataclass(frozen=True)
class KernelFit:
    basis: KernelBasis
    coefs: np.ndarray  # k x h_tilde
    eigvals: np.ndarray
    v: np.ndarray  # k x dim
    scheme: str
    cost: float
    h: int
    col_means: np.ndarray | None = None
    col_sds: np.ndarray | None = None

    @property
    def dim(self) -> int:
        return self.v.shape[1]

    def training_predictors(self) -> np.ndarray:
        return self.basis.w @ self.v


def fit_kernel(
    d: Dataset,
    spec: KernelSpec | None = None,
    k: int | None = None,
    scheme: str = "lvr",
    h: int = 21,
    lam: float = 1.0,
    dim: int = 1,
    standardize_x: bool = True,
    tol: float = 1e-6,
    max_iter: int | None = None,
) -> KernelFit:
    """Kernel PSVM: basis, one dual per slice pair, eigenvectors of ``sum c c'``.

    ``spec=None`` uses a Gaussian kernel with the sample ``gamma``.
    """
    mu = sd = None
    if standardize_x:
        d = standardize(d)
        mu, sd = d.col_means, d.col_sds
    if spec is None:
        spec = KernelSpec("gaussian", gamma=gamma_sample(d))
    basis = build_basis(d, spec, k)
    if not 1 <= dim <= basis.k:
        raise ValueError(f"dim must lie in [1, {basis.k}]")
    pairs = make_slices(d, scheme, h)
    coefs = np.column_stack([fit_pair_kernel(basis, pr, lam, tol, max_iter) for pr in pairs])
    evals, evecs = sym_eig_desc(coefs @ coefs.T)
    return KernelFit(
        basis=basis,
        coefs=coefs,
        eigvals=evals,
        v=evecs[:, :dim],
        scheme=scheme.lower(),
        cost=float(lam),
        h=int(h),
        col_means=mu,
        col_sds=sd,
    )


def evaluate_predictor(fit: KernelFit, x_new: np.ndarray, standardized: bool = False) -> np.ndarray:
    """Nonlinear sufficient predictors at new rows, shape ``(m, dim)``.

    Rows are standardized with the training means and sds unless
    ``standardized`` says they already are.
    """
    x_new = np.atleast_2d(np.asarray(x_new, dtype=float))
    if x_new.shape[1] != fit.basis.anchors.shape[1]:
        raise DimensionMismatch(f"expected {fit.basis.anchors.shape[1]} columns, got {x_new.shape[1]}")
    if fit.col_means is not None and not standardized:
        x_new = (x_new - fit.col_means) / fit.col_sds
    return basis_functions(fit.basis, x_new) @ fit.v


def resolve_gamma(gamma, x: np.ndarray, mc_draws: int = 200_000) -> float:
    """Turn ``"auto-sample"``, ``"auto-median"``, ``"auto-pop"`` or a number into a value."""
    if isinstance(gamma, str):
        if gamma == "auto-sample":
            return gamma_sample(x)
        if gamma == "auto-median":
            return gamma_sample(x, statistic="median")
        if gamma == "auto-pop":
            return gamma_population(x.shape[1], mc_draws)
        return float(gamma)
    return float(gamma)


class KernelPSVM(TransformerMixin, BaseEstimator):
    """Kernel principal SVM for nonlinear sufficient dimension reduction.

    ``gamma`` may be a number, ``"auto-sample"`` (mean pairwise distance),
    ``"auto-median"`` or ``"auto-pop"`` (the N(0, I_p) population value).
    ``n_basis=None`` uses ``n // 2`` eigenfunctions.
    """

    def __init__(
        self,
        n_components=1,
        kernel="gaussian",
        gamma="auto-sample",
        coef0=1.0,
        degree=2,
        n_basis=None,
        scheme="lvr",
        n_slices=21,
        cost=1.0,
        standardize=True,
        categorical=False,
        tol=1e-6,
        max_iter=None,
    ):
        self.n_components = n_components
        self.kernel = kernel
        self.gamma = gamma
        self.coef0 = coef0
        self.degree = degree
        self.n_basis = n_basis
        self.scheme = scheme
        self.n_slices = n_slices
        self.cost = cost
        self.standardize = standardize
        self.categorical = categorical
        self.tol = tol
        self.max_iter = max_iter

    def _spec(self, x: np.ndarray) -> KernelSpec:
        if self.kernel in ("gaussian", "rbf"):
            return KernelSpec("gaussian", gamma=resolve_gamma(self.gamma, x))
        return KernelSpec("polynomial", coef0=self.coef0, degree=self.degree)

    def fit(self, X, y):
        X, y = check_X_y(X, y, y_numeric=True)
        d = Dataset(X, y, categorical=self.categorical)
        h = np.unique(y).size if (self.categorical and self.scheme == "ova") else self.n_slices
        xs = standardize(d).x if self.standardize else d.x
        self.fit_ = fit_kernel(
            d,
            spec=self._spec(xs),
            k=self.n_basis,
            scheme=self.scheme,
            h=h,
            lam=self.cost,
            dim=self.n_components,
            standardize_x=self.standardize,
            tol=self.tol,
            max_iter=self.max_iter,
        )
        self.n_features_in_ = X.shape[1]
        self.eigenvalues_ = self.fit_.eigvals
        self.gamma_ = self.fit_.basis.spec.gamma if self.fit_.basis.spec.kind == "gaussian" else None
        return self

    def transform(self, X):
        check_is_fitted(self, "fit_")
        return evaluate_predictor(self.fit_, check_array(X))
