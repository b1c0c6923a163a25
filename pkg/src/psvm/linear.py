"""Linear principal support vector machine."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from ._linalg import orthonormalize, sym_eig_desc
from .dataset import Dataset, MomentSummary, SlicePair, make_slices, moments
from .exceptions import DimensionMismatch
from .qp import DualProblem, recover_intercept, solve_dual

__all__ = ["box_bound", "Hyperplane", "SdrFit", "fit_pair", "fit", "project", "LinearPSVM"]

DEFAULT_LVR_SLICES = 21  # 20 dividing points
COST_FORMS = ("package", "mean")
EIGEN_METRICS = ("whitened", "euclidean")


def box_bound(lam: float, n: int, cost_form: str = "package") -> float:
    """Dual box bound for the whitened hinge problem.

    ``"mean"`` reads ``lam`` literally in ``zeta'zeta + lam E_n[.]^+`` and
    gives ``lam / n``.  ``"package"`` reads it as the cost of a standard SVM
    package, ``1/2 zeta'zeta + lam sum[.]^+``, which is the same problem
    with box ``2 lam``.
    """
    if not lam > 0:
        raise ValueError("cost must be positive")
    if cost_form == "package":
        return 2.0 * lam
    if cost_form == "mean":
        return lam / n
    raise ValueError(f"cost_form must be one of {COST_FORMS}")


@dataclass(frozen=True)
class Hyperplane:
    psi: np.ndarray
    t: float
    zeta: np.ndarray
    pair: SlicePair = field(repr=False)
    iterations: int = 0
    kkt_violation: float = 0.0
    converged: bool = True


@dataclass(frozen=True)
class SdrFit:
    """Candidate matrix, its spectrum and the leading directions.

    ``directions`` has orthonormal columns.  ``m_hat`` is the matrix that was
    decomposed; for the whitened metric and for the inverse-regression
    baselines it lives on the whitened scale.
    """

    method: str
    m_hat: np.ndarray
    eigvals: np.ndarray
    directions: np.ndarray
    scheme: str | None = None
    cost: float | None = None
    h: int | None = None
    hyperplanes: tuple = field(default=(), repr=False)
    moments: MomentSummary | None = field(default=None, repr=False)

    @property
    def dim(self) -> int:
        return self.directions.shape[1]

    @property
    def psi_list(self) -> np.ndarray:
        return np.array([hp.psi for hp in self.hyperplanes])


def fit_pair(
    d: Dataset,
    mom: MomentSummary,
    pair: SlicePair,
    lam: float = 1.0,
    tol: float = 1e-6,
    max_iter: int | None = None,
    Z: np.ndarray | None = None,
    cost_form: str = "package",
) -> Hyperplane:
    """Separating hyperplane of one slice pair under the Sigma-weighted penalty.

    Minimizes ``zeta'zeta + c * sum[1 - y (Z'zeta - t)]^+`` on whitened
    predictors (``c`` from :func:`box_bound`) and maps back with
    ``psi = Sigma^{-1/2} zeta``.  Zero-label rows add only a constant to the
    objective, so they are left out of the dual.
    """
    C = box_bound(lam, d.n, cost_form)
    if Z is None:
        Z = mom.whiten(d.x)
    idx = pair.active
    Za = Z[idx]
    ya = pair.labels[idx]
    prob = DualProblem(Za @ Za.T, ya, C)
    sol = solve_dual(prob, tol=tol, max_iter=max_iter)
    zeta = 0.5 * (sol.alpha * ya) @ Za
    t = recover_intercept(prob, sol, Za @ zeta)
    return Hyperplane(
        psi=mom.inv_sqrt @ zeta,
        t=t,
        zeta=zeta,
        pair=pair,
        iterations=sol.iterations,
        kkt_violation=sol.kkt_violation,
        converged=sol.converged,
    )


def fit(
    d: Dataset,
    scheme: str = "lvr",
    h: int = DEFAULT_LVR_SLICES,
    lam: float = 1.0,
    dim: int = 1,
    ridge: float | None = None,
    tol: float = 1e-6,
    max_iter: int | None = None,
    cost_form: str = "package",
    metric: str = "whitened",
) -> SdrFit:
    """Fit every slice pair and take the leading eigenvectors of sum psi psi'.

    With ``metric="whitened"`` the eigenvectors are taken in the inner
    product of ``Sigma``: decompose ``sum zeta zeta'`` and map back with
    ``Sigma^{-1/2}``.  That keeps the estimated span affine equivariant.
    ``"euclidean"`` decomposes ``sum psi psi'`` directly.
    """
    if not 1 <= dim <= d.p:
        raise ValueError(f"dim must lie in [1, {d.p}]")
    if metric not in EIGEN_METRICS:
        raise ValueError(f"metric must be one of {EIGEN_METRICS}")
    mom = moments(d, ridge)
    Z = mom.whiten(d.x)
    pairs = make_slices(d, scheme, h)
    planes = tuple(fit_pair(d, mom, pr, lam, tol, max_iter, Z=Z, cost_form=cost_form) for pr in pairs)
    if metric == "whitened":
        zetas = np.array([hp.zeta for hp in planes])
        m_hat = zetas.T @ zetas
        evals, evecs = sym_eig_desc(m_hat)
        directions = orthonormalize(mom.inv_sqrt @ evecs[:, :dim])
    else:
        psis = np.array([hp.psi for hp in planes])
        m_hat = psis.T @ psis
        evals, evecs = sym_eig_desc(m_hat)
        directions = evecs[:, :dim]
    return SdrFit(
        method="psvm",
        m_hat=m_hat,
        eigvals=evals,
        directions=directions,
        scheme=scheme.lower(),
        cost=float(lam),
        h=int(h),
        hyperplanes=planes,
        moments=mom,
    )


def project(fit: SdrFit, x_new: np.ndarray) -> np.ndarray:
    """Reduced predictors ``x_new @ V``."""
    x_new = np.atleast_2d(np.asarray(x_new, dtype=float))
    if x_new.shape[1] != fit.directions.shape[0]:
        raise DimensionMismatch(
            f"expected {fit.directions.shape[0]} columns, got {x_new.shape[1]}"
        )
    return x_new @ fit.directions


class LinearPSVM(TransformerMixin, BaseEstimator):
    """Linear principal SVM for sufficient dimension reduction.

    Parameters
    ----------
    n_components : int
        Number of directions kept.
    scheme : {"lvr", "ova"}
        Left-versus-right dichotomies or one-versus-another slice pairs.
    n_slices : int
        ``h``.  LVR uses the ``h - 1`` interior quantiles as dividing points.
    cost : float
        Hinge-loss weight ``lambda``.
    cost_form : {"package", "mean"}
        How ``cost`` enters the hinge term; see :func:`box_bound`.
    metric : {"whitened", "euclidean"}
        Inner product used for the eigenvectors; see :func:`fit`.
    categorical : bool
        Treat ``y`` as class labels (OVA slices become the levels).
    """

    def __init__(
        self,
        n_components=1,
        scheme="lvr",
        n_slices=DEFAULT_LVR_SLICES,
        cost=1.0,
        cost_form="package",
        metric="whitened",
        categorical=False,
        ridge=None,
        tol=1e-6,
        max_iter=None,
    ):
        self.n_components = n_components
        self.scheme = scheme
        self.n_slices = n_slices
        self.cost = cost
        self.cost_form = cost_form
        self.metric = metric
        self.categorical = categorical
        self.ridge = ridge
        self.tol = tol
        self.max_iter = max_iter

    def fit(self, X, y):
        X, y = check_X_y(X, y, y_numeric=True)
        d = Dataset(X, y, categorical=self.categorical)
        h = self.n_slices
        if self.categorical and self.scheme == "ova":
            h = np.unique(y).size
        self.fit_ = fit(
            d,
            scheme=self.scheme,
            h=h,
            lam=self.cost,
            dim=self.n_components,
            ridge=self.ridge,
            tol=self.tol,
            max_iter=self.max_iter,
            cost_form=self.cost_form,
            metric=self.metric,
        )
        self.n_features_in_ = X.shape[1]
        self.directions_ = self.fit_.directions
        self.components_ = self.directions_.T
        self.eigenvalues_ = self.fit_.eigvals
        self.candidate_matrix_ = self.fit_.m_hat
        return self

    def transform(self, X):
        check_is_fitted(self, "fit_")
        X = check_array(X)
        return project(self.fit_, X)
