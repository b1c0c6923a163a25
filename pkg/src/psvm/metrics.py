"""Evaluation criteria for estimated reductions."""

from __future__ import annotations

import warnings

import numpy as np
import scipy.linalg
from scipy.stats import spearmanr

from .exceptions import ConstantInput, DimensionMismatch, RankDeficientBasis, SingularDesignWarning

__all__ = ["subspace_distance", "principal_angles", "spearman_abs", "quadratic_recovery_score"]


def _orth(B: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    B = np.asarray(B, dtype=float)
    if B.ndim == 1:
        B = B[:, None]
    q, r, _ = scipy.linalg.qr(B, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    if diag.size == 0 or diag[-1] <= tol * max(diag[0], 1e-300):
        raise RankDeficientBasis("basis does not have full column rank")
    return q


def subspace_distance(B1: np.ndarray, B2: np.ndarray) -> float:
    """Frobenius norm of the difference of the orthogonal projections onto span(B1), span(B2)."""
    Q1 = _orth(B1)
    Q2 = _orth(B2)
    if Q1.shape[0] != Q2.shape[0]:
        raise DimensionMismatch("bases live in different ambient dimensions")
    return float(np.linalg.norm(Q1 @ Q1.T - Q2 @ Q2.T, "fro"))


def principal_angles(B1: np.ndarray, B2: np.ndarray) -> np.ndarray:
    return scipy.linalg.subspace_angles(_orth(B1), _orth(B2))


def spearman_abs(u, v) -> float:
    """Absolute Spearman rank correlation (average ranks for ties)."""
    u = np.asarray(u, dtype=float).ravel()
    v = np.asarray(v, dtype=float).ravel()
    if u.size != v.size:
        raise DimensionMismatch("inputs differ in length")
    if u.size < 3:
        raise ValueError("need at least 3 paired values")
    if np.ptp(u) == 0 or np.ptp(v) == 0:
        raise ConstantInput("rank correlation undefined for a constant input")
    return float(abs(spearmanr(u, v).statistic))


def quadratic_recovery_score(U1, U2, T) -> float:
    """How well two linear predictors recover a nonlinear one.

    Regresses ``T`` on ``(1, U1, U2, U1^2, U2^2)`` by least squares and
    returns ``spearman_abs(T, fitted)``.  A rank-deficient design falls
    back to the pseudo-inverse fit with a :class:`SingularDesignWarning`.
    """
    U1 = np.asarray(U1, dtype=float).ravel()
    U2 = np.asarray(U2, dtype=float).ravel()
    T = np.asarray(T, dtype=float).ravel()
    D = np.column_stack([np.ones_like(U1), U1, U2, U1**2, U2**2])
    coef, _, rank, _ = np.linalg.lstsq(D, T, rcond=None)
    if rank < D.shape[1]:
        warnings.warn("quadratic design is rank deficient", SingularDesignWarning, stacklevel=2)
    return spearman_abs(T, D @ coef)
