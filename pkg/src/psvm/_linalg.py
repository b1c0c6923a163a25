import numpy as np


def sym_eig_desc(M: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenpairs of a symmetric matrix, eigenvalues nonincreasing.

    Ties are broken by original index (stable sort), and each eigenvector is
    signed so that its largest-magnitude entry is positive.
    """
    M = (M + M.T) / 2
    evals, evecs = np.linalg.eigh(M)
    order = np.argsort(-evals, kind="stable")
    evals = evals[order]
    evecs = evecs[:, order]
    return evals, fix_signs(evecs)


def fix_signs(V: np.ndarray) -> np.ndarray:
    V = np.array(V, dtype=float)
    if V.size == 0:
        return V
    lead = np.argmax(np.abs(V), axis=0)
    signs = np.sign(V[lead, np.arange(V.shape[1])])
    signs[signs == 0] = 1.0
    return V * signs


def orthonormalize(B: np.ndarray) -> np.ndarray:
    """Orthonormal basis of span(B) that keeps column order (QR, no pivoting)."""
    q, r = np.linalg.qr(B)
    d = np.sign(np.diag(r))
    d[d == 0] = 1.0
    return q * d
