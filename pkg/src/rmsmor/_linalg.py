"""Small dense linear-algebra helpers shared across modules."""

import warnings

import numpy as np
import scipy.linalg as spla
from scipy.linalg import lapack

#: reciprocal condition numbers below this flag a (near-)singular matrix
RCOND_TOL = 1e-14


def lu_factor_quiet(M):
    """``scipy.linalg.lu_factor`` without the singular-matrix warning."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", spla.LinAlgWarning)
        return spla.lu_factor(M, check_finite=False)


def lu_rcond(lu, anorm: float) -> float:
    """1-norm reciprocal condition estimate from an LU factor (LAPACK ``gecon``)."""
    if anorm == 0.0 or not np.all(np.isfinite(lu)):
        return 0.0
    if np.any(np.diag(lu) == 0):
        return 0.0
    gecon = lapack.zgecon if np.iscomplexobj(lu) else lapack.dgecon
    rcond, info = gecon(lu, anorm)
    return float(rcond) if info == 0 else 0.0


def dense_rcond(M) -> float:
    M = np.asarray(M)
    lu, _ = lu_factor_quiet(M)
    return lu_rcond(lu, float(np.linalg.norm(M, 1)))


def orth_columns(X: np.ndarray, tol: float = 1e-10):
    """Orthonormalize columns by Gram-Schmidt with one re-orthogonalization.

    Returns the orthonormal factor and the indices of the kept columns.  A
    column is dropped when its component orthogonal to the previous ones has
    norm at most ``tol`` times the largest input column norm.
    """
    X = np.asarray(X)
    n, k = X.shape
    scale = max(np.linalg.norm(X, axis=0).max(initial=0.0), np.finfo(float).tiny)
    Q = np.zeros((n, k), dtype=np.result_type(X.dtype, float))
    kept = []
    for j in range(k):
        v = X[:, j].astype(Q.dtype, copy=True)
        Qj = Q[:, : len(kept)]
        for _ in range(2):
            v -= Qj @ (Qj.conj().T @ v)
        nv = np.linalg.norm(v)
        if nv <= tol * scale:
            continue
        Q[:, len(kept)] = v / nv
        kept.append(j)
    return Q[:, : len(kept)], kept
