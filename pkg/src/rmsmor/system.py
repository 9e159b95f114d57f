"""System classes, RMS weight encodings and second-order lifting."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sps
import scipy.sparse.linalg as spsla

from rmsmor._linalg import RCOND_TOL, dense_rcond

#: below this state dimension system matrices are stored densely
DENSE_THRESHOLD = 500


class InvalidSystemError(ValueError):
    """Invalid system data (dimensions, singular descriptor, empty output)."""


def as_matrix(M, n: int | None = None, dense: bool | None = None):
    """Convert ``M`` to the storage used for system matrices.

    Dense :class:`numpy.ndarray` when the dimension is below
    :data:`DENSE_THRESHOLD`, CSR otherwise.  Real data keeps a real dtype.
    """
    if dense is None:
        size = n if n is not None else max(np.shape(M))
        dense = size < DENSE_THRESHOLD
    if sps.issparse(M):
        M = M.toarray() if dense else sps.csr_matrix(M)
    else:
        M = np.atleast_2d(np.asarray(M))
        if not dense:
            M = sps.csr_matrix(M)
    if not np.iscomplexobj(M.data if sps.issparse(M) else M):
        M = M.astype(float)
    else:
        M = M.astype(complex)
    return M


def as_vector(b) -> np.ndarray:
    if sps.issparse(b):
        b = b.toarray()
    b = np.asarray(b).reshape(-1)
    return b.astype(complex) if np.iscomplexobj(b) else b.astype(float)


def is_real_data(*mats) -> bool:
    """True when every given matrix or vector has zero imaginary part."""
    for M in mats:
        data = M.data if sps.issparse(M) else np.asarray(M)
        if np.iscomplexobj(data) and np.any(data.imag != 0):
            return False
    return True


def hermitian_part(Q):
    """Exactly Hermitian symmetrization ``(Q + Q^H) / 2``."""
    if sps.issparse(Q):
        return ((Q + Q.conj().T) * 0.5).tocsr()
    return (Q + Q.conj().T) * 0.5


def _check_nonsingular(M, name: str) -> None:
    if sps.issparse(M):
        try:
            spsla.splu(sps.csc_matrix(M))
        except RuntimeError as exc:
            raise InvalidSystemError(f"{name} is singular: {exc}") from None
        return
    if dense_rcond(M) < RCOND_TOL:
        raise InvalidSystemError(f"{name} is singular to working precision")


def _square(M, n: int, name: str) -> None:
    if M.shape != (n, n):
        raise InvalidSystemError(f"{name} has shape {M.shape}, expected {(n, n)}")


@dataclass(frozen=True, eq=False)
class QuadraticOutputSystem:
    """Frequency-domain system with quadratic output.

    ``(sE - A) x(s) = b u(s)``,  ``y(s)**2 = x(s)^H Q x(s)``.

    ``Q`` is replaced by its Hermitian part on construction and ``E`` is
    checked for singularity by factorizing it once.
    """

    E: object
    A: object
    b: np.ndarray
    Q: object
    name: str = "qo"
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        b = as_vector(self.b)
        n = b.shape[0]
        if n == 0:
            raise InvalidSystemError("empty system")
        E, A, Q = (as_matrix(M, n) for M in (self.E, self.A, self.Q))
        for M, nm in ((E, "E"), (A, "A"), (Q, "Q")):
            _square(M, n, nm)
        Q = hermitian_part(Q)
        if self.check:
            _check_nonsingular(E, "E")
        object.__setattr__(self, "E", E)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "Q", Q)

    @property
    def n(self) -> int:
        return self.b.shape[0]

    @property
    def is_sparse(self) -> bool:
        return sps.issparse(self.A)

    @property
    def is_real(self) -> bool:
        return is_real_data(self.E, self.A, self.b, self.Q)

    def __repr__(self):
        kind = "sparse" if self.is_sparse else "dense"
        return f"QuadraticOutputSystem(name={self.name!r}, n={self.n}, {kind})"


@dataclass(frozen=True, eq=False)
class LinearOutputSystem:
    """Linear system with ``p`` outputs ``z(s) = C x(s)``."""

    E: object
    A: object
    b: np.ndarray
    C: object
    name: str = "lo"

    def __post_init__(self):
        b = as_vector(self.b)
        n = b.shape[0]
        E, A = as_matrix(self.E, n), as_matrix(self.A, n)
        _square(E, n, "E")
        _square(A, n, "A")
        C = self.C
        C = sps.csr_matrix(C) if sps.issparse(C) else np.atleast_2d(np.asarray(C))
        if C.shape[1] != n:
            raise InvalidSystemError(f"C has {C.shape[1]} columns, expected {n}")
        object.__setattr__(self, "E", E)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "C", C)

    @property
    def n(self) -> int:
        return self.b.shape[0]

    @property
    def p(self) -> int:
        return self.C.shape[0]


@dataclass(frozen=True, eq=False)
class SecondOrderSystem:
    """Structural model ``(s^2 M + s D + K) p(s) = g u(s)``, ``z = C p``."""

    M: object
    D: object
    K: object
    g: np.ndarray
    C: object
    name: str = "so"
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        g = as_vector(self.g)
        n = g.shape[0]
        M, D, K = (sps.csr_matrix(X) for X in (self.M, self.D, self.K))
        for X, nm in ((M, "M"), (D, "D"), (K, "K")):
            _square(X, n, nm)
        C = sps.csr_matrix(self.C)
        if C.shape[1] != n:
            raise InvalidSystemError(f"C has {C.shape[1]} columns, expected {n}")
        if self.check:
            _check_nonsingular(M, "M")
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "D", D)
        object.__setattr__(self, "K", K)
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "C", C)

    @property
    def n_so(self) -> int:
        return self.g.shape[0]


@dataclass(frozen=True)
class RmsWeights:
    """Weights ``q_k`` of the RMS output and the reference state."""

    weights: np.ndarray
    reference: np.ndarray | None = None

    def __post_init__(self):
        w = np.atleast_1d(np.asarray(self.weights))
        if w.ndim != 1 or w.size == 0:
            raise InvalidSystemError("weights must be a nonempty vector")
        ref = np.zeros(w.size) if self.reference is None else np.asarray(self.reference).reshape(-1)
        if ref.size != w.size:
            raise InvalidSystemError(f"reference has length {ref.size}, expected {w.size}")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "reference", ref)

    @property
    def n(self) -> int:
        return self.weights.size


def q_from_weights(w: RmsWeights):
    """Output matrix ``diag(|q_1|^2, ..., |q_n|^2)`` of the RMS output."""
    q = w.weights
    # same sparse product kernel as C^H C, so both agree to the last bit
    d = (sps.diags(np.conj(q), format="csr") @ sps.diags(q, format="csr")).diagonal().real
    return sps.diags(d, format="csr") if w.n >= DENSE_THRESHOLD else np.diag(d)


def c_from_weights(w: RmsWeights) -> sps.csr_matrix:
    """Linear output matrix whose rows are ``q_k e_k^T`` for the nonzero weights.

    ``C^H C`` equals :func:`q_from_weights`.
    """
    idx = np.flatnonzero(w.weights)
    if idx.size == 0:
        raise InvalidSystemError("all weights are zero; the linear output would be empty")
    p = idx.size
    return sps.csr_matrix((w.weights[idx], (np.arange(p), idx)), shape=(p, w.n))


def q_from_output_matrix(L: LinearOutputSystem) -> QuadraticOutputSystem:
    """Quadratic-output system with ``Q = C^H C``, so that ``H(s) = ||G(s)||^2``."""
    C = L.C
    Q = C.conj().T @ C
    return QuadraticOutputSystem(L.E, L.A, L.b, Q, name=L.name, check=False)


def lift_second_order(S: SecondOrderSystem) -> QuadraticOutputSystem:
    """First-order quadratic-output form of a second-order system.

    With ``x = [p; s p]``::

        E = [[I, 0], [0, M]]    A = [[0, I], [-K, -D]]
        Q = [[C^H C, 0], [0, 0]]    b = [0; g]
    """
    n = S.n_so
    I = sps.identity(n, format="csr")
    Z = sps.csr_matrix((n, n))
    E = sps.bmat([[I, None], [None, S.M]], format="csr")
    A = sps.bmat([[Z, I], [-S.K, -S.D]], format="csr")
    CtC = (S.C.conj().T @ S.C).tocsr()
    Q = sps.bmat([[CtC, None], [None, Z]], format="csr")
    b = np.concatenate([np.zeros(n, dtype=S.g.dtype), S.g])
    # E is nonsingular exactly when M is, which SecondOrderSystem already checked
    return QuadraticOutputSystem(E, A, b, Q, name=S.name, check=False)


def rms_from_state(x, w: RmsWeights) -> float:
    """RMS deviation ``sqrt(sum |q_k|^2 |x_k - xref_k|^2)`` of a state."""
    x = np.asarray(x).reshape(-1)
    if x.size != w.n:
        raise InvalidSystemError(f"state has length {x.size}, weights have length {w.n}")
    d = np.abs(w.weights) * np.abs(x - w.reference)
    return float(np.sqrt(np.sum(d * d)))
