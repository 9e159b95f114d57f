"""Galerkin and Petrov-Galerkin projection of quadratic-output systems."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as spla

from rmsmor import transfer
from rmsmor._linalg import RCOND_TOL, dense_rcond, orth_columns
from rmsmor.system import hermitian_part

logger = logging.getLogger(__name__)

#: relative tolerance below which a basis column is considered dependent
DEFLATION_TOL = 1e-10


class EmptyBasisError(ValueError):
    pass


@dataclass(frozen=True)
class BasisMatrix:
    """Orthonormal basis with one provenance tag per column."""

    columns: np.ndarray
    tags: tuple = ()

    def __post_init__(self):
        cols = np.asarray(self.columns)
        if cols.ndim != 2 or cols.shape[1] == 0:
            raise EmptyBasisError("basis has no columns")
        tags = tuple(self.tags) if self.tags else tuple(range(cols.shape[1]))
        if len(tags) != cols.shape[1]:
            raise ValueError("one tag per column required")
        object.__setattr__(self, "columns", cols)
        object.__setattr__(self, "tags", tags)

    @property
    def n(self) -> int:
        return self.columns.shape[0]

    @property
    def r(self) -> int:
        return self.columns.shape[1]

    def orthonormality_error(self) -> float:
        V = self.columns
        return float(np.max(np.abs(V.conj().T @ V - np.eye(self.r))))


def normalize(raw, tol: float = DEFLATION_TOL, tags=None) -> BasisMatrix:
    """Orthonormal basis of the column space of ``raw`` with deflation.

    Columns are processed left to right with twice-repeated Gram-Schmidt;
    a column whose remaining norm is at most ``tol`` times the largest input
    column norm is dropped.  Kept columns inherit the input tags.
    """
    raw = np.asarray(raw)
    if raw.ndim == 1:
        raw = raw[:, None]
    if raw.shape[1] == 0:
        raise EmptyBasisError("no columns to normalize")
    Q, kept = orth_columns(raw, tol)
    if not kept:
        raise EmptyBasisError("all columns were deflated")
    tags = list(range(raw.shape[1])) if tags is None else list(tags)
    return BasisMatrix(Q, tuple(tags[j] for j in kept))


def _columns(B) -> np.ndarray:
    return B.columns if isinstance(B, BasisMatrix) else np.atleast_2d(np.asarray(B).T).T


@dataclass(frozen=True, eq=False)
class ReducedModel:
    """Projected model ``(E_r, A_r, b_r, Q_r)`` and the bases that produced it."""

    E: np.ndarray
    A: np.ndarray
    b: np.ndarray
    Q: np.ndarray
    V: object = None
    W: object = None
    method: str = ""
    warnings: list = field(default_factory=list)
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        b = np.asarray(self.b).reshape(-1)
        r = b.size
        if r == 0:
            raise EmptyBasisError("reduced model of order 0")
        E, A, Q = (np.atleast_2d(np.asarray(M)) for M in (self.E, self.A, self.Q))
        for M, nm in ((E, "E"), (A, "A"), (Q, "Q")):
            if M.shape != (r, r):
                raise ValueError(f"reduced {nm} has shape {M.shape}, expected {(r, r)}")
        object.__setattr__(self, "E", E)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "Q", hermitian_part(Q))

    @property
    def r(self) -> int:
        return self.b.size

    @property
    def n(self) -> int:
        return self.r

    @property
    def name(self) -> str:
        return self.method or "rom"

    def tf_imag(self, omegas) -> np.ndarray:
        """``H_r(i omega)`` for an array of angular frequencies; NaN where singular."""
        omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
        K = 1j * omegas[:, None, None] * self.E[None] - self.A[None]
        rhs = np.broadcast_to(self.b.astype(complex), (omegas.size, self.r))[..., None]
        try:
            X = np.linalg.solve(K, rhs)[..., 0]
        except np.linalg.LinAlgError:
            X = np.full((omegas.size, self.r), np.nan + 0j)
            for k in range(omegas.size):
                try:
                    X[k] = np.linalg.solve(K[k], rhs[k, :, 0])
                except np.linalg.LinAlgError:
                    pass
        return np.einsum("ki,ij,kj->k", X.conj(), self.Q, X)


def reduce(sys, V, W=None, method: str = "", info: dict | None = None) -> ReducedModel:
    """Project ``sys`` onto ``span(V)`` along ``span(W)``.

    ``E_r = W^H E V``, ``A_r = W^H A V``, ``b_r = W^H b``, ``Q_r = V^H Q V``.
    ``W=None`` means Galerkin projection (``W = V``).  A numerically singular
    ``E_r`` is reported in ``warnings`` rather than raised.
    """
    Vc = _columns(V)
    Wc = Vc if W is None else _columns(W)
    if Vc.shape[0] != sys.n or Wc.shape[0] != sys.n:
        raise ValueError(f"basis row count differs from system dimension {sys.n}")
    if Vc.shape[1] != Wc.shape[1]:
        raise ValueError(f"V has {Vc.shape[1]} columns but W has {Wc.shape[1]}")
    if Vc.shape[1] > sys.n:
        raise ValueError("more basis columns than states")
    Wh = Wc.conj().T
    Er = Wh @ (sys.E @ Vc)
    Ar = Wh @ (sys.A @ Vc)
    br = Wh @ sys.b
    Qr = Vc.conj().T @ (sys.Q @ Vc)
    warn = []
    rc = dense_rcond(Er)
    if rc < RCOND_TOL:
        warn.append(f"reduced E is numerically singular (rcond {rc:.2e})")
        logger.warning("%s: %s", method or "reduce", warn[-1])
    return ReducedModel(
        np.asarray(Er), np.asarray(Ar), np.asarray(br), np.asarray(Qr),
        V=V, W=V if W is None else W, method=method, warnings=warn, info=dict(info or {}),
    )


def eval_reduced_tf(rom: ReducedModel, omega: float) -> complex:
    """``b_r^H (i omega E_r - A_r)^{-H} Q_r (i omega E_r - A_r)^{-1} b_r``."""
    solver = transfer.ShiftedSolver(rom.E, rom.A, 1j * omega)
    x = solver.solve(rom.b)
    return complex(np.vdot(x, rom.Q @ x))


def eval_reduced_tf_deriv_imag(rom: ReducedModel, omega: float) -> complex:
    """Imaginary-axis derivative of the reduced transfer function."""
    return transfer.eval_qo_tf_deriv_imag(rom, omega)


def eval_reduced_bivariate_tf(rom: ReducedModel, s1, s2) -> complex:
    return transfer.eval_bivariate_tf(rom, s1, s2)


def reduced_poles(rom: ReducedModel) -> np.ndarray:
    """Finite eigenvalues of ``lambda E_r - A_r``, sorted by real then imaginary part."""
    lam = spla.eigvals(rom.A, rom.E)
    finite = np.isfinite(lam)
    if not finite.all():
        logger.warning("%d infinite eigenvalue(s) of the reduced pencil discarded", int((~finite).sum()))
    lam = lam[finite]
    return lam[np.lexsort((lam.imag, lam.real))]
