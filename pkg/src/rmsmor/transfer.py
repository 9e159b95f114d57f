"""Transfer-function evaluation and frequency sweeps.

All evaluations go through :class:`ShiftedSolver`, which holds one LU
factorization of ``sE - A`` and solves with it, its transpose and its
conjugate transpose.
"""

from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as spla
import scipy.sparse as sps
import scipy.sparse.linalg as spsla

from rmsmor._linalg import RCOND_TOL, lu_factor_quiet, lu_rcond

logger = logging.getLogger(__name__)

#: normwise backward error accepted for a shifted solve
BACKWARD_ERROR_TOL = 1e-10


class PencilError(np.linalg.LinAlgError):
    """``sE - A`` is singular or numerically singular at ``shift``."""

    def __init__(self, shift, reason: str):
        self.shift = complex(shift)
        self.reason = reason
        super().__init__(f"pencil sE - A is singular at s = {self.shift:.16g}: {reason}")


class ShiftedSolver:
    """LU factorization of ``sE - A`` for one complex shift ``s``.

    Dense matrices use LAPACK ``getrf``/``gecon``, sparse ones SuperLU with
    a Hager-Higham estimate of the 1-norm of the inverse.  Raises
    :class:`PencilError` when the factorization fails or the reciprocal
    condition estimate is below ``rcond_tol``.
    """

    def __init__(self, E, A, shift, rcond_tol: float = RCOND_TOL, estimate_condition: bool = True):
        self.shift = complex(shift)
        K = self.shift * E - A
        self.sparse = sps.issparse(K)
        self.n = K.shape[0]
        if self.sparse:
            K = sps.csc_matrix(K, dtype=complex)
            try:
                self._lu = spsla.splu(K)
            except RuntimeError as exc:
                raise PencilError(shift, str(exc)) from None
        else:
            K = np.asarray(K, dtype=complex)
            self._lu = lu_factor_quiet(K)
        self.K = K
        self._norms = None
        self.rcond = self._estimate_rcond() if estimate_condition else np.nan
        if self.rcond < rcond_tol:
            raise PencilError(shift, f"reciprocal condition estimate {self.rcond:.3e}")

    def _estimate_rcond(self) -> float:
        if not self.sparse:
            return lu_rcond(self._lu[0], float(np.linalg.norm(self.K, 1)))
        knorm = spsla.norm(self.K, 1)
        if knorm == 0:
            return 0.0
        op = spsla.LinearOperator(
            (self.n, self.n),
            matvec=lambda x: self._lu.solve(np.asarray(x, dtype=complex).reshape(-1)),
            rmatvec=lambda x: self._lu.solve(np.asarray(x, dtype=complex).reshape(-1), trans="H"),
            dtype=complex,
        )
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            inv_norm = spsla.onenormest(op)
        if not np.isfinite(inv_norm) or inv_norm == 0:
            return 0.0
        return float(1.0 / (knorm * inv_norm))

    def _solve(self, rhs, trans: str) -> np.ndarray:
        rhs = np.asarray(rhs, dtype=complex)
        if self.sparse:
            return self._lu.solve(rhs, trans=trans)
        return spla.lu_solve(self._lu, rhs, trans={"N": 0, "T": 1, "H": 2}[trans], check_finite=False)

    def solve(self, rhs) -> np.ndarray:
        """``(sE - A)^{-1} rhs``."""
        return self._solve(rhs, "N")

    def solve_t(self, rhs) -> np.ndarray:
        """``(sE - A)^{-T} rhs``."""
        return self._solve(rhs, "T")

    def solve_h(self, rhs) -> np.ndarray:
        """``(sE - A)^{-H} rhs``."""
        return self._solve(rhs, "H")

    def backward_error(self, x, rhs, trans: str = "N") -> float:
        """Normwise backward error ``||op(K) x - rhs|| / (||op(K)|| ||x|| + ||rhs||)``, 1-norms."""
        if self._norms is None:
            if self.sparse:
                self._norms = (spsla.norm(self.K, 1), spsla.norm(self.K, np.inf))
            else:
                self._norms = (np.linalg.norm(self.K, 1), np.linalg.norm(self.K, np.inf))
        K = {"N": self.K, "T": self.K.T, "H": self.K.conj().T}[trans]
        knorm = self._norms[0] if trans == "N" else self._norms[1]
        den = knorm * np.linalg.norm(x, 1) + np.linalg.norm(rhs, 1)
        return float(np.linalg.norm(K @ x - rhs, 1) / (den if den > 0 else 1.0))


def shifted_solver(sys, s, cache: dict | None = None) -> ShiftedSolver:
    """Solver for ``sE - A``, reused from ``cache`` (keyed by shift) when given."""
    s = complex(s)
    if cache is not None and s in cache:
        return cache[s]
    solver = ShiftedSolver(sys.E, sys.A, s)
    if cache is not None:
        cache[s] = solver
    return solver


def _checked_solve(solver: ShiftedSolver, rhs, trans: str = "N") -> np.ndarray:
    x = solver._solve(rhs, trans)
    err = solver.backward_error(x, np.asarray(rhs, dtype=complex), trans)
    if not np.isfinite(err) or err > BACKWARD_ERROR_TOL:
        raise PencilError(solver.shift, f"solve backward error {err:.3e}")
    return x


def solve_state(sys, s, cache: dict | None = None) -> np.ndarray:
    """State ``x(s) = (sE - A)^{-1} b``."""
    return _checked_solve(shifted_solver(sys, s, cache), sys.b)


def _qo_pieces(sys, z, cache=None):
    """``v = K(z)^{-1} b`` and ``w = K(z)^{-H} Q v`` for ``K(z) = zE - A``."""
    solver = shifted_solver(sys, z, cache)
    v = _checked_solve(solver, sys.b)
    w = _checked_solve(solver, sys.Q @ v, "H")
    return v, w


def eval_qo_tf(sys, s) -> complex:
    """Quadratic-output transfer function ``b^H (sE-A)^{-H} Q (sE-A)^{-1} b``."""
    x = solve_state(sys, s)
    return complex(np.vdot(x, sys.Q @ x))


def eval_qo_tf_imag(sys, omega: float) -> complex:
    """Transfer function at ``z = i omega`` via ``b^H (-z E^H - A^H)^{-1} Q (zE - A)^{-1} b``."""
    _, w = _qo_pieces(sys, 1j * omega)
    return complex(np.vdot(sys.b, w))


def eval_qo_tf_deriv_imag(sys, omega: float) -> complex:
    """Derivative ``dH/dz`` along the imaginary axis at ``z = i omega``.

    Uses ``dH/dz = v^H E^H w - w^H E v`` with ``v = K(z)^{-1} b`` and
    ``w = K(z)^{-H} Q K(z)^{-1} b``.  ``H`` is not analytic; this is the
    derivative of ``omega -> H(i omega)`` divided by ``i``.
    """
    v, w = _qo_pieces(sys, 1j * omega)
    Ev = sys.E @ v
    return complex(np.vdot(Ev, w) - np.vdot(w, Ev))


def eval_linear_tf(sys, s) -> np.ndarray:
    """Linear transfer function ``C (sE - A)^{-1} b``."""
    x = solve_state(sys, s)
    return np.asarray(sys.C @ x).reshape(-1)


def eval_bivariate_tf(sys, s1, s2) -> complex:
    """Bivariate kernel ``b^T (s1 E - A)^{-T} Q (s2 E - A)^{-1} b``.

    Transposes only, no conjugation, for complex data as well.
    """
    x1 = solve_state(sys, s1)
    x2 = x1 if complex(s1) == complex(s2) else solve_state(sys, s2)
    return complex(x1 @ (sys.Q @ x2))


@dataclass
class SweepResult:
    """Transfer-function values on a frequency grid in Hz.

    ``values[k]`` is ``H(2 pi i grid[k])``; entries that could not be
    evaluated are NaN and listed in ``failures``.  ``reduced_values`` holds
    one column per reduced model, keyed by label.
    """

    grid: np.ndarray
    values: np.ndarray
    reduced_values: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float).reshape(-1)
        self.values = np.asarray(self.values, dtype=complex).reshape(-1)
        if self.values.shape != self.grid.shape:
            raise ValueError("values and grid differ in length")
        if self.grid.size > 1 and np.any(np.diff(self.grid) <= 0):
            raise ValueError("grid must be strictly increasing")

    def reduced(self, label: str) -> "SweepResult":
        """The reduced-model column ``label`` as its own sweep."""
        return SweepResult(self.grid, self.reduced_values[label], metadata={"label": label})


def _check_grid(grid) -> np.ndarray:
    grid = np.asarray(grid, dtype=float).reshape(-1)
    if grid.size == 0:
        raise ValueError("empty frequency grid")
    if np.any(np.diff(grid) <= 0):
        raise ValueError("frequency grid must be strictly increasing")
    return grid


def _map(fn, items, workers: int):
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def sweep(sys, grid, roms: dict | None = None, workers: int = 1) -> SweepResult:
    """Evaluate ``H(2 pi i f)`` for every frequency ``f`` (Hz) of ``grid``.

    One factorization per point; a singular point is recorded as NaN with
    a diagnostic and the sweep continues.  ``roms`` maps labels to reduced
    models whose values are stored alongside.
    """
    grid = _check_grid(grid)
    t0 = time.perf_counter()

    def point(f):
        try:
            return eval_qo_tf_imag(sys, 2 * np.pi * f), None
        except PencilError as exc:
            return np.nan + 0j, str(exc)

    out = _map(point, grid, workers)
    values = np.array([v for v, _ in out], dtype=complex)
    failures = [(k, float(grid[k]), msg) for k, (_, msg) in enumerate(out) if msg is not None]
    for k, f, msg in failures:
        logger.warning("sweep point %d (%g Hz) skipped: %s", k, f, msg)
    result = SweepResult(
        grid,
        values,
        metadata={"system": getattr(sys, "name", ""), "seconds": time.perf_counter() - t0},
        failures=failures,
    )
    for label, rom in (roms or {}).items():
        result.reduced_values[label] = rom.tf_imag(2 * np.pi * grid)
    return result
