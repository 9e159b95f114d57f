"""Interpolatory reduction methods for quadratic-output systems.

Five methods are provided:

* ``greedy-v`` / ``greedy-vw``: greedy point selection from a presampled
  basis with Galerkin / Petrov-Galerkin projection,
* ``avg-v`` / ``avg-vw``: truncation of the presampled basis by
  column-pivoted QR, Galerkin / Petrov-Galerkin,
* ``irka``: the fixed-point iteration of quadratic-output IRKA applied to
  the frequency-domain matrices.

If ``(zE - A)^{-1} b`` lies in ``span(V)`` the reduced transfer function
matches the full one at ``z`` on the imaginary axis; if in addition
``(zE - A)^{-H} Q (zE - A)^{-1} b`` lies in ``span(W)`` the derivatives
along the imaginary axis match as well.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as spla
from scipy.optimize import linear_sum_assignment

from rmsmor.projection import DEFLATION_TOL, BasisMatrix, ReducedModel, normalize, reduce
from rmsmor.transfer import (
    PencilError,
    ShiftedSolver,
    _checked_solve,
    _map,
    eval_qo_tf_deriv_imag,
    eval_qo_tf_imag,
    shifted_solver,
)

logger = logging.getLogger(__name__)

METHODS = ("irka", "greedy-v", "greedy-vw", "avg-v", "avg-vw")


def default_presample_omegas(count: int = 250, low: float = 1.0, high: float = 2 * np.pi * 251) -> np.ndarray:
    """Equidistant angular frequencies for the presampled basis (rad/s)."""
    return np.linspace(low, high, count)


@dataclass
class SampleBasis:
    """Solution vectors presampled at ``z_j = i omega_j``.

    Column ``j`` of ``v_columns`` is ``(z_j E - A)^{-1} b``; column ``j`` of
    ``w_columns`` (if present) is ``(z_j E - A)^{-H} Q (z_j E - A)^{-1} b``;
    ``tf_samples[j]`` is ``H(z_j)``.
    """

    omegas: np.ndarray
    v_columns: np.ndarray
    w_columns: np.ndarray | None
    tf_samples: np.ndarray
    dropped: list = field(default_factory=list)

    @property
    def points(self) -> np.ndarray:
        return 1j * self.omegas

    @property
    def m(self) -> int:
        return self.omegas.size


@dataclass
class GreedyTrace:
    selected: list = field(default_factory=list)
    omegas: list = field(default_factory=list)
    max_errors: list = field(default_factory=list)
    seconds: list = field(default_factory=list)


@dataclass
class IrkaState:
    poles: np.ndarray
    q_hat: np.ndarray
    shifts: np.ndarray
    iterations: int = 0
    history: list = field(default_factory=list)
    converged: bool = False
    warnings: list = field(default_factory=list)


def presample(sys, omegas, with_w: bool = True, workers: int = 1, cache: dict | None = None) -> SampleBasis:
    """Solve for the interpolation vectors at every ``i omega``.

    Points where the pencil is singular are dropped with a warning.
    """
    omegas = np.asarray(omegas, dtype=float).reshape(-1)
    if omegas.size == 0:
        raise ValueError("no presample points")
    if np.unique(omegas).size != omegas.size:
        raise ValueError("presample points must be distinct")

    def point(om):
        try:
            solver = shifted_solver(sys, 1j * om, cache)
            v = _checked_solve(solver, sys.b)
            Qv = sys.Q @ v
            if with_w:
                w = _checked_solve(solver, Qv, "H")
                return v, w, complex(np.vdot(sys.b, w)), None
            return v, None, complex(np.vdot(v, Qv)), None
        except PencilError as exc:
            return None, None, None, str(exc)

    out = _map(point, omegas, workers)
    keep = [k for k, o in enumerate(out) if o[3] is None]
    dropped = [(float(omegas[k]), out[k][3]) for k in range(omegas.size) if out[k][3] is not None]
    for om, msg in dropped:
        logger.warning("presample point omega=%g dropped: %s", om, msg)
    if not keep:
        raise PencilError(1j * omegas[0], "every presample point is singular")
    V = np.column_stack([out[k][0] for k in keep])
    W = np.column_stack([out[k][1] for k in keep]) if with_w else None
    H = np.array([out[k][2] for k in keep])
    return SampleBasis(omegas[keep], V, W, H, dropped)


def _same_order(V: BasisMatrix, W: BasisMatrix | None, label: str, warn: list):
    if W is None or V.r == W.r:
        return V, W
    k = min(V.r, W.r)
    msg = f"{label}: bases deflated to different ranks ({V.r}, {W.r}); truncated to {k}"
    logger.warning(msg)
    warn.append(msg)
    return BasisMatrix(V.columns[:, :k], V.tags[:k]), BasisMatrix(W.columns[:, :k], W.tags[:k])


def greedy_select(sys, basis: SampleBasis, r: int, petrov: bool = False,
                  tol: float = DEFLATION_TOL) -> tuple[ReducedModel, GreedyTrace]:
    """Greedy interpolation point selection on the presampled grid.

    The first point maximizes ``|H|``; every further point maximizes the
    absolute error ``|H - H_r|`` of the current reduced model over the
    unselected points.  Full-order values come from ``basis.tf_samples``.
    """
    method = "greedy-vw" if petrov else "greedy-v"
    if r < 1 or r > basis.m:
        raise ValueError(f"order {r} not in [1, {basis.m}] available points")
    if petrov and basis.w_columns is None:
        raise ValueError("Petrov-Galerkin greedy needs a basis presampled with_w=True")
    H = basis.tf_samples
    mag = np.abs(H)
    if not np.any(mag > 0):
        raise ValueError("transfer function vanishes on the whole grid")
    selected = [int(np.argmax(mag))]
    trace = GreedyTrace()
    warn: list = []
    while True:
        t0 = time.perf_counter()
        tags = [float(basis.omegas[j]) for j in selected]
        V = normalize(basis.v_columns[:, selected], tol, tags)
        W = normalize(basis.w_columns[:, selected], tol, tags) if petrov else None
        V, W = _same_order(V, W, method, warn)
        rom = reduce(sys, V, W, method=method)
        err = np.abs(H - rom.tf_imag(basis.omegas))
        err[~np.isfinite(err)] = np.inf
        trace.selected.append(selected[-1])
        trace.omegas.append(float(basis.omegas[selected[-1]]))
        trace.max_errors.append(float(err.max()))
        trace.seconds.append(time.perf_counter() - t0)
        logger.debug("%s step %d: omega=%g max error %.3e", method, len(selected), trace.omegas[-1], err.max())
        if len(selected) == r:
            break
        err[selected] = -1.0
        selected.append(int(np.argmax(err)))
    rom.warnings.extend(warn)
    rom.info.update(selected=list(selected), selected_omegas=trace.omegas[:])
    return rom, trace


def averaged_basis(sys, basis: SampleBasis, r: int, petrov: bool = False,
                   tol: float = DEFLATION_TOL) -> ReducedModel:
    """Truncate the presampled basis with column-pivoted QR and project.

    ``V`` is the orthonormal factor belonging to the first ``r`` pivot
    columns of ``v_columns``; for ``petrov`` ``W`` is obtained the same way
    from ``w_columns``.  If the numerical rank is below ``r`` the achievable
    rank is used and a warning recorded.
    """
    method = "avg-vw" if petrov else "avg-v"
    if r < 1:
        raise ValueError("order must be positive")
    if petrov and basis.w_columns is None:
        raise ValueError("Petrov-Galerkin averaging needs a basis presampled with_w=True")
    warn: list = []

    def truncated(X, label):
        Qf, R, piv = spla.qr(X, mode="economic", pivoting=True)
        d = np.abs(np.diag(R))
        rank = int(np.sum(d > tol * d[0])) if d.size and d[0] > 0 else 0
        k = min(r, rank)
        if k < r:
            msg = f"{method}: {label} basis has numerical rank {rank} < {r}"
            logger.warning(msg)
            warn.append(msg)
        if k == 0:
            raise ValueError(f"{label} presampled basis is numerically zero")
        return BasisMatrix(Qf[:, :k], tuple(float(basis.omegas[j]) for j in piv[:k]))

    V = truncated(basis.v_columns, "V")
    W = truncated(basis.w_columns, "W") if petrov else None
    V, W = _same_order(V, W, method, warn)
    rom = reduce(sys, V, W, method=method)
    rom.warnings.extend(warn)
    rom.info.update(pivot_omegas=list(V.tags))
    return rom


# quadratic-output IRKA ------------------------------------------------------


def default_irka_poles(r: int, band=(2 * np.pi * 1, 2 * np.pi * 250), damping: float = 1.0) -> np.ndarray:
    """Initial poles ``-damping +/- i omega`` with ``omega`` log-spaced over ``band``.

    Conjugate pairs keep the iteration real; for odd ``r`` one real pole
    ``-damping`` is added.
    """
    npairs = r // 2
    om = np.geomspace(band[0], band[1], npairs) if npairs else np.empty(0)
    poles = [complex(-damping, w) for w in om] + [complex(-damping, -w) for w in om]
    if r % 2:
        poles.append(complex(-damping, 0.0))
    return np.asarray(poles, dtype=complex)


def krylov_irka_poles(sys, r: int, shift: float = 0.0) -> np.ndarray:
    """Initial poles from a Galerkin projection onto a Krylov space at ``shift``.

    The space is spanned by ``x_0 = (shift E - A)^{-1} b`` and
    ``x_{k+1} = (shift E - A)^{-1} E x_k``, orthonormalized Arnoldi-style;
    poles of the projected pencil in
    the right half-plane are reflected.  If the space deflates below ``r``
    the missing poles are taken from :func:`default_irka_poles`.
    """
    solver = ShiftedSolver(sys.E, sys.A, shift)
    x = _checked_solve(solver, sys.b).real
    Q = np.empty((sys.n, 0))
    for _ in range(r):
        for _ in range(2):
            x = x - Q @ (Q.T @ x)
        nrm = np.linalg.norm(x)
        if nrm == 0 or (Q.shape[1] and nrm < DEFLATION_TOL):
            break
        Q = np.column_stack([Q, x / nrm])
        x = _checked_solve(solver, sys.E @ Q[:, -1]).real
    V = BasisMatrix(Q, tuple(range(Q.shape[1])))
    rom = reduce(sys, V, method="krylov-init")
    lam = spla.eigvals(rom.A, rom.E)
    lam = lam[np.isfinite(lam)]
    lam, _ = _reflect(lam)
    lam = np.where(lam.real == 0, lam - 1e-8 * np.maximum(np.abs(lam), 1.0), lam)
    if lam.size < r or np.unique(lam).size < lam.size or _conjugate_partners(lam) is None:
        logger.warning("Krylov initialization incomplete; falling back to band-based poles")
        return default_irka_poles(r)
    return lam


def _conjugate_partners(lam: np.ndarray, rtol: float = 1e-8):
    """Index of the conjugate partner of every pole (itself for real poles)."""
    scale = np.maximum(np.abs(lam), 1.0)
    real = np.abs(lam.imag) <= rtol * scale
    partner = np.full(lam.size, -1)
    for i in range(lam.size):
        if real[i]:
            partner[i] = i
        elif partner[i] < 0:
            cand = [j for j in range(lam.size) if j != i and partner[j] < 0 and not real[j]]
            if not cand:
                return None
            j = min(cand, key=lambda j: abs(lam[j] - np.conj(lam[i])))
            if abs(lam[j] - np.conj(lam[i])) > rtol * scale[i]:
                return None
            partner[i], partner[j] = j, i
    return partner


def _sort_key(lam):
    return np.lexsort((lam.imag, lam.real))


def _pole_residue_form(rom: ReducedModel):
    """Poles and output residues ``phi`` of the reduced kernel.

    Eigenvectors ``X`` of ``(A_r, E_r)`` are scaled so that the transformed
    input ``X^{-1} E_r^{-1} b_r`` is all ones; then
    ``H_t,r(s1, s2) = sum_ik phi_ik / ((s1 - lam_i)(s2 - lam_k))`` with
    ``phi = X^T Q_r X``.
    """
    lam, X = spla.eig(rom.A, rom.E)
    order = _sort_key(lam)
    lam, X = lam[order], X[:, order]
    bt = np.linalg.solve(rom.E @ X, rom.b.astype(complex))
    scale = np.where(np.abs(bt) > 0, bt, 1.0)
    X = X * scale[None, :]
    phi = X.T @ rom.Q @ X
    return lam, phi


def _unit_columns(X):
    nrm = np.linalg.norm(X, axis=0)
    return X / np.where(nrm > 0, nrm, 1.0)


def _irka_step(sys, lam, phi, tol, warn):
    """Primitive bases for the shifts ``-lam`` and the projected real model."""
    partner = _conjugate_partners(lam)
    if partner is None:
        raise ValueError("IRKA poles are not closed under conjugation")
    r = lam.size
    X = np.empty((sys.n, r), dtype=complex)
    solvers = {}
    shifts = -lam.copy()
    for i in range(r):
        j = partner[i]
        if j < i:
            X[:, i] = X[:, j].conj()
            continue
        sigma = shifts[i]
        try:
            solver = ShiftedSolver(sys.E, sys.A, sigma)
        except PencilError:
            sigma = sigma + 1e-8 * max(abs(lam[i]), 1.0)
            msg = f"shift {shifts[i]:.6g} hits the spectrum; perturbed to {sigma:.6g}"
            logger.warning(msg)
            warn.append(msg)
            solver = ShiftedSolver(sys.E, sys.A, sigma)
            shifts[i], shifts[j] = sigma, np.conj(sigma)
        solvers[i] = solver
        X[:, i] = _checked_solve(solver, sys.b)
    QX = sys.Q @ X
    Wp = np.empty_like(X)
    for i in range(r):
        j = partner[i]
        if j < i:
            Wp[:, i] = Wp[:, j].conj()
            continue
        Wp[:, i] = _checked_solve(solvers[i], QX @ phi[i], "T")
    reps = [i for i in range(r) if partner[i] >= i]
    cols_v, cols_w = [], []
    for i in reps:
        cols_v.append(X[:, i].real)
        cols_w.append(Wp[:, i].real)
        if partner[i] != i:
            cols_v.append(X[:, i].imag)
            cols_w.append(Wp[:, i].imag)
    # unit columns: far-out shifts give tiny but independent directions
    V = normalize(_unit_columns(np.column_stack(cols_v)), tol)
    W = normalize(_unit_columns(np.column_stack(cols_w)), tol)
    V, W = _same_order(V, W, "irka", warn)
    return reduce(sys, V, W, method="irka"), shifts


def _pole_change(new, old) -> float:
    if new.size != old.size:
        return np.inf
    cost = np.abs(new[:, None] - old[None, :])
    rows, cols = linear_sum_assignment(cost)
    return float(np.max(np.abs(new[rows] - old[cols]) / np.maximum(np.abs(old[cols]), np.finfo(float).tiny)))


def _reflect(lam):
    unstable = lam.real > 0
    if unstable.any():
        lam = np.where(unstable, -lam.real + 1j * lam.imag, lam)
    return lam, int(unstable.sum())


def lqo_irka(sys, r: int, init_poles=None, tol: float = 1e-6, max_iter: int = 100,
             basis_tol: float = DEFLATION_TOL, init_q_hat=None) -> tuple[ReducedModel, IrkaState]:
    """Quadratic-output IRKA applied to the frequency-domain matrices.

    Each step interpolates at the mirror images ``sigma_i = -lambda_i`` of
    the current reduced poles::

        V_i = (sigma_i E - A)^{-1} b
        W_i = (sigma_i E - A)^{-T} Q sum_k phi_ik (sigma_k E - A)^{-1} b

    where ``phi`` holds the reduced output residues (see
    :func:`_pole_residue_form`).  For the first step ``phi`` is
    ``init_q_hat`` (ordered like the sorted ``init_poles``; e.g. the
    ``q_hat`` of a previous :class:`IrkaState`) or the identity.  ``init_poles`` is an array of poles, ``"krylov"`` (default,
    see :func:`krylov_irka_poles`) or ``"band"`` (see
    :func:`default_irka_poles`).  The iteration stops when the relative pole change drops
    below ``tol``; otherwise the last iterate is returned with
    ``converged=False``.

    The system data must be real and the initial poles closed under
    conjugation; the bases are then real and the reduced model is real.
    """
    if not sys.is_real:
        raise ValueError("lqo_irka requires real system matrices")
    if r < 1 or r > sys.n:
        raise ValueError(f"order {r} not in [1, {sys.n}]")
    if init_poles is None:
        lam = krylov_irka_poles(sys, r)
    elif isinstance(init_poles, str):
        if init_poles not in ("krylov", "band"):
            raise ValueError(f"unknown initialization {init_poles!r}")
        lam = krylov_irka_poles(sys, r) if init_poles == "krylov" else default_irka_poles(r)
    else:
        lam = np.asarray(init_poles, dtype=complex).reshape(-1)
    if lam.size != r:
        raise ValueError(f"{lam.size} initial poles given for order {r}")
    if np.unique(lam).size != r:
        raise ValueError("initial poles must be distinct")
    if np.any(lam.real >= 0):
        raise ValueError("initial poles must lie in the open left half-plane")
    order = _sort_key(lam)
    lam = lam[order]
    if init_q_hat is None:
        phi = np.eye(r, dtype=complex)
    else:
        phi = np.asarray(init_q_hat, dtype=complex)
        if phi.shape != (r, r):
            raise ValueError(f"init_q_hat has shape {phi.shape}, expected {(r, r)}")
        phi = phi[np.ix_(order, order)]
    state = IrkaState(poles=lam, q_hat=phi, shifts=-lam)
    rom = None
    for it in range(1, max_iter + 1):
        rom, shifts = _irka_step(sys, lam, phi, basis_tol, state.warnings)
        try:
            new_lam, new_phi = _pole_residue_form(rom)
        except np.linalg.LinAlgError:
            new_lam = np.full(lam.size, np.nan + 0j)
        if new_lam.size != r or not (np.all(np.isfinite(new_lam)) and np.all(np.isfinite(new_phi))):
            msg = f"iteration {it}: reduced pencil has no finite pole-residue form; stopping"
            logger.warning(msg)
            state.warnings.append(msg)
            state.iterations = it
            state.shifts = shifts
            break
        new_lam, flipped = _reflect(new_lam)
        if flipped:
            msg = f"iteration {it}: {flipped} unstable pole(s) reflected"
            logger.warning(msg)
            state.warnings.append(msg)
        change = _pole_change(new_lam, lam)
        state.history.append(change)
        state.iterations = it
        state.shifts = shifts
        lam, phi = new_lam, new_phi
        logger.debug("irka iteration %d: pole change %.3e", it, change)
        if change < tol:
            state.converged = True
            break
    if not state.converged:
        msg = f"IRKA did not converge after {state.iterations} iterations (last change {state.history[-1] if state.history else np.nan:.3e})"
        logger.warning(msg)
        state.warnings.append(msg)
    state.poles, state.q_hat = lam, phi
    rom.warnings.extend(state.warnings)
    rom.info.update(iterations=state.iterations, converged=state.converged)
    return rom, state


# Theorem-style interpolation report -----------------------------------------


@dataclass
class Theorem1Report:
    """Value and derivative mismatch of full and reduced model at ``i omega``."""

    omegas: np.ndarray
    H: np.ndarray
    Hr: np.ndarray
    dH: np.ndarray
    dHr: np.ndarray

    @property
    def value_err(self) -> np.ndarray:
        """``|H - H_r| / max(1, |H|)``."""
        return np.abs(self.H - self.Hr) / np.maximum(1.0, np.abs(self.H))

    @property
    def value_relerr(self) -> np.ndarray:
        """``|H - H_r| / |H|``."""
        return np.abs(self.H - self.Hr) / np.abs(self.H)

    @property
    def deriv_err(self) -> np.ndarray:
        """``|dH - dH_r| / max(1, |dH|)``."""
        return np.abs(self.dH - self.dHr) / np.maximum(1.0, np.abs(self.dH))

    def rows(self):
        for k in range(self.omegas.size):
            yield {
                "omega": float(self.omegas[k]),
                "value_err": float(self.value_err[k]),
                "deriv_err": float(self.deriv_err[k]),
            }


def check_theorem1(sys, rom: ReducedModel, points) -> Theorem1Report:
    """Compare values and imaginary-axis derivatives at ``i omega`` for ``omega`` in ``points``.

    Report only: points where either pencil is singular yield NaN.
    """
    omegas = np.atleast_1d(np.asarray(points, dtype=float))
    vals = np.full((4, omegas.size), np.nan + 0j)
    for k, om in enumerate(omegas):
        try:
            vals[:, k] = (
                eval_qo_tf_imag(sys, om),
                eval_qo_tf_imag(rom, om),
                eval_qo_tf_deriv_imag(sys, om),
                eval_qo_tf_deriv_imag(rom, om),
            )
        except PencilError as exc:
            logger.warning("check at omega=%g skipped: %s", om, exc)
    return Theorem1Report(omegas, *vals)
