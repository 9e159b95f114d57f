"""Error measures between full and reduced frequency responses."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

logger = logging.getLogger(__name__)


def _pair(full, reduced):
    gf = getattr(full, "grid", None)
    gr = getattr(reduced, "grid", None)
    if gf is not None and gr is not None and not np.array_equal(gf, gr):
        raise ValueError("full and reduced sweeps use different grids")
    h = np.asarray(getattr(full, "values", full), dtype=complex).reshape(-1)
    hr = np.asarray(getattr(reduced, "values", reduced), dtype=complex).reshape(-1)
    if h.shape != hr.shape:
        raise ValueError(f"value arrays differ in length: {h.size} vs {hr.size}")
    return h, hr


def pointwise_relerr(full, reduced) -> np.ndarray:
    """``|H - H_r| / |H|`` per grid point.

    Where ``|H| = 0`` the absolute error is returned instead (see
    :func:`error_report` for the flag).
    """
    h, hr = _pair(full, reduced)
    err = np.abs(h - hr)
    mag = np.abs(h)
    zero = mag == 0
    if zero.any():
        logger.warning("%d grid point(s) with H = 0 reported as absolute error", int(zero.sum()))
    return np.where(zero, err, err / np.where(zero, 1.0, mag))


def h2_relerr(full, reduced) -> float:
    """Approximate relative H2 error ``sum|H - H_r| / sum|H|`` over the grid.

    This sums magnitudes, not squares; it is a grid-based proxy and not the
    H2 norm of the error system.
    """
    h, hr = _pair(full, reduced)
    den = np.sum(np.abs(h))
    if den == 0:
        raise ZeroDivisionError("sum of |H| over the grid is zero")
    return float(np.sum(np.abs(h - hr)) / den)


def hinf_relerr(full, reduced) -> float:
    """Approximate relative H-infinity error ``max|H - H_r| / max|H|`` over the grid."""
    h, hr = _pair(full, reduced)
    den = np.max(np.abs(h))
    if den == 0:
        raise ZeroDivisionError("max of |H| over the grid is zero")
    return float(np.max(np.abs(h - hr)) / den)


@dataclass
class ErrorReport:
    grid: np.ndarray
    pointwise_relerr: np.ndarray
    h2_relerr: float
    hinf_relerr: float
    absolute_points: np.ndarray = None
    metadata: dict = field(default_factory=dict)


def error_report(full, reduced, **metadata) -> ErrorReport:
    h, _ = _pair(full, reduced)
    grid = getattr(full, "grid", np.arange(h.size, dtype=float))
    return ErrorReport(
        grid=np.asarray(grid),
        pointwise_relerr=pointwise_relerr(full, reduced),
        h2_relerr=h2_relerr(full, reduced),
        hinf_relerr=hinf_relerr(full, reduced),
        absolute_points=np.abs(h) == 0,
        metadata=metadata,
    )
