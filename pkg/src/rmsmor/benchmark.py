"""Synthetic structural benchmark: a fixed-fixed spring-mass chain with absorbers.

The chain stands in for the large plate model with tuned vibration
absorbers.  Damping is proportional, ``D = alpha M + beta K`` on the chain,
plus the discrete dampers of the absorbers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sps

from rmsmor.system import SecondOrderSystem

TVA_FREQUENCY_HZ = 48.0


@dataclass(frozen=True)
class Absorber:
    """Mass-spring-damper attached to chain node ``index``."""

    index: int
    mass: float
    stiffness: float
    damping: float

    @property
    def frequency_hz(self) -> float:
        return float(np.sqrt(self.stiffness / self.mass) / (2 * np.pi))


def tuned_absorber(index: int, mass: float, frequency_hz: float = TVA_FREQUENCY_HZ,
                   damping_ratio: float = 0.05) -> Absorber:
    w = 2 * np.pi * frequency_hz
    return Absorber(index, mass, mass * w * w, 2 * damping_ratio * mass * w)


@dataclass(frozen=True)
class BenchmarkSpec:
    """Parameters of the chain benchmark.

    ``mass`` holds ``n_chain`` values and ``stiffness`` the ``n_chain + 1``
    springs (both ends fixed); scalars are broadcast.  ``jitter`` perturbs
    both profiles by a relative uniform amount drawn from ``seed``.
    ``observed`` defaults to every chain node, ``weights`` to
    ``1/sqrt(len(observed))`` so that the output is a mean square.
    """

    n_chain: int = 500
    mass: object = 1e-4
    stiffness: object = 1e4
    alpha: float = 0.01
    beta: float = 1e-4
    absorbers: tuple = ()
    load_index: int | None = None
    observed: tuple | None = None
    weights: tuple | None = None
    jitter: float = 0.0
    seed: int = 0
    name: str = field(default="chain")

    def __post_init__(self):
        if self.n_chain < 1:
            raise ValueError("chain needs at least one mass")
        if self.alpha < 0 or self.beta < 0:
            raise ValueError("Rayleigh coefficients must be nonnegative")
        n = self.n_chain
        for a in self.absorbers:
            if not 0 <= a.index < n:
                raise ValueError(f"absorber index {a.index} outside chain of {n}")
            if a.mass <= 0 or a.stiffness < 0 or a.damping < 0:
                raise ValueError(f"invalid absorber parameters {a}")
        if self.load_index is not None and not 0 <= self.load_index < n + len(self.absorbers):
            raise ValueError(f"load index {self.load_index} out of range")
        if self.observed is not None:
            obs = np.asarray(self.observed)
            if obs.size == 0 or obs.min() < 0 or obs.max() >= n + len(self.absorbers):
                raise ValueError("observed indices out of range")
            if self.weights is not None and len(self.weights) != obs.size:
                raise ValueError("one weight per observed index required")

    @property
    def n_so(self) -> int:
        return self.n_chain + len(self.absorbers)


def default_spec(n_chain: int = 500, n_absorbers: int = 3, tuned_mode: int = 7, **kw) -> BenchmarkSpec:
    """Chain with ``n_absorbers`` absorbers tuned to 48 Hz.

    Unless ``stiffness`` is given, mode ``tuned_mode`` of the uniform chain
    is placed at 48 Hz, which puts about ``5 * tuned_mode`` modes below
    250 Hz.  The absorbers sit at antinodes of that mode (the one nearest
    mid-chain first) and each carries 2% of the chain mass.
    """
    if tuned_mode < 1 or tuned_mode > n_chain:
        raise ValueError(f"tuned_mode must lie in [1, {n_chain}]")
    mass = kw.pop("mass", 1e-4)
    if "stiffness" not in kw:
        # uniform fixed-fixed chain: omega_j = 2 sqrt(k/m) sin(j pi / (2 (n+1)))
        s = np.sin(tuned_mode * np.pi / (2 * (n_chain + 1)))
        kw["stiffness"] = mass * (np.pi * TVA_FREQUENCY_HZ / s) ** 2
    # antinodes (2k+1)/(2j) of the tuned mode, nearest to mid-chain first
    antinodes = (2 * np.arange(tuned_mode) + 1) / (2 * tuned_mode)
    antinodes = antinodes[np.argsort(np.abs(antinodes - 0.5), kind="stable")]
    positions = [int(round(x * (n_chain + 1))) - 1 for x in antinodes[:n_absorbers]]
    positions = [min(max(p, 0), n_chain - 1) for p in positions]
    if len(positions) < n_absorbers:
        raise ValueError(f"mode {tuned_mode} has fewer than {n_absorbers} antinodes")
    m_abs = 0.02 * mass * n_chain
    absorbers = tuple(tuned_absorber(p, m_abs) for p in positions)
    kw.setdefault("load_index", int(0.23 * n_chain))
    return BenchmarkSpec(n_chain=n_chain, mass=mass, absorbers=absorbers, **kw)


def _profile(value, size, name):
    arr = np.asarray(value, dtype=float)
    if arr.ndim == 0:
        arr = np.full(size, float(arr))
    if arr.shape != (size,):
        raise ValueError(f"{name} profile needs {size} entries, got {arr.shape}")
    if np.any(arr <= 0):
        raise ValueError(f"{name} profile must be positive")
    return arr


def generate_benchmark(spec: BenchmarkSpec) -> SecondOrderSystem:
    """Assemble ``(M, D, K, g, C)`` for the chain described by ``spec``."""
    n = spec.n_chain
    m = _profile(spec.mass, n, "mass")
    k = _profile(spec.stiffness, n + 1, "stiffness")
    if spec.jitter:
        rng = np.random.default_rng(spec.seed)
        m = m * (1 + spec.jitter * rng.uniform(-1, 1, n))
        k = k * (1 + spec.jitter * rng.uniform(-1, 1, n + 1))
    M_chain = sps.diags(m)
    K_chain = sps.diags([k[:-1] + k[1:], -k[1:-1], -k[1:-1]], [0, 1, -1], shape=(n, n))
    D_chain = spec.alpha * M_chain + spec.beta * K_chain

    na = len(spec.absorbers)
    N = n + na
    M = sps.lil_matrix((N, N))
    K = sps.lil_matrix((N, N))
    D = sps.lil_matrix((N, N))
    M[:n, :n] = M_chain
    K[:n, :n] = K_chain
    D[:n, :n] = D_chain
    for a_idx, a in enumerate(spec.absorbers):
        i, j = a.index, n + a_idx
        M[j, j] = a.mass
        for X, c in ((K, a.stiffness), (D, a.damping)):
            X[i, i] += c
            X[j, j] += c
            X[i, j] -= c
            X[j, i] -= c

    load = spec.load_index if spec.load_index is not None else n // 2
    g = np.zeros(N)
    g[load] = 1.0
    obs = np.arange(n) if spec.observed is None else np.asarray(spec.observed, dtype=int)
    w = np.full(obs.size, 1 / np.sqrt(obs.size)) if spec.weights is None else np.asarray(spec.weights)
    C = sps.csr_matrix((w, (np.arange(obs.size), obs)), shape=(obs.size, N))
    return SecondOrderSystem(M.tocsr(), D.tocsr(), K.tocsr(), g, C, name=spec.name)
