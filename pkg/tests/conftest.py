import numpy as np
import pytest
import scipy.sparse as sps
from hypothesis import HealthCheck, settings

from rmsmor import QuadraticOutputSystem, SecondOrderSystem

settings.register_profile("default", deadline=None, max_examples=25,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def scalar_system():
    return QuadraticOutputSystem(np.eye(1), -np.eye(1), np.ones(1), np.eye(1), name="scalar")


def random_stable(n, seed, sparse=False, complex_data=False, p=3):
    """Random system with a stable pencil and PSD output matrix."""
    rng = np.random.default_rng(seed)
    if sparse:
        A = sps.random(n, n, density=5 / n, random_state=rng) - sps.diags(5 + rng.random(n))
        E = sps.identity(n) + sps.diags(0.1 * rng.random(n))
        C = sps.random(p, n, density=0.3, random_state=rng) + sps.csr_matrix(
            (np.ones(p), (np.arange(p), rng.choice(n, p, replace=False))), shape=(p, n))
        b = rng.standard_normal(n)
        if complex_data:
            A = A + 1j * sps.random(n, n, density=2 / n, random_state=rng)
            b = b + 1j * rng.standard_normal(n)
        return QuadraticOutputSystem(E, A, b, (C.T @ C).tocsr(), name=f"rand{n}")
    X = rng.standard_normal((n, n)) / np.sqrt(n)
    A = X - (np.abs(np.linalg.eigvals(X)).max() + 0.5) * np.eye(n)
    E = np.eye(n) + 0.1 * np.diag(rng.random(n))
    b = rng.standard_normal(n)
    C = rng.standard_normal((p, n))
    if complex_data:
        A = A + 0.1j * rng.standard_normal((n, n)) / np.sqrt(n)
        b = b + 1j * rng.standard_normal(n)
        C = C + 1j * rng.standard_normal((p, n))
    return QuadraticOutputSystem(E, A, b, C.conj().T @ C, name=f"rand{n}")


def random_symmetric(n, seed, p=3):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, n))
    A = -(X @ X.T / n + 0.1 * np.eye(n))
    C = rng.standard_normal((p, n))
    return QuadraticOutputSystem(np.eye(n), A, rng.standard_normal(n), C.T @ C, name=f"sym{n}")


def random_chain(n_so, seed, p=2):
    """Random damped chain as a second-order system."""
    rng = np.random.default_rng(seed)
    m = 1 + rng.random(n_so)
    k = 1 + rng.random(n_so + 1)
    K = sps.diags([k[:-1] + k[1:], -k[1:-1], -k[1:-1]], [0, 1, -1], shape=(n_so, n_so))
    M = sps.diags(m)
    D = 0.05 * M + 0.01 * K
    C = rng.standard_normal((p, n_so))
    return SecondOrderSystem(M, D, K, rng.standard_normal(n_so), C, name=f"chain{n_so}")


@pytest.fixture
def scalar():
    return scalar_system()


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[num])
