import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rmsmor import (
    BasisMatrix,
    ReducedModel,
    eval_qo_tf_imag,
    eval_reduced_tf,
    lift_second_order,
    normalize,
    reduce,
    reduced_poles,
    PencilError,
    SecondOrderSystem,
)
from rmsmor.projection import EmptyBasisError

from conftest import random_stable, scalar_system

seeds = st.integers(0, 2**31)


def interpolation_bases(S, omega):
    K = 1j * omega * S.E - S.A
    v = np.linalg.solve(K, S.b)
    w = np.linalg.solve(K.conj().T, S.Q @ v)
    return v, w


# normalize -------------------------------------------------------------------------


def test_normalize_identical_columns():
    x = np.ones((4, 1)) / 2
    B = normalize(np.hstack([x, x]))
    assert B.r == 1 and B.tags == (0,)


def test_normalize_identity():
    B = normalize(np.eye(5))
    np.testing.assert_allclose(np.abs(B.columns), np.eye(5), atol=1e-15)


def test_normalize_random_full_rank():
    rng = np.random.default_rng(0)
    X = rng.standard_normal((20, 5)) + 1j * rng.standard_normal((20, 5))
    B = normalize(X)
    assert B.r == 5
    assert B.orthonormality_error() <= 1e-10
    V = B.columns
    np.testing.assert_allclose(V @ (V.conj().T @ X), X, atol=1e-10 * np.abs(X).max())


def test_normalize_all_zero():
    with pytest.raises(EmptyBasisError):
        normalize(np.zeros((3, 2)))


def test_normalize_keeps_tags():
    X = np.array([[1.0, 2.0, 0.0], [0.0, 0.0, 1.0], [0.0, 0.0, 0.0]])
    B = normalize(X, tags=["a", "b", "c"])
    assert B.tags == ("a", "c")


@given(seeds, st.integers(1, 8), st.integers(0, 4))
def test_normalize_span_preserved(seed, k, dup):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((15, k)) + 1j * rng.standard_normal((15, k))
    if dup:
        X = np.hstack([X, X[:, :1] * (1 + dup)])
    B = normalize(X)
    assert B.r == k
    assert B.orthonormality_error() <= 1e-10
    V = B.columns
    resid = np.linalg.norm(X - V @ (V.conj().T @ X), axis=0)
    assert np.all(resid <= 1e-10 * np.linalg.norm(X, axis=0).max())


# reduce ----------------------------------------------------------------------------


def test_identity_projection_reproduces_model():
    S = random_stable(8, 1)
    rom = reduce(S, np.eye(8))
    np.testing.assert_array_equal(rom.E, S.E)
    np.testing.assert_array_equal(rom.A, S.A)
    np.testing.assert_array_equal(rom.b, S.b)
    np.testing.assert_array_equal(rom.Q, S.Q)
    for om in (0.0, 0.7, 3.0):
        assert eval_reduced_tf(rom, om) == pytest.approx(eval_qo_tf_imag(S, om), rel=1e-12)


def test_scalar_projection(scalar):
    rom = reduce(scalar, np.ones((1, 1)))
    assert eval_reduced_tf(rom, 1.0) == pytest.approx(0.5, rel=1e-15)


def test_petrov_galerkin_interpolates_at_i():
    S = random_stable(30, 2, complex_data=True)
    v, w = interpolation_bases(S, 1.0)
    rom = reduce(S, normalize(v), normalize(w))
    assert eval_reduced_tf(rom, 1.0) == pytest.approx(eval_qo_tf_imag(S, 1.0), rel=1e-8)


def test_scalar_rom_value():
    rom = ReducedModel(np.eye(1), -np.eye(1), np.ones(1), np.eye(1))
    assert eval_reduced_tf(rom, 1.0) == pytest.approx(0.5, rel=1e-15)


def test_empty_rom_rejected():
    with pytest.raises(EmptyBasisError):
        ReducedModel(np.zeros((0, 0)), np.zeros((0, 0)), np.zeros(0), np.zeros((0, 0)))


def test_reduce_dimension_checks():
    S = random_stable(6, 0)
    with pytest.raises(ValueError):
        reduce(S, np.eye(5))
    with pytest.raises(ValueError):
        reduce(S, np.eye(6)[:, :2], np.eye(6)[:, :3])


def test_singular_reduced_e_is_a_warning():
    S = random_stable(6, 0)
    V = np.eye(6)[:, :2]
    W = np.eye(6)[:, 2:4]
    E = np.eye(6)
    S2 = type(S)(E, S.A, S.b, S.Q)
    rom = reduce(S2, V, W)
    assert any("singular" in m for m in rom.warnings)


def test_reduced_pencil_singular_raises():
    rom = ReducedModel(np.eye(1), np.zeros((1, 1)), np.ones(1), np.eye(1))
    with pytest.raises(PencilError):
        eval_reduced_tf(rom, 0.0)


@given(seeds)
def test_basis_invariance(seed):
    S = random_stable(20, seed, complex_data=True)
    rng = np.random.default_rng(seed)
    V = normalize(rng.standard_normal((20, 4)) + 1j * rng.standard_normal((20, 4))).columns
    U, _ = np.linalg.qr(rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)))
    r1, r2 = reduce(S, V), reduce(S, V @ U)
    om = np.linspace(0, 5, 20)
    h1, h2 = r1.tf_imag(om), r2.tf_imag(om)
    np.testing.assert_allclose(h2, h1, rtol=1e-10)


@given(seeds)
def test_reduced_q_hermitian_psd(seed):
    S = random_stable(15, seed, complex_data=True)
    rng = np.random.default_rng(seed)
    rom = reduce(S, rng.standard_normal((15, 5)) + 1j * rng.standard_normal((15, 5)))
    assert np.max(np.abs(rom.Q - rom.Q.conj().T)) <= 1e-12 * np.abs(rom.Q).max()
    assert np.linalg.eigvalsh(rom.Q).min() >= -1e-10 * np.linalg.norm(rom.Q, 2)


def test_tf_imag_matches_pointwise():
    S = random_stable(12, 4)
    rom = reduce(S, normalize(np.random.default_rng(1).standard_normal((12, 4))))
    om = np.array([0.0, 0.4, 2.0])
    np.testing.assert_allclose(rom.tf_imag(om), [eval_reduced_tf(rom, w) for w in om], rtol=1e-12)


# poles -----------------------------------------------------------------------------


def test_poles_scalar():
    np.testing.assert_allclose(reduced_poles(ReducedModel(np.eye(1), -np.eye(1), np.ones(1), np.eye(1))), [-1])


def test_poles_sorted():
    rom = ReducedModel(np.eye(2), np.diag([-1.0, -2.0]), np.ones(2), np.eye(2))
    np.testing.assert_allclose(reduced_poles(rom), [-2, -1])


def test_poles_lifted_oscillator():
    one = np.eye(1)
    L = lift_second_order(SecondOrderSystem(one, one, one, np.ones(1), one))
    rom = reduce(L, np.eye(2))
    np.testing.assert_allclose(reduced_poles(rom), [-0.5 - 1j * np.sqrt(3) / 2, -0.5 + 1j * np.sqrt(3) / 2], rtol=1e-14)


def test_poles_filter_infinite():
    rom = ReducedModel(np.diag([1.0, 0.0]), np.diag([-1.0, -1.0]), np.ones(2), np.eye(2))
    np.testing.assert_allclose(reduced_poles(rom), [-1])


def test_basis_matrix_orthonormality_error():
    assert BasisMatrix(np.eye(3)[:, :2], (0, 1)).orthonormality_error() == 0
