import logging

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rmsmor import (
    QuadraticOutputSystem,
    averaged_basis,
    check_theorem1,
    default_irka_poles,
    default_presample_omegas,
    eval_bivariate_tf,
    eval_qo_tf_imag,
    greedy_select,
    krylov_irka_poles,
    lift_second_order,
    lqo_irka,
    normalize,
    presample,
    reduce,
    reduced_poles,
    sweep,
)
from rmsmor.benchmark import default_spec, generate_benchmark

from conftest import random_chain, random_stable, random_symmetric, scalar_system

seeds = st.integers(0, 2**31)


@pytest.fixture(scope="module")
def small_chain():
    return lift_second_order(random_chain(40, 0))


# presample ---------------------------------------------------------------------------


def test_default_presample_grid():
    om = default_presample_omegas()
    assert om.size == 250 and om[0] == 1.0 and om[-1] == pytest.approx(2 * np.pi * 251)
    np.testing.assert_allclose(np.diff(om), np.diff(om)[0])


def test_presample_scalar_point():
    B = presample(scalar_system(), [1.0])
    assert B.v_columns[0, 0] == pytest.approx(1 / (1 + 1j), rel=1e-15)
    assert B.w_columns[0, 0] == pytest.approx(0.5, rel=1e-15)
    assert B.tf_samples[0] == pytest.approx(0.5, rel=1e-15)
    assert B.points[0] == 1j


def test_presample_without_w():
    S = random_stable(12, 1)
    B = presample(S, [0.5, 2.0], with_w=False)
    assert B.w_columns is None
    Bw = presample(S, [0.5, 2.0])
    np.testing.assert_allclose(B.tf_samples, Bw.tf_samples, rtol=1e-12)


def test_presample_consistency(small_chain):
    om = np.linspace(0.1, 3.0, 12)
    B = presample(small_chain, om)
    S = small_chain
    for j in range(om.size):
        K = (1j * om[j] * S.E - S.A)
        v, w = B.v_columns[:, j], B.w_columns[:, j]
        assert np.linalg.norm(K @ v - S.b) <= 1e-10 * np.linalg.norm(S.b) * max(1, abs(K).max() * np.linalg.norm(v))
        assert B.tf_samples[j] == pytest.approx(np.vdot(S.b, w), rel=1e-10)
    ref = sweep(S, om / (2 * np.pi)).values
    np.testing.assert_allclose(B.tf_samples, ref, rtol=1e-10)


def test_presample_drops_singular_point(caplog):
    S = QuadraticOutputSystem(np.eye(2), np.diag([-1.0, 0.0]), np.ones(2), np.eye(2))
    with caplog.at_level(logging.WARNING):
        B = presample(S, [0.0, 1.0])
    assert B.m == 1 and B.omegas[0] == 1.0 and B.dropped[0][0] == 0.0


def test_presample_rejects_duplicates():
    with pytest.raises(ValueError):
        presample(scalar_system(), [1.0, 1.0])


# greedy -----------------------------------------------------------------------------


def test_greedy_full_interpolation_on_three_points():
    S = random_stable(20, 3)
    B = presample(S, [0.5, 1.5, 4.0])
    rom, trace = greedy_select(S, B, 3, petrov=True)
    err = np.abs(rom.tf_imag(B.omegas) - B.tf_samples) / np.abs(B.tf_samples)
    assert err.max() <= 1e-8
    assert len(trace.max_errors) == len(trace.selected) == 3


def test_greedy_scalar_reproduces(scalar):
    B = presample(scalar, [0.3, 1.0])
    rom, _ = greedy_select(scalar, B, 1)
    om = np.linspace(0, 10, 7)
    np.testing.assert_allclose(rom.tf_imag(om), 1 / (1 + om**2), rtol=1e-10)


def test_greedy_first_point_is_peak(small_chain):
    B = presample(small_chain, np.linspace(0.05, 3, 60))
    _, trace = greedy_select(small_chain, B, 4)
    assert trace.selected[0] == int(np.argmax(np.abs(B.tf_samples)))


@pytest.mark.parametrize("petrov", [False, True])
def test_greedy_self_consistency(small_chain, petrov):
    B = presample(small_chain, np.linspace(0.05, 3, 60))
    rom, trace = greedy_select(small_chain, B, 10, petrov=petrov)
    sel = trace.selected
    assert len(set(sel)) == len(sel)
    err = np.abs(rom.tf_imag(B.omegas[sel]) - B.tf_samples[sel]) / np.abs(B.tf_samples[sel])
    assert err.max() <= 1e-6
    assert trace.max_errors[-1] == pytest.approx(np.abs(rom.tf_imag(B.omegas) - B.tf_samples).max(), rel=1e-12)
    assert rom.info["selected"] == sel


def test_greedy_vw_hermite_at_selected(small_chain):
    B = presample(small_chain, np.linspace(0.05, 3, 60))
    rom, trace = greedy_select(small_chain, B, 8, petrov=True)
    rep = check_theorem1(small_chain, rom, trace.omegas)
    assert np.max(rep.value_relerr) <= 1e-8
    assert np.max(np.abs(rep.dH - rep.dHr) / np.abs(rep.dH)) <= 1e-6


def test_greedy_errors():
    S = random_stable(10, 0)
    B = presample(S, [1.0, 2.0], with_w=False)
    with pytest.raises(ValueError):
        greedy_select(S, B, 3)
    with pytest.raises(ValueError):
        greedy_select(S, B, 1, petrov=True)
    Z = QuadraticOutputSystem(np.eye(2), -np.eye(2), np.ones(2), np.zeros((2, 2)))
    with pytest.raises(ValueError):
        greedy_select(Z, presample(Z, [1.0]), 1)


def test_greedy_budget_trend():
    S = lift_second_order(generate_benchmark(default_spec(n_chain=200, n_absorbers=1)))
    B = presample(S, default_presample_omegas())
    _, t10 = greedy_select(S, B, 10, petrov=True)
    _, t20 = greedy_select(S, B, 20, petrov=True)
    assert t20.max_errors[-1] < t10.max_errors[-1]


# averaging --------------------------------------------------------------------------


@pytest.mark.parametrize("petrov", [False, True])
def test_averaged_no_truncation_interpolates(petrov):
    S = random_stable(30, 5)
    om = np.array([0.2, 0.9, 2.0, 3.5])
    B = presample(S, om)
    rom = averaged_basis(S, B, 4, petrov=petrov)
    np.testing.assert_allclose(rom.tf_imag(om), B.tf_samples, rtol=1e-8)


def test_averaged_duplicate_column():
    S = random_stable(30, 6)
    om = np.array([0.2, 0.9, 2.0])
    B = presample(S, om)
    B.v_columns = np.hstack([B.v_columns, B.v_columns[:, :1]])
    B.omegas = np.r_[om, om[0]]
    rom = averaged_basis(S, B, 3)
    np.testing.assert_allclose(rom.tf_imag(om), B.tf_samples[:3] if B.tf_samples.size == 3 else B.tf_samples, rtol=1e-8)


def test_averaged_rank_deficient_warns():
    S = random_stable(30, 7)
    B = presample(S, [0.5, 1.0])
    rom = averaged_basis(S, B, 5)
    assert rom.r == 2 and any("rank" in w for w in rom.warnings)


def test_averaged_deterministic():
    S = random_stable(30, 8)
    B = presample(S, np.linspace(0.1, 4, 20))
    a, b = averaged_basis(S, B, 6, petrov=True), averaged_basis(S, B, 6, petrov=True)
    np.testing.assert_array_equal(a.E, b.E)
    assert a.info["pivot_omegas"] == b.info["pivot_omegas"]


# interpolation conditions --------------------------------------------------------------------------


def _theorem_rom(S, om, petrov=True):
    B = presample(S, om)
    V = normalize(B.v_columns)
    W = normalize(B.w_columns) if petrov else None
    return reduce(S, V, W)


def test_theorem1_report_n30():
    S = random_stable(30, 9, complex_data=True)
    rep = check_theorem1(S, _theorem_rom(S, [1.0]), [1.0])
    assert rep.value_err[0] <= 1e-8 and rep.deriv_err[0] <= 1e-8


def test_theorem1_galerkin_value_only():
    S = random_stable(30, 10)
    rep = check_theorem1(S, _theorem_rom(S, [1.0], petrov=False), [1.0])
    assert rep.value_err[0] <= 1e-8


def test_theorem1_full_rom_zero_mismatch():
    S = random_stable(10, 11)
    rep = check_theorem1(S, reduce(S, np.eye(10)), [0.0, 1.0, 5.0])
    assert np.max(rep.value_err) <= 1e-13 and np.max(rep.deriv_err) <= 1e-12
    assert [row["omega"] for row in rep.rows()] == [0.0, 1.0, 5.0]


@given(seeds, st.lists(st.floats(0.0, 10.0), min_size=1, max_size=4, unique=True))
def test_theorem1_property(seed, om):
    S = random_stable(25, seed, complex_data=seed % 2 == 0)
    rep = check_theorem1(S, _theorem_rom(S, om), om)
    assert np.max(rep.value_err) <= 1e-8
    assert np.max(rep.deriv_err) <= 1e-6


@pytest.mark.parametrize("seed", range(3))
def test_bivariate_galerkin_real_points(seed):
    S = random_stable(40, seed)
    sig = np.array([0.3, 0.8, 1.5, 2.5])
    V = normalize(np.column_stack([np.linalg.solve(s * S.E - S.A, S.b) for s in sig]))
    rom = reduce(S, V)
    for s1 in sig:
        for s2 in sig:
            h = eval_bivariate_tf(S, s1, s2)
            assert eval_bivariate_tf(rom, s1, s2) == pytest.approx(h, rel=1e-8)


# IRKA -------------------------------------------------------------------------------


def test_irka_default_poles_conjugate_closed():
    p = default_irka_poles(5)
    assert p.size == 5 and np.all(p.real == -1)
    np.testing.assert_allclose(np.sort_complex(p), np.sort_complex(p.conj()))


def test_irka_scalar(scalar):
    rom, state = lqo_irka(scalar, 1)
    assert state.converged and state.iterations <= 2
    np.testing.assert_allclose(rom.tf_imag([0.0, 1.0, 3.0]), [1.0, 0.5, 0.1], rtol=1e-12)


def test_irka_fixed_point_init():
    S = random_symmetric(30, 2)
    _, st1 = lqo_irka(S, 3)
    _, st2 = lqo_irka(S, 3, init_poles=st1.poles, init_q_hat=st1.q_hat)
    assert st2.converged and st2.iterations == 1 and st2.history[0] < 1e-6


@pytest.mark.parametrize("seed", range(4))
def test_irka_symmetric_bivariate_conditions(seed):
    S = random_symmetric(50, seed)
    rom, state = lqo_irka(S, 4, tol=1e-6)
    assert state.converged and state.iterations <= 100
    sig = -state.poles.conj()
    for s1 in sig:
        for s2 in sig:
            h = eval_bivariate_tf(S, s1, s2)
            assert abs(eval_bivariate_tf(rom, s1, s2) - h) <= 1e-6 * abs(h)
    np.testing.assert_allclose(reduced_poles(rom), np.sort_complex(state.poles), rtol=1e-5)


def test_irka_full_order_reproduces():
    S = random_stable(8, 3)
    rom, state = lqo_irka(S, 8)
    om = np.linspace(0, 5, 11)
    np.testing.assert_allclose(rom.tf_imag(om), [eval_qo_tf_imag(S, w) for w in om], rtol=1e-9)


def test_irka_nonconvergence_is_reported():
    S = random_symmetric(50, 0)
    rom, state = lqo_irka(S, 6, max_iter=2)
    assert not state.converged and state.iterations == 2
    assert rom.info["converged"] is False
    assert any("did not converge" in w for w in state.warnings)


def test_irka_band_init():
    S = lift_second_order(random_chain(30, 1))
    _, state = lqo_irka(S, 6, init_poles="band", max_iter=200)
    assert state.iterations >= 1
    assert np.all(state.poles.real < 0)


def test_irka_krylov_init_stable():
    S = lift_second_order(random_chain(30, 2))
    p = krylov_irka_poles(S, 6)
    assert p.size == 6 and np.all(p.real < 0)


@pytest.mark.parametrize(
    "kw",
    [{"r": 0}, {"r": 2, "init_poles": [-1, -1]}, {"r": 2, "init_poles": [-1, 1]}, {"r": 2, "init_poles": [-1]},
     {"r": 2, "init_poles": "nope"}],
)
def test_irka_input_validation(kw):
    with pytest.raises(ValueError):
        lqo_irka(random_symmetric(5, 0), **kw)


def test_irka_rejects_complex_data():
    with pytest.raises(ValueError):
        lqo_irka(random_stable(5, 0, complex_data=True), 2)


def test_irka_pole_change_nonnegative():
    _, state = lqo_irka(random_symmetric(20, 5), 3)
    assert all(c >= 0 for c in state.history) and len(state.history) == state.iterations
