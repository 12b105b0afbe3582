import math

import numpy as np
import pytest

import oracles as O
from ssclab import equilibration as E
from ssclab import steady, tcl2
from ssclab.spectral import make_bath

G, WB, T_MODE = 0.01, 3.0, 0.3


@pytest.fixture(scope="module")
def mode_corr():
    return O.single_mode_matsubara(G, WB, T_MODE)


@pytest.mark.parametrize("f1,f2", [(0.1, 0.1), (0.3, 0.2)])
def test_v1_against_exact_single_mode(mode_corr, f1, f2):
    rho = O.qubit_mode_gibbs(f1, f2, G, 1.0, WB, T_MODE, 30)
    exact = 2 * rho[0, 1].real
    approx = E.second_order_v1(mode_corr, f1, f2, 1 / T_MODE)
    assert approx == pytest.approx(exact, rel=1e-5)
    flipped = E.second_order_v1(mode_corr, f1, f2, 1 / T_MODE, form="flipped-sinh")
    assert np.sign(flipped) != np.sign(exact)


@pytest.mark.parametrize("f1,f2", [(0.1, 0.1), (0.3, 0.2)])
def test_v3_against_exact_single_mode(mode_corr, f1, f2):
    beta = 1 / T_MODE
    rho = O.qubit_mode_gibbs(f1, f2, G, 1.0, WB, T_MODE, 30)
    exact = (rho[0, 0] - rho[1, 1]).real + math.tanh(beta / 2)
    z = E.zeta_from_correlation(mode_corr, beta, 1.0, f1, f2)
    _, corr = E.second_order_v3(z, f1, f2, beta)
    assert corr == pytest.approx(exact, rel=1e-5)
    assert abs(2 * rho[0, 1].imag) < 1e-15


def test_v1_bilinear_in_couplings(ohmic_bath):
    a = E.perturbative_v1(0.05, 0.05, ohmic_bath)
    b = E.perturbative_v1(0.1, 0.15, ohmic_bath)
    assert b == pytest.approx(6 * a, rel=1e-10)


def test_trivial_cases(ohmic_bath):
    assert E.perturbative_v1(0.0, 0.1, ohmic_bath) == 0.0
    assert E.perturbative_v1(0.1, 0.0, ohmic_bath) == 0.0
    assert E.perturbative_v2() == 0.0
    assert E.perturbative_v3(0.0, 0.0, ohmic_bath) == (-math.tanh(1.0), 0.0)
    with pytest.raises(ValueError):
        E.perturbative_v1(0.1, 0.1, make_bath(0.01, 5.0, 1.0, 0.0))
    with pytest.raises(ValueError):
        E.perturbative_v1(0.1, 0.1, ohmic_bath, form="other")


@pytest.mark.parametrize("T", [0.2, 0.5, 2.0])
def test_sign_and_size_agree_with_tcl2_fixed_point(T):
    b = make_bath(0.01, 5.0, 3.0, T)
    g = E.perturbative_v1(0.1, 0.1, b)
    d = steady.dynamical_steady_state(tcl2.Composite(0.1, 0.1), b).v[0]
    assert g < 0 and d < 0
    assert g == pytest.approx(d, rel=5e-3)


def test_v1_magnitude_grows_as_temperature_falls():
    vals = [E.perturbative_v1(0.1, 0.1, make_bath(0.01, 5.0, 3.0, T)) for T in (2.0, 1.0, 0.5, 0.2)]
    assert np.all(np.diff(np.abs(vals)) > 0)


def test_zeta_ordering(super_ohmic_bath):
    z = E.zeta_integrals(super_ohmic_bath, f1=0.1, f2=0.2)
    assert z.zeta_c >= z.zeta > 0 and z.zeta_s >= 0
    assert z.b_norm == pytest.approx(2 * (0.01 * z.zeta + 0.04 * z.zeta_c))
    q = E.zeta_integrals(super_ohmic_bath, f1=0.1, f2=0.2, method="quad")
    assert q.zeta_s == pytest.approx(z.zeta_s, rel=1e-7)


def test_flipped_sinh_correction_monotone_in_temperature():
    T = np.linspace(0.1, 2.0, 12)
    corr = [E.perturbative_v3(0.1, 0.1, make_bath(0.01, 10.0, 1.0, t), form="flipped-sinh")[1] for t in T]
    assert np.all(np.diff(corr) < 0)


def test_corrected_correction_peaks_at_intermediate_temperature():
    T = np.linspace(0.05, 2.0, 40)
    corr = np.array([E.perturbative_v3(0.1, 0.1, make_bath(0.01, 10.0, 1.0, t))[1] for t in T])
    k = int(np.argmax(corr))
    assert 0 < k < T.size - 1 and np.all(corr > 0)


def test_high_temperature_limit():
    v3, _ = E.perturbative_v3(0.1, 0.1, make_bath(0.01, 5.0, 1.0, 500.0))
    assert abs(v3) < 2e-3


def test_hermitian_operator_validation():
    with pytest.raises(ValueError):
        E.HermitianOperator(np.array([[0, 1], [0, 0]]))
    with pytest.raises(ValueError):
        E.HermitianOperator(np.eye(1))
    assert E.HermitianOperator(np.eye(3)).dim == 3


@pytest.mark.parametrize("kind", list(E.ModelKind))
def test_gibbs_marginal_is_a_state(kind):
    rho = E.gibbs_reduced(E.StrongCouplingModel.symmetric(kind, 0.5), 0.3)
    assert np.trace(rho.entries).real == pytest.approx(1.0, abs=1e-12)
    assert np.all(rho.eigvalsh() >= -1e-14)
    assert E.coherence(rho) > 0


@pytest.mark.parametrize("kind", list(E.ModelKind))
def test_parity_zeros_and_reflection(kind):
    zero1 = E.gibbs_reduced(E.StrongCouplingModel(kind, kappa1=0.0, kappa2=0.3), 0.5)
    zero2 = E.gibbs_reduced(E.StrongCouplingModel(kind, kappa1=0.3, kappa2=0.0), 0.5)
    assert E.coherence(zero1) < 1e-12 and E.coherence(zero2) < 1e-12
    plus = E.coherence(E.gibbs_reduced(E.StrongCouplingModel(kind, kappa1=0.3), 0.5))
    minus = E.coherence(E.gibbs_reduced(E.StrongCouplingModel(kind, kappa1=-0.3), 0.5))
    assert plus == pytest.approx(minus, rel=1e-10)


def test_oscillator_matches_independent_diagonalization():
    m = E.StrongCouplingModel.symmetric("qubit-oscillator", 0.3, fock_cutoff=40)
    rho = E.gibbs_reduced(m, 0.4).entries
    ref = O.qubit_mode_gibbs(1.0, 1.0, 0.3, 1.0, 1.0, 0.4, 80)
    np.testing.assert_allclose(rho, ref, atol=1e-9)


def test_truncation_cap_raises():
    m = E.StrongCouplingModel.symmetric("qubit-oscillator", 0.5, fock_cutoff=2)
    with pytest.raises(E.TruncationError):
        E.gibbs_reduced(m, 2.0, tol=1e-12, max_cutoff=8)


@pytest.mark.parametrize("kind,kappa", [("qubit-oscillator", 0.2), ("qubit-qubit", 0.5)])
def test_sweep_decreasing_coherence(kind, kappa):
    rows = E.strong_coupling_sweep(E.StrongCouplingModel.symmetric(kind, kappa), np.linspace(0.05, 2.0, 20))
    C = [r.coherence for r in rows]
    theta = [r.theta for r in rows]
    assert np.all(np.diff(C) < 0) and np.all(np.diff(theta) < 0)
    assert all(-1 <= r.v3 <= 0 for r in rows)


def test_rejects_bad_models():
    with pytest.raises(ValueError):
        E.StrongCouplingModel("qubit-oscillator", omega1=0.0)
    with pytest.raises(ValueError):
        E.StrongCouplingModel("qutrit")
    with pytest.raises(ValueError):
        E.gibbs_reduced(E.StrongCouplingModel("qubit-qubit"), 0.0)
