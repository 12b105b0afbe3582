"""Acceptance criteria 1-11, one test (or parametrized group) per criterion.

Run with ``pytest tests/test_acceptance.py``; the terminal summary prints one
PASS/FAIL line per criterion.
"""

import math
import time

import numpy as np
import pytest
from scipy import optimize

from ssclab import cli, steady, tcl2, validation
from ssclab import equilibration as E
from ssclab.spectral import make_bath, resonance_cutoff


def criterion(n):
    return pytest.mark.criterion(n)


class Clock:
    def __init__(self, limit):
        self.limit = limit

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t0
        if exc[0] is None:
            assert self.elapsed < self.limit, f"took {self.elapsed:.1f} s, limit {self.limit} s"


# 1. TCL2 trajectory terminal state against the closed-form steady state

C1_BATH = make_bath(0.01, 10.0, 3.0, 0.1)


def _criterion1(f2):
    v0 = tcl2.random_bloch_vector(np.random.default_rng(1)).as_array()
    with Clock(30):
        traj = tcl2.integrate_bloch(tcl2.Composite(0.1, f2), C1_BATH, v0)
    closed = steady.steady_state_model1(0.1, f2, C1_BATH).v
    np.testing.assert_allclose(traj.terminal, closed, rtol=0, atol=1e-3)


@criterion(1)
def test_c01_trajectory_matches_closed_form_weak_transverse():
    _criterion1(0.1)


@criterion(1)
@pytest.mark.xfail(strict=True, reason="at f2 = sqrt(w0/Delta1) the TCL2 generator has no stable fixed point")
def test_c01_trajectory_matches_closed_form_at_optimal_f2():
    d1 = steady.longtime_coeffs(1, C1_BATH).delta1
    _criterion1(math.sqrt(1.0 / d1))


# 2. initial-state independence

@criterion(2)
def test_c02_initial_state_independence():
    rng = np.random.default_rng(2024)
    b = make_bath(0.01, 5.0, 3.0, 0.5)
    with Clock(120):
        ends = np.array([tcl2.integrate_bloch(tcl2.Composite(0.1, 0.1), b, tcl2.random_bloch_vector(rng)).terminal
                         for _ in range(10)])
    assert np.all(np.ptp(ends, axis=0) < 1e-4)


# 3. zero-temperature, large-cutoff anchor

@criterion(3)
def test_c03_zero_temperature_anchor():
    with Clock(10):
        opt = steady.max_coherence_over_f2(1, 1.0, make_bath(0.01, 100.0, 3.0, 1e-4))
    assert opt.c_max_over_f1 == pytest.approx(math.sqrt(0.01), rel=0.05)


# 4. exponential-integral closed form

@criterion(4)
def test_c04_exponential_integral_closed_form():
    with Clock(5):
        res = validation.ei_closed_form_residual((1.0, 5.0, 10.0))
    assert res < 1e-6


# 5. resonance peak location

@criterion(5)
def test_c05_resonance_peak_location():
    with Clock(60):
        T = np.arange(0.1, 2.0, 0.005)
        rows = steady.temperature_sweep(1, make_bath(0.01, 5.0, 1.0, 0.5), T)
        t_peak = T[np.argmax(rows[:, 1])]
        t_res = optimize.brentq(lambda t: resonance_cutoff(t) - 5.0, 0.1, 3.0)
    assert abs(t_peak - t_res) <= 0.1 * t_res


# 6. nullity and robustness

@criterion(6)
def test_c06a_split_bath_nullity():
    with Clock(60):
        assert validation.split_nullity_residual(draws=5, seed=6) < 1e-6


@criterion(6)
def test_c06b_dephasing_robustness():
    with Clock(60):
        assert validation.dephasing_robustness_residual((0.0, 0.05, 0.1)) < 1e-6


# 7. kernel oracles

@criterion(7)
def test_c07_kernel_oracles():
    assert len(validation.KERNEL_GRID) >= 20
    with Clock(30):
        worst = validation.kernel_oracle_residuals()
        kms = validation.kms_residual()
    assert worst["D1"] < 1e-8 and worst["D2"] < 1e-8
    assert kms < 1e-8


# 8. model-2 structure

@criterion(8)
def test_c08_model2_structure():
    with Clock(60):
        assert validation.model2_structure_residual(t_grid=np.linspace(0.0, 60.0, 601)) < 1e-10
        b = make_bath(0.01, 5.0, 1.0, 0.5)
        lit = steady.steady_state_model2(0.1, 0.2, b).v
        dyn = steady.dynamical_steady_state(tcl2.RWAComposite(0.1, 0.2), make_bath(0.01, 5.0, 3.0, 0.3)).v
        assert abs(lit[0]) > 0 and abs(lit[1]) > 0
        assert abs(dyn[0]) > 0 and abs(dyn[1]) > 0
        T = np.linspace(0.1, 2.0, 20)
        for s in (0.5, 1.0, 3.0):
            C = [steady.coherence_model2(0.1, 0.1, make_bath(0.01, 5.0, s, t)) for t in T]
            assert np.all(np.diff(C) < 0), s


# 9. equilibration cross-route

@criterion(9)
@pytest.mark.parametrize("s", [1.0, 3.0])
def test_c09_equilibration_cross_route(s):
    T = np.linspace(2.0, 0.2, 10)
    with Clock(60):
        gibbs = np.array([E.perturbative_v1(0.1, 0.1, make_bath(0.01, 5.0, s, t)) for t in T])
        dyn = np.array([steady.dynamical_steady_state(tcl2.Composite(0.1, 0.1), make_bath(0.01, 5.0, s, t)).v[0]
                        for t in T])
    assert np.all(np.sign(gibbs) == np.sign(dyn))
    assert np.all(np.diff(np.abs(gibbs)) > 0)


# 10. strong coupling

def _truncation_gap(model, T):
    n = model.fock_cutoff
    c = [E.coherence(E.gibbs_reduced(E.StrongCouplingModel(model.kind, model.omega0, model.omega1, model.kappa1,
                                                           model.kappa2, m), T, tol=math.inf)) for m in (n, 2 * n)]
    return abs(c[0] - c[1])


@criterion(10)
@pytest.mark.parametrize("kind", list(E.ModelKind))
@pytest.mark.parametrize("kappa", [0.2, 0.5])
def test_c10_strong_coupling(kind, kappa):
    model = E.StrongCouplingModel.symmetric(kind, kappa)
    T = np.linspace(0.05, 2.0, 40)
    with Clock(120):
        rows = E.strong_coupling_sweep(model, T, tol=1e-7)
    C = np.array([r.coherence for r in rows])
    assert np.all(C > 0) and np.all(np.diff(C) < 0)
    if kind is E.ModelKind.QUBIT_OSCILLATOR:
        assert _truncation_gap(model, 2.0) < 1e-6
    for k1, k2 in ((kappa, 0.0), (0.0, kappa)):
        rho = E.gibbs_reduced(E.StrongCouplingModel(kind, kappa1=k1, kappa2=k2), 0.5)
        assert E.coherence(rho) < 1e-10


# 11. validate subcommand

@criterion(11)
def test_c11_validate_subcommand(capsys):
    assert cli.main(["validate"]) == 0
    out = capsys.readouterr().out
    for name in ("ei_closed_form_s3_zero_temperature", "split_bath_nullity", "dephasing_robustness",
                 "dissipation_kernel_closed_vs_quad", "noise_kernel_closed_vs_quad", "kms_symmetry",
                 "rwa_model_structure"):
        assert f"PASS {name}" in out
