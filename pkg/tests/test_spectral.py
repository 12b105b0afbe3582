import math

import numpy as np
import pytest
from scipy import optimize

from ssclab.spectral import (BathSpec, DivergentLimitError, SpectralParams, SystemSpec, WeakCouplingWarning,
                             density, effective_density, effective_density_at_zero, log_derivative_jeff, make_bath,
                             resonance_cutoff)


@pytest.mark.parametrize("field", ["lam", "cutoff", "ohmicity"])
@pytest.mark.parametrize("bad", [0.0, -1.0, math.inf, math.nan])
def test_spectral_params_reject_nonpositive(field, bad):
    kw = {"lam": 0.01, "cutoff": 5.0, "ohmicity": 1.0, field: bad}
    with pytest.raises(ValueError):
        SpectralParams(**kw)


def test_strong_coupling_flagged_not_refused():
    with pytest.warns(WeakCouplingWarning):
        p = SpectralParams(0.2, 5.0)
    assert not p.weak


def test_negative_temperature_rejected():
    with pytest.raises(ValueError):
        BathSpec(SpectralParams(0.01, 5.0), -0.1)
    with pytest.raises(ValueError):
        SystemSpec(0.0)


def test_density_values():
    p = SpectralParams(0.01, 5.0, 1.0)
    assert density(0.0, p) == 0.0
    assert density(1.0, p) == pytest.approx(0.01 * math.exp(-0.2), rel=1e-14)
    with pytest.raises(ValueError):
        density(-1.0, p)


@pytest.mark.parametrize("lam,cutoff,s", [(0.01, 5.0, 1.0), (0.03, 2.0, 0.5), (0.005, 10.0, 3.0)])
def test_density_peaks_at_s_times_cutoff(lam, cutoff, s):
    p = SpectralParams(lam, cutoff, s)
    r = optimize.minimize_scalar(lambda w: -density(w, p), bounds=(1e-6, 20 * cutoff), method="bounded",
                                 options={"xatol": 1e-10})
    assert r.x == pytest.approx(s * cutoff, rel=1e-6)


def test_effective_density_limits():
    b0 = make_bath(0.01, 5.0, 1.0, 0.0)
    w = np.linspace(0, 10, 7)
    np.testing.assert_array_equal(effective_density(w, b0), density(w, b0.spectral))
    b = make_bath(0.01, 5.0, 1.0, 0.5)
    assert effective_density(0.0, b) == pytest.approx(0.01)
    assert effective_density(1e-8, b) == pytest.approx(0.01, rel=1e-7)
    assert effective_density_at_zero(b) == pytest.approx(0.01)
    assert effective_density_at_zero(make_bath(0.01, 5.0, 3.0, 0.5)) == 0.0
    assert effective_density_at_zero(make_bath(0.01, 5.0, 0.5, 0.5)) == math.inf


def test_effective_density_linear_at_high_temperature():
    ratios = [effective_density(1.0, make_bath(0.01, 5.0, 1.0, T)) / T for T in (1e2, 1e3, 1e4)]
    assert ratios[2] == pytest.approx(2 * density(1.0, SpectralParams(0.01, 5.0)), rel=1e-7)
    assert abs(ratios[2] - ratios[1]) < abs(ratios[1] - ratios[0])


def test_sub_ohmic_zero_frequency_diverges():
    with pytest.raises(DivergentLimitError):
        effective_density(0.0, make_bath(0.01, 5.0, 0.5, 0.5))


def test_resonance_cutoff_value():
    # 1/Omega = 1 - csch(1): 1/(1 - 0.850918128) = 6.70772
    assert resonance_cutoff(1.0) == pytest.approx(1.0 / (1.0 - 1.0 / math.sinh(1.0)), rel=1e-14)
    assert resonance_cutoff(1.0) == pytest.approx(6.70772, abs=1e-5)


@pytest.mark.parametrize("T", [0.3, 0.7, 1.0, 2.0])
def test_resonance_cutoff_is_stationary_point(T):
    c = resonance_cutoff(T)
    b = make_bath(0.01, c, 1.0, T)
    assert abs(log_derivative_jeff(1.0, b)) < 1e-8
    # and the derivative of J_eff itself, by central differences
    h = 1e-5
    d = (effective_density(1 + h, b) - effective_density(1 - h, b)) / (2 * h)
    assert abs(d) < 1e-8 * effective_density(1.0, b) + 1e-10


def test_resonance_cutoff_low_temperature_limit():
    root = optimize.brentq(lambda c: log_derivative_jeff(1.0, make_bath(0.01, c, 1.0, 0.02)), 0.5, 5.0, xtol=1e-14)
    assert resonance_cutoff(0.02) == pytest.approx(root, rel=1e-10)
    assert resonance_cutoff(0.02) == pytest.approx(1.0, rel=1e-12)


def test_resonance_cutoff_guards():
    with pytest.raises(ValueError):
        resonance_cutoff(1.0, ohmicity=3.0)
    assert resonance_cutoff(0.01, ohmicity=3.0, allow_non_ohmic=True) == pytest.approx(1 / 3)
    with pytest.raises(ValueError):
        resonance_cutoff(0.0)
