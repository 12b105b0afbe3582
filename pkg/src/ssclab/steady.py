"""Long-time coefficients and stationary Bloch vectors.

Two kinds of stationary state are provided:

* ``steady_state_model1`` / ``steady_state_model2`` evaluate the closed-form
  stationary solutions; their v1 sign is opposite to the dynamical fixed
  point (see docs/columns.md);
* ``dynamical_steady_state`` is the fixed point of the t -> inf TCL2 generator
  built from the same kernel moments that drive ``tcl2.integrate_bloch``, so
  it is what a long trajectory actually converges to.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize, special

from . import quad as q
from . import tcl2
from .spectral import BathSpec, density, effective_density, effective_density_at_zero


class SingularParameterError(ArithmeticError):
    pass


@dataclass(frozen=True)
class LongTimeCoeffs:
    model: int
    delta1: float
    delta2: float
    j_at_omega0: float
    jeff_at_omega0: float
    gamma2_inf: float
    residuals: dict = field(default_factory=dict)


@dataclass(frozen=True)
class SteadyReport:
    v: tuple
    coherence: float
    theta: float
    diagnostics: dict = field(default_factory=dict)


def _tanh_half(omega0: float, T: float) -> float:
    return 1.0 if T == 0 else math.tanh(omega0 / (2 * T))


def deviation_angle(coherence: float, v3: float) -> float:
    """arctan(C/|v3|) in [0, pi/2]; 0 when C = 0."""
    if coherence == 0:
        return 0.0
    return math.atan2(coherence, abs(v3))


def _report(v1, v2, v3, diagnostics=None) -> SteadyReport:
    C = math.hypot(v1, v2)
    return SteadyReport((float(v1), float(v2), float(v3)), C, deviation_angle(C, v3), diagnostics or {})


# frequency integrals

def _weights(bath: BathSpec, thermal: bool):
    p = bath.spectral
    if thermal and bath.temperature > 0:
        f = lambda w: effective_density(w, bath) if w > 0 else 0.0
        power = p.ohmicity - 1.0
    else:
        f = lambda w: density(w, p)
        power = p.ohmicity
    return f, (power if power != 0 else None)


def pv_over_detuning(bath: BathSpec, omega0: float, thermal: bool, cfg: q.QuadConfig = q.DEFAULT) -> q.PVResult:
    """PV int W(w)/(w - w0) dw with W = J_eff (thermal) or J."""
    f, power = _weights(bath, thermal)
    return q.principal_value(f, omega0, 0.0, math.inf, cfg, scale=bath.spectral.cutoff, singular_power=power)


def regular_over_sum(bath: BathSpec, omega0: float, thermal: bool, cfg: q.QuadConfig = q.DEFAULT):
    """int W(w)/(w + w0) dw and its error estimate."""
    f, power = _weights(bath, thermal)
    return q.integrate_with_error(lambda w: f(w) / (w + omega0), 0.0, math.inf, cfg,
                                  scale=bath.spectral.cutoff, singular_power=power)


def reorganization(bath: BathSpec) -> float:
    """int J(w)/w dw = lam Omega Gamma(s)."""
    p = bath.spectral
    return p.lam * p.cutoff * math.gamma(p.ohmicity)


def longtime_coeffs(model: int, bath: BathSpec, omega0: float = 1.0, cfg: q.QuadConfig = q.DEFAULT) -> LongTimeCoeffs:
    """Delta1, Delta2 (model 1) or delta1, delta2 (model 2).

    Delta1 = -2 int J_eff [1/(w+w0) - PV 1/(w-w0)],  Delta2 = -2 int J [1/(w+w0) + PV 1/(w-w0)],
    delta1 = PV int J_eff/(w-w0),                    delta2 = PV int J/(w-w0).
    """
    pv_eff = pv_over_detuning(bath, omega0, True, cfg)
    pv_j = pv_over_detuning(bath, omega0, False, cfg)
    res = {"pv_eff": pv_eff.residual_estimate, "pv_j": pv_j.residual_estimate}
    if model == 1:
        reg_eff, e1 = regular_over_sum(bath, omega0, True, cfg)
        reg_j, e2 = regular_over_sum(bath, omega0, False, cfg)
        d1 = -2 * (reg_eff - pv_eff.value)
        d2 = -2 * (reg_j + pv_j.value)
        res.update(reg_eff=e1, reg_j=e2)
    elif model == 2:
        d1, d2 = pv_eff.value, pv_j.value
    else:
        raise ValueError("model must be 1 or 2")
    return LongTimeCoeffs(model, d1, d2, density(omega0, bath.spectral), effective_density(omega0, bath),
                          4 * reorganization(bath), res)


def _numerator_model1(c: LongTimeCoeffs, bath: BathSpec, omega0: float) -> float:
    return c.delta1 * _tanh_half(omega0, bath.temperature) + c.gamma2_inf + c.delta2


def _alpha_model2(c: LongTimeCoeffs, bath: BathSpec, omega0: float) -> float:
    return c.delta1 * _tanh_half(omega0, bath.temperature) + c.delta2 + reorganization(bath)


def steady_state_model1(f1: float, f2: float, bath: BathSpec, omega0: float = 1.0,
                        coeffs: LongTimeCoeffs | None = None) -> SteadyReport:
    """Closed-form stationary state of the composite model.

    v1 = f1 f2 [Delta1 tanh(w0/2T) + 4 lam Omega Gamma(s) + Delta2] / (w0 + f2^2 Delta1),
    v2 = 0, v3 = -tanh(w0/2T).
    """
    c = coeffs or longtime_coeffs(1, bath, omega0)
    den = omega0 + f2 * f2 * c.delta1
    if abs(den) < 1e-14 * omega0:
        raise SingularParameterError("w0 + f2^2 Delta1 vanishes")
    v1 = f1 * f2 * _numerator_model1(c, bath, omega0) / den
    diag = {"delta1": c.delta1, "delta2": c.delta2, **{f"residual_{k}": v for k, v in c.residuals.items()}}
    return _report(v1, 0.0, -_tanh_half(omega0, bath.temperature), diag)


def steady_state_model2(f1: float, f2: float, bath: BathSpec, omega0: float = 1.0,
                        coeffs: LongTimeCoeffs | None = None) -> SteadyReport:
    """Closed-form stationary state of the RWA model: v1 + i v2 = 2 f1 f2 alpha / ((w0 + f2^2 d1) - i pi f2^2 J_eff(w0))."""
    c = coeffs or longtime_coeffs(2, bath, omega0)
    z = 2 * f1 * f2 * _alpha_model2(c, bath, omega0) / complex(omega0 + f2 * f2 * c.delta1,
                                                                -math.pi * f2 * f2 * c.jeff_at_omega0)
    diag = {"delta1": c.delta1, "delta2": c.delta2, **{f"residual_{k}": v for k, v in c.residuals.items()}}
    return _report(z.real, z.imag, -_tanh_half(omega0, bath.temperature), diag)


def coherence_model2(f1, f2, bath, omega0=1.0, coeffs=None) -> float:
    c = coeffs or longtime_coeffs(2, bath, omega0)
    num = abs(2 * f1 * f2 * _alpha_model2(c, bath, omega0))
    return num / math.hypot(omega0 + f2 * f2 * c.delta1, math.pi * f2 * f2 * c.jeff_at_omega0)


@dataclass(frozen=True)
class CoherenceOptimum:
    f2_opt: float
    c_max_over_f1: float
    method: str
    flags: tuple = ()


def _numeric_max(fun, bounds, tol) -> tuple[float, float]:
    lo, hi = math.log(bounds[0]), math.log(bounds[1])
    r = optimize.minimize_scalar(lambda x: -fun(math.exp(x)), bounds=(lo, hi), method="bounded",
                                 options={"xatol": tol})
    return math.exp(r.x), -r.fun


def max_coherence_over_f2(model: int, f1: float, bath: BathSpec, omega0: float = 1.0, *,
                          bounds=(1e-3, 1.0), tol: float = 1e-8, numeric: bool = False,
                          coeffs: LongTimeCoeffs | None = None) -> CoherenceOptimum:
    """Maximise the stationary coherence over f2 and return (f2_opt, C_max/f1).

    Model 1 uses f2 = sqrt(w0/Delta1) when Delta1 > 0; otherwise, for model 2, or
    with ``numeric=True`` a bounded search on log f2 is used.
    """
    c = coeffs or longtime_coeffs(model, bath, omega0)
    if model == 1:
        N = _numerator_model1(c, bath, omega0)
        if c.delta1 > 0 and not numeric:
            return CoherenceOptimum(math.sqrt(omega0 / c.delta1), abs(N) / (2 * math.sqrt(omega0 * c.delta1)),
                                    "analytic")
        flags = () if c.delta1 > 0 else ("delta1_nonpositive",)

        def fun(f2):
            den = omega0 + f2 * f2 * c.delta1
            return abs(f2 * N / den) if den != 0 else math.inf
    elif model == 2:
        flags = ()
        fun = lambda f2: coherence_model2(1.0, f2, bath, omega0, c)
    else:
        raise ValueError("model must be 1 or 2")
    f2, val = _numeric_max(fun, bounds, tol)
    return CoherenceOptimum(f2, val, "numeric", flags)


def model2_optimum_closed_form(bath: BathSpec, omega0: float = 1.0, coeffs: LongTimeCoeffs | None = None):
    """Stationary point of the model-2 coherence in f2: f2^2 = w0 / |d1 + i pi J_eff(w0)|."""
    c = coeffs or longtime_coeffs(2, bath, omega0)
    x = omega0 / math.hypot(c.delta1, math.pi * c.jeff_at_omega0)
    f2 = math.sqrt(x)
    return f2, coherence_model2(1.0, f2, bath, omega0, c)


def temperature_sweep(model: int, bath: BathSpec, T_grid, f1: float = 1.0, omega0: float = 1.0, **kw):
    """Rows (T, C_max/f1, v3, theta) with theta evaluated at the optimal f2."""
    T = np.asarray(T_grid, dtype=float)
    if np.any(T < 0) or np.any(np.diff(T) <= 0):
        raise ValueError("T_grid must be non-negative and increasing")
    rows = []
    for Tk in T:
        b = bath.with_temperature(float(Tk))
        opt = max_coherence_over_f2(model, f1, b, omega0, **kw)
        v3 = -_tanh_half(omega0, Tk)
        rows.append((float(Tk), opt.c_max_over_f1, v3, deviation_angle(abs(f1) * opt.c_max_over_f1, v3)))
    return np.array(rows)


# zero-temperature super-Ohmic closed forms (exponential integrals)

def s3_zero_temperature(lam: float, cutoff: float) -> dict:
    """Closed forms at s = 3, T = 0, in units w0 = 1, with a = 1/cutoff.

    Delta1 = 2 lam [2 - (e^{-a} Ei(a) + e^{a} Ei(-a)) / cutoff^2]
    Delta1 + 4 lam Omega Gamma(3) + Delta2 = 4 lam [1 - a + a^2 e^a E1(a)]
    """
    a = 1.0 / cutoff
    X = 2.0 - (math.exp(-a) * special.expi(a) + math.exp(a) * special.expi(-a)) / cutoff ** 2
    delta1 = 2.0 * lam * X
    numerator = 4.0 * lam * (1.0 - a + a * a * math.exp(a) * special.exp1(a))
    cmax = abs(numerator) / (2.0 * math.sqrt(delta1))
    return {"delta1": delta1, "numerator": numerator, "c_max_over_f1": cmax}


# fixed point of the t -> inf generator

def longtime_moments(bath: BathSpec, omega0: float = 1.0, cfg: q.QuadConfig = q.DEFAULT) -> np.ndarray:
    """Limits of the tcl2 kernel moments, shape (4, 3); inf where a limit diverges.

    For a cosine kernel 2 int W cos: (pi W(0), pi W(w0), int W/(w+w0) - PV int W/(w-w0)).
    For a sine kernel 2 int W sin:   (2 PV int W/w, int W/(w+w0) + PV int W/(w-w0), pi W(w0)).
    """
    m = np.zeros((4, 3))
    pv_eff = pv_over_detuning(bath, omega0, True, cfg).value
    pv_j = pv_over_detuning(bath, omega0, False, cfg).value
    reg_eff = regular_over_sum(bath, omega0, True, cfg)[0]
    reg_j = regular_over_sum(bath, omega0, False, cfg)[0]
    jeff0 = effective_density_at_zero(bath)
    s = bath.spectral.ohmicity
    if bath.temperature == 0:
        eff_over_w = 2 * reorganization(bath)
    elif s > 1:
        f, power = _weights(bath, True)
        eff_over_w = 2 * q.integrate(lambda w: f(w) / w if w > 0 else 0.0, 0.0, math.inf, cfg,
                                     scale=bath.spectral.cutoff,
                                     singular_power=(power - 1) if power is not None and power - 1 != 0 else None)
    else:
        eff_over_w = math.inf
    Jw0, Jeffw0 = density(omega0, bath.spectral), effective_density(omega0, bath)
    m[tcl2.D1] = (math.pi * jeff0, math.pi * Jeffw0, reg_eff - pv_eff)
    m[tcl2.D1VAC] = (0.0, math.pi * Jw0, reg_j - pv_j)
    m[tcl2.D2] = (2 * reorganization(bath), reg_j + pv_j, math.pi * Jw0)
    m[tcl2.D2EFF] = (eff_over_w, reg_eff + pv_eff, math.pi * Jeffw0)
    return m


def dynamical_steady_state(scheme, bath: BathSpec, omega0: float = 1.0, moments: np.ndarray | None = None,
                           second_moments=None) -> SteadyReport:
    """Fixed point of the long-time TCL2 generator for any coupling scheme.

    Divergent moments (sub-Ohmic dephasing at T > 0) are replaced by a large
    finite value; the report is flagged in that case.
    """
    m = longtime_moments(bath, omega0) if moments is None else moments
    second = getattr(scheme, "second_bath", None)
    if second_moments is None and second is not None:
        second_moments = longtime_moments(second, omega0)
    flags = {}
    if not np.all(np.isfinite(m)) or (second_moments is not None and not np.all(np.isfinite(second_moments))):
        flags["divergent_moment"] = True
        big = 1e8 * max(1.0, float(np.max(np.abs(m[np.isfinite(m)]))))
        m = np.where(np.isfinite(m), m, big)
        if second_moments is not None:
            second_moments = np.where(np.isfinite(second_moments), second_moments, big)
    M, b = tcl2.assemble_from_moments(scheme, m, omega0, lambda _b: second_moments)
    try:
        v = tcl2.fixed_point(M, b)
    except np.linalg.LinAlgError as exc:
        raise SingularParameterError("long-time generator is singular") from exc
    flags["condition"] = float(np.linalg.cond(M))
    return _report(*v, flags)
