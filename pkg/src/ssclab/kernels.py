"""Bath correlation functions for the Ohmic family.

Conventions (all frequency integrals over [0, inf)):

    D1(t)  = 2 int J_eff(w) cos(w t)         noise kernel
    D2(t)  = 2 int J(w) sin(w t)             dissipation kernel
    <B B(-t)> = (D1(t) - i D2(t)) / 2

    d1 + i d2   = 2 int J(w) n(w) e^{i w t}
    d~1 + i d~2 = 2 int J(w) (1 + n(w)) e^{i w t}

Closed forms follow from coth(x/2) = 1 + 2 sum_n e^{-n x} and the Hurwitz zeta
function; every kernel also has a quadrature path used for validation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from . import quad as q
from .spectral import BathSpec, SpectralParams, density, effective_density

_BERNOULLI = special.bernoulli(24)


@dataclass(frozen=True)
class KernelEval:
    d1: float
    d2: float
    time: float


def bose(omega, T: float):
    """Mean occupation 1/(exp(w/T) - 1); identically 0 at T = 0."""
    w = np.asarray(omega, dtype=float)
    if T == 0:
        out = np.zeros_like(w)
    else:
        with np.errstate(over="ignore", divide="ignore"):
            out = 1.0 / np.expm1(w / T)
    return out if out.ndim else float(out)


def hurwitz_zeta(sigma: float, a):
    """Hurwitz zeta(sigma, a) for real sigma > 1 and complex a with Re a > 0.

    scipy only covers real a, and mpmath is too slow for dense time grids, so
    this is a vectorised Euler-Maclaurin sum (12 direct terms, 10 correction terms).
    """
    a = np.asarray(a, dtype=complex)
    n_direct = 12
    out = np.zeros_like(a)
    for k in range(n_direct):
        out += (a + k) ** (-sigma)
    z = a + n_direct
    out += z ** (1.0 - sigma) / (sigma - 1.0) + 0.5 * z ** (-sigma)
    rising = sigma
    zpow = z ** (-sigma - 1.0)
    for j in range(1, 11):
        out += _BERNOULLI[2 * j] / math.factorial(2 * j) * rising * zpow
        rising *= (sigma + 2 * j - 1) * (sigma + 2 * j)
        zpow = zpow / (z * z)
    return out


def _prefactor(p: SpectralParams) -> float:
    return p.lam * p.cutoff ** (1.0 - p.ohmicity) * math.gamma(p.ohmicity + 1.0)


def vacuum_transform(tau, p: SpectralParams):
    """2 int J(w) e^{i w t} dw = D1(t; T=0) + i D2(t)."""
    c = 1.0 / p.cutoff - 1j * np.asarray(tau, dtype=float)
    return 2.0 * _prefactor(p) * c ** (-(p.ohmicity + 1.0))


def thermal_transform(tau, bath: BathSpec):
    """2 int J_eff(w) e^{i w t} dw = D1(t) + i D2eff(t), with D2eff the J_eff-weighted sine kernel."""
    p = bath.spectral
    out = vacuum_transform(tau, p)
    T = bath.temperature
    if T > 0:
        c = 1.0 / p.cutoff - 1j * np.asarray(tau, dtype=float)
        sig = p.ohmicity + 1.0
        out = out + 4.0 * _prefactor(p) * T ** sig * hurwitz_zeta(sig, 1.0 + c * T)
    return out


def _ret(x):
    x = np.asarray(x)
    return x if x.ndim else float(x)


def _freq_integral(weight_fn, tau: float, kind: str, bath: BathSpec, cfg: q.QuadConfig, power: float):
    """2 int weight_fn(w) {cos, sin}(w tau) dw by adaptive quadrature."""
    p = bath.spectral
    wfun = None if tau == 0 or kind == "one" else kind
    if kind == "sin" and tau == 0:
        return 0.0
    sp = power if power != 0 else None
    val = q.integrate(weight_fn, 0.0, math.inf, cfg, scale=p.cutoff, singular_power=sp,
                      weight=wfun, wvar=abs(tau) if wfun else None)
    if kind == "sin" and tau < 0:
        val = -val
    return 2.0 * val


def _jeff_power(bath: BathSpec) -> float:
    s = bath.spectral.ohmicity
    return s - 1.0 if bath.temperature > 0 else s


def noise_kernel(tau, bath: BathSpec, method: str = "quad", cfg: q.QuadConfig = q.DEFAULT):
    """D1(tau) = 2 int J_eff(w) cos(w tau) dw.

    ``method='closed'`` uses the Hurwitz-zeta series and accepts arrays.
    """
    if method == "closed":
        return _ret(thermal_transform(tau, bath).real)
    if method != "quad":
        raise ValueError(f"unknown method {method!r}")
    f = lambda w: effective_density(w, bath) if w > 0 else 0.0
    taus = np.atleast_1d(np.asarray(tau, dtype=float))
    out = np.array([_freq_integral(f, t, "cos", bath, cfg, _jeff_power(bath)) for t in taus])
    return _ret(out.reshape(np.shape(tau)))


def dissipation_kernel(tau, spectral: SpectralParams, method: str = "closed", cfg: q.QuadConfig = q.DEFAULT):
    """D2(tau) = 2 int J(w) sin(w tau) dw; temperature independent."""
    if method == "closed":
        return _ret(vacuum_transform(tau, spectral).imag)
    if method != "quad":
        raise ValueError(f"unknown method {method!r}")
    bath = BathSpec(spectral, 0.0)
    f = lambda w: density(w, spectral)
    taus = np.atleast_1d(np.asarray(tau, dtype=float))
    out = np.array([_freq_integral(f, t, "sin", bath, cfg, spectral.ohmicity) for t in taus])
    return _ret(out.reshape(np.shape(tau)))


def kernels(tau, bath: BathSpec) -> KernelEval:
    return KernelEval(noise_kernel(tau, bath), dissipation_kernel(tau, bath.spectral), tau)


def rwa_correlations(tau, bath: BathSpec, method: str = "quad", cfg: q.QuadConfig = q.DEFAULT):
    """Return (d1, d2, d~1, d~2) at tau.

    The thermal pair (d1, d2) is the part of the J_eff transform in excess of the
    vacuum one; (d~1, d~2) adds the vacuum transform back.
    """
    vac = vacuum_transform(tau, bath.spectral)
    if bath.temperature == 0:
        zero = np.zeros_like(vac.real)
        th = zero + 0j
    elif method == "closed":
        th = 0.5 * (thermal_transform(tau, bath) - vac)
    elif method == "quad":
        p = bath.spectral
        f = lambda w: density(w, p) * bose(w, bath.temperature) if w > 0 else 0.0
        taus = np.atleast_1d(np.asarray(tau, dtype=float))
        pw = p.ohmicity - 1.0
        th = np.array([_freq_integral(f, t, "cos", bath, cfg, pw) + 1j * _freq_integral(f, t, "sin", bath, cfg, pw)
                       for t in taus]).reshape(np.shape(tau))
    else:
        raise ValueError(f"unknown method {method!r}")
    tl = th + vac
    return _ret(th.real), _ret(th.imag), _ret(tl.real), _ret(tl.imag)


def _check_u(u, bath: BathSpec):
    if bath.temperature == 0:
        raise ValueError("imaginary-time correlation needs T > 0")
    uu = np.asarray(u, dtype=float)
    if np.any(uu < 0) or np.any(uu > 1):
        raise ValueError("u must lie in [0, 1]")
    return uu


def matsubara_correlation(u, bath: BathSpec, method: str = "quad", cfg: q.QuadConfig = q.DEFAULT):
    """<B(-i beta u) B> for 0 <= u <= 1, i.e. int J [n e^{beta w u} + (1+n) e^{-beta w u}] dw.

    The two thermal exponentials are combined as
    [e^{-beta w (1-u)} + e^{-beta w u}] / (1 - e^{-beta w}) so no term grows.
    ``method='closed'`` sums the same series with scipy's real Hurwitz zeta.
    """
    uu = _check_u(u, bath)
    p = bath.spectral
    T = bath.temperature
    beta = 1.0 / T
    if method == "closed":
        sig = p.ohmicity + 1.0
        x = T / p.cutoff
        val = _prefactor(p) * T ** sig * (special.zeta(sig, x + 1.0 - uu) + special.zeta(sig, x + uu))
        return _ret(val)
    if method != "quad":
        raise ValueError(f"unknown method {method!r}")

    def one(uv):
        def f(w):
            if w == 0:
                return 0.0
            bw = beta * w
            return density(w, p) * (math.exp(-bw * (1.0 - uv)) + math.exp(-bw * uv)) / -math.expm1(-bw)

        pw = p.ohmicity - 1.0
        return q.integrate(f, 0.0, math.inf, cfg, scale=p.cutoff, singular_power=pw if pw != 0 else None)

    out = np.array([one(x) for x in np.atleast_1d(uu)])
    return _ret(out.reshape(np.shape(uu)))
