"""Ohmic-family spectral densities and the thermally dressed weight J_eff."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

WEAK_COUPLING_LIMIT = 0.1


class WeakCouplingWarning(UserWarning):
    pass


class DivergentLimitError(ArithmeticError):
    """Raised when J_eff(0, T) is requested in the sub-Ohmic regime, where it is infinite."""


@dataclass(frozen=True)
class SpectralParams:
    """Coupling strength, cutoff frequency and ohmicity of J(w) = lam w^s Omega^(1-s) exp(-w/Omega)."""

    lam: float
    cutoff: float
    ohmicity: float = 1.0

    def __post_init__(self):
        for name in ("lam", "cutoff", "ohmicity"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be a positive finite number, got {v!r}")
        if self.lam >= WEAK_COUPLING_LIMIT:
            warnings.warn(
                f"lam={self.lam} is outside the weak-coupling regime (lam < {WEAK_COUPLING_LIMIT})",
                WeakCouplingWarning,
                stacklevel=3,
            )

    @property
    def weak(self) -> bool:
        return self.lam < WEAK_COUPLING_LIMIT


@dataclass(frozen=True)
class BathSpec:
    spectral: SpectralParams
    temperature: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.temperature) and self.temperature >= 0):
            raise ValueError(f"temperature must be >= 0, got {self.temperature!r}")

    @property
    def beta(self) -> float:
        return math.inf if self.temperature == 0 else 1.0 / self.temperature

    def with_temperature(self, temperature: float) -> "BathSpec":
        return BathSpec(self.spectral, temperature)

    def with_cutoff(self, cutoff: float) -> "BathSpec":
        p = self.spectral
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", WeakCouplingWarning)
            return BathSpec(SpectralParams(p.lam, cutoff, p.ohmicity), self.temperature)


@dataclass(frozen=True)
class SystemSpec:
    omega0: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.omega0) and self.omega0 > 0):
            raise ValueError(f"omega0 must be positive, got {self.omega0!r}")


def make_bath(lam: float, cutoff: float, ohmicity: float = 1.0, temperature: float = 0.0) -> BathSpec:
    return BathSpec(SpectralParams(lam, cutoff, ohmicity), temperature)


def _check_freq(omega):
    w = np.asarray(omega, dtype=float)
    if np.any(w < 0) or np.any(np.isnan(w)):
        raise ValueError("spectral density is defined for omega >= 0 only")
    return w


def density(omega, p: SpectralParams):
    """J(w) for the Ohmic family. Accepts scalars or arrays."""
    w = _check_freq(omega)
    out = p.lam * p.cutoff * (w / p.cutoff) ** p.ohmicity * np.exp(-w / p.cutoff)
    return out if out.ndim else float(out)


def x_coth_x(x):
    """x*coth(x) evaluated without cancellation near x = 0."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 1e-4
    xs = np.where(small, 1.0, x)
    return np.where(small, 1.0 + x * x / 3.0, xs / np.tanh(xs))


def effective_density(omega, bath: BathSpec):
    """J(w) coth(w / 2T), with the exact T = 0 and w -> 0 limits.

    At w = 0 the result is 2 lam T for s = 1 and 0 for s > 1. For s < 1 and
    T > 0 the limit is infinite and DivergentLimitError is raised.
    """
    w = _check_freq(omega)
    p = bath.spectral
    T = bath.temperature
    if T == 0:
        return density(w, p)
    s = p.ohmicity
    if s < 1 and np.any(w == 0):
        raise DivergentLimitError("J_eff(0, T) diverges for s < 1 at T > 0")
    # J coth = lam Omega^(1-s) w^(s-1) e^(-w/Omega) * (w coth(w/2T)), and w coth(w/2T) = 2T xcothx
    with np.errstate(divide="ignore", invalid="ignore"):
        wpow = np.where(w == 0, 1.0 if s == 1 else 0.0, w ** (s - 1.0))
    out = p.lam * p.cutoff ** (1.0 - s) * wpow * np.exp(-w / p.cutoff) * 2.0 * T * x_coth_x(w / (2.0 * T))
    return out if out.ndim else float(out)


def effective_density_at_zero(bath: BathSpec) -> float:
    """Limit of J_eff(w, T) as w -> 0 (may be inf for s < 1)."""
    p = bath.spectral
    if bath.temperature == 0 or p.ohmicity > 1:
        return 0.0
    if p.ohmicity == 1:
        return 2.0 * p.lam * bath.temperature
    return math.inf


def resonance_cutoff(T: float, omega0: float = 1.0, ohmicity: float = 1.0, allow_non_ohmic: bool = False) -> float:
    """Cutoff at which d/dw J_eff(w, T) vanishes at w = omega0.

    Stationarity of log J_eff gives 1/Omega = s/omega0 - csch(omega0/T)/T, which
    for s = 1 is Omega = T / (T/omega0 - csch(omega0/T)). Other ohmicities need
    ``allow_non_ohmic=True``.
    """
    if T <= 0:
        raise ValueError("resonance_cutoff needs T > 0")
    if ohmicity != 1 and not allow_non_ohmic:
        raise ValueError("closed-form resonance curve is only defined for s = 1; pass allow_non_ohmic=True")
    x = omega0 / T
    csch_over_T = 0.0 if x > 700 else 1.0 / (T * math.sinh(x))
    inv = ohmicity / omega0 - csch_over_T
    if inv <= 0:
        raise ValueError(f"no resonance cutoff exists at T={T}, s={ohmicity}")
    return 1.0 / inv


def log_derivative_jeff(omega: float, bath: BathSpec) -> float:
    """d/dw log J_eff(w, T), used to check the resonance condition."""
    p = bath.spectral
    d = p.ohmicity / omega - 1.0 / p.cutoff
    if bath.temperature > 0:
        x = omega / bath.temperature
        if x < 700:
            d -= 1.0 / (bath.temperature * math.sinh(x))
    return d
