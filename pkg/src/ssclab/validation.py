"""Self-checks run by ``ssclab validate``.

Each check compares two independent evaluations of the same quantity and
returns the measured residual next to its tolerance.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np
from scipy import special

from . import kernels as K
from . import quad as q
from . import steady, tcl2
from .equilibration import perturbative_v1
from .spectral import make_bath

TIGHT = q.QuadConfig(rel_tol=1e-12, abs_tol=1e-15, max_subdivisions=500)

# (s, T, Omega tau); Omega tau values avoid the exact zeros of the vacuum kernels
KERNEL_GRID = tuple(itertools.product((0.5, 1.0, 3.0), (0.0, 0.5, 2.0), (0.2, 1.5, 5.0)))
KERNEL_CUTOFF = 5.0


@dataclass(frozen=True)
class CheckResult:
    name: str
    residual: float
    tolerance: float
    seconds: float
    detail: str = ""

    @property
    def passed(self) -> bool:
        return bool(self.residual <= self.tolerance)


def _rel(a, b) -> float:
    a, b = np.asarray(a, dtype=complex), np.asarray(b, dtype=complex)
    return float(np.max(np.abs(a - b) / np.maximum(np.abs(a), 1e-300)))


def kernel_oracle_residuals(grid=KERNEL_GRID, cutoff: float = KERNEL_CUTOFF, cfg: q.QuadConfig = TIGHT) -> dict:
    """Worst relative gap between closed-form and quadrature D1 and D2 on the grid."""
    worst = {"D1": 0.0, "D2": 0.0}
    for s, T, x in grid:
        b = make_bath(0.01, cutoff, s, T)
        tau = x / cutoff
        worst["D2"] = max(worst["D2"], _rel(K.dissipation_kernel(tau, b.spectral, "closed"),
                                            K.dissipation_kernel(tau, b.spectral, "quad", cfg)))
        worst["D1"] = max(worst["D1"], _rel(K.noise_kernel(tau, b, "closed"), K.noise_kernel(tau, b, "quad", cfg)))
    return worst


def kms_residual(baths=None, us=(0.0, 0.1, 0.25, 0.4)) -> float:
    """max |C(u) - C(1-u)| / C(u) for the imaginary-time correlation, by quadrature."""
    baths = baths or [make_bath(0.01, 5, s, T) for s in (0.5, 1, 3) for T in (0.2, 1.0)]
    worst = 0.0
    for b in baths:
        u = np.array(us)
        worst = max(worst, _rel(K.matsubara_correlation(u, b, cfg=TIGHT), K.matsubara_correlation(1 - u, b, cfg=TIGHT)))
    return worst


def ei_closed_form_residual(cutoffs=(1.0, 5.0, 10.0), lam: float = 0.01) -> float:
    """Numeric Delta1 and coherence numerator at s = 3, T = 0 against the exponential-integral forms."""
    worst = 0.0
    for c in cutoffs:
        b = make_bath(lam, c, 3.0, 0.0)
        co = steady.longtime_coeffs(1, b, 1.0, TIGHT)
        ref = steady.s3_zero_temperature(lam, c)
        num = co.delta1 + co.gamma2_inf + co.delta2
        worst = max(worst, _rel(ref["delta1"], co.delta1), _rel(ref["numerator"], num))
    return worst


def split_nullity_residual(draws: int = 5, seed: int = 7) -> float:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(draws):
        s = rng.uniform(1.2, 3.0)
        b1 = make_bath(rng.uniform(0.002, 0.02), rng.uniform(2, 10), s, rng.uniform(0.1, 1.5))
        b2 = make_bath(rng.uniform(0.002, 0.02), rng.uniform(2, 10), rng.uniform(1.2, 3.0), rng.uniform(0.1, 1.5))
        f1, f2 = rng.uniform(0.05, 0.3, size=2)
        v = steady.dynamical_steady_state(tcl2.SplitTwoBaths(f1, f2, b2), b1).v
        worst = max(worst, abs(v[0]), abs(v[1]))
    return worst


DEPHASING_BATH = make_bath(0.01, 5.0, 3.0, 0.5)


def dephasing_robustness_residual(f3_values=(0.0, 0.05, 0.1), bath=None, f1: float = 0.1, f2: float = 0.1) -> float:
    """Largest change of the stationary state when an independent super-Ohmic dephasing bath is added."""
    bath = bath or make_bath(0.01, 5.0, 1.0, 0.5)
    ref = np.array(steady.dynamical_steady_state(tcl2.Composite(f1, f2), bath).v)
    worst = 0.0
    for f3 in f3_values:
        v = steady.dynamical_steady_state(tcl2.CompositePlusDephasing(f1, f2, f3, DEPHASING_BATH), bath).v
        worst = max(worst, float(np.max(np.abs(np.array(v) - ref))))
    return worst


def model2_structure_residual(bath=None, t_grid=None, f1: float = 0.1, f2: float = 0.2) -> float:
    bath = bath or make_bath(0.01, 5.0, 1.0, 0.5)
    t = np.linspace(0.0, 40.0, 401) if t_grid is None else t_grid
    scheme = tcl2.RWAComposite(f1, f2)
    ct = tcl2.coefficient_tables(scheme, bath, t)
    M, _ = tcl2.generator_table(scheme, bath, t)
    return float(max(np.max(np.abs(ct.a[:, 0, 1])), np.max(np.abs(M[:, 0, 0] - M[:, 1, 1])),
                     np.max(np.abs(M[:, 0, 1] + M[:, 1, 0]))))


def gksl_residual(bath=None, times=(0.3, 2.0, 15.0)) -> float:
    """Generator rebuilt from (a, h) against the directly assembled one, both models."""
    bath = bath or make_bath(0.01, 5.0, 3.0, 0.5)
    t = np.array(times)
    worst = 0.0
    for scheme in (tcl2.Composite(0.1, 0.2), tcl2.RWAComposite(0.1, 0.2)):
        ct = tcl2.coefficient_tables(scheme, bath, t)
        M, b = tcl2.generator_table(scheme, bath, t)
        for i in range(t.size):
            M2, b2 = tcl2.generator_from_coefficients(ct.a[i], ct.h[i])
            worst = max(worst, float(np.max(np.abs(M2 - M[i]))), float(np.max(np.abs(b2 - b[i]))))
    return worst


def _hurwitz() -> float:
    s = np.array([1.5, 2.0, 4.0])[:, None]
    a = np.array([0.3, 1.0, 7.5])[None, :]
    return _rel(special.zeta(s, a), np.array([K.hurwitz_zeta(si, a[0]) for si in s[:, 0]]))


def _rwa_closed_vs_quad() -> float:
    worst = 0.0
    for s, T in ((0.5, 0.5), (1.0, 1.0), (3.0, 0.3)):
        b = make_bath(0.01, 5, s, T)
        for tau in (0.1, 0.7):
            worst = max(worst, _rel(K.rwa_correlations(tau, b, "closed"), K.rwa_correlations(tau, b, "quad", TIGHT)))
    return worst


def _rwa_sum_rules() -> float:
    b = make_bath(0.01, 5, 1.0, 0.7)
    tau = np.linspace(0.0, 5.0, 11)
    d1, d2, dt1, dt2 = K.rwa_correlations(tau, b, "closed")
    D1 = K.noise_kernel(tau, b, "closed")
    D2 = K.dissipation_kernel(tau, b.spectral)
    return float(max(np.max(np.abs(d1 + dt1 - D1)), np.max(np.abs(dt2 - d2 - D2))))


def _matsubara_closed_vs_quad() -> float:
    worst = 0.0
    for s, T in ((0.5, 0.5), (1.0, 1.0), (3.0, 0.3)):
        b = make_bath(0.01, 5, s, T)
        u = np.array([0.05, 0.3, 0.5, 0.9])
        worst = max(worst, _rel(K.matsubara_correlation(u, b, "closed"), K.matsubara_correlation(u, b, "quad", TIGHT)))
    return worst


def _pv_methods() -> float:
    worst = 0.0
    for s, T in ((0.5, 0.5), (1.0, 0.2), (3.0, 1.0)):
        b = make_bath(0.01, 5, s, T)
        sub = steady.pv_over_detuning(b, 1.0, True, TIGHT).value
        f, power = steady._weights(b, True)
        exc = q.principal_value_excision(f, 1.0, 0.0, math.inf, TIGHT, scale=5.0, singular_power=power)
        worst = max(worst, _rel(sub, exc))
    return worst


def _cross_route_sign() -> float:
    """0 when the perturbative Gibbs and TCL2 fixed-point v1 share their sign at every T, else 1."""
    bad = 0
    for T in (0.3, 1.0, 2.0):
        b = make_bath(0.01, 5.0, 3.0, T)
        a = perturbative_v1(0.1, 0.1, b)
        d = steady.dynamical_steady_state(tcl2.Composite(0.1, 0.1), b).v[0]
        bad += int(np.sign(a) != np.sign(d))
    return float(bad)


CHECKS: dict[str, tuple[Callable[[], float], float]] = {
    "hurwitz_zeta_real_axis": (_hurwitz, 1e-12),
    "dissipation_kernel_closed_vs_quad": (lambda: kernel_oracle_residuals()["D2"], 1e-8),
    "noise_kernel_closed_vs_quad": (lambda: kernel_oracle_residuals()["D1"], 1e-8),
    "rwa_kernels_closed_vs_quad": (_rwa_closed_vs_quad, 1e-8),
    "rwa_sum_rules": (_rwa_sum_rules, 1e-12),
    "matsubara_closed_vs_quad": (_matsubara_closed_vs_quad, 1e-8),
    "kms_symmetry": (kms_residual, 1e-8),
    "pv_subtraction_vs_excision": (_pv_methods, 1e-7),
    "ei_closed_form_s3_zero_temperature": (ei_closed_form_residual, 1e-6),
    "split_bath_nullity": (split_nullity_residual, 1e-6),
    "dephasing_robustness": (dephasing_robustness_residual, 1e-6),
    "rwa_model_structure": (model2_structure_residual, 1e-10),
    "gksl_reconstruction": (gksl_residual, 1e-12),
    "gibbs_vs_tcl2_sign": (_cross_route_sign, 0.0),
}


def run_checks(only=None, tolerances=None) -> list[CheckResult]:
    tolerances = tolerances or {}
    unknown = (set(tolerances) | set(only or ())) - set(CHECKS)
    if unknown:
        raise KeyError(f"unknown check(s): {sorted(unknown)}")
    out = []
    for name, (fn, tol) in CHECKS.items():
        if only and name not in only:
            continue
        t0 = time.perf_counter()
        res = fn()
        out.append(CheckResult(name, float(res), float(tolerances.get(name, tol)), time.perf_counter() - t0))
    return out


def report(results: list[CheckResult]) -> dict:
    return {
        "passed": all(r.passed for r in results),
        "n_checks": len(results),
        "checks": [{**asdict(r), "passed": r.passed} for r in results],
    }
