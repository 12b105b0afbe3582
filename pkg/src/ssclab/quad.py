"""Quadrature helpers built on scipy.integrate.quad (QUADPACK).

Semi-infinite integrals are truncated at ``tail_cut * scale``, where ``scale``
is the decay length of the exponential tail (the bath cutoff). Principal
values use singularity subtraction; symmetric excision with Richardson
extrapolation is kept as an independent check.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import integrate as _si


@dataclass(frozen=True)
class QuadConfig:
    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    max_subdivisions: int = 200
    tail_cut: float = 50.0

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")
        if self.tail_cut <= 0:
            raise ValueError("tail_cut must be positive")


DEFAULT = QuadConfig()


class QuadratureError(ArithmeticError):
    """Adaptive quadrature did not reach the requested accuracy."""

    def __init__(self, message: str, estimate: float, error: float):
        super().__init__(f"{message} (estimate={estimate!r}, error={error!r})")
        self.estimate = estimate
        self.error = error


class IntegrandNaNError(ValueError):
    def __init__(self, where):
        super().__init__(f"integrand returned NaN at {where}")
        self.where = where


@dataclass(frozen=True)
class PVResult:
    value: float
    residual_estimate: float
    pole: float


def _quad(f, a, b, cfg: QuadConfig, **kw):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", _si.IntegrationWarning)
        out = _si.quad(f, a, b, epsabs=cfg.abs_tol, epsrel=cfg.rel_tol, limit=cfg.max_subdivisions,
                       full_output=1, **kw)
    val, err = out[0], out[1]
    if math.isnan(val):
        raise IntegrandNaNError(f"[{a}, {b}]")
    if len(out) > 3:
        # ier > 0; accept if the error estimate is still within tolerance (roundoff flags are common)
        tol = max(cfg.abs_tol, cfg.rel_tol * abs(val))
        if not err <= 10 * tol:
            raise QuadratureError(f"quad failed on [{a}, {b}]: {out[3].splitlines()[0]}", val, err)
    return val, err


def _finite_upper(f, a, b, cfg, scale):
    if math.isinf(b):
        bc = a + cfg.tail_cut * scale
        # integrands decay like exp(-w/scale): the dropped piece is about |f(bc)| * scale
        with np.errstate(all="ignore"):
            tail = abs(float(f(bc))) * scale
        return bc, (tail if math.isfinite(tail) else 0.0)
    return b, 0.0


def integrate_with_error(f: Callable[[float], float], a: float, b: float, cfg: QuadConfig = DEFAULT, *,
                         scale: float = 1.0, singular_power: float | None = None, weight: str | None = None,
                         wvar: float | None = None, points: Sequence[float] | None = None) -> tuple[float, float]:
    """Return (value, error estimate) of the integral of f over [a, b].

    ``singular_power = p`` declares f ~ (w - a)^p near the lower end (p > -1);
    the first panel is then done with QUADPACK's algebraic weight. ``weight``
    and ``wvar`` select 'cos'/'sin' oscillatory weights.
    """
    if a == b:
        return 0.0, 0.0
    if b < a:
        v, e = integrate_with_error(f, b, a, cfg, scale=scale, singular_power=singular_power,
                                    weight=weight, wvar=wvar, points=points)
        return -v, e
    b, tail = _finite_upper(f, a, b, cfg, scale)
    total, err = 0.0, tail
    lo = a
    if singular_power is not None and singular_power != 0:
        if singular_power <= -1:
            raise ValueError("singular_power must exceed -1 for an integrable endpoint")
        panel = min(b - a, scale)
        if weight is not None and wvar:
            panel = min(panel, 0.5 * math.pi / abs(wvar))
        if weight is None:
            osc = lambda x: 1.0
        else:
            trig = math.cos if weight == "cos" else math.sin
            osc = lambda x: trig(wvar * x)
        p = singular_power

        def g(x):
            return f(x) * osc(x) / (x - a) ** p if x > a else 0.0

        v, e = _quad(g, a, a + panel, cfg, weight="alg", wvar=(p, 0.0))
        total += v
        err += e
        lo = a + panel
    if lo < b:
        kw = {}
        if weight is not None:
            kw = {"weight": weight, "wvar": wvar}
        elif points is not None:
            pts = [x for x in points if lo < x < b]
            if pts:
                kw = {"points": pts}
        v, e = _quad(f, lo, b, cfg, **kw)
        total += v
        err += e
    return total, err


def integrate(f: Callable[[float], float], a: float, b: float, cfg: QuadConfig = DEFAULT, **kw) -> float:
    return integrate_with_error(f, a, b, cfg, **kw)[0]


def principal_value(f: Callable[[float], float], pole: float, a: float, b: float, cfg: QuadConfig = DEFAULT, *,
                    scale: float = 1.0, singular_power: float | None = None) -> PVResult:
    """PV of the integral of f(w)/(w - pole) over [a, b] by singularity subtraction."""
    if not (a < pole < b):
        raise ValueError(f"pole {pole} must lie strictly inside ({a}, {b})")
    bc, tail = _finite_upper(lambda w: f(w) / (w - pole), a, b, cfg, scale)
    bc = max(bc, 2 * pole - a)
    fp = float(f(pole))

    def g(w):
        d = w - pole
        return (f(w) - fp) / d if d != 0 else 0.0

    left = integrate_with_error(g, a, pole, cfg, scale=scale, singular_power=singular_power)
    right = integrate_with_error(g, pole, bc, cfg, scale=scale)
    value = left[0] + right[0] + fp * math.log((bc - pole) / (pole - a))
    return PVResult(value, left[1] + right[1] + tail, pole)


def principal_value_excision(f: Callable[[float], float], pole: float, a: float, b: float,
                             cfg: QuadConfig = DEFAULT, *, scale: float = 1.0, eps: float = 1e-2,
                             levels: int = 4, singular_power: float | None = None) -> float:
    """Independent PV estimate: symmetric excision of (pole-eps, pole+eps), extrapolated to eps -> 0.

    For smooth f the excised integral equals PV - 2 f'(pole) eps + O(eps^3), so a
    Richardson table in odd powers of eps converges quickly.
    """
    bc, _ = _finite_upper(lambda w: f(w) / (w - pole), a, b, cfg, scale)
    h = lambda w: f(w) / (w - pole)
    vals = []
    for k in range(levels):
        e = eps / 2 ** k
        lo = integrate(h, a, pole - e, cfg, scale=scale, singular_power=singular_power)
        hi = integrate(h, pole + e, bc, cfg, scale=scale)
        vals.append(lo + hi)
    table = [vals]
    for j, p in enumerate(range(1, 2 * levels, 2)[: levels - 1]):
        prev = table[-1]
        fac = 2.0 ** p
        table.append([(fac * prev[i + 1] - prev[i]) / (fac - 1) for i in range(len(prev) - 1)])
    return table[-1][0]


def triangle_integral(F: Callable, cfg: QuadConfig = DEFAULT, *, u_only: bool = False, order: int = 48) -> float:
    """Integral over 0 <= y <= x <= 1 of F(x, y).

    With ``u_only=True`` F is a function of u = x - y alone and the integral
    collapses to the single integral of (1 - u) F(u) over [0, 1]. Otherwise a
    tensor Gauss-Legendre rule with y = x r is used, doubling the order until
    two successive estimates agree.
    """
    if u_only:
        val = integrate(lambda u: (1.0 - u) * F(u), 0.0, 1.0, cfg)
        if math.isnan(val):
            raise IntegrandNaNError("u in [0, 1]")
        return val
    prev = None
    n = order
    while True:
        x, w = np.polynomial.legendre.leggauss(n)
        x = 0.5 * (x + 1.0)
        w = 0.5 * w
        X, R = np.meshgrid(x, x, indexing="ij")
        vals = np.asarray(F(X, X * R), dtype=float)
        if np.isnan(vals).any():
            i, j = np.argwhere(np.isnan(vals))[0]
            raise IntegrandNaNError((float(X[i, j]), float(X[i, j] * R[i, j])))
        est = float(np.einsum("i,j,ij->", w * x, w, vals))
        if prev is not None and abs(est - prev) <= max(cfg.abs_tol, cfg.rel_tol * abs(est)):
            return est
        if n >= 768:
            raise QuadratureError("triangle rule did not converge", est, abs(est - (prev or 0.0)))
        prev = est
        n *= 2


def cumulative_integral(g: Callable[[float], float], t_grid, cfg: QuadConfig = DEFAULT) -> np.ndarray:
    """Running integrals from 0 to each t in t_grid."""
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or t.size == 0:
        raise ValueError("t_grid must be a non-empty 1-D array")
    if t[0] < 0 or np.any(np.diff(t) <= 0):
        raise ValueError("t_grid must be strictly increasing and start at t >= 0")
    edges = np.concatenate([[0.0], t])
    pieces = [integrate(g, lo, hi, cfg) if hi > lo else 0.0 for lo, hi in zip(edges[:-1], edges[1:])]
    return np.cumsum(pieces)


def panel_rule(edges, order: int = 8):
    """Gauss-Legendre nodes and weights on every panel [edges[i], edges[i+1]].

    Returns arrays of shape (n_panels, order).
    """
    e = np.asarray(edges, dtype=float)
    x, w = np.polynomial.legendre.leggauss(order)
    half = 0.5 * np.diff(e)[:, None]
    mid = 0.5 * (e[1:] + e[:-1])[:, None]
    return mid + half * x[None, :], half * w[None, :]
