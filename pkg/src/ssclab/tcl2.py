"""Second-order time-convolutionless (TCL2) Bloch generators and their integration.

Every generator is assembled from running integrals ("moments") of four
kernels against {1, cos w0 t, sin w0 t}:

    D1     noise kernel, J_eff-weighted cosine transform
    D1vac  the same at T = 0
    D2     dissipation kernel, J-weighted sine transform
    D2eff  J_eff-weighted sine transform

The Bloch vector obeys dv/dt = M(t) v + b(t), with v_i = Tr[sigma_i rho].
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Union

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicSpline
from scipy.linalg import expm

from . import kernels as K
from .quad import panel_rule
from .spectral import BathSpec, WeakCouplingWarning, effective_density

KERNELS = ("D1", "D1vac", "D2", "D2eff")
WEIGHTS = ("one", "cos", "sin")
ONE, COS, SIN = 0, 1, 2
D1, D1VAC, D2, D2EFF = 0, 1, 2, 3


@dataclass(frozen=True)
class Composite:
    """(f1 sz + f2 sx) coupled to B = b + b^dag."""

    f1: float
    f2: float


@dataclass(frozen=True)
class RWAComposite:
    """f1 sz B + f2 (s+ b + s- b^dag)."""

    f1: float
    f2: float


@dataclass(frozen=True)
class SplitTwoBaths:
    """f1 sz on the main bath and f2 sx on an independent second bath (None means an identical copy)."""

    f1: float
    f2: float
    second_bath: BathSpec | None = None


@dataclass(frozen=True)
class CompositePlusDephasing:
    """Composite coupling plus f3 sz on an independent dephasing bath."""

    f1: float
    f2: float
    f3: float
    second_bath: BathSpec | None = None


CouplingScheme = Union[Composite, RWAComposite, SplitTwoBaths, CompositePlusDephasing]


def check_weak_coupling(scheme: CouplingScheme, bath: BathSpec, omega0: float = 1.0, threshold: float = 0.1) -> bool:
    fs = [abs(getattr(scheme, n)) for n in ("f1", "f2", "f3") if hasattr(scheme, n)]
    ok = bath.spectral.lam * max(fs + [0.0]) < threshold * omega0
    if not ok:
        warnings.warn("lam * max|f| is not small compared with omega0; TCL2 may be unreliable",
                      WeakCouplingWarning, stacklevel=2)
    return ok


@dataclass(frozen=True)
class GeneratorSample:
    M: np.ndarray
    b: np.ndarray
    time: float


@dataclass(frozen=True)
class BlochVector:
    v1: float
    v2: float
    v3: float

    def __post_init__(self):
        if self.norm > 1 + 1e-6:
            raise ValueError(f"Bloch vector norm {self.norm} exceeds 1")

    @property
    def norm(self) -> float:
        return math.sqrt(self.v1 ** 2 + self.v2 ** 2 + self.v3 ** 2)

    def as_array(self) -> np.ndarray:
        return np.array([self.v1, self.v2, self.v3])


def random_bloch_vector(rng: np.random.Generator) -> BlochVector:
    """Uniform draw from the Bloch ball."""
    d = rng.normal(size=3)
    d /= np.linalg.norm(d)
    return BlochVector(*(d * rng.random() ** (1 / 3)))


@dataclass(frozen=True)
class KernelMoments:
    """Running integrals, shape (4 kernels, 3 weights, n times)."""

    times: np.ndarray
    values: np.ndarray

    def at(self, i: int) -> np.ndarray:
        return self.values[:, :, i]


def _panel_edges(t_max: float, bath: BathSpec, omega0: float, extra=None) -> np.ndarray:
    fast = max(bath.spectral.cutoff, 2 * math.pi * bath.temperature, omega0)
    h_coarse = 2 * math.pi / omega0 / 50
    h = min(0.05 / fast, h_coarse)
    edges = [0.0]
    while edges[-1] < t_max:
        edges.append(edges[-1] + h)
        h = min(h * 1.15, h_coarse)
    edges[-1] = t_max
    pts = np.asarray(edges)
    if extra is not None:
        pts = np.union1d(pts, np.asarray(extra, dtype=float))
    # drop near-duplicates produced by the union
    keep = np.concatenate([[True], np.diff(pts) > 1e-12 * max(1.0, t_max)])
    return pts[keep]


def kernel_moments(bath: BathSpec, omega0: float, t_grid, order: int = 8) -> KernelMoments:
    """Running integrals of the four kernels against {1, cos w0 t, sin w0 t} at each time in t_grid."""
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or np.any(t < 0) or np.any(np.diff(t) <= 0):
        raise ValueError("t_grid must be strictly increasing and non-negative")
    t_max = float(t[-1]) if t.size else 0.0
    if t_max == 0:
        return KernelMoments(t, np.zeros((4, 3, t.size)))
    edges = _panel_edges(t_max, bath, omega0, extra=t)
    nodes, wts = panel_rule(edges, order)
    th = K.thermal_transform(nodes, bath)
    vac = K.vacuum_transform(nodes, bath.spectral)
    kern = np.stack([th.real, vac.real, vac.imag, th.imag])
    trig = np.stack([np.ones_like(nodes), np.cos(omega0 * nodes), np.sin(omega0 * nodes)])
    panels = np.einsum("kpn,wpn,pn->kwp", kern, trig, wts)
    cum = np.concatenate([np.zeros((4, 3, 1)), np.cumsum(panels, axis=2)], axis=2)
    idx = np.searchsorted(edges, t)
    return KernelMoments(t, cum[:, :, idx])


def gamma_table(bath: BathSpec, omega0: float, t_grid) -> dict:
    """The six model-1 rates gamma_{1,2}^{(c,s)}(t) = int_0^t 2 D_{1,2} {1, cos, sin}."""
    m = kernel_moments(bath, omega0, t_grid).values
    return {
        "gamma1": 2 * m[D1, ONE], "gamma1c": 2 * m[D1, COS], "gamma1s": 2 * m[D1, SIN],
        "gamma2": 2 * m[D2, ONE], "gamma2c": 2 * m[D2, COS], "gamma2s": 2 * m[D2, SIN],
    }


# generator assembly from moments; m has shape (4, 3, ...) and broadcasts over trailing axes

def _rotation(omega0, shape):
    M = np.zeros(shape + (3, 3))
    M[..., 0, 1] = -omega0
    M[..., 1, 0] = omega0
    return M


def assemble_model1(m: np.ndarray, f1: float, f2: float, omega0: float):
    g1, g1c, g1s = 2 * m[D1]
    g2, g2c, g2s = 2 * m[D2]
    shape = np.shape(g1)
    M = _rotation(omega0, shape)
    M[..., 0, 0] = -f1 ** 2 * g1
    M[..., 0, 2] = f1 * f2 * g1c
    M[..., 1, 0] += f2 ** 2 * g1s
    M[..., 1, 1] = -f1 ** 2 * g1 - f2 ** 2 * g1c
    M[..., 1, 2] = f1 * f2 * g1s
    M[..., 2, 0] = f1 * f2 * g1
    M[..., 2, 2] = -f2 ** 2 * g1c
    b = np.stack([f1 * f2 * g2s, f1 * f2 * (g2 - g2c), -f2 ** 2 * g2s], axis=-1)
    return M, b


def assemble_model2(m: np.ndarray, f1: float, f2: float, omega0: float):
    """RWA generator. With S = d + d~ and R = d~ - d for both kernel pairs:
    S1 = D1, S2 = D2eff, R1 = D1vac, R2 = D2."""
    S1, S2, R1, R2 = m[D1], m[D2EFF], m[D1VAC], m[D2]
    shape = np.shape(S1[ONE])
    G33 = -f2 ** 2 * (S1[COS] + S2[SIN])
    a33 = 2 * f1 ** 2 * S1[ONE]
    G = _rotation(omega0, shape)
    shift = 0.5 * f2 ** 2 * (S2[COS] - S1[SIN])
    G[..., 0, 1] += shift
    G[..., 1, 0] -= shift
    G[..., 0, 0] = G[..., 1, 1] = 0.5 * (G33 - 2 * a33)
    G[..., 0, 2] = f1 * f2 * (S1[COS] + S2[SIN])
    G[..., 1, 2] = -f1 * f2 * (S2[COS] - S1[SIN])
    G[..., 2, 0] = f1 * f2 * S1[ONE]
    G[..., 2, 1] = f1 * f2 * S2[ONE]
    G[..., 2, 2] = G33
    b = np.stack([
        f1 * f2 * (R1[ONE] + R1[COS] + R2[SIN]),
        f1 * f2 * (R2[ONE] - R2[COS] + R1[SIN]),
        -f2 ** 2 * (R1[COS] + R2[SIN]),
    ], axis=-1)
    return G, b


def assemble_dephasing(m: np.ndarray, f: float, omega0: float):
    """Pure dephasing f sz B: only the transverse decay -f^2 gamma1."""
    g1 = 2 * m[D1, ONE]
    M = _rotation(omega0, np.shape(g1))
    M[..., 0, 0] = M[..., 1, 1] = -f ** 2 * g1
    return M, np.zeros(np.shape(g1) + (3,))


def generator_table(scheme: CouplingScheme, bath: BathSpec, t_grid, omega0: float = 1.0):
    """M(t) and b(t) on a time grid, shapes (n, 3, 3) and (n, 3)."""
    t = np.asarray(t_grid, dtype=float)
    m = np.moveaxis(kernel_moments(bath, omega0, t).values, 2, -1)
    return assemble_from_moments(scheme, m, omega0, lambda b2: np.moveaxis(kernel_moments(b2, omega0, t).values, 2, -1)
                                 if b2 is not bath else m)


def assemble_from_moments(scheme: CouplingScheme, m, omega0: float, second_moments=None):
    """Dispatch on the coupling scheme. ``second_moments(bath2)`` supplies moments of the second bath."""
    if isinstance(scheme, Composite):
        return assemble_model1(m, scheme.f1, scheme.f2, omega0)
    if isinstance(scheme, RWAComposite):
        return assemble_model2(m, scheme.f1, scheme.f2, omega0)
    if isinstance(scheme, SplitTwoBaths):
        m2 = second_moments(scheme.second_bath) if scheme.second_bath is not None else m
        Md, _ = assemble_dephasing(m, scheme.f1, omega0)
        Ms, bs = assemble_model1(m2, 0.0, scheme.f2, omega0)
        return Md + Ms - _rotation(omega0, np.shape(bs)[:-1]), bs
    if isinstance(scheme, CompositePlusDephasing):
        M, b = assemble_model1(m, scheme.f1, scheme.f2, omega0)
        if scheme.f3 != 0:
            m2 = second_moments(scheme.second_bath) if scheme.second_bath is not None else m
            extra = scheme.f3 ** 2 * 2 * m2[D1, ONE]
            M = M.copy()
            M[..., 0, 0] -= extra
            M[..., 1, 1] -= extra
        return M, b
    raise TypeError(f"unknown coupling scheme {scheme!r}")


def _sample(scheme, bath, t, omega0, kind):
    if not isinstance(scheme, kind):
        raise TypeError(f"expected {kind.__name__}, got {type(scheme).__name__}")
    M, b = generator_table(scheme, bath, [t], omega0)
    return GeneratorSample(M[0], b[0], float(t))


def generator_model1(scheme: Composite, bath: BathSpec, t: float, omega0: float = 1.0) -> GeneratorSample:
    return _sample(scheme, bath, t, omega0, Composite)


def generator_model2(scheme: RWAComposite, bath: BathSpec, t: float, omega0: float = 1.0) -> GeneratorSample:
    return _sample(scheme, bath, t, omega0, RWAComposite)


def generator_split(scheme: SplitTwoBaths, bath: BathSpec, t: float, omega0: float = 1.0) -> GeneratorSample:
    return _sample(scheme, bath, t, omega0, SplitTwoBaths)


def generator_with_dephasing(scheme: CompositePlusDephasing, bath: BathSpec, t: float,
                             omega0: float = 1.0) -> GeneratorSample:
    return _sample(scheme, bath, t, omega0, CompositePlusDephasing)


# Kossakowski / Lamb-shift tables in the operator basis (s+, s-, sz)

@dataclass(frozen=True)
class CoeffTable:
    times: np.ndarray
    a: np.ndarray  # (n, 3, 3) complex
    h: np.ndarray  # (n, 3, 3) complex


def _half_angle(k, sign):
    """Integrals of k e^{sign i w0 t/2} {cos, sin}(w0 t/2) from the {1, cos, sin} moments."""
    c = 0.5 * (k[ONE] + k[COS]) + sign * 0.5j * k[SIN]
    s = 0.5 * k[SIN] + sign * 0.5j * (k[ONE] - k[COS])
    return c, s


def _fill(n, a11, a22, a33, a12, a13, a23, h11, h22, h13, h23):
    a = np.zeros((n, 3, 3), complex)
    h = np.zeros((n, 3, 3), complex)
    a[:, 0, 0], a[:, 1, 1], a[:, 2, 2] = a11, a22, a33
    a[:, 0, 1], a[:, 1, 0] = a12, np.conj(a12)
    a[:, 0, 2], a[:, 2, 0] = a13, np.conj(a13)
    a[:, 1, 2], a[:, 2, 1] = a23, np.conj(a23)
    h[:, 0, 0], h[:, 1, 1] = h11, h22
    h[:, 0, 2], h[:, 2, 0] = h13, np.conj(h13)
    h[:, 1, 2], h[:, 2, 1] = h23, np.conj(h23)
    return a, h


def coefficient_tables(scheme: CouplingScheme, bath: BathSpec, t_grid, omega0: float = 1.0) -> CoeffTable:
    """Kossakowski matrix a(t) and Lamb-shift matrix h(t) in the basis (s+, s-, sz/sqrt2)."""
    t = np.asarray(t_grid, dtype=float)
    m = kernel_moments(bath, omega0, t).values
    r2 = math.sqrt(2.0)
    f1, f2 = scheme.f1, scheme.f2
    if isinstance(scheme, Composite):
        I1, I1c, I1s = m[D1]
        I2, I2c, I2s = m[D2]
        # integrals of <B B(-t)> against 1, e^{-i w0 t}, e^{+i w0 t}
        c0 = 0.5 * (I1 - 1j * I2)
        cm = 0.5 * ((I1c - I2s) - 1j * (I1s + I2c))
        cp = 0.5 * ((I1c + I2s) + 1j * (I1s - I2c))
        a11 = 2 * f2 ** 2 * cm.real
        a22 = 2 * f2 ** 2 * cp.real
        a33 = 4 * f1 ** 2 * c0.real
        a12 = f2 ** 2 * (cm + np.conj(cp))
        a13 = r2 * f1 * f2 * (cm + np.conj(c0))
        a23 = r2 * f1 * f2 * (cp + np.conj(c0))
        h11 = f2 ** 2 * cp.imag
        h22 = f2 ** 2 * cm.imag
        h13 = r2 * f1 * f2 * (c0 - np.conj(cp)) / 2j
        h23 = r2 * f1 * f2 * (c0 - np.conj(cm)) / 2j
        a, h = _fill(t.size, a11, a22, a33, a12, a13, a23, h11, h22, h13, h23)
    elif isinstance(scheme, RWAComposite):
        d1 = 0.5 * (m[D1] - m[D1VAC])
        dt1 = 0.5 * (m[D1] + m[D1VAC])
        d2 = 0.5 * (m[D2EFF] - m[D2])
        dt2 = 0.5 * (m[D2EFF] + m[D2])
        a11 = f2 ** 2 * (d1[COS] + d2[SIN])
        a22 = f2 ** 2 * (dt1[COS] + dt2[SIN])
        a33 = 2 * f1 ** 2 * (d1[ONE] + dt1[ONE])
        c_d1, s_d1 = _half_angle(d1, +1)
        c_d2, s_d2 = _half_angle(d2, +1)
        c_t1m, s_t1m = _half_angle(dt1, -1)
        c_t2m, s_t2m = _half_angle(dt2, -1)
        c_d1m, s_d1m = _half_angle(d1, -1)
        c_d2m, s_d2m = _half_angle(d2, -1)
        c_t1p, s_t1p = _half_angle(dt1, +1)
        c_t2p, s_t2p = _half_angle(dt2, +1)
        a13 = r2 * f1 * f2 * (c_d1m + s_d2m)
        a23 = r2 * f1 * f2 * (c_t1p + s_t2p)
        h11 = 0.5 * f2 ** 2 * (dt1[SIN] - dt2[COS])
        h22 = -0.5 * f2 ** 2 * (d1[SIN] - d2[COS])
        h13 = r2 * f1 * f2 * 0.5 * (s_t1m - c_t2m)
        h23 = r2 * f1 * f2 * 0.5 * (-s_d1 + c_d2)
        a, h = _fill(t.size, a11, a22, a33, np.zeros(t.size), a13, a23, h11, h22, h13, h23)
    else:
        raise TypeError("coefficient tables are defined for Composite and RWAComposite only")
    return CoeffTable(t, a, h)


_SP = np.array([[0, 1], [0, 0]], complex)
_SZ = np.diag([1.0, -1.0]).astype(complex)
_PAULI = (np.array([[0, 1], [1, 0]], complex), np.array([[0, -1j], [1j, 0]]), _SZ)
_BASIS = (_SP, _SP.T.copy(), _SZ)


def superoperator_to_bloch(L) -> tuple[np.ndarray, np.ndarray]:
    """Project a linear map on 2x2 matrices onto (M, b) for the Bloch vector."""
    M = np.array([[0.5 * np.trace(_PAULI[i] @ L(_PAULI[j])).real for j in range(3)] for i in range(3)])
    b = np.array([0.5 * np.trace(_PAULI[i] @ L(np.eye(2))).real for i in range(3)])
    return M, b


def generator_from_coefficients(a: np.ndarray, h: np.ndarray, omega0: float = 1.0):
    """(M, b) of the GKSL-form generator with Kossakowski a and Lamb-shift h (single time)."""
    scale = np.diag([1.0, 1.0, 1.0 / math.sqrt(2.0)])
    A = scale @ a @ scale
    Hm = scale @ h @ scale
    F = _BASIS
    H = 0.5 * omega0 * _SZ + sum(Hm[i, j] * F[i] @ F[j].conj().T for i in range(3) for j in range(3))

    def L(r):
        out = -1j * (H @ r - r @ H)
        for i in range(3):
            for j in range(3):
                Fd = F[j].conj().T
                out = out + A[i, j] * (F[i] @ r @ Fd - 0.5 * (Fd @ F[i] @ r + r @ Fd @ F[i]))
        return out

    return superoperator_to_bloch(L)


# integration

@dataclass
class BlochTrajectory:
    times: np.ndarray
    v: np.ndarray
    converged: bool
    table_window: float
    final_generator: tuple = field(repr=False, default=None)
    max_norm: float = 0.0

    @property
    def terminal(self) -> np.ndarray:
        return self.v[-1]


def relaxation_rate(scheme: CouplingScheme, bath: BathSpec, omega0: float = 1.0) -> float:
    """Coherence relaxation rate pi f^2 J_eff(w0) of the slowest transverse mode."""
    if isinstance(scheme, SplitTwoBaths):
        b = scheme.second_bath or bath
        f = scheme.f2
    else:
        b, f = bath, scheme.f2
    if f == 0:
        f = scheme.f1
    return math.pi * f * f * effective_density(omega0, b)


def default_horizon(scheme: CouplingScheme, bath: BathSpec, omega0: float = 1.0) -> float:
    rate = relaxation_rate(scheme, bath, omega0)
    return 20.0 / rate if rate > 0 else 100 * 2 * math.pi / omega0


def _affine_step(M, b, v, dt):
    """Exact v(t + dt) for constant M, b via the augmented 4x4 exponential."""
    A = np.zeros((4, 4))
    A[:3, :3] = M
    A[:3, 3] = b
    E = expm(A * dt)
    return E[:3, :3] @ v + E[:3, 3]


def integrate_bloch(scheme: CouplingScheme, bath: BathSpec, v0, t_span=None, t_eval=None, omega0: float = 1.0,
                    memory_time: float | None = None, rtol: float = 1e-9, atol: float = 1e-12) -> BlochTrajectory:
    """Integrate dv/dt = M(t) v + b(t) from v0.

    Inside the memory window [0, memory_time] the generator tables are splined
    and fed to an adaptive 8th-order Runge-Kutta integrator. Beyond it the
    coefficients have settled and the affine equation with the window-end
    generator is propagated exactly with a matrix exponential.
    """
    v0 = np.asarray(v0.as_array() if isinstance(v0, BlochVector) else v0, dtype=float)
    if np.linalg.norm(v0) > 1 + 1e-12:
        raise ValueError("initial Bloch vector must satisfy |v0| <= 1")
    t0, t1 = (0.0, default_horizon(scheme, bath, omega0)) if t_span is None else map(float, t_span)
    if t0 != 0:
        raise ValueError("trajectories start at t = 0 (the TCL2 coefficients vanish there)")
    period = 2 * math.pi / omega0
    window = min(t1, 100 * period if memory_time is None else memory_time)
    if t_eval is None:
        t_eval = np.linspace(0.0, t1, 2001)
    t_eval = np.asarray(t_eval, dtype=float)

    step = period / 50
    grid = np.linspace(0.0, window, max(2, int(math.ceil(window / step)) + 1))
    fine = _panel_edges(window, bath, omega0, extra=grid)
    Ms, bs = generator_table(scheme, bath, fine, omega0)
    spl = CubicSpline(fine, np.concatenate([Ms.reshape(len(fine), 9), bs], axis=1), axis=0)

    def rhs(t, v):
        c = spl(t)
        return c[:9].reshape(3, 3) @ v + c[9:]

    inside = t_eval[t_eval <= window]
    sol = solve_ivp(rhs, (0.0, window), v0, method="DOP853", rtol=rtol, atol=atol, dense_output=True)
    if not sol.success:
        raise ArithmeticError(f"Bloch integration failed: {sol.message}")
    out = [sol.sol(t) for t in inside] if inside.size else []
    v_win = sol.y[:, -1]
    M_end, b_end = Ms[-1], bs[-1]
    outside = t_eval[t_eval > window]
    for t in outside:
        out.append(_affine_step(M_end, b_end, v_win, t - window))
    v = np.array(out).reshape(-1, 3)
    terminal = v[-1] if v.size else v_win
    if t1 > window:
        end = _affine_step(M_end, b_end, v_win, t1 - window)
        before = _affine_step(M_end, b_end, v_win, max(t1 - period - window, 0.0))
    else:
        end, before = sol.sol(t1), sol.sol(max(t1 - period, 0.0))
    change = np.max(np.abs(end - before)) / max(np.max(np.abs(end)), 1e-300)
    if not np.allclose(terminal, end) and t_eval.size and t_eval[-1] == t1:
        terminal = end
    norms = np.linalg.norm(v, axis=1) if v.size else np.array([0.0])
    return BlochTrajectory(t_eval, v, bool(change < 1e-8), window, (M_end, b_end), float(norms.max()))


def fixed_point(M: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve M v + b = 0."""
    return np.linalg.solve(M, -b)
