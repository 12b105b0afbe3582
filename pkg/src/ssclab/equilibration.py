"""Equilibrium (Gibbs-state) route to stationary coherences.

Two approaches live here:

* a second-order expansion of the reduced Gibbs state Tr_E[exp(-beta H)]/Z in
  the interaction (f1 sigma_z + f2 sigma_x) x B, driven by the imaginary-time
  bath correlation C(u) = <B(-i beta u) B>;
* exact reduced Gibbs states of a qubit coupled strongly to a single auxiliary
  mode (harmonic oscillator or second qubit), by dense diagonalization.

Qubit conventions: H_S = omega0/2 sigma_z, basis index 0 is the excited state,
v = (Tr rho sigma_x, Tr rho sigma_y, Tr rho sigma_z).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import linalg

from . import quad as q
from .kernels import matsubara_correlation
from .spectral import BathSpec
from .steady import deviation_angle
from .tcl2 import Composite, check_weak_coupling

FORMS = ("corrected", "flipped-sinh")


class TruncationError(ArithmeticError):
    """Fock-space truncation did not converge before the size cap."""

    def __init__(self, n: int, c_n: float, c_2n: float):
        super().__init__(f"coherence not converged in Fock cutoff: C({n})={c_n!r}, C({2 * n})={c_2n!r}")
        self.n = n
        self.values = (c_n, c_2n)


@dataclass(frozen=True)
class HermitianOperator:
    entries: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 2:
            raise ValueError("need a square matrix of dimension >= 2")
        if not np.allclose(m, m.conj().T, rtol=0, atol=1e-12):
            raise ValueError("matrix is not Hermitian within 1e-12")
        object.__setattr__(self, "entries", m)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def eigvalsh(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.entries)


@dataclass(frozen=True)
class ZetaIntegrals:
    zeta: float
    zeta_c: float
    zeta_s: float
    b_norm: float


def _require_temperature(bath: BathSpec) -> float:
    if bath.temperature <= 0:
        raise ValueError("the Gibbs expansion needs T > 0 (beta is infinite at T = 0)")
    return 1.0 / bath.temperature


def _check_form(form: str):
    if form not in FORMS:
        raise ValueError(f"form must be one of {FORMS}, got {form!r}")


def zeta_from_correlation(corr, beta: float, omega0: float = 1.0, f1: float = 0.0, f2: float = 0.0,
                          cfg: q.QuadConfig = q.DEFAULT) -> ZetaIntegrals:
    """Triangle integrals of corr(x - y) weighted by 1, cosh and sinh(beta omega0 (x - y)).

    The integrands depend on u = x - y only, so each reduces to the integral of
    (1 - u) corr(u) w(u) over [0, 1]. ``b_norm`` = 2 (f1^2 zeta + f2^2 zeta_c).
    """
    a = beta * omega0
    z = q.triangle_integral(corr, cfg, u_only=True)
    zc = q.triangle_integral(lambda u: corr(u) * math.cosh(a * u), cfg, u_only=True)
    zs = q.triangle_integral(lambda u: corr(u) * math.sinh(a * u), cfg, u_only=True)
    return ZetaIntegrals(z, zc, zs, 2.0 * (f1 ** 2 * z + f2 ** 2 * zc))


def zeta_integrals(bath: BathSpec, omega0: float = 1.0, f1: float = 0.0, f2: float = 0.0,
                   cfg: q.QuadConfig = q.DEFAULT, method: str = "closed") -> ZetaIntegrals:
    beta = _require_temperature(bath)
    return zeta_from_correlation(lambda u: matsubara_correlation(u, bath, method=method), beta, omega0, f1, f2, cfg)


def _bracket(x, y, a: float, form: str):
    # t cosh X - sinh X rewritten as ((t-1) e^X + (t+1) e^-X)/2 to keep large X tame
    t = math.tanh(a / 2)
    X, Y = a * x, a * y
    if form == "corrected":
        g = lambda z: 0.5 * ((t - 1.0) * np.exp(z) + (t + 1.0) * np.exp(-z))
        return g(X) - g(Y)
    return t * (np.cosh(X) - np.cosh(Y)) + np.sinh(X) - np.sinh(Y)


def second_order_v1(corr, f1: float, f2: float, beta: float, omega0: float = 1.0, *, form: str = "corrected",
                    cfg: q.QuadConfig = q.DEFAULT) -> float:
    """beta^2 f1 f2 times the triangle integral of corr(x - y) times the cosh/sinh bracket.

    ``corr`` must accept arrays of u in [0, 1].
    """
    _check_form(form)
    if f1 * f2 == 0:
        return 0.0
    a = beta * omega0
    return beta ** 2 * f1 * f2 * q.triangle_integral(lambda x, y: corr(x - y) * _bracket(x, y, a, form), cfg)


def perturbative_v1(f1: float, f2: float, bath: BathSpec, omega0: float = 1.0, *, form: str = "corrected",
                    cfg: q.QuadConfig = q.DEFAULT) -> float:
    """Second-order <sigma_x> of the reduced Gibbs state for the Ohmic-family bath.

    ``form='corrected'`` uses the bracket obtained by expanding exp(-beta H)
    directly; ``'flipped-sinh'`` flips the sign of its sinh part, for comparison only.
    """
    _check_form(form)
    beta = _require_temperature(bath)
    check_weak_coupling(Composite(f1, f2), bath, omega0)
    corr = lambda u: matsubara_correlation(np.clip(u, 0.0, 1.0), bath, method="closed")
    return second_order_v1(corr, f1, f2, beta, omega0, form=form, cfg=cfg)


def perturbative_v2() -> float:
    """<sigma_y> of the reduced Gibbs state: zero at every order for a real Hamiltonian."""
    return 0.0


def perturbative_v3(f1: float, f2: float, bath: BathSpec, omega0: float = 1.0, *, form: str = "corrected",
                    cfg: q.QuadConfig = q.DEFAULT, zeta: ZetaIntegrals | None = None) -> tuple[float, float]:
    """Second-order population imbalance and its departure from -tanh(beta omega0 / 2).

    ``form='corrected'``: -t + beta^2 f2^2 (1 - t^2) zeta_s, with t = tanh(beta omega0/2).
    ``form='flipped-sinh'``: -t [1 - beta^2 (f1^2 zeta - f2^2 zeta_c)] + beta^2 f2^2 zeta_s.
    """
    _check_form(form)
    beta = _require_temperature(bath)
    t = math.tanh(beta * omega0 / 2)
    if f1 == 0 and f2 == 0:
        return -t, 0.0
    z = zeta or zeta_integrals(bath, omega0, f1, f2, cfg)
    return second_order_v3(z, f1, f2, beta, omega0, form=form)


def second_order_v3(z: ZetaIntegrals, f1: float, f2: float, beta: float, omega0: float = 1.0, *,
                    form: str = "corrected") -> tuple[float, float]:
    _check_form(form)
    t = math.tanh(beta * omega0 / 2)
    if form == "corrected":
        v3 = -t + beta ** 2 * f2 ** 2 * (1.0 - t * t) * z.zeta_s
    else:
        v3 = -t * (1.0 - beta ** 2 * (f1 ** 2 * z.zeta - f2 ** 2 * z.zeta_c)) + beta ** 2 * f2 ** 2 * z.zeta_s
    return v3, v3 + t


class ModelKind(str, Enum):
    QUBIT_OSCILLATOR = "qubit-oscillator"
    QUBIT_QUBIT = "qubit-qubit"


@dataclass(frozen=True)
class StrongCouplingModel:
    kind: ModelKind
    omega0: float = 1.0
    omega1: float = 1.0
    kappa1: float = 0.2
    kappa2: float = 0.2
    fock_cutoff: int = 40

    def __post_init__(self):
        object.__setattr__(self, "kind", ModelKind(self.kind))
        if not (self.omega0 > 0 and self.omega1 > 0):
            raise ValueError("frequencies must be positive")
        if self.kind is ModelKind.QUBIT_OSCILLATOR and self.fock_cutoff < 2:
            raise ValueError("fock_cutoff must be >= 2")

    @classmethod
    def symmetric(cls, kind, kappa: float, omega0: float = 1.0, **kw) -> "StrongCouplingModel":
        """kappa1 = kappa2 = kappa and omega1 = omega0."""
        return cls(kind, omega0, omega0, kappa, kappa, **kw)

    def hamiltonian(self, n: int | None = None) -> np.ndarray:
        sz = np.diag([1.0, -1.0])
        sx = np.array([[0.0, 1.0], [1.0, 0.0]])
        if self.kind is ModelKind.QUBIT_OSCILLATOR:
            n = n or self.fock_cutoff
            lower = np.diag(np.sqrt(np.arange(1.0, n)), 1)
            aux_h = self.omega1 * np.diag(np.arange(float(n)))
            aux_x = lower + lower.T
        else:
            n = 2
            aux_h = 0.5 * self.omega1 * sz
            aux_x = sx
        one = np.eye(n)
        return (0.5 * self.omega0 * np.kron(sz, one) + np.kron(np.eye(2), aux_h)
                + np.kron(self.kappa1 * sx + self.kappa2 * sz, aux_x))


def _reduced(H: np.ndarray, T: float) -> np.ndarray:
    E, V = linalg.eigh(H)
    w = np.exp(-(E - E[0]) / T)
    w /= w.sum()
    rho = (V * w) @ V.conj().T
    n = H.shape[0] // 2
    r = np.einsum("iaja->ij", rho.reshape(2, n, 2, n))
    return 0.5 * (r + r.conj().T)


def coherence(rho) -> float:
    m = rho.entries if isinstance(rho, HermitianOperator) else np.asarray(rho)
    return 2.0 * abs(m[0, 1])


def gibbs_reduced(model: StrongCouplingModel, T: float, *, tol: float = 1e-7, max_cutoff: int = 640) -> HermitianOperator:
    """Qubit marginal of exp(-H/T)/Z for the qubit + auxiliary pair.

    For the oscillator the Fock cutoff is doubled from ``model.fock_cutoff``
    until the coherence changes by less than ``tol``.
    """
    if not T > 0:
        raise ValueError("T must be positive")
    if model.kind is ModelKind.QUBIT_QUBIT:
        return HermitianOperator(_reduced(model.hamiltonian(), T))
    n = model.fock_cutoff
    r = _reduced(model.hamiltonian(n), T)
    while True:
        r2 = _reduced(model.hamiltonian(2 * n), T)
        c, c2 = coherence(r), coherence(r2)
        if abs(c - c2) < tol:
            return HermitianOperator(r)
        if 2 * n >= max_cutoff:
            raise TruncationError(n, c, c2)
        n, r = 2 * n, r2


@dataclass(frozen=True)
class StrongCouplingRow:
    temperature: float
    coherence: float
    v3: float
    theta: float


def strong_coupling_sweep(model: StrongCouplingModel, T_grid, **kw) -> list[StrongCouplingRow]:
    rows = []
    for T in np.asarray(T_grid, dtype=float):
        rho = gibbs_reduced(model, float(T), **kw).entries
        c = coherence(rho)
        v3 = float((rho[0, 0] - rho[1, 1]).real)
        rows.append(StrongCouplingRow(float(T), c, v3, deviation_angle(c, v3)))
    return rows
