"""Independent reference implementations used by the tests.

Nothing here imports the package's assembly code: generators are rebuilt from
operators and correlation functions, Gibbs states from dense diagonalization.
"""

import numpy as np
from scipy import integrate, linalg

SX = np.array([[0, 1], [1, 0]], complex)
SY = np.array([[0, -1j], [1j, 0]])
SZ = np.diag([1.0, -1.0]).astype(complex)
SP = np.array([[0, 1], [0, 0]], complex)
SM = SP.T.copy()
PAULI = (SX, SY, SZ)


def bloch_projection(L):
    M = np.array([[0.5 * np.trace(PAULI[i] @ L(PAULI[j])).real for j in range(3)] for i in range(3)])
    b = np.array([0.5 * np.trace(PAULI[i] @ L(np.eye(2))).real for i in range(3)])
    return M, b


def time_moment(kernel, t, phase, omega0=1.0):
    """int_0^t kernel(tau) e^{i phase omega0 tau} d tau, by adaptive quadrature."""
    re = integrate.quad(lambda x: kernel(x) * np.cos(phase * omega0 * x), 0, t, limit=800, epsabs=1e-14, epsrel=1e-12)[0]
    im = integrate.quad(lambda x: kernel(x) * np.sin(phase * omega0 * x), 0, t, limit=800, epsabs=1e-14, epsrel=1e-12)[0]
    return re + 1j * im


def tcl2_generator(ops, phases, corr, bar, t, omega0=1.0):
    """Second-order time-convolutionless generator projected onto the Bloch vector.

    H_int = sum_j A_j E_j with A_j(-tau) = A_j e^{i phases[j] omega0 tau};
    corr[(j, k)] is a list of (coefficient, real kernel) with
    <E_j E_k(-tau)> = sum coefficient * kernel(tau); E_j^dag = E_{bar[j]}.
    """
    n = len(ops)

    def cint(j, k, conj):
        terms = corr[(bar[j], bar[k])] if conj else corr[(j, k)]
        return sum((np.conj(c) if conj else c) * time_moment(K, t, phases[k], omega0) for c, K in terms)

    X = [[cint(j, k, False) * ops[k] for k in range(n)] for j in range(n)]
    Y = [[cint(j, k, True) * ops[k] for k in range(n)] for j in range(n)]
    H = 0.5 * omega0 * SZ

    def L(r):
        out = -1j * (H @ r - r @ H)
        for j in range(n):
            for k in range(n):
                out = out - (ops[j] @ X[j][k] @ r - X[j][k] @ r @ ops[j])
                out = out + (ops[j] @ r @ Y[j][k] - r @ Y[j][k] @ ops[j])
        return out

    return bloch_projection(L)


def composite_generator(f1, f2, D1, D2, t, omega0=1.0):
    """(f1 sz + f2 sx) B with <B B(-tau)> = (D1 - i D2)/2."""
    ops = [f1 * SZ, f2 * SP, f2 * SM]
    c = [(0.5, D1), (-0.5j, D2)]
    corr = {(j, k): c for j in range(3) for k in range(3)}
    return tcl2_generator(ops, [0, -1, 1], corr, [0, 1, 2], t, omega0)


def rwa_generator(f1, f2, d1, d2, dt1, dt2, t, omega0=1.0):
    """f1 sz B + f2 (s+ b + s- b^dag) with B = b + b^dag and the four RWA kernels."""
    D1 = lambda x: d1(x) + dt1(x)
    D2 = lambda x: dt2(x) - d2(x)
    plus = [(0.5, d1), (0.5j, d2)]     # <b^dag b(-tau)>-type terms
    minus = [(0.5, dt1), (-0.5j, dt2)]  # <b b^dag(-tau)>-type terms
    corr = {
        (0, 0): [(0.5, D1), (-0.5j, D2)], (0, 1): plus, (0, 2): minus,
        (1, 0): minus, (1, 1): [], (1, 2): minus,
        (2, 0): plus, (2, 1): plus, (2, 2): [],
    }
    ops = [f1 * SZ, f2 * SP, f2 * SM]
    return tcl2_generator(ops, [0, -1, 1], corr, [0, 2, 1], t, omega0)


def reduced_gibbs(H, T, aux_dim):
    E, V = linalg.eigh(H)
    w = np.exp(-(E - E[0]) / T)
    rho = (V * (w / w.sum())) @ V.conj().T
    return np.einsum("iaja->ij", rho.reshape(2, aux_dim, 2, aux_dim))


def qubit_mode_gibbs(f1, f2, g, omega0, omega_b, T, n_fock=40):
    """Reduced state of H = omega0/2 sz + omega_b a^dag a + g (f1 sz + f2 sx)(a + a^dag)."""
    lower = np.diag(np.sqrt(np.arange(1.0, n_fock)), 1)
    x = lower + lower.T
    H = (0.5 * omega0 * np.kron(SZ.real, np.eye(n_fock)) + omega_b * np.kron(np.eye(2), lower.T @ lower)
         + g * np.kron(f1 * SZ.real + f2 * SX.real, x))
    return reduced_gibbs(H, T, n_fock)


def single_mode_matsubara(g, omega_b, T):
    """<B(-i beta u) B> for B = g (a + a^dag) at temperature T, as a function of u."""
    n = 1.0 / np.expm1(omega_b / T)
    return lambda u: g * g * (n * np.exp(omega_b * np.asarray(u) / T) + (1 + n) * np.exp(-omega_b * np.asarray(u) / T))
