"""
Steady state as a reduced Gibbs state
=====================================

If the qubit equilibrates with its bath, the stationary state is the marginal
of the global Gibbs state. At weak coupling the second-order expansion of that
marginal should agree with the master-equation fixed point; at strong coupling
we diagonalize a qubit plus one auxiliary mode exactly.
"""

# %%
import numpy as np

from ssclab import equilibration as eq
from ssclab import steady, tcl2
from ssclab.spectral import make_bath

print(f"{'T':>5} {'Gibbs v1':>12} {'TCL2 v1':>12} {'v3 shift':>11}")
for T in (0.2, 0.5, 1.0, 2.0):
    b = make_bath(0.01, 5.0, 3.0, T)
    g = eq.perturbative_v1(0.1, 0.1, b)
    d = steady.dynamical_steady_state(tcl2.Composite(0.1, 0.1), b).v[0]
    _, shift = eq.perturbative_v3(0.1, 0.1, b)
    print(f"{T:5.2f} {g:12.4e} {d:12.4e} {shift:11.3e}")

# %%
# Strong coupling: the coherence of the exact marginal falls with temperature
# and vanishes whenever one of the two coupling components is switched off.
T = np.linspace(0.05, 2.0, 6)
for kind in eq.ModelKind:
    for kappa in (0.2, 0.5):
        rows = eq.strong_coupling_sweep(eq.StrongCouplingModel.symmetric(kind, kappa), T)
        print(kind.value, kappa, " ".join(f"{r.coherence:.4f}" for r in rows))

no_dephasing = eq.StrongCouplingModel("qubit-qubit", kappa1=0.5, kappa2=0.0)
print("C with kappa2 = 0:", eq.coherence(eq.gibbs_reduced(no_dephasing, 0.5)))
