"""
Peak steady-state coherence against temperature
================================================

For each Ohmicity we optimize the transverse coupling f2 at fixed f1 and
record the largest reachable coherence C_max / f1 as the bath warms up.
"""

# %%
import numpy as np
from scipy import optimize

from ssclab import steady
from ssclab.spectral import make_bath, resonance_cutoff

T = np.linspace(0.1, 2.0, 77)
curves = {s: steady.temperature_sweep(1, make_bath(0.01, 5.0, s, 0.5), T) for s in (0.5, 1.0, 3.0)}

# %%
# Rows are (T, C_max/f1, v3, theta). A super-Ohmic bath loses coherence
# steadily; the Ohmic one shows a spike where the cutoff Omega = 5 crosses
# the resonance curve.
print(f"{'T':>6} " + " ".join(f"s={s:<8}" for s in curves))
for i in range(0, T.size, 8):
    print(f"{T[i]:6.3f} " + " ".join(f"{curves[s][i, 1]:10.5f}" for s in curves))

t_res = optimize.brentq(lambda t: resonance_cutoff(t) - 5.0, 0.1, 3.0)
t_peak = T[np.argmax(curves[1.0][:, 1])]
print(f"\nresonance curve hits Omega=5 at T={t_res:.4f}; Ohmic peak on this grid at T={t_peak:.4f}")

# %%
# Optional figure.
try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    plt = None
if plt is not None:
    fig, ax = plt.subplots(figsize=(5, 3.5))
    for s, rows in curves.items():
        ax.plot(rows[:, 0], rows[:, 1], label=f"s = {s}")
    ax.axvline(t_res, color="0.6", ls=":")
    ax.set_xlabel("T / omega0")
    ax.set_ylabel("C_max / f1")
    ax.set_ylim(0, 0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig("coherence_vs_temperature.png", dpi=120)
    print("wrote coherence_vs_temperature.png")
