"""
When steady-state coherence vanishes, and when it survives
==========================================================

Splitting the two coupling channels over independent baths kills the
stationary coherence. Adding an independent pure-dephasing bath on top of a
composite coupling leaves it untouched.
"""

# %%
from ssclab import steady, tcl2
from ssclab.spectral import make_bath

main = make_bath(0.01, 5.0, 1.0, 0.5)
other = make_bath(0.01, 5.0, 3.0, 0.5)

shared = steady.dynamical_steady_state(tcl2.Composite(0.1, 0.1), main)
split = steady.dynamical_steady_state(tcl2.SplitTwoBaths(0.1, 0.1, other), main)
print("one shared bath  :", shared.v, "C =", shared.coherence)
print("two separate ones:", split.v, "C =", split.coherence)

# %%
for f3 in (0.0, 0.05, 0.1):
    r = steady.dynamical_steady_state(tcl2.CompositePlusDephasing(0.1, 0.1, f3, other), main)
    print(f"extra dephasing f3={f3}: v = {r.v}")

# %%
# With an Ohmic extra bath the zero-frequency noise adds a finite dephasing
# rate at long times, which does shift the fixed point.
r = steady.dynamical_steady_state(tcl2.CompositePlusDephasing(0.1, 0.1, 0.1, main), main)
print("Ohmic extra bath  :", r.v)
