"""Steady-state coherences of a qubit in a bosonic bath with composite coupling."""

from .spectral import BathSpec, SpectralParams, SystemSpec, make_bath
from .tcl2 import Composite, CompositePlusDephasing, RWAComposite, SplitTwoBaths

__all__ = ["BathSpec", "SpectralParams", "SystemSpec", "make_bath",
           "Composite", "RWAComposite", "SplitTwoBaths", "CompositePlusDephasing"]
__version__ = "0.1.0"
