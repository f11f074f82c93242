"""Weak-drive polariton spectrum and its avoided crossing.

Scans the laser across the cavity-emitter system for several cavity
detunings and compares the emission maxima with the first-rung dressed
energies. Run: ``python3 demos/01_polariton_ladder.py``.
"""

import numpy as np

from jcsim.correlator import find_spectrum_peaks, spectrum_scan
from jcsim.hilbert import DressedLevel, RateSet, dressed_energy

rates = RateSet.from_ratios(2 * np.pi * 3.45, 5.3, 14.0)
g = rates.g
print(f"g/2pi = 3.45 GHz, kappa/2pi = {rates.kappa / 2 / np.pi:.3f} GHz, gamma/2pi = {rates.gamma / 2 / np.pi:.3f} GHz")
print(f"cooperativity {rates.cooperativity:.1f}, beta {rates.beta:.4f}\n")

dL = np.linspace(-3.6, 3.6, 577) * g
dC = np.array([-2.0, -1.0, 0.0, 1.0, 2.0]) * g
scan = spectrum_scan(rates, dL, 0.01 * g, dC, n_max=4)

print(" dC/g   peaks/g              E1-/g     E1+/g")
for i, c in enumerate(dC):
    pk = find_spectrum_peaks(dL, scan.signal[i])
    e = [dressed_energy(DressedLevel(1, s), rates, c) / g for s in (-1, 1)]
    print(f"{c / g:+5.1f}   {np.array2string(pk / g, precision=4):20s} {e[0]:+.4f}   {e[1]:+.4f}")

# The emitter-like branch is pulled slightly outward: the cavity response
# vanishes at dL = 0, which skews that narrow line away from the bare energy.
print("\nOn resonance the two lines sit at +-g; off resonance they follow the dressed energies.")
