"""Photon blockade on the lower polariton, bunching at the two-photon resonance.

Also shows what a weak coherent laser background (signal-to-background
ratio 85) does to the measured g2(0) curve, and the frequencies present in
g2(tau). Run: ``python3 demos/02_blockade_and_bunching.py``.
"""

from dataclasses import replace

import numpy as np

from jcsim.correlator import fft_peaks, g2_zero_direct, g2_zero_smoothed, system_g2, tau_grid_ps
from jcsim.detection import BackgroundModel, detected_g2_tau, detected_g2_zero
from jcsim.hilbert import RateSet
from jcsim.liouvillian import DrivenSystem

rates = RateSet.from_ratios(2 * np.pi * 3.45, 5.3, 14.0)
g = rates.g
om = g / 40
tau = tau_grid_ps(3000, 4)

for label, x in (("lower polariton", -g), ("two-photon resonance", -g / np.sqrt(2))):
    s = DrivenSystem(rates, 8, 0.0, x, om)
    tr = system_g2(s, tau)
    print(f"{label:22s} dL = {x / g:+.3f} g   g2(0) = {tr.g2_zero:7.3f}   smoothed {g2_zero_smoothed(tr):7.3f}")

# background scaled to the lower-polariton intensity at the same drive
bg = BackgroundModel.from_sbr(85, DrivenSystem(rates, 8, 0.0, -g, om).photon_number)
bg_avg = replace(bg, phase_averaged=True)
print("\n dL/g    raw g2(0)   with background   phase-averaged")
for x in np.arange(-1.5, -0.25, 0.1) * g:
    s = DrivenSystem(rates, 8, 0.0, x, om)
    rho = s.steady_state
    print(f"{x / g:+5.2f}   {g2_zero_direct(rho, s.a):10.3f}   {detected_g2_zero(rho, s.a, bg):10.3f}"
          f"        {detected_g2_zero(rho, s.a, bg_avg):10.3f}")
print("Near dL = 0 the emitter barely radiates, so the background takes over and pulls g2(0) back to 1.")

print("\n dL/g    FFT peaks (GHz)          expected 2g, |g-dL|, |g+dL| (GHz)")
for x in (-1.5, -1.2, -0.6, -0.4) * np.array(g):
    s = DrivenSystem(rates, 8, 0.0, x, om)
    pk = fft_peaks(detected_g2_tau(s.liouvillian, s.steady_state, s.a, bg, tau))
    trio = np.array([2 * g, abs(g - x), abs(g + x)]) / (2 * np.pi)
    print(f"{x / g:+5.2f}   {np.array2string(np.sort(pk.frequencies_ghz), precision=2):24s} "
          f"{np.array2string(trio, precision=2)}")
