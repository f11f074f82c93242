"""Distributed Bragg reflectors and a rough cavity Q estimate.

Run: ``python3 demos/05_mirror_stacks.py``.
"""

import numpy as np

from jcsim.config import PRESET_DIR
from jcsim.tmm import cavity_q_estimate, load_stack, penetration_length, stack_spectrum, stopband_center

wl = np.linspace(830, 1050, 2201)
for name in ("gaas_dbr", "gaas_dbr_drift"):
    st = load_stack(PRESET_DIR / f"{name}.stack")
    sp = stack_spectrum(st, wl)
    c = stopband_center(sp)
    print(f"{name:15s} {len(st)} layers  stopband centre {c:.1f} nm  R(centre) = {stack_spectrum(st, [c]).R[0]:.7f}")
print("A linear thickness drift over the growth moves the stopband to shorter wavelength.\n")

st = load_stack(PRESET_DIR / "dielectric_dbr.stack")
lam = 920.0
L_pen = penetration_length(st, lam)
L_eff = 1.5 * lam + 2 * L_pen
est = cavity_q_estimate(87e-6, 87e-6, L_eff, lam)
T_calc = stack_spectrum(st, [lam]).T[0]
print(f"dielectric mirror: T at {lam:.0f} nm = {T_calc * 1e6:.2f} ppm, penetration length {L_pen:.0f} nm")
print(f"with 87 ppm per mirror: L_eff = {L_eff:.0f} nm, finesse {est.finesse:.0f}, Q = {est.Q:.3g}")
