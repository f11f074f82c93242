"""Closed-form two-photon model versus the full master equation.

The effective model treats the two-photon transition as a driven two-level
system and the second photon as a cascade from the first rung. The exact
numerics also let the first-rung population re-emit through both channels,
which lowers g2 by a factor that the closed forms ignore. This script
shows that factor emerging cleanly in a very strongly coupled system and
how large the gap is at moderate coupling.
Run: ``python3 demos/03_two_photon_closed_forms.py``.
"""

import numpy as np

from jcsim import analytic as an
from jcsim.correlator import g2_tau, g2_zero_direct
from jcsim.hilbert import RateSet
from jcsim.liouvillian import DrivenSystem

for label, rates, om, n_max in (
    ("g/kappa = 200, g/gamma = 528", RateSet.from_ratios(1.0, 200.0, 528.0), 0.01, 4),
    ("g/kappa = 5.3, g/gamma = 14 ", RateSet.from_ratios(1.0, 5.3, 14.0), 1 / 20, 8),
):
    dL = an.two_photon_laser_detuning(rates, om)
    s = DrivenSystem(rates, n_max, 0.0, dL, om)
    num = g2_zero_direct(s.steady_state, s.a)
    ana = an.analytic_g2_zero(rates, om)
    casc = an.cascade_intensity_ratio(rates)
    sol = an.effective_two_photon(rates, om)
    ps_ratio = rates.kappa * s.photon_number / an.first_photon_rate(sol, rates)
    print(label)
    print(f"  numeric g2(0) / closed form = {num / ana:.3f}   (cascade factor squared {casc**2:.3f})")
    print(f"  numeric / closed-form emission rate = {ps_ratio:.3f}")
    t = np.linspace(0, 1, 6) / (rates.kappa + rates.gamma)
    tr = g2_tau(s.liouvillian, s.steady_state, s.a, t * 1e3)
    print("  g2(tau) ratio for tau = 0 ... 1/(kappa+gamma):",
          np.array2string(tr.values / an.analytic_g2_tau(rates, om, t), precision=3))

print(f"\np_i(0) from the closed form equals 2 kappa / 3: {an.second_photon_rate(RateSet(1.0, 0.2, 0.05), 0.0):.6f}")
