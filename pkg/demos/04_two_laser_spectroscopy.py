"""g2 spectroscopy of the second ladder rung with two lasers.

Laser 1 sits near the upper first-rung polariton; laser 2 is scanned across
the transition to the second rung. Coincidences peak where both lasers
together are resonant with |0> -> |2>. Run: ``python3 demos/04_two_laser_spectroscopy.py``.
"""

import numpy as np

from jcsim.hilbert import RateSet, ghz_to_rad_per_ns as w, matrix_element_ratio, rad_per_ns_to_ghz
from jcsim.twolaser import TwoLaserScenario, g2_spectroscopy_scan, predicted_peak

rates = RateSet.from_ghz(2.44, 0.65, 0.246)
grid = np.arange(0.0, 0.48, 0.025)
for om2 in (0.45, 0.1):
    s = TwoLaserScenario(w(0.05), w(om2), w(0.17), 0.0, w(0.31), "upper")
    sc = g2_spectroscopy_scan(s, rates, w(grid), eta_det=0.1)
    print(f"Omega2/2pi = {om2} GHz: g2 peak at {grid[sc.peak_index]:.3f} GHz "
          f"(first-order prediction {rad_per_ns_to_ghz(predicted_peak(s)):.3f} GHz), max g2 {sc.g2.max():.3f}")
    print("  signal (Mcts/s):", np.array2string(sc.signal * 1e3, precision=3, max_line_width=100))

print(f"\nsquared ratio of the two possible probe matrix elements: {matrix_element_ratio():.4f}")
