import math

import numpy as np

from qmapgeom import volume as vol
from qmapgeom.cubic import CurveId, preset

form, base = preset("homog")
rng = np.random.default_rng(5)

# numeric fiber density divided by Delta_h / (rho^5 r^3) is one constant
ratios = [vol.density_sample(form, base, vol.random_fiber(2, rng)).ratio for _ in range(10)]
print("ratio", ratios[0], " spread", np.ptp(ratios) / np.mean(ratios))

fiber = vol.FiberPoint(1.0, 1.0, np.zeros(2), np.zeros(3), np.zeros(3), 0.0)
for curve in CurveId:
    xs = vol.asymptotic_window(curve)
    rows = vol.curve_density_profile(curve, xs[::8], fiber)
    print(curve.value)
    print("   x1          s         delta")
    for x1, s, num, closed, ratio in rows:
        print(f"  {x1:.3e}  {s:8.3f}  {num:.4e}")
    print("   slope of log delta in s:", vol.asymptotic_fit(curve, xs))

print("1/sqrt(6) =", 1 / math.sqrt(6), "  -sqrt(2/3) =", -math.sqrt(2 / 3))
