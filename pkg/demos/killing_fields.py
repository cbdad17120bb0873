import numpy as np

from qmapgeom.cubic import preset
from qmapgeom.isometries import Gen, killing_generators, lie_derivative_metric
from qmapgeom.qk_metric import metric_fs
from qmapgeom.sampling import Sampler

form, base = preset("incomplete")
smp = Sampler(form, base, np.random.default_rng(1))
points = smp.draw_many(20)

# L_X g with exact first derivatives from dual numbers
print("tree level, worst |L_X g| / (1 + |g|) over 20 points")
for gen in killing_generators(form.n) + [Gen("D1")]:
    worst = 0.0
    for x in points:
        scale = 1 + np.abs(metric_fs(form, x).gram).max()
        worst = max(worst, np.abs(lie_derivative_metric(form, gen, x)).max() / scale)
    print(f"  {str(gen):6s} {worst:.2e}")

# at c > 0 the Heisenberg part survives and Xh does not
c = 0.1
smp_c = Sampler(form, base, np.random.default_rng(2), c=c)
pts = smp_c.draw_many(10)
for gen in [Gen("P", 1), Gen("Xup", 0), Gen("Z"), Gen("Xh")]:
    worst = max(np.abs(lie_derivative_metric(form, gen, x, c)).max() for x in pts)
    print(f"c={c} {str(gen):6s} {worst:.2e}")

print("sampler:", smp.stats.as_dict())
