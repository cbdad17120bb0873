import numpy as np

from qmapgeom import twistor as tw
from qmapgeom.cubic import preset
from qmapgeom.isometries import SL2Element
from qmapgeom.qk_metric import ChartLayout
from qmapgeom.sampling import Sampler

form, base = preset("homog")
lay = ChartLayout(form.n)
rng = np.random.default_rng(4)
x = Sampler(form, base, rng).draw()

u = 0.4 + 0.7j
d = tw.darboux_coords(form, tw.TwistorSample(x, u, 0.3))
print("xi     ", np.round(d.xi, 4))
print("xitilde", np.round(d.xitilde, 4))
print("alpha  ", np.round(d.alpha, 4))

# d alpha + xitilde d xi - xi d xitilde against the contact form, on random tangents
for c in [0.0, 0.3]:
    s = tw.TwistorSample(x, u, c)
    worst = 0.0
    for _ in range(20):
        diff, lhs = tw.contact_identity_residual(form, s, rng.normal(size=lay.dim + 2))
        worst = max(worst, abs(diff) / (1 + abs(lhs)))
    print(f"contact identity c={c}: {worst:.1e}")

# S-duality on the fiber, through the Cayley coordinate
g = SL2Element(0.0, -1.0, 1.0, 0.0)
tau = complex(0.3, 1.2)
up = tw.sduality_fiber_lift(g, tau, u)
print("u ->", np.round(up, 5), " |cayley factor| =", abs(tw.cayley_factor(g, tau)))
print("antipode commutes:", abs(tw.sduality_fiber_lift(g, tau, tw.antipode(u)) - tw.antipode(up)))
print("square residual", tw.sduality_square_residual(form, g, x, u))
