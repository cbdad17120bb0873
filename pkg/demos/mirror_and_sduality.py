import numpy as np

from qmapgeom.coords import iia_to_iib, iib_to_iia, mirror_differential
from qmapgeom.cubic import preset
from qmapgeom.isometries import Gen, SL2Element, eval_field, pullback_metric_check, sl2_act_iia
from qmapgeom.numkernel import fd_jacobian
from qmapgeom.sampling import Sampler

form, base = preset("complete")
rng = np.random.default_rng(3)
x = Sampler(form, base, rng).draw()

y = iia_to_iib(form, x)
print("IIB point", np.round(np.asarray(y), 4))
print("round trip error", np.abs(iib_to_iia(form, y) - x).max())

y = np.asarray(y)
dm = mirror_differential(form, y)
fd = fd_jacobian(lambda q: np.asarray(iib_to_iia(form, q)), y)
print("closed-form differential vs finite differences", np.abs(dm - fd).max())

# the IIB fields Ye, Yf, Yh push forward to Xe, Xf, Xh
for yg, xg in [("Ye", "Xe"), ("Yf", "Xf"), ("Yh", "Xh")]:
    diff = dm @ eval_field(form, Gen(yg), y, "IIB") - eval_field(form, Gen(xg), x)
    print(f"d(mirror) {yg} - {xg}: {np.abs(diff).max():.1e}")

# a finite S-duality transformation is an isometry
for _ in range(3):
    g = SL2Element.random(rng)
    f = lambda p: sl2_act_iia(form, g, p)
    print(f"a={g.a:+.3f} b={g.b:+.3f} c={g.c:+.3f} d={g.d:+.3f}",
          " fd:", f"{pullback_metric_check(form, f, x, relative=True):.1e}",
          " dual:", f"{pullback_metric_check(form, f, x, jacobian='dual', relative=True):.1e}")
