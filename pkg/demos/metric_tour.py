import numpy as np

from qmapgeom.cubic import homogeneous, preset, eval_h
from qmapgeom.qk_metric import ChartLayout, IIAPoint, metric_fs, min_eigenvalue, decomposition_check

np.set_printoptions(precision=4, suppress=True, linewidth=110)

form = homogeneous()  # h = x1^2 x2
lay = ChartLayout(form.n)
print("chart dimension", lay.dim)
print(lay.labels())

# all axions zero, rho = 1, t on the level set h = 1
p = IIAPoint(np.array([1.0, 1.0]), np.zeros(2), 1.0, np.zeros(3), np.zeros(3), 0.0).to_vector()
print("h(t) =", eval_h(form, p[lay.t]))

g = metric_fs(form, p).gram
print("diagonal at the reference point")
print(np.diag(g))
print("smallest eigenvalue", min_eigenvalue(g))

# switch on the one-loop parameter: only the t block picks up (rho + c)/rho
for c in [0.0, 0.1, 0.5]:
    gc = metric_fs(form, p, c).gram
    print(f"c={c}: g_tt[0,0] = {gc[0, 0]:.6f}   g_sigma = {gc[lay.sigma, lay.sigma]:.6f}")

# level set directions vs the radial one
res = decomposition_check(form, p)
print("quarter-of-PSR residual", res["quarter_metric"], " orthogonality", res["orthogonality"])

# same thing on a random integer cubic in three variables
form3, base3 = preset("rand3")
print("rand3 coefficients", form3.coeffs)
x = np.concatenate([base3, np.zeros(3), [0.8], np.zeros(8), [0.0]])
print("rand3 min eigenvalue at base", min_eigenvalue(metric_fs(form3, x).gram))
