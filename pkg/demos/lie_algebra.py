from qmapgeom import liealg
from qmapgeom.cubic import preset
from qmapgeom.isometries import Gen

for name in ["n1", "homog", "rand3"]:
    form, _ = preset(name)
    alg = liealg.build_algebra(form)
    n = form.n
    print(f"{name}: dim {alg.dim}  (3n+6 = {3 * n + 6})")
    print("  jacobi residual", liealg.jacobi_residual(alg))
    print("  lower central series", liealg.lower_central_series(alg))
    dp = liealg.d_prime(alg)
    print("  tr ad D' =", liealg.trace_ad(alg, dp), " spectrum", dict(liealg.ad_eigvals(alg, dp)))
    print("  tr ad D =", liealg.trace_ad(alg, alg.unit(Gen("D"))))
    print("  chain", liealg.semidirect_chain(alg))

alg = liealg.build_algebra(preset("homog")[0])
br = alg.bracket(alg.unit(Gen("P", 1)), alg.unit(Gen("Xup", 1)))
print("[P1, Xup1] =", {str(alg.basis[i]): v for i, v in enumerate(br) if v})
