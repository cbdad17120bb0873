"""Acceptance criteria, one PASS/FAIL line each.

Run under pytest (lines appear in the -v log) or directly:  python3 tests/test_acceptance.py
"""

import math
import sys
import time
from fractions import Fraction

import pytest

from qmapgeom import liealg
from qmapgeom.cli import run_suite
from qmapgeom.cubic import preset

CUBICS = ("n1", "homog", "complete", "incomplete", "rand3")
SAMPLES = 100
SEED = 0

# pinned tolerances
TOL = {
    "killing": 1e-9,
    "killing_runtime_s": 60.0,
    "breaking_floor": 1e-3,
    "one_loop_heisenberg": 1e-9,
    "pullback_fd": 1e-7,
    "aut_h": 1e-9,
    "round_trip": 1e-12,
    "differential_fd": 1e-6,
    "pushforward": 1e-9,
    "bracket_pointwise": 1e-9,
    "kahler_norm": 1e-12,
    "inverse_period": 1e-11,
    "cask": 1e-12,
    "contact": 1e-9,
    "sl2_square": 1e-8,
    "antipodal": 1e-12,
    "cayley": 1e-10,
    "l_square": 1e-9,
    "ratio_spread": 1e-8,
    "homog_rate": 1e-6,
    "incomplete_rate": 1e-3,
    "delta_closed": 1e-12,
}

_CACHE = {}


def report(cubic, suite, c=0.0):
    key = (cubic, suite, c)
    if key not in _CACHE:
        start = time.perf_counter()
        rep = run_suite(cubic, suite, samples=SAMPLES, seed=SEED, c=c)
        _CACHE[key] = (rep, time.perf_counter() - start)
    return _CACHE[key][0]


def records(cubic, suite, c=0.0):
    return {r.name: r for r in report(cubic, suite, c).records}


class Verdict:
    def __init__(self):
        self.failures = []
        self.worst = {}

    def upper(self, label, value, tol, samples=None, min_samples=None):
        self.worst[label] = max(self.worst.get(label, 0.0), value)
        if not (value <= tol):
            self.failures.append(f"{label}={value:.3e}>{tol:.0e}")
        if min_samples is not None and samples < min_samples:
            self.failures.append(f"{label} used {samples}<{min_samples} samples")

    def lower(self, label, value, floor):
        self.worst[label] = value
        if not (value >= floor):
            self.failures.append(f"{label}={value:.3e}<{floor:.0e}")

    def require(self, label, ok):
        if not ok:
            self.failures.append(label)

    def line(self, number, title):
        status = "PASS" if not self.failures else "FAIL"
        detail = "; ".join(self.failures) if self.failures else \
            ", ".join(f"{k}={v:.2e}" for k, v in self.worst.items())
        return f"{status}  criterion {number:>2}  {title}: {detail}"


def criterion_1():
    v = Verdict()
    start = time.perf_counter()
    for cubic in CUBICS:
        rec = records(cubic, "killing")
        n = report(cubic, "killing").cubic["n"]
        gens = [r for name, r in rec.items() if name.startswith("killing_")]
        v.require(f"{cubic}: {len(gens)} generators", len(gens) == 3 * n + 7)
        for r in gens:
            v.upper("max_rel_LXg", r.max_residual, TOL["killing"], r.samples, SAMPLES)
    elapsed = time.perf_counter() - start
    v.upper("runtime_s", elapsed, TOL["killing_runtime_s"])
    return v.line(1, "Killing fields on five cubics")


def criterion_2():
    v = Verdict()
    rec = records("homog", "sduality", 0.1)
    v.lower("Xh_breaking", rec["one_loop_xh_breaking"].max_residual, TOL["breaking_floor"])
    for name, r in rec.items():
        if name.startswith("one_loop_killing_"):
            v.upper("heisenberg", r.max_residual, TOL["one_loop_heisenberg"])
    return v.line(2, "one-loop breaking of Xh")


def criterion_3():
    v = Verdict()
    for cubic, c in (("homog", 0.1), ("complete", 0.0)):
        rec = records(cubic, "sduality", c)
        v.upper("sl2_fd", rec["sl2_pullback_fd"].max_residual, TOL["pullback_fd"], rec["sl2_pullback_fd"].samples,
                20 * 25)
        v.upper("l_fd", rec["l_pullback_fd"].max_residual, TOL["pullback_fd"], rec["l_pullback_fd"].samples, 20 * 25)
    aut = records("complete", "sduality")
    v.require("aut_h record present", "aut_h_pullback_dual" in aut)
    if "aut_h_pullback_dual" in aut:
        v.upper("aut_h", aut["aut_h_pullback_dual"].max_residual, TOL["aut_h"])
    return v.line(3, "finite isometries pull back the metric")


def criterion_4():
    v = Verdict()
    for cubic in CUBICS:
        rec = records(cubic, "mirror")
        v.upper("round_trip", rec["round_trip"].max_residual, TOL["round_trip"], rec["round_trip"].samples, SAMPLES)
        v.upper("dM_vs_fd", rec["differential_vs_fd"].max_residual, TOL["differential_fd"])
        for y in ("Ye", "Yf", "Yh"):
            v.upper("pushforward", rec[f"pushforward_{y}"].max_residual, TOL["pushforward"])
    return v.line(4, "mirror map")


def criterion_5():
    v = Verdict()
    for cubic in CUBICS:
        r = records(cubic, "brackets")["bracket_table_pointwise"]
        v.upper("pointwise", r.max_residual, TOL["bracket_pointwise"], r.samples, 10)
        form, _ = preset(cubic)
        alg = liealg.build_algebra(form)
        n = form.n
        v.require(f"{cubic}: lower central series", liealg.lower_central_series(alg) == [3 * n + 2, n + 2, 2, 0])
        dp = liealg.d_prime(alg)
        v.require(f"{cubic}: tr ad D'", liealg.trace_ad(alg, dp) == Fraction(-4 * n - 6))
        v.require(f"{cubic}: ad D' spectrum",
                  liealg.ad_eigvals(alg, dp) == {Fraction(-3): 2, Fraction(-2): n, Fraction(-1): 2 * n})
        v.require(f"{cubic}: trace form",
                  all(liealg.trace_ad(alg, alg.unit(g)) == 0 for g in liealg.sl2_gens() + liealg.nilradical_gens(n)))
    return v.line(5, "Lie algebra structure")


def criterion_6():
    v = Verdict()
    for cubic in CUBICS:
        rec = records(cubic, "special")
        v.upper("K_8h", rec["kahler_norm_8h"].max_residual, TOL["kahler_norm"], rec["kahler_norm_8h"].samples, SAMPLES)
        v.upper("N_inverse", rec["inverse_period_closed_form"].max_residual, TOL["inverse_period"])
        v.upper("cask", rec["cask_relation"].max_residual, TOL["cask"])
    return v.line(6, "special Kähler identities")


def criterion_7():
    v = Verdict()
    for cubic in CUBICS:
        rec = records(cubic, "twistor")
        for c in ("0", "0.3"):
            r = rec[f"contact_identity_c={c}"]
            v.upper(f"contact_c={c}", r.max_residual, TOL["contact"], r.samples, SAMPLES)
    return v.line(7, "twistor contact identity")


def criterion_8():
    v = Verdict()
    for cubic in CUBICS:
        rec = records(cubic, "twistor")
        v.upper("sl2_square", rec["sl2_square"].max_residual, TOL["sl2_square"])
        v.upper("antipodal", rec["antipodal_commutation"].max_residual, TOL["antipodal"])
        v.upper("cayley", rec["cayley_group_law"].max_residual, TOL["cayley"])
        v.upper("l_square", rec["l_square"].max_residual, TOL["l_square"])
    return v.line(8, "twistor lifts")


def criterion_9():
    v = Verdict()
    for cubic in CUBICS:
        r = records(cubic, "density")["density_ratio_spread"]
        v.upper("ratio_spread", r.max_residual, TOL["ratio_spread"], r.samples, 50)
    rec = records("homog", "density")
    for curve in ("homogeneous", "complete", "incomplete"):
        v.upper("delta_closed", rec[f"delta_h_closed_{curve}"].max_residual, TOL["delta_closed"])
    v.upper("homog_rate", rec["log_density_rate_homogeneous"].max_residual, TOL["homog_rate"])
    v.upper("incomplete_rate_vs_-sqrt(2/3)", rec["log_density_rate_incomplete"].max_residual, TOL["incomplete_rate"])
    return v.line(9, "fiber volume density")


def criterion_10():
    v = Verdict()
    worst = math.inf
    for (cubic, suite, c), (rep, _) in list(_CACHE.items()):
        for key, st in rep.sampler.items():
            if not isinstance(st, dict):
                continue
            v.require(f"{cubic}/{key} rejection stats", {"accepted", "rejected", "rejection_rate"} <= set(st))
            if st["accepted"]:
                worst = min(worst, st["min_eigenvalue"])
    for cubic in CUBICS:
        r = records(cubic, "killing")["positive_definite"]
        worst = min(worst, r.max_residual)
    v.require(f"smallest eigenvalue {worst:.3e} > 0", worst > 0)
    v.worst["min_eigenvalue"] = worst
    return v.line(10, "positive definiteness at accepted samples")


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7, criterion_8,
            criterion_9, criterion_10]


@pytest.mark.parametrize("crit", CRITERIA, ids=[f"criterion_{i}" for i in range(1, 11)])
def test_criterion(crit, capsys):
    line = crit()
    with capsys.disabled():
        print("\n" + line)
    assert line.startswith("PASS"), line


if __name__ == "__main__":
    lines = [crit() for crit in CRITERIA]
    print("\n".join(lines))
    sys.exit(0 if all(line.startswith("PASS") for line in lines) else 1)
