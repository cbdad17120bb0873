import math

import numpy as np
import pytest

from qmapgeom import volume as vol
from qmapgeom.cubic import (CubicError, CurveId, PSRPoint, arclength, curve_form, curve_point, delta_h, hessian_det,
                            homogeneous, preset, single_modulus)

X1_END = 4.0 ** (-1.0 / 3.0)


def _fiber(n, r=1.0, rho=1.0, sigma=0.0, rng=None):
    if rng is None:
        return vol.FiberPoint(r, rho, np.zeros(n), np.zeros(n + 1), np.zeros(n + 1), sigma)
    f = vol.random_fiber(n, rng)
    f.r, f.rho, f.sigma = r, rho, sigma
    return f


def test_homogeneous_reference_value():
    form, base = preset("homog")
    smp = vol.density_sample(form, base, _fiber(2))
    assert smp.delta_closed == pytest.approx(2.0, rel=1e-14)
    assert smp.ratio == pytest.approx(1.8688e-5, rel=1e-3)
    assert smp.orthogonality <= 1e-12


def test_single_modulus_constant():
    smp = vol.density_sample(single_modulus(), [1.0], _fiber(1))
    assert smp.ratio == pytest.approx(2.99e-4, rel=1e-2)


def test_sigma_independence():
    form, base = preset("complete")
    rng = np.random.default_rng(1)
    f = vol.random_fiber(2, rng)
    ref = vol.density_numeric(form, base, f)[0]
    for sigma in rng.uniform(-5, 5, 10):
        f.sigma = float(sigma)
        assert vol.density_numeric(form, base, f)[0] == pytest.approx(ref, rel=1e-12)


def test_rho_and_r_scaling():
    form, base = preset("incomplete")
    rng = np.random.default_rng(2)
    n = form.n
    for _ in range(10):
        seed = int(rng.integers(1 << 30))
        r1, r2 = rng.uniform(0.5, 2.0, 2)
        rho1, rho2 = rng.uniform(0.3, 3.0, 2)
        d = {}
        for key, (r, rho) in {"a": (1.0, rho1), "b": (1.0, rho2), "c": (r1, 1.0), "d": (r2, 1.0)}.items():
            f = _fiber(n, r, rho, rng=np.random.default_rng(seed))
            d[key] = vol.density_numeric(form, base, f)[0]
        assert d["a"] / d["b"] == pytest.approx((rho2 / rho1) ** (n + 3), rel=1e-9)
        assert d["c"] / d["d"] == pytest.approx((r2 / r1) ** (n + 1), rel=1e-9)


@pytest.mark.parametrize("name", ["homog", "complete", "incomplete", "rand3"])
def test_ratio_is_constant(name):
    form, base = preset(name)
    rng = np.random.default_rng(3)
    ratios = []
    for _ in range(40):
        f = vol.random_fiber(form.n, rng)
        ratios.append(vol.density_sample(form, base, f).ratio)
    ratios = np.array(ratios)
    assert np.ptp(ratios) / np.mean(ratios) <= 1e-8


def test_ratio_is_constant_along_curves():
    for curve, xs in [(CurveId.HOMOGENEOUS, [0.3, 1.0, 4.0]), (CurveId.COMPLETE, [1.5, 3.0, 8.0]),
                      (CurveId.INCOMPLETE, [0.01, 0.3, 0.6])]:
        rows = vol.curve_density_profile(curve, xs, _fiber(2))
        ratios = np.array([r[4] for r in rows])
        assert np.ptp(ratios) / np.mean(ratios) <= 1e-8


def test_base_must_lie_on_level_set():
    form, base = preset("homog")
    with pytest.raises(CubicError):
        vol.density_numeric(form, 1.1 * base, _fiber(2))


def test_homogeneous_closed_form_is_exponential_in_arclength():
    for x1 in np.geomspace(0.05, 20, 12):
        s = arclength(CurveId.HOMOGENEOUS, x1)
        assert delta_h(homogeneous(), curve_point(CurveId.HOMOGENEOUS, x1)) == pytest.approx(
            2.0 * math.exp(s / math.sqrt(6)), rel=1e-9)


def test_delta_vanishes_at_the_finite_end():
    form = curve_form(CurveId.INCOMPLETE)
    vals = [delta_h(form, curve_point(CurveId.INCOMPLETE, X1_END - e)) for e in (1e-2, 1e-4, 1e-6)]
    assert vals[0] > vals[1] > vals[2]
    assert vals[2] < 1e-2
    assert arclength(CurveId.INCOMPLETE, X1_END) == 0.0


@pytest.mark.parametrize("name", ["n1", "homog", "complete", "incomplete", "rand3"])
def test_gamma_determinant_and_euler_norm(name):
    form, base = preset(name)
    rng = np.random.default_rng(4)
    for _ in range(20):
        p = PSRPoint.project(form, base * rng.uniform(0.9, 1.1, form.n)).coords
        assert vol.gamma_det_residual(form, p) <= 1e-12 * (1 + abs(hessian_det(form, p)))
        assert vol.cone_metric_euler(form, p) == pytest.approx(3.0, abs=1e-12)


def test_fit_needs_enough_samples():
    with pytest.raises(vol.FitError):
        vol.asymptotic_fit(CurveId.HOMOGENEOUS, [1.0, 2.0])


def test_homogeneous_rate():
    slope = vol.asymptotic_fit(CurveId.HOMOGENEOUS, vol.asymptotic_window(CurveId.HOMOGENEOUS))
    assert slope == pytest.approx(1 / math.sqrt(6), abs=1e-6)


def test_complete_rate():
    slope = vol.asymptotic_fit(CurveId.COMPLETE, vol.asymptotic_window(CurveId.COMPLETE))
    assert slope == pytest.approx(1 / math.sqrt(6), abs=1e-3)


def test_incomplete_rate():
    # Target rate is -sqrt(2/3). The fit measures +1/sqrt(6) with this density, so this stays red.
    slope = vol.asymptotic_fit(CurveId.INCOMPLETE, vol.asymptotic_window(CurveId.INCOMPLETE))
    assert slope == pytest.approx(-math.sqrt(2 / 3), abs=1e-3)
