import numpy as np
import pytest

from qmapgeom import numkernel as nk
from qmapgeom import special_kahler as sk
from qmapgeom.cubic import eval_h, homogeneous, incomplete_inhomogeneous, preset, psk_metric_valid
from qmapgeom.twistor import cask_residual, central_charges

T0 = np.array([1.0, 1.0])
B0 = np.zeros(2)


def test_imaginary_period_matrix_at_unit_point():
    n = sk.imag_period_matrix(homogeneous(), T0, B0)
    expect = np.array([[-4.0, 0.0, 0.0], [0.0, 4.0, 4.0], [0.0, 4.0, 0.0]])
    np.testing.assert_allclose(n, expect, atol=1e-14)
    assert sk.kahler_norm(homogeneous(), T0, B0) == pytest.approx(8.0, rel=1e-15)


def test_inverse_imaginary_period_matrix_at_unit_point():
    ninv = sk.inverse_imag_period_matrix(homogeneous(), T0, B0)
    expect = np.zeros((3, 3))
    expect[0, 0] = -0.25
    expect[1:, 1:] = 0.25 * np.array([[0.0, 1.0], [1.0, -1.0]])
    np.testing.assert_allclose(ninv, expect, atol=1e-15)


def _random_points(form, base, rng, count=100):
    done = 0
    while done < count:
        t = base * rng.uniform(0.5, 1.5, form.n)
        if psk_metric_valid(form, t):
            done += 1
            yield t, rng.uniform(-2, 2, form.n)


@pytest.mark.parametrize("name", ["homog", "complete", "incomplete", "n1", "rand3"])
def test_special_matrix_identities(name):
    form, base = preset(name)
    rng = np.random.default_rng(5)
    for t, b in _random_points(form, base, rng):
        h = eval_h(form, t)
        assert abs(sk.kahler_norm(form, t, b) - 8 * h) <= 1e-12 * 8 * h
        ninv = sk.inverse_imag_period_matrix(form, t, b)
        num = np.linalg.inv(sk.imag_period_matrix(form, t, b))
        assert np.abs(ninv - num).max() <= 1e-11 * np.abs(num).max()
        np.testing.assert_allclose(sk.imag_period_matrix(form, t, b) @ ninv, np.eye(form.n + 1), atol=1e-11)
        assert cask_residual(form, t, b) <= 1e-12 * (1 + np.abs(central_charges(form, t, b)[1]).max())


def test_psk_metric_at_unit_point():
    g = sk.psk_metric(homogeneous(), T0, B0)
    np.testing.assert_allclose(g, np.diag([0.5, 0.25, 0.5, 0.25]), atol=1e-15)


def test_psk_metric_is_log_hessian_and_b_independent():
    form = incomplete_inhomogeneous()
    t = np.array([0.6, 0.9])
    hess = nk.fd_jacobian(lambda y: nk.log(eval_h(form, nk.seed(y))).der * -0.25, t)
    block = sk.psk_metric_block(form, t)
    np.testing.assert_allclose(block, hess, atol=1e-8)
    np.testing.assert_allclose(sk.psk_metric(form, t, np.array([3.0, -1.0])), sk.psk_metric(form, t, B0))


def test_psk_metric_scaling():
    form = homogeneous()
    t = np.array([0.7, 1.8])
    for lam in [0.5, 2.0, 3.3]:
        assert sk.dilation_invariance_residual(form, t, B0, lam) <= 1e-12


def test_dc_kahler_potential():
    dc = sk.dc_kahler_potential(homogeneous(), T0)
    np.testing.assert_allclose(dc, [2.0, 1.0], rtol=1e-15)
    assert np.isrealobj(dc)


def test_central_charges_at_imaginary_unit():
    # F_a = -k_abc z^b z^c / 2 and F_0 = h(z); at z = (i, i) for h = x1^2 x2
    z, f = central_charges(homogeneous(), T0, B0)
    np.testing.assert_allclose(z, [1.0, 1j, 1j])
    np.testing.assert_allclose(f[1:], [2.0, 1.0], atol=1e-15)
    assert f[0] == pytest.approx(-1j * eval_h(homogeneous(), T0))


def test_central_charges_are_prepotential_gradient_of_degree_zero():
    form = incomplete_inhomogeneous()
    t, b = np.array([0.5, 1.1]), np.array([0.3, -0.4])
    _, f = central_charges(form, t, b)
    for lam in [2.0, 0.4 + 1.3j, -1j]:
        big_z = lam * np.concatenate([[1.0], b + 1j * t])
        x = nk.seed(big_z.astype(complex))
        prepot = -eval_h(form, x[1:]) / x[0]
        np.testing.assert_allclose(prepot.der / big_z[0], f, rtol=1e-13)
