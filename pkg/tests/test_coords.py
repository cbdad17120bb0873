import math

import numpy as np
import pytest

from qmapgeom import numkernel as nk
from qmapgeom.coords import IIBLayout, IIBPoint, iia_to_iib, iib_to_iia, mirror_differential, rho_from_tau2
from qmapgeom.cubic import eval_h, homogeneous, preset
from qmapgeom.qk_metric import ChartLayout, DomainError
from qmapgeom.sampling import Sampler

PRESETS = ["homog", "complete", "incomplete", "n1", "rand3"]


def _iib(tau1=0.0, tau2=math.sqrt(2), t=(1.0, 1.0), c0=0.0, psi=0.0):
    z = np.zeros(2)
    return IIBPoint(tau1, tau2, np.array(t), z, z, z, c0, psi)


def test_zero_fields_map_to_unit_rho():
    x = iib_to_iia(homogeneous(), _iib())
    lay = ChartLayout(2)
    assert x[lay.rho] == pytest.approx(1.0, rel=1e-15)
    rest = np.delete(x, [0, 1, lay.rho])
    assert np.abs(rest).max() == 0.0
    assert iia_to_iib(homogeneous(), x)[1] == pytest.approx(math.sqrt(2), rel=1e-15)


def test_axion_example():
    x = iib_to_iia(homogeneous(), _iib(tau1=1.0, c0=3.0))
    lay = ChartLayout(2)
    assert x[lay.zeta][0] == 1.0
    assert x[lay.zetat][0] == 3.0
    assert x[lay.sigma] == -3.0


def test_vanishing_axions_map_back_to_zero():
    x = np.concatenate([[1.0, 1.0], np.zeros(2), [0.7], np.zeros(6), [0.0]])
    y = iia_to_iib(homogeneous(), x)
    lay = IIBLayout(2)
    assert y[lay.tau1] == 0.0 and y[lay.psi] == 0.0 and y[lay.c0] == 0.0
    assert np.abs(y[lay.cup]).max() == 0.0 and np.abs(y[lay.clow]).max() == 0.0


@pytest.mark.parametrize("name", PRESETS)
def test_round_trips(name):
    form, base = preset(name)
    for x in Sampler(form, base, np.random.default_rng(1)).draw_many(100):
        y = iia_to_iib(form, x)
        assert np.abs(iib_to_iia(form, y) - x).max() <= 1e-12 * (1 + np.abs(x).max())
        assert np.abs(iia_to_iib(form, iib_to_iia(form, y)) - y).max() <= 1e-12 * (1 + np.abs(y).max())


def test_closed_form_columns():
    y = _iib(tau1=0.4, c0=1.5, psi=-0.3).to_vector()
    dm = mirror_differential(homogeneous(), y)
    ia, ib = ChartLayout(2), IIBLayout(2)
    col = np.zeros(12)
    col[ia.sigma] = -2.0
    np.testing.assert_array_equal(dm[:, ib.psi], col)
    col = np.zeros(12)
    col[ia.zetat.start] = 1.0
    col[ia.sigma] = -0.4
    np.testing.assert_array_equal(dm[:, ib.c0], col)


@pytest.mark.parametrize("name", PRESETS)
def test_differential_against_fd_and_duals(name):
    form, base = preset(name)
    for x in Sampler(form, base, np.random.default_rng(2)).draw_many(25):
        y = np.asarray(iia_to_iib(form, x))
        dm = mirror_differential(form, y)
        fd = nk.fd_jacobian(lambda q: np.asarray(iib_to_iia(form, q)), y)
        assert np.abs(dm - fd).max() <= 1e-6 * (1 + np.abs(dm).max())
        dual = nk.dual_jacobian(lambda q: iib_to_iia(form, q), y)
        assert np.abs(dm - dual).max() <= 1e-12 * (1 + np.abs(dm).max())
        inv_fd = nk.fd_jacobian(lambda p: np.asarray(iia_to_iib(form, p)), x)
        assert np.abs(dm @ inv_fd - np.eye(len(x))).max() <= 1e-5


@pytest.mark.parametrize("name", PRESETS)
def test_rho_and_tau2(name):
    form, base = preset(name)
    for x in Sampler(form, base, np.random.default_rng(3)).draw_many(30):
        y = np.asarray(iia_to_iib(form, x))
        t = y[IIBLayout(form.n).t]
        assert rho_from_tau2(form, t, y[1]) == pytest.approx(x[ChartLayout(form.n).rho], rel=1e-13)
        assert y[1] > 0


def test_domain_errors():
    form = homogeneous()
    with pytest.raises(DomainError):
        iib_to_iia(form, _iib(tau2=-1.0))
    with pytest.raises(DomainError):
        iib_to_iia(form, _iib(t=(1.0, -1.0)))
    x = np.concatenate([[1.0, 1.0], np.zeros(2), [-0.5], np.zeros(6), [0.0]])
    with pytest.raises(DomainError):
        iia_to_iib(form, x)


def test_iib_point_vector_round_trip():
    q = _iib(tau1=0.2, c0=1.0)
    assert IIBPoint.from_vector(q.to_vector(), 2).to_vector().tolist() == q.to_vector().tolist()
    assert eval_h(homogeneous(), q.t) == 1.0
