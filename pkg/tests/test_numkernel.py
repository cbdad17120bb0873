import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qmapgeom import numkernel as nk


def test_fd_derivative_of_square():
    jac = nk.fd_jacobian(lambda x: x**2, np.array([3.0]), step=1e-5)
    assert jac.shape == (1, 1)
    assert abs(jac[0, 0] - 6.0) <= 1e-9


def test_fd_gradient_of_bilinear():
    jac = nk.fd_jacobian(lambda x: np.array([x[0] * x[1]]), np.array([2.0, 5.0]))
    np.testing.assert_allclose(jac[0], [5.0, 2.0], atol=1e-9)


def test_dual_product_and_quotient_rules():
    x = nk.seed(np.array([1.5, -0.7]))
    f = x[0] * x[1] / (1.0 + x[0] ** 2)
    a, b = 1.5, -0.7
    expect = [b * (1 - a * a) / (1 + a * a) ** 2, a / (1 + a * a)]
    np.testing.assert_allclose(f.der, expect, rtol=1e-14)


def test_ndarray_times_dual_defers_to_dual():
    x = nk.seed(np.array([1.0, 2.0]))
    out = np.array([3.0, 4.0]) * x
    assert nk.is_dual(out)
    np.testing.assert_allclose(out.der, np.diag([3.0, 4.0]))


def test_sqrt_log_exp_chain():
    x = nk.seed(np.array([0.8]))
    f = nk.exp(nk.log(x) * 0.5) - nk.sqrt(x)
    assert abs(f.val[0]) < 1e-15
    assert np.abs(f.der).max() < 1e-15


def test_complex_duals_and_conjugation():
    x = nk.seed(np.array([0.3, 1.1]))
    z = x[0] + 1j * x[1]
    w = z * nk.conj(z)
    np.testing.assert_allclose(nk.real(w).der, [0.6, 2.2], rtol=1e-14)
    assert np.abs(nk.imag(w).der).max() < 1e-15


def test_einsum_product_rule_matches_fd():
    rng = np.random.default_rng(0)
    k = rng.normal(size=(3, 3, 3))

    def f(x):
        return nk.einsum("abc,a,b,c->", k, x, x, x)

    x0 = rng.normal(size=3)
    dual = nk.dual_jacobian(lambda x: nk.stack([f(x)]), x0)
    fd = nk.fd_jacobian(lambda x: np.array([f(x)]), x0)
    np.testing.assert_allclose(dual, fd, rtol=1e-7, atol=1e-8)


def test_matrix_inverse_derivative():
    x0 = np.array([2.0, 0.5, 3.0])

    def f(x):
        m = nk.stack([nk.stack([x[0], x[1]]), nk.stack([x[1], x[2]])])
        return nk.inv(m)[0, 1]

    dual = nk.dual_jacobian(lambda x: nk.stack([f(x)]), x0)
    fd = nk.fd_jacobian(lambda x: np.array([np.linalg.inv([[x[0], x[1]], [x[1], x[2]]])[0, 1]]), x0)
    np.testing.assert_allclose(dual, fd, rtol=1e-7)


def test_ellipsis_indexing_is_rejected():
    x = nk.seed(np.zeros(3))
    with pytest.raises(Exception):
        x[...]


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-3, 3), min_size=4, max_size=4), st.floats(-2, 2))
def test_polynomial_derivative_matches_symbolic(coeffs, x0):
    # p(x) = sum c_k x^k, p'(x) = sum k c_k x^(k-1)
    x = nk.seed(np.array([x0]))
    p = sum(c * x**k for k, c in enumerate(coeffs))
    exact = sum(k * c * x0 ** (k - 1) for k, c in enumerate(coeffs) if k)
    assert abs(p.der[0, 0] - exact) <= 1e-13 * (1 + abs(exact)) + 1e-13


@pytest.mark.parametrize("m, expect", [
    (np.eye(2), np.eye(2)),
    (np.diag([2.0, 4.0]), np.diag([0.5, 0.25])),
    (np.array([[1.0, 1.0], [1.0, 0.0]]), np.array([[0.0, 1.0], [1.0, -1.0]])),
])
def test_sym_invert_examples(m, expect):
    np.testing.assert_allclose(nk.sym_invert(nk.SymMatrix(m)), expect, atol=1e-15)


def test_sym_invert_rejects_singular():
    with pytest.raises(nk.NumericError):
        nk.sym_invert(np.array([[1.0, 1.0], [1.0, 1.0]]))


def test_symmatrix_rejects_asymmetric():
    with pytest.raises(nk.NumericError):
        nk.SymMatrix(np.array([[1.0, 2.0], [0.0, 1.0]]))


@pytest.mark.parametrize("m, expect", [
    (np.diag([3.0, 1.0]), [1.0, 3.0]),
    (np.array([[0.0, 1.0], [1.0, 0.0]]), [-1.0, 1.0]),
])
def test_sym_eigvals_examples(m, expect):
    np.testing.assert_allclose(nk.sym_eigvals(m), expect, atol=1e-14)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.integers(2, 12))
def test_jacobi_matches_lapack(seed, dim):
    a = np.random.default_rng(seed).normal(size=(dim, dim))
    a = a + a.T
    np.testing.assert_allclose(nk.sym_eigvals(a), np.linalg.eigvalsh(a), atol=1e-11 * (1 + np.abs(a).max()))


def test_jacobi_survives_tiny_off_diagonal():
    m = np.array([[1.0, 1e-200], [1e-200, 2.0]])
    np.testing.assert_allclose(nk.sym_eigvals(m), [1.0, 2.0])
