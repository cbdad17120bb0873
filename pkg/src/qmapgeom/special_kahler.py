"""Projective special Kähler data attached to a cubic: period matrix, its imaginary part, Kähler potential.

Conventions: z^a = b^a + i t^a with z^0 = 1; the period matrix is the
Hessian of the prepotential -h(X^a)/X^0 at X = (1, z).  All functions accept
plain arrays or duals for t and b.
"""

from __future__ import annotations

import numpy as np

from . import numkernel as nk
from .cubic import CubicForm, grad_h, eval_h


def special_coordinates(t, b):
    """Homogeneous coordinates (1, z^1 .. z^n)."""
    z = b + 1j * t
    one = np.ones(1, dtype=complex)
    return nk.concatenate([one, z]) if nk.is_dual(z) else np.concatenate([one, z])


def period_matrix(form: CubicForm, t, b):
    """Complex symmetric tau_ij of size (n+1)."""
    k = form.tensor
    z = b + 1j * t
    kz = nk.einsum("abc,c->ab", k, z)
    kzz = nk.einsum("abc,b,c->a", k, z, z)
    kzzz = nk.einsum("abc,a,b,c->", k, z, z, z)
    t00 = -kzzz / 3.0
    t0a = 0.5 * kzz
    row0 = nk.concatenate([nk.stack([t00]), t0a])
    lower = nk.concatenate([_column(t0a), -kz], axis=1)
    return nk.concatenate([_row(row0), lower], axis=0)


def _row(v):
    return nk.stack([v], axis=0)


def _column(v):
    return nk.stack([v], axis=1)


def imag_period_matrix(form: CubicForm, t, b):
    """N_ij = -2 Im tau_ij, assembled in closed form."""
    k = form.tensor
    h = eval_h(form, t)
    kt = nk.einsum("abc,c->ab", k, t)
    kbt = nk.einsum("abc,b,c->a", k, b, t)
    kbbt = nk.einsum("abc,a,b,c->", k, b, b, t)
    n00 = -4.0 * h + 2.0 * kbbt
    row0 = nk.concatenate([nk.stack([n00]), -2.0 * kbt])
    lower = nk.concatenate([_column(-2.0 * kbt), 2.0 * kt], axis=1)
    return nk.concatenate([_row(row0), lower], axis=0)


def inverse_imag_period_matrix(form: CubicForm, t, b):
    """Closed-form inverse of N, built from the inverse of G_ab = k_abc t^c / (2h)."""
    k = form.tensor
    h = eval_h(form, t)
    gmat = nk.einsum("abc,c->ab", k, t) / (2.0 * h)
    ginv = nk.inv(gmat)
    bb = nk.einsum("a,b->ab", b, b)
    row0 = nk.concatenate([nk.stack([nk.constant(1.0, b.nvars) if nk.is_dual(b) else np.float64(1.0)]), b])
    lower = nk.concatenate([_column(b), bb - ginv], axis=1)
    return -nk.concatenate([_row(row0), lower], axis=0) / (4.0 * h)


def kahler_norm(form: CubicForm, t, b):
    """K = N_ij z^i zbar^j; equals 8h on the whole domain."""
    z = special_coordinates(t, b)
    nmat = imag_period_matrix(form, t, b)
    return nk.real(nk.einsum("ij,i,j->", nmat, z, nk.conj(z)))


def kahler_potential(form: CubicForm, t):
    """-log(8 h(t))."""
    return -nk.log(8.0 * eval_h(form, t))


def kahler_potential_tgrad(form: CubicForm, t):
    """Partial derivatives of the Kähler potential along t^a: -dh/h."""
    return -grad_h(form, t) / eval_h(form, t)


def dc_kahler_potential(form: CubicForm, t):
    """Coefficients of d^c K on db^a; the form has no dt components."""
    return -kahler_potential_tgrad(form, t)


def psk_metric_block(form: CubicForm, t):
    """Coefficient matrix of the projective special Kähler metric on both the db and dt blocks."""
    k = form.tensor
    h = eval_h(form, t)
    kt = nk.einsum("abc,c->ab", k, t)
    ktt = nk.einsum("abc,b,c->a", k, t, t)
    return -kt / (4.0 * h) + nk.einsum("a,b->ab", ktt, ktt) / (16.0 * h * h)


def dilation_invariance_residual(form: CubicForm, t, b, lam: float) -> float:
    """Largest change of the PSK block under t -> lam t, b -> lam b after rescaling by lam^2."""
    g1 = np.asarray(psk_metric_block(form, np.asarray(t, float)))
    g2 = np.asarray(psk_metric_block(form, lam * np.asarray(t, float)))
    return float(np.abs(g1 - lam * lam * g2).max())


def psk_metric(form: CubicForm, t, b=None):
    """Full 2n x 2n metric in the chart ordering (b^1..b^n, t^1..t^n); b does not enter."""
    g = psk_metric_block(form, t)
    n = form.n
    zero = np.zeros((n, n))
    return nk.concatenate([nk.concatenate([g, zero], axis=1), nk.concatenate([zero, g], axis=1)], axis=0)
