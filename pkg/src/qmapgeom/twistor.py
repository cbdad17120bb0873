"""Darboux coordinates on the twistor fiber, the local contact form and lifted group actions.

The fiber coordinate ``t`` is a nonzero complex number.  The contact identity is
checked in the convention where the Darboux coordinates read
xi = zeta - (i tau2 / 2)(z / t + t zbar); the S-duality formulas on the Darboux
coordinates are stated for the rotated fiber coordinate u with t = -i u.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import numkernel as nk
from . import special_kahler as sk
from .cubic import CubicForm, eval_h
from .isometries import L1Element, L2Element, SL2Element
from .qk_metric import ChartLayout, split_iia


class BranchError(ValueError):
    """Fiber coordinate on the branch cut of log or at a pole."""


@dataclass(frozen=True)
class TwistorSample:
    base: np.ndarray  # IIA chart vector
    t_fib: complex
    c: float = 0.0

    def __post_init__(self):
        if self.t_fib == 0:
            raise BranchError("fiber coordinate must be nonzero")
        if self.c != 0 and np.imag(self.t_fib) == 0 and np.real(self.t_fib) <= 0:
            raise BranchError("fiber coordinate lies on the cut of the principal logarithm")


@dataclass
class DarbouxCoords:
    xi: np.ndarray  # upper components xi^i
    xitilde: np.ndarray  # lower components xitilde_i
    alpha: complex

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.xi, self.xitilde, [self.alpha]])


def central_charges(form: CubicForm, t, b):
    """Normalized central charges (z^i, F_i) with F_i = tau_ij z^j: F_0 = h(z), F_a = -k_abc z^b z^c / 2.

    This sign is the one for which the contact identity and the lifted group
    actions hold with the period matrix used by the metric.
    """
    k = form.tensor
    z = b + 1j * t
    f0 = nk.einsum("abc,a,b,c->", k, z, z, z) / 6.0
    fa = -0.5 * nk.einsum("abc,b,c->a", k, z, z)
    return sk.special_coordinates(t, b), nk.concatenate([nk.stack([f0]), fa])


def cask_residual(form: CubicForm, t, b) -> float:
    """max |F_i - tau_ij z^j|."""
    z, f = central_charges(form, t, b)
    tau = sk.period_matrix(form, t, b)
    return float(np.abs(f - tau @ z).max())


def pairing(v_lower, v_upper, w_lower, w_upper):
    """<v, w> = v_i w^i - v^i w_i."""
    return nk.einsum("i,i->", v_lower, w_upper) - nk.einsum("i,i->", v_upper, w_lower)


def _tau2(form, t, rho):
    return nk.sqrt(2.0 * rho / eval_h(form, t))


def darboux_raw(form: CubicForm, x, tf, c: float = 0.0):
    """(xi, xitilde, alpha) for a chart vector x and fiber coordinate tf (either may be dual)."""
    t, b, rho, zeta, zetat, sigma = split_iia(x, form.n)
    tau2 = _tau2(form, t, rho)
    z, f = central_charges(form, t, b)
    zb, fb = nk.conj(z), nk.conj(f)
    inv_t = 1.0 / tf
    pref = -0.5j * tau2
    xi = zeta + pref * (z * inv_t + zb * tf)
    xit = zetat + pref * (f * inv_t + fb * tf)
    pz = pairing(f, z, zetat, zeta)
    pzb = pairing(fb, zb, zetat, zeta)
    alpha = sigma + pref * (pz * inv_t + pzb * tf)
    if c != 0.0:
        tv = complex(nk.value(tf))
        if tv.imag == 0 and tv.real <= 0:
            raise BranchError("fiber coordinate lies on the cut of the principal logarithm")
        alpha = alpha - 8j * c * nk.log(tf + 0j)
    return xi, xit, alpha


def darboux_coords(form: CubicForm, s: TwistorSample) -> DarbouxCoords:
    xi, xit, alpha = darboux_raw(form, np.asarray(s.base, dtype=float), complex(s.t_fib), s.c)
    return DarbouxCoords(np.asarray(xi), np.asarray(xit), complex(alpha))


def contact_forms(form: CubicForm, s: TwistorSample):
    """Both sides of the contact identity as complex covectors on (chart, Re t, Im t).

    Left: d alpha + xitilde_i d xi^i - xi^i d xitilde_i.  Right: 8 i rho lambda_0,
    minus 8 i c dt/t when the one-loop parameter is on.
    """
    n = form.n
    lay = ChartLayout(n)
    m = lay.dim + 2
    x0 = np.asarray(s.base, dtype=float)
    xd = nk.seed(x0, nvars=m)
    tf = complex(s.t_fib)
    td = nk.Dual(np.array(tf), np.zeros(m, dtype=complex))
    td.der[lay.dim] = 1.0
    td.der[lay.dim + 1] = 1.0j
    xi, xit, alpha = darboux_raw(form, xd, td, s.c)
    lhs = alpha.der + nk.einsum("i,iz->z", xit.val, xi.der) - nk.einsum("i,iz->z", xi.val, xit.der)

    t, b, rho, zeta, zetat, _ = split_iia(x0, n)
    tau2 = float(_tau2(form, t, rho))
    z, f = central_charges(form, t, b)
    eye = np.eye(m)
    e_zeta = eye[lay.zeta]
    e_zetat = eye[lay.zetat]
    dt = eye[lay.dim] + 1j * eye[lay.dim + 1]
    pair_z = f @ e_zeta - z @ e_zetat  # <Z, d zeta>
    pair_zb = np.conj(f) @ e_zeta - np.conj(z) @ e_zetat
    pair_zeta = zetat @ e_zeta - zeta @ e_zetat  # <zeta, d zeta>
    dck = np.asarray(sk.dc_kahler_potential(form, t)) @ eye[lay.b]
    lam0 = (dt / tf - tau2 / (8.0 * rho * tf) * pair_z - tf * tau2 / (8.0 * rho) * pair_zb
            - 2j * (eye[lay.sigma] / (16.0 * rho) + pair_zeta / (16.0 * rho) - dck / 4.0))
    rhs = 8j * rho * lam0
    if s.c != 0.0:
        rhs = rhs - 8j * s.c * dt / tf
    return lhs, rhs


def contact_identity_residual(form: CubicForm, s: TwistorSample, v) -> tuple[complex, complex]:
    """(lhs(v) - rhs(v), lhs(v)) for a real tangent vector v on (chart, Re t, Im t)."""
    lhs, rhs = contact_forms(form, s)
    v = np.asarray(v, dtype=float)
    return complex((lhs - rhs) @ v), complex(lhs @ v)


# ------------------------------------------------------------------ S-duality lift


def sduality_fiber_lift(g: SL2Element, tau: complex, t_fib):
    """Moebius lift of an SL2 element to the fiber coordinate (rotated convention)."""
    mod = abs(g.c * tau + g.d)
    s = g.c * tau.real + g.d + mod
    den = s - g.c * tau.imag * t_fib
    if abs(den) < 1e-14:
        raise BranchError("fiber lift hits its pole")
    return (g.c * tau.imag + s * t_fib) / den


def cayley(t_fib):
    return (t_fib + 1j) / (t_fib - 1j)


def cayley_inverse(w):
    return 1j * (w + 1) / (w - 1)


def cayley_factor(g: SL2Element, tau: complex) -> complex:
    """Unit complex number by which the lift rotates the Cayley coordinate."""
    return (g.c * np.conj(tau) + g.d) / abs(g.c * tau + g.d)


def antipode(t_fib):
    return -1.0 / np.conj(t_fib)


def rotated_to_standard(u):
    """Fiber coordinate of the contact-identity convention from the rotated one: t = -i u."""
    return -1j * u


def _alpha_tilde(xi, xit, alpha):
    return -(alpha + xi @ xit) / 2.0


def sl2_on_darboux(g: SL2Element, d: DarbouxCoords, form: CubicForm) -> DarbouxCoords:
    k = form.tensor
    xi0, xia = d.xi[0], d.xi[1:]
    xit0, xita = d.xitilde[0], d.xitilde[1:]
    at = _alpha_tilde(d.xi, d.xitilde, d.alpha)
    den = g.c * xi0 + g.d
    if abs(den) < 1e-12:
        raise BranchError("point lies on the divisor c xi^0 + d = 0")
    kxxx = np.einsum("abc,a,b,c->", k, xia, xia, xia)
    new_xi0 = (g.a * xi0 + g.b) / den
    new_xia = xia / den
    new_xita = xita + g.c / (2.0 * den) * np.einsum("abc,b,c->a", k, xia, xia)
    new_xit0 = g.d * xit0 - g.c * at + kxxx / 6.0 * g.c**2 / den
    new_at = -g.b * xit0 + g.a * at - kxxx / 6.0 * (g.c**2 * (g.a * xi0 + g.b) + 2.0 * g.c) / den**2
    new_xi = np.concatenate([[new_xi0], new_xia])
    new_xit = np.concatenate([[new_xit0], new_xita])
    new_alpha = -2.0 * new_at - new_xi @ new_xit
    return DarbouxCoords(new_xi, new_xit, complex(new_alpha))


def sl2_holomorphic_map(g: SL2Element, form: CubicForm):
    """sl2_on_darboux in the variables (xi, xitilde, alpha_tilde), for differentiation."""
    k = form.tensor
    n = form.n

    def fmap(w):
        xi, xit, at = w[: n + 1], w[n + 1: 2 * n + 2], w[2 * n + 2]
        xi0, xia = xi[0], xi[1:]
        den = xi0 * g.c + g.d
        kxxx = nk.einsum("abc,a,b,c->", k, xia, xia, xia)
        new_xi0 = (xi0 * g.a + g.b) / den
        new_xia = xia / den
        new_xita = xit[1:] + nk.einsum("abc,b,c->a", k, xia, xia) * (g.c / 2.0) / den
        new_xit0 = xit[0] * g.d - at * g.c + kxxx / 6.0 * g.c**2 / den
        new_at = -xit[0] * g.b + at * g.a - kxxx / 6.0 * ((xi0 * g.a + g.b) * g.c**2 + 2.0 * g.c) / (den * den)
        return nk.concatenate([nk.stack([new_xi0]), new_xia, nk.stack([new_xit0]), new_xita, nk.stack([new_at])])

    return fmap


def contact_scaling_residual(g: SL2Element, form: CubicForm, point, direction) -> float:
    """|omega(F(w))(dF v) - omega(w)(v)/(c xi^0 + d)| with omega = d alpha_tilde + xi^i d xitilde_i."""
    n = form.n
    fmap = sl2_holomorphic_map(g, form)
    w = nk.seed_direction(np.asarray(point, dtype=complex), np.asarray(direction, dtype=complex))
    out = fmap(w)

    def omega(val, der):
        return der[2 * n + 2] + val[: n + 1] @ der[n + 1: 2 * n + 2]

    before = omega(np.asarray(point), np.asarray(direction))
    after = omega(out.val, out.der[:, 0])
    return float(abs(after - before / (g.c * point[0] + g.d)))


def sduality_square_residual(form: CubicForm, g: SL2Element, x, u_fib) -> float:
    """Transform base and fiber, recompute Darboux coordinates, compare with sl2_on_darboux."""
    from .coords import iia_to_iib
    from .isometries import sl2_act_iia

    x = np.asarray(x, dtype=float)
    y = iia_to_iib(form, x)
    tau = complex(y[0], y[1])
    before = darboux_coords(form, TwistorSample(x, rotated_to_standard(u_fib)))
    x_new = np.asarray(sl2_act_iia(form, g, x), dtype=float)
    u_new = sduality_fiber_lift(g, tau, u_fib)
    after = darboux_coords(form, TwistorSample(x_new, rotated_to_standard(u_new)))
    predicted = sl2_on_darboux(g, before, form)
    return float(np.abs(after.as_vector() - predicted.as_vector()).max())


# ------------------------------------------------------------------ L lift


def l2_on_darboux(elem: L2Element, d: DarbouxCoords) -> DarbouxCoords:
    sr = np.sqrt(elem.r)
    xi = sr * d.xi + elem.eta
    xit = sr * d.xitilde + elem.etat
    # <xi, eta> = xitilde_i eta^i - xi^i etatilde_i
    alpha = elem.r * d.alpha + sr * (d.xitilde @ elem.eta - d.xi @ elem.etat) + elem.kappa
    return DarbouxCoords(xi, xit, complex(alpha))


def l1_on_darboux(elem: L1Element, d: DarbouxCoords, form: CubicForm) -> DarbouxCoords:
    lam = elem.lam
    n = form.n
    wz = np.concatenate([[lam ** -1.5], np.full(n, lam ** -0.5)])
    wzt = np.concatenate([[lam ** 1.5], np.full(n, lam ** 0.5)])
    xi = d.xi * wz
    xit = d.xitilde * wzt
    if elem.v is not None:
        k = form.tensor
        v = np.asarray(elem.v, dtype=float)
        kvv = np.einsum("abc,b,c->a", k, v, v)
        kv = np.einsum("abc,b->ac", k, v)
        x0, xa = xi[0], xi[1:]
        xt0, xta = xit[0], xit[1:]
        new_xa = xa + x0 * v
        new_xt0 = xt0 + x0 * (kvv @ v) / 6.0 + 0.5 * kvv @ xa - xta @ v
        new_xta = xta - 0.5 * x0 * kvv - kv @ xa
        xi = np.concatenate([[x0], new_xa])
        xit = np.concatenate([[new_xt0], new_xta])
    return DarbouxCoords(xi, xit, d.alpha)


def l_lift_on_darboux(elem, d: DarbouxCoords, form: CubicForm) -> DarbouxCoords:
    if isinstance(elem, L2Element):
        return l2_on_darboux(elem, d)
    if isinstance(elem, L1Element):
        return l1_on_darboux(elem, d, form)
    raise TypeError("expected an L1Element or L2Element")


def l_square_residual(form: CubicForm, elem, x, t_fib) -> float:
    """Act on the base, keep the fiber coordinate, compare with the lift on Darboux coordinates."""
    from .isometries import l1_act, l2_act

    x = np.asarray(x, dtype=float)
    before = darboux_coords(form, TwistorSample(x, t_fib))
    if isinstance(elem, L2Element):
        x_new = l2_act(form, elem, x)
    else:
        x_new = l1_act(form, elem, x)
    after = darboux_coords(form, TwistorSample(np.asarray(x_new, dtype=float), t_fib))
    predicted = l_lift_on_darboux(elem, before, form)
    return float(np.abs(after.as_vector() - predicted.as_vector()).max())


def l2_invariant_scaling_residual(form: CubicForm, elem: L2Element, x, t_fib, direction) -> float:
    """d alpha + <xi, d xi> evaluated along a tangent scales by r under an L2 element."""
    from .isometries import l2_act

    x = np.asarray(x, dtype=float)
    direction = np.asarray(direction, dtype=float)

    def invariant(point_dual):
        xi, xit, alpha = darboux_raw(form, point_dual, complex(t_fib))
        return alpha.der[0] + xit.val @ xi.der[:, 0] - xi.val @ xit.der[:, 0]

    before = invariant(nk.seed_direction(x, direction))
    moved = l2_act(form, elem, nk.seed_direction(x, direction))
    after = invariant(moved)
    return float(abs(after - elem.r * before))
