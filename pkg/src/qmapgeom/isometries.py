"""Infinitesimal isometries, finite group actions and their verification.

Vector fields are evaluated on flat chart vectors (IIA for most generators,
IIB for the Y fields) and may receive duals, so Jacobians of fields come from
forward-mode differentiation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import numkernel as nk
from .coords import IIBLayout, iia_to_iib, iib_to_iia, split_iib
from .cubic import CubicForm, eval_h
from .qk_metric import ChartLayout, metric_fs, metric_jet, split_iia


class ChartMismatch(ValueError):
    """A field or action was applied on the wrong chart."""


@dataclass(frozen=True)
class Gen:
    """Generator label; ``index`` is i in 0..n for P and Xup, a in 1..n for V."""

    name: str
    index: int | None = None

    def __str__(self):
        return self.name if self.index is None else f"{self.name}{self.index}"


IIA_NAMES = ("D", "D1", "P", "Xup", "Z", "V", "Xe", "Xf", "Xh")
IIB_NAMES = ("Ye", "Yf", "Yh")


def killing_generators(n: int) -> list[Gen]:
    """The 3n+6 generators of the isometry algebra, plus D1 (which equals D - Xh)."""
    gens = [Gen("D")] + [Gen("P", i) for i in range(1, n + 1)] + [Gen("Xup", i) for i in range(n + 1)]
    gens += [Gen("Z")] + [Gen("V", a) for a in range(1, n + 1)] + [Gen("Xe"), Gen("Xf"), Gen("Xh")]
    return gens


def _assemble(comps: dict, dim: int, like):
    """Stack a sparse {index: component} dict into a full vector of the same kind as ``like``."""
    if nk.is_dual(like):
        zero = nk.constant(0.0, like.nvars)
        return nk.stack([comps.get(i, zero) for i in range(dim)])
    return np.array([float(np.real(comps.get(i, 0.0))) for i in range(dim)])


def _iia_field(form: CubicForm, gen: Gen, x):
    n = form.n
    lay = ChartLayout(n)
    k = form.tensor
    t, b, rho, zeta, zetat, sigma = split_iia(x, n)
    iz = list(range(lay.zeta.start, lay.zeta.stop))
    izt = list(range(lay.zetat.start, lay.zetat.stop))
    it = list(range(lay.t.start, lay.t.stop))
    ib = list(range(lay.b.start, lay.b.stop))
    c = {}
    name = gen.name
    if name == "D":
        c[lay.rho] = rho
        for i in range(n + 1):
            c[iz[i]] = zeta[i] * 0.5
            c[izt[i]] = zetat[i] * 0.5
        c[lay.sigma] = sigma
    elif name in ("P", "Xe"):
        i = 0 if name == "Xe" else gen.index
        c[iz[i]] = 1.0
        c[lay.sigma] = zetat[i]
    elif name == "Xup":
        i = gen.index
        c[izt[i]] = 1.0
        c[lay.sigma] = -zeta[i]
    elif name == "Z":
        c[lay.sigma] = 1.0
    elif name == "V":
        a = gen.index - 1
        c[ib[a]] = 1.0
        c[iz[1 + a]] = zeta[0]
        c[izt[0]] = -zetat[1 + a]
        kz = nk.einsum("bc,c->b", k[a], zeta[1:])
        for bb in range(n):
            c[izt[1 + bb]] = -kz[bb]
    elif name == "D1":
        for a in range(n):
            c[ib[a]] = b[a]
            c[it[a]] = t[a]
            c[iz[1 + a]] = zeta[1 + a] * -0.5
            c[izt[1 + a]] = zetat[1 + a] * 0.5
        c[iz[0]] = zeta[0] * -1.5
        c[izt[0]] = zetat[0] * 1.5
    elif name == "Xh":
        c[iz[0]] = zeta[0] * 2.0
        for a in range(n):
            c[iz[1 + a]] = zeta[1 + a]
            c[it[a]] = -t[a]
            c[ib[a]] = -b[a]
        c[izt[0]] = -zetat[0]
        c[lay.sigma] = sigma
        c[lay.rho] = rho
    elif name == "Xf":
        hh = rho / eval_h(form, t)
        z0 = zeta[0]
        za = zeta[1:]
        pairing = z0 * zetat[0] + nk.einsum("a,a->", za, zetat[1:])  # zeta^i zetatilde_i
        c[iz[0]] = 2.0 * hh - z0 * z0
        kzz = nk.einsum("abc,b,c->a", k, za, za)
        kbb = nk.einsum("abc,b,c->a", k, b, b)
        kbbb = nk.einsum("abc,a,b,c->", k, b, b, b)
        kbbz = nk.einsum("abc,a,b,c->", k, b, b, za)
        kzzz = nk.einsum("abc,a,b,c->", k, za, za, za)
        for a in range(n):
            c[iz[1 + a]] = 2.0 * hh * b[a] - z0 * za[a]
            c[izt[1 + a]] = 0.5 * (kzz[a] - 2.0 * hh * kbb[a])
            c[it[a]] = z0 * t[a]
            c[ib[a]] = z0 * b[a] - za[a]
        c[izt[0]] = 0.5 * (sigma + pairing) + hh * kbbb / 3.0
        c[lay.rho] = -z0 * rho
        c[lay.sigma] = (2.0 * hh * (-zetat[0] - nk.einsum("a,a->", b, zetat[1:]) - (kbbz / 2.0 - kbbb * z0 / 6.0))
                        - (z0 / 2.0) * (sigma - pairing) + kzzz / 6.0)
    else:
        raise ChartMismatch(f"{gen} is not a field on the IIA chart")
    return _assemble(c, lay.dim, x)


def _iib_field(form: CubicForm, gen: Gen, y):
    n = form.n
    lay = IIBLayout(n)
    tau1, tau2, t, b, cup, clow, c0, psi = split_iib(y, n)
    it = list(range(lay.t.start, lay.t.stop))
    ib = list(range(lay.b.start, lay.b.stop))
    icu = list(range(lay.cup.start, lay.cup.stop))
    c = {}
    if gen.name == "Ye":
        c[lay.tau1] = 1.0
        for a in range(n):
            c[icu[a]] = b[a]
        c[lay.psi] = -c0
    elif gen.name == "Yf":
        c[lay.tau1] = tau2 * tau2 - tau1 * tau1
        c[lay.tau2] = -2.0 * tau1 * tau2
        for a in range(n):
            c[it[a]] = tau1 * t[a]
            c[ib[a]] = cup[a]
        c[lay.psi] = 0.0
        c[lay.c0] = -psi
    elif gen.name == "Yh":
        c[lay.tau1] = 2.0 * tau1
        c[lay.tau2] = 2.0 * tau2
        for a in range(n):
            c[it[a]] = -t[a]
            c[ib[a]] = -b[a]
            c[icu[a]] = cup[a]
        c[lay.c0] = -c0
        c[lay.psi] = psi
    else:
        raise ChartMismatch(f"{gen} is not a field on the IIB chart")
    return _assemble(c, lay.dim, y)


def _vec(p):
    return p.to_vector() if hasattr(p, "to_vector") else p


def eval_field(form: CubicForm, gen: Gen, p, chart: str | None = None):
    """Components of a generator at a point; Y fields need an IIB point, the rest IIA."""
    x = _vec(p)
    if chart is None:
        chart = "IIB" if type(p).__name__ == "IIBPoint" else "IIA"
    if gen.name in IIB_NAMES:
        if chart != "IIB":
            raise ChartMismatch(f"{gen} lives on the IIB chart")
        return _iib_field(form, gen, x)
    if chart != "IIA":
        raise ChartMismatch(f"{gen} lives on the IIA chart")
    return _iia_field(form, gen, x)


def field_jet(form: CubicForm, gen: Gen, p, chart: str | None = None):
    """Field value and Jacobian J[k, m] = d_m X^k."""
    x = np.asarray(_vec(p), dtype=float)
    if chart is None:
        chart = "IIB" if type(p).__name__ == "IIBPoint" else "IIA"
    out = eval_field(form, gen, nk.seed(x), chart)
    return out.val, out.der


def lie_derivative_from_jets(gram, dgram, xval, xjac) -> np.ndarray:
    return np.einsum("k,mnk->mn", xval, dgram) + xjac.T @ gram + gram @ xjac


def lie_derivative_metric(form: CubicForm, gen: Gen, p, c: float = 0.0) -> np.ndarray:
    """(L_X g)_{mn} = X^k d_k g_{mn} + g_{kn} d_m X^k + g_{mk} d_n X^k."""
    gram, dgram = metric_jet(form, p, c)
    xval, xjac = field_jet(form, gen, p, "IIA")
    return lie_derivative_from_jets(gram, dgram, xval, xjac)


def lie_bracket(form: CubicForm, g1: Gen, g2: Gen, p, chart: str = "IIA") -> np.ndarray:
    """[X, Y]^m = X^k d_k Y^m - Y^k d_k X^m."""
    xv, xj = field_jet(form, g1, p, chart)
    yv, yj = field_jet(form, g2, p, chart)
    return yj @ xv - xj @ yv


def expand_in_frame(form: CubicForm, vector, gens, p):
    """Least-squares coefficients of ``vector`` in the frame of generator values at p."""
    frame = np.array([eval_field(form, g, _vec(p), "IIA") for g in gens]).T
    coef, *_ = np.linalg.lstsq(frame, vector, rcond=None)
    return coef, float(np.abs(frame @ coef - vector).max())


# ---------------------------------------------------------------- finite actions


@dataclass(frozen=True)
class SL2Element:
    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        if abs(self.a * self.d - self.b * self.c - 1.0) > 1e-12:
            raise ValueError("SL2 element must have unit determinant")

    def __matmul__(self, other: "SL2Element") -> "SL2Element":
        m = self.matrix() @ other.matrix()
        return SL2Element(*m.ravel())

    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]])

    @classmethod
    def random(cls, rng: np.random.Generator, scale: float = 1.0) -> "SL2Element":
        a, b, c = rng.uniform(-scale, scale, 3)
        a += np.sign(a) * 0.5 if a != 0 else 0.5
        d = (1.0 + b * c) / a
        return cls(float(a), float(b), float(c), float(d))


def sl2_act_iib(g: SL2Element, q, n: int | None = None):
    y = _vec(q)
    n = (len(nk.value(y)) - 4) // 4 if n is None else n
    tau1, tau2, t, b, cup, clow, c0, psi = split_iib(y, n)
    x_re = g.c * tau1 + g.d
    x_im = g.c * tau2
    mod2 = x_re * x_re + x_im * x_im
    num_re = g.a * tau1 + g.b
    num_im = g.a * tau2
    new_tau1 = (num_re * x_re + num_im * x_im) / mod2
    new_tau2 = (num_im * x_re - num_re * x_im) / mod2
    if float(nk.value(new_tau2)) <= 0:
        raise AssertionError("SL2 action left the upper half-plane")
    new_t = t * nk.sqrt(mod2)
    new_cup = cup * g.a + b * g.b
    new_b = cup * g.c + b * g.d
    new_c0 = c0 * g.d - psi * g.c
    new_psi = -c0 * g.b + psi * g.a
    return nk.concatenate([nk.stack([new_tau1, new_tau2]), new_t, new_b, new_cup, clow, nk.stack([new_c0, new_psi])])


def sl2_act_iia(form: CubicForm, g: SL2Element, p):
    """The S-duality action transported to the IIA chart through the mirror map."""
    return iib_to_iia(form, sl2_act_iib(g, iia_to_iib(form, _vec(p)), form.n))


@dataclass(frozen=True)
class L2Element:
    r: float
    etat: np.ndarray
    eta: np.ndarray
    kappa: float

    def __post_init__(self):
        if not self.r > 0:
            raise ValueError("L2 element needs r > 0")

    def __matmul__(self, other: "L2Element") -> "L2Element":
        sr = np.sqrt(self.r)
        return L2Element(
            self.r * other.r,
            self.etat + sr * other.etat,
            self.eta + sr * other.eta,
            self.kappa + self.r * other.kappa + sr * (self.eta @ other.etat - self.etat @ other.eta),
        )

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> "L2Element":
        return cls(float(np.exp(rng.uniform(-0.5, 0.5))), rng.uniform(-1, 1, n + 1), rng.uniform(-1, 1, n + 1),
                   float(rng.uniform(-1, 1)))


def l2_act(form: CubicForm, elem: L2Element, p):
    x = _vec(p)
    t, b, rho, zeta, zetat, sigma = split_iia(x, form.n)
    sr = np.sqrt(elem.r)
    new_sigma = elem.kappa + elem.r * sigma + sr * (nk.einsum("i,i->", zetat, elem.eta) - nk.einsum("i,i->", zeta, elem.etat))
    return nk.concatenate([t, b, nk.stack([rho * elem.r]), zeta * sr + elem.eta, zetat * sr + elem.etat,
                           nk.stack([new_sigma])])


@dataclass(frozen=True)
class L1Element:
    lam: float = 1.0
    v: np.ndarray = field(default=None)

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError("L1 element needs lambda > 0")

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> "L1Element":
        return cls(float(np.exp(rng.uniform(-0.4, 0.4))), rng.uniform(-1, 1, n))


def phi_h_scale(form: CubicForm, lam: float, p):
    """Dilation part: z -> lam z together with the weights on the fiber."""
    x = _vec(p)
    t, b, rho, zeta, zetat, sigma = split_iia(x, form.n)
    wz = np.concatenate([[lam ** -1.5], np.full(form.n, lam ** -0.5)])
    wzt = np.concatenate([[lam ** 1.5], np.full(form.n, lam ** 0.5)])
    return nk.concatenate([t * lam, b * lam, nk.stack([rho]), zeta * wz, zetat * wzt, nk.stack([sigma])])


def phi_h_shift(form: CubicForm, v, p):
    """Translation part: b -> b + v with the symplectic action on (zeta, zetatilde)."""
    x = _vec(p)
    k = form.tensor
    v = np.asarray(v, dtype=float)
    t, b, rho, zeta, zetat, sigma = split_iia(x, form.n)
    z0, za = zeta[0], zeta[1:]
    zt0, zta = zetat[0], zetat[1:]
    kvv = np.einsum("abc,b,c->a", k, v, v)
    kvvv = float(kvv @ v)
    kv = np.einsum("abc,b->ac", k, v)
    new_za = za + z0 * v
    new_zt0 = zt0 + z0 * (kvvv / 6.0) + 0.5 * nk.einsum("c,c->", kvv, za) - nk.einsum("a,a->", zta, v)
    new_zta = zta - z0 * (0.5 * kvv) - nk.einsum("ac,c->a", kv, za)
    return nk.concatenate([t, b + v, nk.stack([rho, z0]), new_za, nk.stack([new_zt0]), new_zta, nk.stack([sigma])])


def l1_act(form: CubicForm, elem: L1Element, p):
    """phi_h((lam, v)) = phi_h(v) after phi_h(lam)."""
    out = phi_h_scale(form, elem.lam, p)
    if elem.v is not None:
        out = phi_h_shift(form, elem.v, out)
    return out


def phi_h_act(form: CubicForm, elem, p):
    if isinstance(elem, L1Element):
        return l1_act(form, elem, p)
    if np.ndim(elem) == 0:
        return phi_h_scale(form, float(elem), p)
    return phi_h_shift(form, elem, p)


def l_act(form: CubicForm, l1: L1Element, l2: L2Element, p):
    return l1_act(form, l1, l2_act(form, l2, p))


def auth_check(form: CubicForm, matrix, rng: np.random.Generator | None = None, samples: int = 20) -> float:
    rng = np.random.default_rng(0) if rng is None else rng
    a = np.asarray(matrix, dtype=float)
    worst = 0.0
    for _ in range(samples):
        x = rng.normal(size=form.n)
        worst = max(worst, abs(float(eval_h(form, a @ x)) - float(eval_h(form, x))))
    return worst


def auth_act(form: CubicForm, matrix, p, check: bool = True):
    """(rho, Az, zeta^0, A zeta, zetatilde_0, A^{-T} zetatilde, sigma)."""
    a = np.asarray(matrix, dtype=float)
    if check and auth_check(form, a) > 1e-10:
        raise ValueError("matrix does not preserve h")
    x = _vec(p)
    t, b, rho, zeta, zetat, sigma = split_iia(x, form.n)
    ainvt = np.linalg.inv(a).T
    new_za = nk.einsum("ab,b->a", a, zeta[1:])
    new_zta = nk.einsum("ab,b->a", ainvt, zetat[1:])
    return nk.concatenate([nk.einsum("ab,b->a", a, t), nk.einsum("ab,b->a", a, b), nk.stack([rho, zeta[0]]), new_za,
                           nk.stack([zetat[0]]), new_zta, nk.stack([sigma])])


def pullback_metric_check(form: CubicForm, point_map, p, c: float = 0.0, jacobian: str = "fd",
                          relative: bool = False) -> float:
    """max |J^T g(F(p)) J - g(p)| for a point map F on the IIA chart, optionally over 1 + max |g(p)|."""
    x = np.asarray(_vec(p), dtype=float)
    image = np.asarray(nk.value(point_map(x)), dtype=float)
    if jacobian == "fd":
        jac = nk.fd_jacobian(lambda y: np.asarray(nk.value(point_map(y)), dtype=float), x)
    elif jacobian == "dual":
        jac = nk.dual_jacobian(point_map, x)
    else:
        raise ValueError(f"unknown jacobian method {jacobian!r}")
    g_image = metric_fs(form, image, c).gram
    g_here = metric_fs(form, x, c).gram
    res = float(np.abs(jac.T @ g_image @ jac - g_here).max())
    return res / (1.0 + float(np.abs(g_here).max())) if relative else res
