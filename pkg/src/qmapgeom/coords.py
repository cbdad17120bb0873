"""IIB chart, the classical mirror map to the IIA chart, its inverse and its differential.

IIB ordering (dimension 4n+4): tau1, tau2, t^1..t^n, b^1..b^n, c^1..c^n (upper),
c_1..c_n (lower), c_0, psi.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import numkernel as nk
from .cubic import CubicForm, eval_h, grad_h
from .qk_metric import ChartLayout, DomainError, split_iia


@dataclass(frozen=True)
class IIBLayout:
    n: int

    @property
    def dim(self) -> int:
        return 4 * self.n + 4

    tau1 = 0
    tau2 = 1

    @property
    def t(self) -> slice:
        return slice(2, 2 + self.n)

    @property
    def b(self) -> slice:
        return slice(2 + self.n, 2 + 2 * self.n)

    @property
    def cup(self) -> slice:
        return slice(2 + 2 * self.n, 2 + 3 * self.n)

    @property
    def clow(self) -> slice:
        return slice(2 + 3 * self.n, 2 + 4 * self.n)

    @property
    def c0(self) -> int:
        return 2 + 4 * self.n

    @property
    def psi(self) -> int:
        return 3 + 4 * self.n


@dataclass(frozen=True)
class IIBPoint:
    tau1: float
    tau2: float
    t: np.ndarray
    b: np.ndarray
    ca: np.ndarray
    c_a: np.ndarray
    c0: float
    psi: float

    def to_vector(self) -> np.ndarray:
        return np.concatenate([[self.tau1, self.tau2], self.t, self.b, self.ca, self.c_a, [self.c0, self.psi]]).astype(float)

    @classmethod
    def from_vector(cls, y, n: int) -> "IIBPoint":
        y = np.asarray(y, dtype=float)
        lay = IIBLayout(n)
        if y.shape != (lay.dim,):
            raise ValueError(f"expected a vector of length {lay.dim}")
        return cls(float(y[0]), float(y[1]), y[lay.t].copy(), y[lay.b].copy(), y[lay.cup].copy(),
                   y[lay.clow].copy(), float(y[lay.c0]), float(y[lay.psi]))


def split_iib(y, n: int):
    lay = IIBLayout(n)
    return y[0], y[1], y[lay.t], y[lay.b], y[lay.cup], y[lay.clow], y[lay.c0], y[lay.psi]


def _vec(p):
    return p.to_vector() if hasattr(p, "to_vector") else p


def iib_to_iia(form: CubicForm, q):
    """Classical mirror map; accepts a point, a flat vector or a dual vector."""
    y = _vec(q)
    k = form.tensor
    tau1, tau2, t, b, cup, clow, c0, psi = split_iib(y, form.n)
    h = eval_h(form, t)
    if float(nk.value(h)) <= 0:
        raise DomainError("h(t) must be positive")
    if float(nk.value(tau2)) <= 0:
        raise DomainError("tau2 must be positive")
    shifted = cup - b * tau1  # c^a - tau1 b^a
    rho = tau2 * tau2 * h / 2.0
    zeta0 = tau1
    zeta_a = -shifted
    zetat_a = clow + 0.5 * nk.einsum("abc,b,c->a", k, b, shifted)
    zetat_0 = c0 - nk.einsum("abc,a,b,c->", k, b, b, shifted) / 6.0
    sigma = (-2.0 * (psi + tau1 * c0 / 2.0) + nk.einsum("a,a->", clow, shifted)
             - nk.einsum("abc,a,b,c->", k, b, cup, shifted) / 6.0)
    return nk.concatenate([t, b, nk.stack([rho, zeta0]), zeta_a, nk.stack([zetat_0]), zetat_a, nk.stack([sigma])])


def iia_to_iib(form: CubicForm, p):
    """Inverse of the mirror map."""
    x = _vec(p)
    k = form.tensor
    t, b, rho, zeta, zetat, sigma = split_iia(x, form.n)
    h = eval_h(form, t)
    if float(nk.value(h)) <= 0 or float(nk.value(rho)) <= 0:
        raise DomainError("need h(t) > 0 and rho > 0")
    z0, za = zeta[0], zeta[1:]
    zt0, zta = zetat[0], zetat[1:]
    tau2 = nk.sqrt(2.0 * rho / h)
    tau1 = z0
    cup = -(za - b * z0)
    kbz = nk.einsum("abc,b,c->a", k, b, za)
    clow = zta + 0.5 * kbz
    kbbz = nk.einsum("abc,a,b,c->", k, b, b, za)
    c0 = zt0 - kbbz / 6.0
    kbz_shift = nk.einsum("abc,a,b,c->", k, b, za, za - b * z0)
    psi = (-sigma / 2.0 - (z0 / 2.0) * (zt0 - kbbz / 6.0) - nk.einsum("a,a->", za, zta + 0.5 * kbz) / 2.0
           - kbz_shift / 12.0)
    return nk.concatenate([nk.stack([tau1, tau2]), t, b, cup, clow, nk.stack([c0, psi])])


def mirror_differential(form: CubicForm, q) -> np.ndarray:
    """Closed-form Jacobian of the mirror map; rows IIA coordinates, columns IIB coordinates."""
    y = np.asarray(_vec(q), dtype=float)
    n = form.n
    k = form.tensor
    ia = ChartLayout(n)
    ib = IIBLayout(n)
    tau1, tau2, t, b, cup, clow, c0, _ = split_iib(y, n)
    h = float(eval_h(form, t))
    rho = tau2 * tau2 * h / 2.0
    dk_dt = -np.asarray(grad_h(form, t)) / h
    e_minus_k = 8.0 * h
    zeta_idx = np.arange(ia.zeta.start, ia.zeta.stop)
    zetat_idx = np.arange(ia.zetat.start, ia.zetat.stop)
    jac = np.zeros((ia.dim, ib.dim))

    # d/dtau2
    jac[ia.rho, ib.tau2] = tau2 * e_minus_k / 8.0
    # d/dt^a
    for a in range(n):
        col = ib.t.start + a
        jac[ia.rho, col] = -rho * dk_dt[a]
        jac[ia.t.start + a, col] = 1.0
    # d/dtau1
    col = ib.tau1
    jac[zeta_idx[0], col] = 1.0
    jac[zeta_idx[1:], col] = b
    jac[zetat_idx[1:], col] = -0.5 * np.einsum("abc,b,c->a", k, b, b)
    jac[zetat_idx[0], col] = np.einsum("abc,a,b,c->", k, b, b, b) / 6.0
    jac[ia.sigma, col] = -c0 - clow @ b + np.einsum("abc,a,b,c->", k, b, b, cup) / 6.0
    # d/db^a
    for a in range(n):
        col = ib.b.start + a
        jac[ia.b.start + a, col] = 1.0
        jac[zeta_idx[1 + a], col] = tau1
        jac[zetat_idx[1:], col] = np.einsum("bc,c->b", k[a], 0.5 * cup - tau1 * b)
        jac[zetat_idx[0], col] = (-np.einsum("bc,b,c->", k[a], b, cup) / 3.0
                                  + np.einsum("bc,b,c->", k[a], b, b) * tau1 / 2.0)
        jac[ia.sigma, col] = (-clow[a] * tau1 + tau1 * np.einsum("bc,b,c->", k[a], b, cup) / 3.0
                              - np.einsum("bc,b,c->", k[a], cup, cup) / 6.0)
    # d/dc^a
    for a in range(n):
        col = ib.cup.start + a
        jac[zeta_idx[1 + a], col] = -1.0
        jac[zetat_idx[1:], col] = 0.5 * np.einsum("bc,c->b", k[a], b)
        jac[zetat_idx[0], col] = -np.einsum("bc,b,c->", k[a], b, b) / 6.0
        jac[ia.sigma, col] = (clow[a] - np.einsum("bc,b,c->", k[a], b, cup) / 3.0
                              + np.einsum("bc,b,c->", k[a], b, b) * tau1 / 6.0)
    # d/dc_a
    for a in range(n):
        col = ib.clow.start + a
        jac[zetat_idx[1 + a], col] = 1.0
        # the sigma entry carries the tau1 b^a shift that differentiating the map produces
        jac[ia.sigma, col] = cup[a] - tau1 * b[a]
    # d/dc_0 and d/dpsi
    jac[zetat_idx[0], ib.c0] = 1.0
    jac[ia.sigma, ib.c0] = -tau1
    jac[ia.sigma, ib.psi] = -2.0
    return jac


def rho_from_tau2(form: CubicForm, t, tau2):
    """rho = tau2^2 exp(-K)/16 with K = -log(8h)."""
    return tau2 * tau2 * 8.0 * eval_h(form, t) / 16.0
