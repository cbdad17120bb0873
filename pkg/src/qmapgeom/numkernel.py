"""Numeric kernel: array-valued forward-mode duals, finite differences, symmetric linear algebra.

A ``Dual`` carries a value array of any shape together with a dense array of
first partials whose trailing axis runs over the seeded input variables.  The
value may be real or complex; ``ComplexDual`` is the same type and exists as a
name for readability at call sites that work with holomorphic quantities.

Helper functions (``sqrt``, ``log``, ``einsum``, ``stack`` ...) accept both
duals and plain arrays, so geometry code is written once and evaluated either
numerically or with derivatives attached.
"""

from __future__ import annotations

import string
from dataclasses import dataclass

import numpy as np


class NumericError(ValueError):
    """Raised for singular or ill-conditioned numerical input."""


@dataclass(eq=False)
class Dual:
    val: np.ndarray
    der: np.ndarray

    __array_ufunc__ = None

    def __post_init__(self):
        self.val = np.asarray(self.val)
        self.der = np.asarray(self.der)
        if self.der.shape[:-1] != self.val.shape:
            raise ValueError(f"partials shape {self.der.shape} does not match value {self.val.shape}")

    @property
    def nvars(self) -> int:
        return self.der.shape[-1]

    @property
    def shape(self):
        return self.val.shape

    @property
    def ndim(self):
        return self.val.ndim

    def __len__(self):
        return len(self.val)

    def __getitem__(self, idx):
        if not isinstance(idx, tuple):
            idx = (idx,)
        if any(i is Ellipsis for i in idx):
            raise IndexError("Ellipsis indexing is not supported on Dual")
        return Dual(self.val[idx], self.der[idx + (slice(None),)])

    def __neg__(self):
        return Dual(-self.val, -self.der)

    def __pos__(self):
        return self

    def __add__(self, other):
        if isinstance(other, Dual):
            shape = np.broadcast_shapes(self.val.shape, other.val.shape)
            return Dual(self.val + other.val, _bcast(self.der, shape) + _bcast(other.der, shape))
        other = np.asarray(other)
        val = self.val + other
        return Dual(val, _bcast(self.der, val.shape))

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Dual):
            val = self.val * other.val
            der = self.der * other.val[..., None] + self.val[..., None] * other.der
            return Dual(val, _bcast(der, val.shape))
        other = np.asarray(other)
        val = self.val * other
        return Dual(val, _bcast(self.der * other[..., None], val.shape))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Dual):
            return self * other.reciprocal()
        return self * (1.0 / np.asarray(other))

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def reciprocal(self):
        inv = 1.0 / self.val
        return Dual(inv, -self.der * (inv * inv)[..., None])

    def __pow__(self, p):
        if isinstance(p, Dual):
            return exp(log(self) * p)
        p = float(p) if np.isrealobj(p) else p
        if p == 0:
            return Dual(np.ones_like(self.val), np.zeros_like(self.der))
        val = self.val ** p
        return Dual(val, self.der * (p * self.val ** (p - 1))[..., None])

    def conj(self):
        return Dual(np.conj(self.val), np.conj(self.der))

    @property
    def real(self):
        return Dual(np.real(self.val), np.real(self.der))

    @property
    def imag(self):
        return Dual(np.imag(self.val), np.imag(self.der))

    @property
    def T(self):
        return transpose(self)

    def sum(self, axis=None):
        if axis is None:
            axis = tuple(range(self.val.ndim))
        axis = _norm_axes(axis, self.val.ndim)
        return Dual(self.val.sum(axis=axis), self.der.sum(axis=axis))

    def __matmul__(self, other):
        return matmul(self, other)

    def __rmatmul__(self, other):
        return matmul(other, self)

    def __repr__(self):
        return f"Dual(val={self.val!r}, nvars={self.nvars})"


ComplexDual = Dual


def _bcast(der, shape):
    return np.broadcast_to(der, tuple(shape) + (der.shape[-1],)) if der.shape[:-1] != tuple(shape) else der


def _norm_axes(axis, ndim):
    if isinstance(axis, int):
        axis = (axis,)
    return tuple(a % ndim for a in axis)


def is_dual(x) -> bool:
    return isinstance(x, Dual)


def value(x):
    """Strip derivative information."""
    return x.val if isinstance(x, Dual) else np.asarray(x)


def seed(x, nvars: int | None = None, offset: int = 0) -> Dual:
    """Seed a 1-d array as independent variables ``offset .. offset+len-1``."""
    x = np.asarray(x)
    m = x.size if nvars is None else nvars
    der = np.zeros(x.shape + (m,), dtype=float)
    flat = der.reshape(x.size, m)
    flat[np.arange(x.size), offset + np.arange(x.size)] = 1.0
    return Dual(x.copy(), der)


def seed_direction(x, direction) -> Dual:
    """Dual with a single derivative slot along ``direction`` (may be complex)."""
    x = np.asarray(x)
    d = np.asarray(direction)
    return Dual(x.copy(), d.reshape(x.shape + (1,)))


def constant(x, nvars: int) -> Dual:
    x = np.asarray(x)
    return Dual(x, np.zeros(x.shape + (nvars,), dtype=np.result_type(x, float)))


def sqrt(x):
    if isinstance(x, Dual):
        v = np.sqrt(x.val)
        return Dual(v, x.der * (0.5 / v)[..., None])
    return np.sqrt(x)


def log(x):
    if isinstance(x, Dual):
        return Dual(np.log(x.val), x.der / x.val[..., None])
    return np.log(x)


def exp(x):
    if isinstance(x, Dual):
        v = np.exp(x.val)
        return Dual(v, x.der * v[..., None])
    return np.exp(x)


def conj(x):
    return x.conj() if isinstance(x, Dual) else np.conj(x)


def real(x):
    return x.real if isinstance(x, Dual) else np.real(x)


def imag(x):
    return x.imag if isinstance(x, Dual) else np.imag(x)


def absval(x):
    """Absolute value of a real quantity; derivative uses the sign away from zero."""
    if isinstance(x, Dual):
        s = np.sign(x.val)
        return Dual(np.abs(x.val), x.der * s[..., None])
    return np.abs(x)


def transpose(x):
    if isinstance(x, Dual):
        nd = x.val.ndim
        axes = tuple(reversed(range(nd))) + (nd,)
        return Dual(x.val.T, x.der.transpose(axes))
    return np.transpose(x)


def _nvars(args):
    for a in args:
        if isinstance(a, Dual):
            return a.nvars
    return None


def stack(items, axis: int = 0):
    m = _nvars(items)
    if m is None:
        return np.stack([np.asarray(i) for i in items], axis=axis)
    duals = [i if isinstance(i, Dual) else constant(i, m) for i in items]
    ndim = duals[0].val.ndim + 1
    ax = axis % ndim
    return Dual(np.stack([d.val for d in duals], axis=ax), np.stack([d.der for d in duals], axis=ax))


def concatenate(items, axis: int = 0):
    m = _nvars(items)
    if m is None:
        return np.concatenate([np.asarray(i) for i in items], axis=axis)
    duals = [i if isinstance(i, Dual) else constant(i, m) for i in items]
    ax = axis % duals[0].val.ndim
    return Dual(np.concatenate([d.val for d in duals], axis=ax), np.concatenate([d.der for d in duals], axis=ax))


def einsum(subscripts: str, *operands):
    """Product-rule einsum over any mix of duals and arrays (explicit ``->`` required)."""
    if "->" not in subscripts:
        raise ValueError("einsum requires explicit output subscripts")
    lhs, out = subscripts.replace(" ", "").split("->")
    terms = lhs.split(",")
    vals = [value(o) for o in operands]
    plain = np.einsum(subscripts, *vals)
    if _nvars(operands) is None:
        return plain
    used = set(subscripts)
    extra = next(ch for ch in string.ascii_letters if ch not in used)
    der = None
    for k, op in enumerate(operands):
        if not isinstance(op, Dual):
            continue
        spec = ",".join(t + extra if j == k else t for j, t in enumerate(terms)) + "->" + out + extra
        args = [op.der if j == k else vals[j] for j in range(len(operands))]
        piece = np.einsum(spec, *args)
        der = piece if der is None else der + piece
    return Dual(plain, der)


def matmul(a, b):
    av, bv = value(a), value(b)
    la = "ij" if av.ndim == 2 else "j"
    lb = "jk" if bv.ndim == 2 else "j"
    out = ("i" if av.ndim == 2 else "") + ("k" if bv.ndim == 2 else "")
    return einsum(f"{la},{lb}->{out}", a, b)


def outer(a, b):
    return einsum("i,j->ij", a, b)


def inv(a):
    """Matrix inverse with the derivative rule d(A^-1) = -A^-1 dA A^-1."""
    if isinstance(a, Dual):
        ainv = np.linalg.inv(a.val)
        der = -np.einsum("ij,jkz,kl->ilz", ainv, a.der, ainv)
        return Dual(ainv, der)
    return np.linalg.inv(a)


def zeros_like_vars(shape, nvars, dtype=float):
    return Dual(np.zeros(shape, dtype=dtype), np.zeros(tuple(shape) + (nvars,), dtype=dtype))


def fd_step(x: float) -> float:
    return 1e-6 * (1.0 + abs(x))


def fd_jacobian(f, x, step=None) -> np.ndarray:
    """Central-difference Jacobian of a vector map; rows are outputs, columns inputs."""
    x = np.asarray(x, dtype=float)
    f0 = np.asarray(f(x))
    jac = np.zeros(f0.shape + (x.size,), dtype=np.result_type(f0, float))
    for k in range(x.size):
        h = fd_step(x[k]) if step is None else step
        xp = x.copy()
        xm = x.copy()
        xp[k] += h
        xm[k] -= h
        jac[..., k] = (np.asarray(f(xp)) - np.asarray(f(xm))) / (2 * h)
    return jac


def dual_jacobian(f, x) -> np.ndarray:
    out = f(seed(np.asarray(x, dtype=float)))
    if not isinstance(out, Dual):
        return np.zeros(np.shape(out) + (np.size(x),))
    return out.der


class SymMatrix:
    """Symmetric matrix wrapper that checks symmetry on construction."""

    def __init__(self, entries, tol: float = 1e-10):
        a = np.array(entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise NumericError("SymMatrix needs a square matrix")
        scale = 1.0 + np.max(np.abs(a), initial=0.0)
        if np.max(np.abs(a - a.T), initial=0.0) > tol * scale:
            raise NumericError("matrix is not symmetric")
        self.entries = 0.5 * (a + a.T)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)

    def __repr__(self):
        return f"SymMatrix({self.entries!r})"


def _as_square(a) -> np.ndarray:
    a = a.entries if isinstance(a, SymMatrix) else np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("expected a square matrix")
    return a


def sym_invert(a, max_cond: float = 1e14) -> np.ndarray:
    m = _as_square(a)
    cond = np.linalg.cond(m)
    if not np.isfinite(cond) or cond > max_cond:
        raise NumericError(f"matrix is singular or ill-conditioned (cond={cond:.3e})")
    inv_m = np.linalg.inv(m)
    return 0.5 * (inv_m + inv_m.T)


def sym_eigvals(a, tol: float = 1e-15, max_sweeps: int = 100) -> np.ndarray:
    """Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending."""
    m = _as_square(a).copy()
    m = 0.5 * (m + m.T)
    n = m.shape[0]
    if n == 0:
        return np.zeros(0)
    scale = np.max(np.abs(m), initial=0.0)
    if scale == 0.0:
        return np.zeros(n)
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.triu(m, 1) ** 2))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = m[p, q]
                if abs(apq) <= 1e-300:
                    continue
                theta = (m[q, q] - m[p, p]) / (2.0 * apq)
                if theta == 0:
                    t = 1.0
                elif abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                rot_p = m[:, p].copy()
                rot_q = m[:, q].copy()
                m[:, p] = c * rot_p - s * rot_q
                m[:, q] = s * rot_p + c * rot_q
                rot_p = m[p, :].copy()
                rot_q = m[q, :].copy()
                m[p, :] = c * rot_p - s * rot_q
                m[q, :] = s * rot_p + c * rot_q
    return np.sort(np.diag(m))
