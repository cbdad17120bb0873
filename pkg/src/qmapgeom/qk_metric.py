"""One-loop deformed quaternionic Kähler metric on the IIA chart, and its tree-level member.

Chart ordering (dimension 4n+4): t^1..t^n, b^1..b^n, rho, zeta^0..zeta^n,
zetatilde_0..zetatilde_n, sigma.  Metric builders accept a flat coordinate
vector that may be a ``Dual``; ``metric_jet`` returns the Gram matrix together
with its first partials.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import numkernel as nk
from . import special_kahler as sk
from .cubic import CubicError, CubicForm, eval_h, psr_metric


class DomainError(ValueError):
    """Point outside the domain where the metric is defined and positive."""


@dataclass(frozen=True)
class ChartLayout:
    n: int

    @property
    def dim(self) -> int:
        return 4 * self.n + 4

    @property
    def t(self) -> slice:
        return slice(0, self.n)

    @property
    def b(self) -> slice:
        return slice(self.n, 2 * self.n)

    @property
    def rho(self) -> int:
        return 2 * self.n

    @property
    def zeta(self) -> slice:
        return slice(2 * self.n + 1, 3 * self.n + 2)

    @property
    def zetat(self) -> slice:
        return slice(3 * self.n + 2, 4 * self.n + 3)

    @property
    def sigma(self) -> int:
        return 4 * self.n + 3

    def labels(self) -> list[str]:
        n = self.n
        return ([f"t{a}" for a in range(1, n + 1)] + [f"b{a}" for a in range(1, n + 1)] + ["rho"]
                + [f"zeta{i}" for i in range(n + 1)] + [f"zetat{i}" for i in range(n + 1)] + ["sigma"])


@dataclass(frozen=True)
class IIAPoint:
    t: np.ndarray
    b: np.ndarray
    rho: float
    zeta: np.ndarray
    zetat: np.ndarray
    sigma: float

    @property
    def n(self) -> int:
        return len(self.t)

    def to_vector(self) -> np.ndarray:
        return np.concatenate([self.t, self.b, [self.rho], self.zeta, self.zetat, [self.sigma]]).astype(float)

    @classmethod
    def from_vector(cls, x, n: int) -> "IIAPoint":
        x = np.asarray(x, dtype=float)
        lay = ChartLayout(n)
        if x.shape != (lay.dim,):
            raise ValueError(f"expected a vector of length {lay.dim}")
        return cls(x[lay.t].copy(), x[lay.b].copy(), float(x[lay.rho]), x[lay.zeta].copy(),
                   x[lay.zetat].copy(), float(x[lay.sigma]))


def split_iia(x, n: int):
    lay = ChartLayout(n)
    return x[lay.t], x[lay.b], x[lay.rho], x[lay.zeta], x[lay.zetat], x[lay.sigma]


def _as_vector(p) -> np.ndarray:
    return p.to_vector() if isinstance(p, IIAPoint) else p


@dataclass
class MetricTensor:
    chart: str
    gram: np.ndarray
    imag_residue: float = 0.0

    @property
    def dim(self) -> int:
        return self.gram.shape[0]


def _basis(n: int, sl) -> np.ndarray:
    lay = ChartLayout(n)
    e = np.eye(lay.dim)
    return e[sl]


def check_domain(form: CubicForm, x, c: float = 0.0):
    xv = nk.value(x)
    t, _, rho, _, _, _ = split_iia(xv, form.n)
    h = float(eval_h(form, t))
    if not np.isfinite(h) or h <= 0:
        raise DomainError(f"h(t) = {h} is not positive")
    if not rho > max(0.0, -2.0 * c):
        raise DomainError(f"rho = {rho} is outside the domain for c = {c}")


def metric_parts(form: CubicForm, x, c: float = 0.0):
    """Gram matrix (possibly dual) and the symmetrized Hermitian term before taking its real part."""
    n = form.n
    lay = ChartLayout(n)
    t, b, rho, zeta, zetat, _ = split_iia(x, n)
    dim = lay.dim

    gpsk = sk.psk_metric_block(form, t)
    embed_t = _basis(n, lay.t)
    embed_b = _basis(n, lay.b)
    psk_full = nk.einsum("ab,am,bn->mn", gpsk, embed_t, embed_t) + nk.einsum("ab,am,bn->mn", gpsk, embed_b, embed_b)

    e_rho = np.eye(dim)[lay.rho]
    e_sigma = np.eye(dim)[lay.sigma]
    e_zeta = _basis(n, lay.zeta)
    e_zetat = _basis(n, lay.zetat)

    tau = sk.period_matrix(form, t, b)
    ninv = sk.inverse_imag_period_matrix(form, t, b)
    z = sk.special_coordinates(t, b)
    kn = sk.kahler_norm(form, t, b)
    amat = ninv - nk.einsum("i,j->ij", z, nk.conj(z)) * (2.0 * (rho + c) / (rho * kn))
    w = e_zetat - nk.einsum("ij,jm->im", tau, e_zeta)
    herm = nk.einsum("ij,im,jn->mn", amat, w, nk.conj(w))
    herm_sym = 0.5 * (herm + nk.transpose(herm))

    dck = sk.dc_kahler_potential(form, t)
    theta = (e_sigma + nk.einsum("i,im->m", zetat, e_zeta) - nk.einsum("i,im->m", zeta, e_zetat)
             - 4.0 * c * nk.einsum("a,am->m", dck, embed_b))

    gram = (
        psk_full * ((rho + c) / rho)
        + np.outer(e_rho, e_rho) * ((rho + 2.0 * c) / (4.0 * rho * rho * (rho + c)))
        - nk.real(herm_sym) / (4.0 * rho)
        + nk.einsum("m,n->mn", theta, theta) * ((rho + c) / (64.0 * rho * rho * (rho + 2.0 * c)))
    )
    return gram, herm_sym


def metric_fs(form: CubicForm, p, c: float = 0.0, check_positive: bool = False) -> MetricTensor:
    x = _as_vector(p)
    check_domain(form, x, c)
    gram, herm = metric_parts(form, np.asarray(x, dtype=float), c)
    gram = 0.5 * (gram + gram.T)
    residue = float(np.abs(np.imag(herm)).max())
    if check_positive and not is_positive(gram):
        raise DomainError("metric is not positive definite at this point")
    return MetricTensor("IIA", gram, residue)


def metric_tree(form: CubicForm, p) -> MetricTensor:
    return metric_fs(form, p, 0.0)


def metric_jet(form: CubicForm, p, c: float = 0.0):
    """Gram matrix and its partials d_k g_{mn} (last axis k), by forward-mode differentiation."""
    x = np.asarray(_as_vector(p), dtype=float)
    check_domain(form, x, c)
    gram, _ = metric_parts(form, nk.seed(x), c)
    return gram.val, gram.der


def is_positive(gram: np.ndarray) -> bool:
    eig = nk.sym_eigvals(gram)
    return bool(eig[0] > 1e-10 * np.trace(gram))


def min_eigenvalue(gram: np.ndarray) -> float:
    return float(nk.sym_eigvals(gram)[0])


def radial_slice_tangents(form: CubicForm, p_unit) -> np.ndarray:
    """Orthonormal-in-Euclidean basis of the tangent space of {h = 1} at a unit point (rows)."""
    from .cubic import grad_h

    grad = np.asarray(grad_h(form, np.asarray(p_unit, dtype=float)))
    _, _, vt = np.linalg.svd(grad.reshape(1, -1))
    return vt[1:]


def decomposition_check(form: CubicForm, p, fiber_displacement=None) -> dict:
    """Compare the metric on the level-set directions with a quarter of the PSR metric.

    The point must have h(t) = 1.  Returns the residual of the quarter-metric
    relation and of orthogonality between level-set and fiber directions.
    """
    x = np.asarray(_as_vector(p), dtype=float)
    lay = ChartLayout(form.n)
    t = x[lay.t]
    if abs(float(eval_h(form, t)) - 1.0) > 1e-10:
        raise CubicError("decomposition check needs a point with h(t) = 1")
    gram = metric_fs(form, x, 0.0).gram
    tangents = radial_slice_tangents(form, t)
    lifted = np.zeros((len(tangents), lay.dim))
    lifted[:, lay.t] = tangents
    quarter_res = 0.0
    for i, u in enumerate(tangents):
        for j, v in enumerate(tangents):
            expected = 0.25 * psr_metric(form, t, u, v)
            quarter_res = max(quarter_res, abs(lifted[i] @ gram @ lifted[j] - expected))
    fiber = fiber_frame(form, t, 1.0)
    if fiber_displacement is not None:
        fiber = np.asarray(fiber_displacement, dtype=float).reshape(-1, lay.dim)
    ortho = float(np.abs(lifted @ gram @ fiber.T).max()) if len(tangents) else 0.0
    return {"quarter_metric": quarter_res, "orthogonality": ortho}


def fiber_frame(form: CubicForm, p_unit, r: float) -> np.ndarray:
    """Rows: IIA components of d/dr (t = r p) and the coordinate fields of rho, b, zeta, zetatilde, sigma."""
    lay = ChartLayout(form.n)
    dim = lay.dim
    rows = []
    d_r = np.zeros(dim)
    d_r[lay.t] = np.asarray(p_unit, dtype=float)
    rows.append(d_r)
    eye = np.eye(dim)
    rows.append(eye[lay.rho])
    rows.extend(eye[lay.b])
    rows.extend(eye[lay.zeta])
    rows.extend(eye[lay.zetat])
    rows.append(eye[lay.sigma])
    return np.array(rows)
