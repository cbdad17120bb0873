"""Real cubic forms h(t) = (1/6) k_abc t^a t^b t^c and points of their level set h = 1."""

from __future__ import annotations

import enum
import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np
from scipy import integrate

from . import numkernel as nk


class CubicError(ValueError):
    """Malformed cubic description or a point outside the admissible domain."""


@dataclass(frozen=True)
class CubicForm:
    """Symmetric coefficients k_abc, stored once per sorted 1-based triple."""

    n: int
    coeffs: tuple = field(default=())  # ((a, b, c, value), ...) with a <= b <= c, 1-based
    name: str = "custom"

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise CubicError(f"dimension must be a positive integer, got {self.n!r}")
        seen = set()
        for entry in self.coeffs:
            if len(entry) != 4:
                raise CubicError(f"coefficient entry {entry!r} must have four fields")
            a, b, c, _ = entry
            triple = (a, b, c)
            if any(not isinstance(i, int) or i < 1 or i > self.n for i in triple):
                raise CubicError(f"index out of range in {entry!r} for n={self.n}")
            if not (a <= b <= c):
                raise CubicError(f"triple {triple} is not sorted")
            if triple in seen:
                raise CubicError(f"duplicate triple {triple}")
            seen.add(triple)

    @classmethod
    def from_dense(cls, tensor, name: str = "custom") -> "CubicForm":
        k = np.asarray(tensor, dtype=float)
        n = k.shape[0]
        if k.shape != (n, n, n):
            raise CubicError("dense coefficients must have shape (n, n, n)")
        for perm in itertools.permutations(range(3)):
            if not np.allclose(k, k.transpose(perm)):
                raise CubicError("dense coefficients are not totally symmetric")
        coeffs = tuple(
            (a + 1, b + 1, c + 1, float(k[a, b, c]))
            for a, b, c in itertools.combinations_with_replacement(range(n), 3)
            if k[a, b, c] != 0
        )
        return cls(n, coeffs, name)

    @property
    def tensor(self) -> np.ndarray:
        """Dense fully symmetric array k[a, b, c] (0-based)."""
        k = np.zeros((self.n,) * 3)
        for a, b, c, v in self.coeffs:
            for i, j, l in set(itertools.permutations((a - 1, b - 1, c - 1))):
                k[i, j, l] = v
        return k

    def exact_tensor(self) -> dict:
        """Nonzero coefficients as exact fractions keyed by 0-based index triples (all orderings)."""
        out = {}
        for a, b, c, v in self.coeffs:
            fv = Fraction(v)
            for perm in set(itertools.permutations((a - 1, b - 1, c - 1))):
                out[perm] = fv
        return out

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "k": [list(e) for e in self.coeffs]})


def load_cubic(source) -> CubicForm:
    """Read ``{"n": .., "k": [[a, b, c, value], ...]}`` from a path, JSON string or dict."""
    if isinstance(source, dict):
        data = source
    else:
        text = str(source)
        path = Path(text)
        try:
            is_file = path.is_file()
        except OSError:
            is_file = False
        if is_file:
            text = path.read_text()
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise CubicError(f"cannot parse cubic description: {exc}") from exc
    if not isinstance(data, dict) or "n" not in data or "k" not in data:
        raise CubicError("cubic description needs keys 'n' and 'k'")
    entries = []
    for e in data["k"]:
        if not isinstance(e, (list, tuple)) or len(e) != 4:
            raise CubicError(f"coefficient entry {e!r} must be [a, b, c, value]")
        a, b, c, v = e
        if any(isinstance(i, bool) or not isinstance(i, int) for i in (a, b, c)):
            raise CubicError(f"indices in {e!r} must be integers")
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise CubicError(f"coefficient in {e!r} must be numeric")
        entries.append((a, b, c, float(v)))
    return CubicForm(int(data["n"]), tuple(entries), data.get("name", "custom"))


def homogeneous() -> CubicForm:
    return CubicForm(2, ((1, 1, 2, 2.0),), "homog")


def complete_inhomogeneous() -> CubicForm:
    return CubicForm(2, ((1, 1, 1, 6.0), (1, 2, 2, -2.0)), "complete")


def incomplete_inhomogeneous() -> CubicForm:
    return CubicForm(2, ((1, 1, 1, 6.0), (1, 2, 2, 2.0)), "incomplete")


def single_modulus() -> CubicForm:
    return CubicForm(1, ((1, 1, 1, 6.0),), "n1")


def eval_h(form: CubicForm, t):
    k = form.tensor
    return nk.einsum("abc,a,b,c->", k, t, t, t) / 6.0


def grad_h(form: CubicForm, t):
    return 0.5 * nk.einsum("abc,b,c->a", form.tensor, t, t)


def hess_h(form: CubicForm, t):
    return nk.einsum("abc,c->ab", form.tensor, t)


def hessian_det(form: CubicForm, t) -> float:
    return float(np.linalg.det(np.atleast_2d(hess_h(form, np.asarray(t, dtype=float)))))


def log_hessian_metric(form: CubicForm, t):
    """-(1/4) d^2 log h at t, any scale; positive definite exactly on the admissible cone."""
    k = form.tensor
    h = eval_h(form, t)
    kt = nk.einsum("abc,c->ab", k, t)
    ktt = nk.einsum("abc,b,c->a", k, t, t)
    return -kt / (4.0 * h) + nk.einsum("a,b->ab", ktt, ktt) / (16.0 * h * h)


def psk_metric_valid(form: CubicForm, t, tol: float = 1e-12) -> bool:
    t = np.asarray(t, dtype=float)
    h = float(eval_h(form, t))
    if not np.isfinite(h) or h <= 0:
        return False
    g = np.atleast_2d(log_hessian_metric(form, t))
    return bool(nk.sym_eigvals(g)[0] > tol * (1.0 + np.abs(g).max()))


@dataclass(frozen=True)
class PSRPoint:
    """A point on the level set h = 1 that lies in the domain of a positive metric."""

    form: CubicForm
    coords: np.ndarray

    @classmethod
    def project(cls, form: CubicForm, t) -> "PSRPoint":
        t = np.asarray(t, dtype=float)
        if t.shape != (form.n,):
            raise CubicError(f"expected {form.n} coordinates, got shape {t.shape}")
        h = float(eval_h(form, t))
        if not np.isfinite(h) or h <= 0:
            raise CubicError(f"h(t) = {h} is not positive; cannot project to h = 1")
        p = t * h ** (-1.0 / 3.0)
        if not psk_metric_valid(form, p):
            raise CubicError("metric is not positive definite at this point")
        return cls(form, p)


def psr_metric(form: CubicForm, p, u, v=None) -> float:
    """-(d^2 h)(u, v) for tangent vectors to {h = 1} at p (v defaults to u)."""
    p = np.asarray(p, dtype=float)
    u = np.asarray(u, dtype=float)
    v = u if v is None else np.asarray(v, dtype=float)
    grad = grad_h(form, p)
    for w in (u, v):
        if abs(grad @ w) > 1e-10 * (1.0 + np.linalg.norm(grad) * np.linalg.norm(w)):
            raise CubicError("vector is not tangent to the level set h = 1")
    return float(-(u @ hess_h(form, p) @ v))


def delta_h(form: CubicForm, p) -> float:
    """|det d^2 h(p)|^(1/2)."""
    det = hessian_det(form, p)
    if det == 0.0:
        raise CubicError("Hessian of h is degenerate at this point")
    return float(np.sqrt(abs(det)))


def find_positive_point(form: CubicForm, rng: np.random.Generator, tries: int = 2000):
    """Random search for a point with h > 0 and a positive metric."""
    for _ in range(tries):
        t = rng.normal(size=form.n)
        if eval_h(form, t) < 0:
            t = -t
        if psk_metric_valid(form, t, tol=1e-6):
            return PSRPoint.project(form, t)
    return None


def random_integer_cubic(n: int, seed: int, bound: int = 3, attempts: int = 200):
    """Seeded random integer cubic together with a base point where its metric is positive."""
    rng = np.random.default_rng(seed)
    triples = list(itertools.combinations_with_replacement(range(1, n + 1), 3))
    for _ in range(attempts):
        vals = rng.integers(-bound, bound + 1, size=len(triples))
        if not vals.any():
            continue
        form = CubicForm(n, tuple((a, b, c, float(v)) for (a, b, c), v in zip(triples, vals) if v), f"rand{n}")
        p = find_positive_point(form, rng, tries=200)
        if p is not None:
            return form, p.coords
    raise CubicError(f"no admissible random cubic found for n={n}, seed={seed}")


BASE_POINTS = {
    "homog": np.array([1.0, 1.0]),
    "complete": np.array([1.0, 0.0]),
    "incomplete": np.array([0.5, np.sqrt(2.0 - 0.25)]),
    "n1": np.array([1.0]),
}


def preset(name: str, seed: int = 7):
    """Return (form, base point on h = 1) for a named catalogue entry."""
    if name == "homog":
        form = homogeneous()
    elif name == "complete":
        form = complete_inhomogeneous()
    elif name == "incomplete":
        form = incomplete_inhomogeneous()
    elif name == "n1":
        form = single_modulus()
    elif name == "rand3":
        return random_integer_cubic(3, seed)
    else:
        raise CubicError(f"unknown cubic preset {name!r}")
    return form, PSRPoint.project(form, BASE_POINTS[name]).coords


PRESET_NAMES = ("homog", "complete", "incomplete", "n1", "rand3")


class CurveId(enum.Enum):
    HOMOGENEOUS = "homogeneous"
    COMPLETE = "complete"
    INCOMPLETE = "incomplete"


_X1_MAX_INCOMPLETE = 4.0 ** (-1.0 / 3.0)


def curve_form(curve: CurveId) -> CubicForm:
    return {
        CurveId.HOMOGENEOUS: homogeneous,
        CurveId.COMPLETE: complete_inhomogeneous,
        CurveId.INCOMPLETE: incomplete_inhomogeneous,
    }[curve]()


def _check_curve_range(curve: CurveId, x1: float):
    ok = {
        CurveId.HOMOGENEOUS: x1 > 0,
        CurveId.COMPLETE: x1 >= 1.0,
        CurveId.INCOMPLETE: 0.0 < x1 < _X1_MAX_INCOMPLETE,
    }[curve]
    if not ok:
        raise CubicError(f"x1 = {x1} is outside the range of the {curve.value} curve")


def curve_point(curve: CurveId, x1: float) -> np.ndarray:
    """Point (x1, x2(x1)) on the chosen branch of h = 1."""
    x1 = float(x1)
    _check_curve_range(curve, x1)
    if curve is CurveId.HOMOGENEOUS:
        return np.array([x1, 1.0 / (x1 * x1)])
    if curve is CurveId.COMPLETE:
        return np.array([x1, np.sqrt(max(x1 * x1 - 1.0 / x1, 0.0))])
    return np.array([x1, np.sqrt(1.0 / x1 - x1 * x1)])


def curve_tangent(curve: CurveId, x1: float) -> np.ndarray:
    """Derivative of curve_point with respect to x1."""
    x1 = float(x1)
    p = curve_point(curve, x1)
    if curve is CurveId.HOMOGENEOUS:
        return np.array([1.0, -2.0 / x1**3])
    if curve is CurveId.COMPLETE:
        return np.array([1.0, (2.0 * x1 + 1.0 / x1**2) / (2.0 * p[1])])
    return np.array([1.0, -(1.0 / x1**2 + 2.0 * x1) / (2.0 * p[1])])


def curve_metric(curve: CurveId, x1: float) -> float:
    """Squared length of d/dx1 along the curve, from the induced metric."""
    form = curve_form(curve)
    return psr_metric(form, curve_point(curve, x1), curve_tangent(curve, x1))


CURVE_BASE_X1 = {
    CurveId.HOMOGENEOUS: 1.0,
    CurveId.COMPLETE: 1.0,
    CurveId.INCOMPLETE: _X1_MAX_INCOMPLETE,
}


def arclength(curve: CurveId, x1: float, tol: float = 1e-10) -> float:
    """Signed arclength from the curve's base point; increases towards the open end."""
    x1 = float(x1)
    if not (curve is CurveId.INCOMPLETE and x1 == _X1_MAX_INCOMPLETE):
        _check_curve_range(curve, x1)
    x0 = CURVE_BASE_X1[curve]
    if x1 == x0:
        return 0.0
    val, _ = integrate.quad(lambda x: np.sqrt(curve_metric(curve, x)), min(x0, x1), max(x0, x1),
                            epsabs=tol, epsrel=1e-13, limit=200)
    if curve is CurveId.INCOMPLETE:
        return val
    return val if x1 > x0 else -val
