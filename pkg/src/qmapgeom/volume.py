"""Fiber volume density of the projection to the level set {h = 1}, and curve asymptotics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import numkernel as nk
from .cubic import (CubicError, CubicForm, CurveId, arclength, curve_form, curve_point, delta_h, eval_h, grad_h,
                    hess_h, hessian_det)
from .qk_metric import ChartLayout, DomainError, fiber_frame, metric_fs, radial_slice_tangents


@dataclass
class FiberPoint:
    r: float
    rho: float
    b: np.ndarray
    zeta: np.ndarray
    zetat: np.ndarray
    sigma: float


@dataclass
class DensitySample:
    base: np.ndarray
    fiber: FiberPoint
    delta_numeric: float
    delta_closed: float
    orthogonality: float

    @property
    def ratio(self) -> float:
        return self.delta_numeric / self.delta_closed


def chart_vector(base, fiber: FiberPoint) -> np.ndarray:
    p = np.asarray(base, dtype=float)
    return np.concatenate([fiber.r * p, fiber.b, [fiber.rho], fiber.zeta, fiber.zetat, [fiber.sigma]])


def density_numeric(form: CubicForm, base, fiber: FiberPoint, ortho_tol: float = 1e-10):
    """sqrt det of the metric on the fiber frame, made orthogonal to the level set if needed.

    Returns (density, orthogonality residual before projection).
    """
    p = np.asarray(base, dtype=float)
    if abs(float(eval_h(form, p)) - 1.0) > 1e-10 * (1.0 + np.abs(p).max() ** 3):
        raise CubicError("base point must satisfy h = 1")
    x = chart_vector(p, fiber)
    gram = metric_fs(form, x, 0.0).gram
    frame = fiber_frame(form, p, fiber.r)
    lay = ChartLayout(form.n)
    tang = radial_slice_tangents(form, p)
    base_vecs = np.zeros((len(tang), lay.dim))
    base_vecs[:, lay.t] = fiber.r * tang
    cross = base_vecs @ gram @ frame.T if len(tang) else np.zeros((0, len(frame)))
    ortho = float(np.abs(cross).max()) if cross.size else 0.0
    if ortho > ortho_tol:
        gb = base_vecs @ gram @ base_vecs.T
        frame = frame - (np.linalg.solve(gb, cross)).T @ base_vecs
    fg = frame @ gram @ frame.T
    eig = nk.sym_eigvals(fg)
    if eig[0] <= 0:
        raise DomainError("fiber Gram matrix is not positive definite")
    return float(np.sqrt(np.linalg.det(fg))), ortho


def density_closed(form: CubicForm, base, fiber: FiberPoint) -> float:
    n = form.n
    return delta_h(form, base) / (fiber.rho ** (n + 3) * fiber.r ** (n + 1))


def density_sample(form: CubicForm, base, fiber: FiberPoint) -> DensitySample:
    num, ortho = density_numeric(form, base, fiber)
    return DensitySample(np.asarray(base, dtype=float), fiber, num, density_closed(form, base, fiber), ortho)


def gamma_matrix(form: CubicForm, p) -> np.ndarray:
    k = form.tensor
    p = np.asarray(p, dtype=float)
    kp = np.einsum("abc,c->ab", k, p)
    kpp = np.einsum("abc,b,c->a", k, p, p)
    return -kp + 0.25 * np.outer(kpp, kpp)


def gamma_det_residual(form: CubicForm, p) -> float:
    """|det gamma - (1/2)(-1)^(n-1) det d^2 h|."""
    n = form.n
    return abs(np.linalg.det(gamma_matrix(form, p)) - 0.5 * (-1) ** (n - 1) * hessian_det(form, p))


def cone_metric_euler(form: CubicForm, p) -> float:
    """g_U(xi, xi) for the Euler field xi = t, where g_U = -d^2 log h = -d^2 h / h + (dh/h)^2."""
    p = np.asarray(p, dtype=float)
    h = float(eval_h(form, p))
    g = -np.asarray(hess_h(form, p)) / h + np.outer(grad_h(form, p), grad_h(form, p)) / h**2
    return float(p @ g @ p)


def random_fiber(n: int, rng: np.random.Generator, r_range=(0.5, 2.0)) -> FiberPoint:
    return FiberPoint(float(rng.uniform(*r_range)), float(rng.uniform(0.3, 3.0)), rng.uniform(-2, 2, n),
                      rng.uniform(-2, 2, n + 1), rng.uniform(-2, 2, n + 1), float(rng.uniform(-2, 2)))


def curve_density_profile(curve: CurveId, x1_values, fiber: FiberPoint):
    """Rows (x1, s, delta_numeric, delta_closed, ratio) along a catalogue curve."""
    form = curve_form(curve)
    rows = []
    for x1 in x1_values:
        p = curve_point(curve, x1)
        smp = density_sample(form, p, fiber)
        rows.append((float(x1), arclength(curve, x1), smp.delta_numeric, smp.delta_closed, smp.ratio))
    return rows


class FitError(ValueError):
    """Not enough samples or range for a slope fit."""


def asymptotic_fit(curve: CurveId, x1_values, fiber: FiberPoint | None = None, min_samples: int = 20) -> float:
    """Least-squares slope of log(density) against arclength at fixed fiber point."""
    if len(x1_values) < min_samples:
        raise FitError(f"need at least {min_samples} samples, got {len(x1_values)}")
    fiber = FiberPoint(1.0, 1.0, np.zeros(2), np.zeros(3), np.zeros(3), 0.0) if fiber is None else fiber
    rows = curve_density_profile(curve, x1_values, fiber)
    s = np.array([r[1] for r in rows])
    logd = np.log([r[2] for r in rows])
    if np.ptp(s) <= 0:
        raise FitError("samples do not span a range of arclength")
    slope, _ = np.polyfit(s, logd, 1)
    return float(slope)


def asymptotic_window(curve: CurveId, count: int = 40) -> np.ndarray:
    """x1 values deep in the open end of each curve.

    The complete branch stops at x1 = 100: past that, h = x1^3 - 3 x1 x2^2 = 1 cancels
    terms of size x1^3 and the fiber Gram matrix loses definiteness in double precision.
    """
    if curve is CurveId.HOMOGENEOUS:
        return np.geomspace(np.exp(-3.0), np.exp(3.0), count)
    if curve is CurveId.COMPLETE:
        return np.geomspace(10.0, 100.0, count)
    return np.geomspace(1e-10, 1e-8, count)
