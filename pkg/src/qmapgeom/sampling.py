"""Seeded rejection sampler for admissible chart points."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cubic import CubicForm, eval_h
from .qk_metric import ChartLayout, DomainError, is_positive, metric_fs


class SamplingExhausted(DomainError):
    """The rejection sampler gave up before finding a valid point."""


@dataclass
class SamplerBox:
    t_scale: float = 0.5  # t in base +- t_scale * max|base|, so zero components also vary
    axion: float = 2.0  # b, zeta, zetatilde, sigma in [-axion, axion]
    rho: tuple = (0.3, 3.0)


@dataclass
class RejectionStats:
    accepted: int = 0
    rejected: int = 0
    min_eigenvalue: float = field(default=float("inf"))

    @property
    def rate(self) -> float:
        total = self.accepted + self.rejected
        return self.rejected / total if total else 0.0

    def as_dict(self) -> dict:
        return {"accepted": self.accepted, "rejected": self.rejected, "rejection_rate": self.rate,
                "min_eigenvalue": self.min_eigenvalue if self.accepted else None}


class Sampler:
    """Draws IIA points around a base point; each one has h(t) > 0 and a positive definite metric at c."""

    def __init__(self, form: CubicForm, base, rng: np.random.Generator, c: float = 0.0,
                 box: SamplerBox | None = None, max_tries: int = 1000):
        self.form = form
        self.base = np.asarray(base, dtype=float)
        self.rng = rng
        self.c = c
        self.box = SamplerBox() if box is None else box
        self.max_tries = max_tries
        self.stats = RejectionStats()
        self.layout = ChartLayout(form.n)

    def _propose(self) -> np.ndarray:
        n, box, rng = self.form.n, self.box, self.rng
        half = box.t_scale * np.abs(self.base).max()
        t = self.base + rng.uniform(-half, half, n)
        a = box.axion
        return np.concatenate([t, rng.uniform(-a, a, n), [rng.uniform(*box.rho)], rng.uniform(-a, a, 2 * n + 2),
                               [rng.uniform(-a, a)]])

    def draw(self) -> np.ndarray:
        for _ in range(self.max_tries):
            x = self._propose()
            if float(eval_h(self.form, x[self.layout.t])) <= 0:
                self.stats.rejected += 1
                continue
            try:
                gram = metric_fs(self.form, x, self.c).gram
            except DomainError:
                self.stats.rejected += 1
                continue
            if not is_positive(gram):
                self.stats.rejected += 1
                continue
            self.stats.accepted += 1
            self.stats.min_eigenvalue = min(self.stats.min_eigenvalue, float(np.linalg.eigvalsh(gram)[0]))
            return x
        raise SamplingExhausted(f"no admissible point after {self.max_tries} proposals")

    def draw_many(self, count: int) -> list:
        return [self.draw() for _ in range(count)]
