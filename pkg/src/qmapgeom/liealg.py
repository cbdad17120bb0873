"""The (3n+6)-dimensional isometry algebra as exact structure constants.

Basis order: D, Xe, Xf, Xh, P1..Pn, Xup0..Xupn, V1..Vn, Z.  Brackets are stored
as ``{(i, j): {k: Fraction}}`` with i < j implied by antisymmetry.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import sympy

from .cubic import CubicForm
from .isometries import Gen


class JacobiError(RuntimeError):
    """The installed bracket table is not a Lie algebra."""


@dataclass
class LieAlgebraSpec:
    n: int
    basis: list
    brackets: dict  # (i, j) -> {k: Fraction}

    @property
    def dim(self) -> int:
        return len(self.basis)

    def index(self, gen: Gen) -> int:
        return self.basis.index(gen)

    def bracket_basis(self, i: int, j: int) -> dict:
        if (i, j) in self.brackets:
            return self.brackets[(i, j)]
        if (j, i) in self.brackets:
            return {k: -v for k, v in self.brackets[(j, i)].items()}
        return {}

    def bracket(self, x, y) -> list:
        """Bracket of two elements given as coefficient vectors (Fractions or ints)."""
        out = [Fraction(0)] * self.dim
        for i, xi in enumerate(x):
            if xi == 0:
                continue
            for j, yj in enumerate(y):
                if yj == 0:
                    continue
                for k, v in self.bracket_basis(i, j).items():
                    out[k] += xi * yj * v
        return out

    def unit(self, gen: Gen) -> list:
        v = [Fraction(0)] * self.dim
        v[self.index(gen)] = Fraction(1)
        return v

    def ad_matrix(self, x) -> list:
        """Matrix of ad_x as rows-by-columns lists of Fractions; column j is [x, e_j]."""
        cols = [self.bracket(x, self.unit_index(j)) for j in range(self.dim)]
        return [[cols[j][i] for j in range(self.dim)] for i in range(self.dim)]

    def unit_index(self, j: int) -> list:
        v = [Fraction(0)] * self.dim
        v[j] = Fraction(1)
        return v


def build_algebra(form: CubicForm, check_jacobi: bool = True) -> LieAlgebraSpec:
    n = form.n
    basis = [Gen("D"), Gen("Xe"), Gen("Xf"), Gen("Xh")]
    basis += [Gen("P", a) for a in range(1, n + 1)]
    basis += [Gen("Xup", i) for i in range(n + 1)]
    basis += [Gen("V", a) for a in range(1, n + 1)]
    basis += [Gen("Z")]
    idx = {g: i for i, g in enumerate(basis)}
    k = form.exact_tensor()
    table: dict = {}

    def put(x: Gen, y: Gen, terms: dict):
        i, j = idx[x], idx[y]
        if (j, i) in table:
            raise JacobiError(f"bracket [{x}, {y}] installed twice")
        clean = {idx[g]: Fraction(v) for g, v in terms.items() if v != 0}
        if clean:
            table[(i, j)] = clean

    half = Fraction(1, 2)

    def p(i):
        return Gen("Xe") if i == 0 else Gen("P", i)

    # Heisenberg and the dilation D
    for i in range(n + 1):
        put(p(i), Gen("Xup", i), {Gen("Z"): -2})
        put(Gen("Xup", i), Gen("D"), {Gen("Xup", i): half})
        put(p(i), Gen("D"), {p(i): half})
    put(Gen("Z"), Gen("D"), {Gen("Z"): 1})

    # sl2 triple
    put(Gen("Xe"), Gen("Xf"), {Gen("Xh"): -1})
    put(Gen("Xh"), Gen("Xe"), {Gen("Xe"): -2})
    put(Gen("Xh"), Gen("Xf"), {Gen("Xf"): 2})

    # the translations V_a
    for a in range(1, n + 1):
        put(Gen("Xe"), Gen("V", a), {Gen("P", a): 1})
        for b in range(1, n + 1):
            terms = {Gen("Xup", c): k.get((a - 1, b - 1, c - 1), 0) for c in range(1, n + 1)}
            put(Gen("V", a), Gen("P", b), terms)
        put(Gen("V", a), Gen("Xup", a), {Gen("Xup", 0): 1})
        put(Gen("Xh"), Gen("V", a), {Gen("V", a): 1})

    # Xf
    for a in range(1, n + 1):
        put(Gen("Xf"), Gen("P", a), {Gen("V", a): 1})
    put(Gen("D"), Gen("Xf"), {Gen("Xf"): half})
    put(Gen("Z"), Gen("Xf"), {Gen("Xup", 0): half})

    # Xh on the Heisenberg part
    for a in range(1, n + 1):
        put(Gen("P", a), Gen("Xh"), {Gen("P", a): 1})
    put(Gen("Xh"), Gen("Xup", 0), {Gen("Xup", 0): 1})
    put(Gen("Z"), Gen("Xh"), {Gen("Z"): 1})

    alg = LieAlgebraSpec(n, basis, table)
    if check_jacobi:
        res = jacobi_residual(alg)
        if res != 0:
            raise JacobiError(f"Jacobi identity fails (residual {res})")
    return alg


def jacobi_residual(alg: LieAlgebraSpec) -> Fraction:
    worst = Fraction(0)
    units = [alg.unit_index(i) for i in range(alg.dim)]
    for i, j, l in itertools.combinations(range(alg.dim), 3):
        x, y, z = units[i], units[j], units[l]
        a = alg.bracket(x, alg.bracket(y, z))
        b = alg.bracket(y, alg.bracket(z, x))
        c = alg.bracket(z, alg.bracket(x, y))
        worst = max(worst, max(abs(a[m] + b[m] + c[m]) for m in range(alg.dim)))
    return worst


def nilradical_gens(n: int) -> list:
    return [Gen("V", a) for a in range(1, n + 1)] + [Gen("Z")] + [Gen("P", a) for a in range(1, n + 1)] + [
        Gen("Xup", i) for i in range(n + 1)]


def sl2_gens() -> list:
    return [Gen("Xe"), Gen("Xf"), Gen("Xh")]


def _rank(vectors: list) -> int:
    if not vectors:
        return 0
    return sympy.Matrix(vectors).rank()


def _span_basis(vectors: list) -> list:
    """Independent subset of the given vectors (exact)."""
    if not vectors:
        return []
    m = sympy.Matrix(vectors).T
    _, pivots = m.rref()
    return [vectors[i] for i in pivots]


def span_of(alg: LieAlgebraSpec, gens: list) -> list:
    return [alg.unit(g) for g in gens]


def lower_central_series(alg: LieAlgebraSpec, gens: list | None = None, max_steps: int = 20) -> list:
    """Dimensions of s, [s, s], [s, [s, s]], ... until the series stabilizes at zero or repeats."""
    gens = nilradical_gens(alg.n) if gens is None else gens
    top = _span_basis(span_of(alg, gens))
    current = top
    dims = [len(top)]
    for _ in range(max_steps):
        nxt = _span_basis([alg.bracket(x, y) for x in top for y in current])
        dims.append(len(nxt))
        if len(nxt) == 0 or len(nxt) == len(current):
            break
        current = nxt
    return dims


def is_ideal(alg: LieAlgebraSpec, gens: list) -> bool:
    sub = span_of(alg, gens)
    r = _rank(sub)
    for i in range(alg.dim):
        for s in sub:
            if _rank(sub + [alg.bracket(alg.unit_index(i), s)]) > r:
                return False
    return True


def trace_ad(alg: LieAlgebraSpec, x) -> Fraction:
    ad = alg.ad_matrix(x)
    return sum((ad[i][i] for i in range(alg.dim)), Fraction(0))


def element(alg: LieAlgebraSpec, terms: dict) -> list:
    v = [Fraction(0)] * alg.dim
    for g, c in terms.items():
        v[alg.index(g)] += Fraction(c)
    return v


def d_prime(alg: LieAlgebraSpec) -> list:
    """4D - Xh."""
    return element(alg, {Gen("D"): 4, Gen("Xh"): -1})


def ad_eigvals(alg: LieAlgebraSpec, x, gens: list | None = None) -> dict:
    """Eigenvalue -> multiplicity of ad_x restricted to the span of ``gens`` (must be invariant)."""
    gens = nilradical_gens(alg.n) if gens is None else gens
    cols = [alg.index(g) for g in gens]
    ad = alg.ad_matrix(x)
    for j in cols:
        for i in range(alg.dim):
            if i not in cols and ad[i][j] != 0:
                raise ValueError("subspace is not invariant under ad_x")
    block = sympy.Matrix([[sympy.Rational(ad[i][j].numerator, ad[i][j].denominator) for j in cols] for i in cols])
    return {Fraction(int(sympy.fraction(ev)[0]), int(sympy.fraction(ev)[1])): int(m)
            for ev, m in block.eigenvals().items()}


def integrality_check(alg: LieAlgebraSpec) -> bool:
    """True iff all structure constants among P_a, V_a, Xup_i, Z are integers."""
    gens = set(nilradical_gens(alg.n))
    idxs = {alg.index(g) for g in gens}
    for (i, j), terms in alg.brackets.items():
        if i in idxs and j in idxs:
            if any(v.denominator != 1 for v in terms.values()):
                return False
    return True


def cubic_span_rank(form: CubicForm) -> int:
    """Rank of the n^2 x n array (k_abc) with rows (a, b): full rank n means span{k_abc Xup_c} = span{Xup_c}."""
    k = form.tensor
    n = form.n
    return int(np.linalg.matrix_rank(k.reshape(n * n, n)))


def float_structure_constants(alg: LieAlgebraSpec) -> np.ndarray:
    c = np.zeros((alg.dim, alg.dim, alg.dim))
    for (i, j), terms in alg.brackets.items():
        for k, v in terms.items():
            c[i, j, k] = float(v)
            c[j, i, k] = -float(v)
    return c


def is_subalgebra(alg: LieAlgebraSpec, gens: list) -> bool:
    sub = span_of(alg, gens)
    r = _rank(sub)
    return all(_rank(sub + [alg.bracket(x, y)]) == r for x in sub for y in sub)


def is_ideal_in(alg: LieAlgebraSpec, small: list, big: list) -> bool:
    sub = span_of(alg, small)
    r = _rank(sub)
    return all(_rank(sub + [alg.bracket(x, y)]) == r for x in span_of(alg, big) for y in sub)


def semidirect_chain(alg: LieAlgebraSpec) -> dict:
    """Dimensions of h, n, u, g, each checked to be an ideal of the next one."""
    n = alg.n
    heis = [Gen("P", a) for a in range(1, n + 1)] + [Gen("Xup", i) for i in range(n + 1)] + [Gen("Z")]
    nil = heis + [Gen("V", a) for a in range(1, n + 1)]
    u = nil + sl2_gens()
    g = u + [Gen("D")]
    chain = [("h", heis), ("n", nil), ("u", u), ("g", g)]
    dims = {name: _rank(span_of(alg, gens)) for name, gens in chain}
    ok = all(is_subalgebra(alg, gens) for _, gens in chain)
    ok = ok and all(is_ideal_in(alg, chain[i][1], chain[i + 1][1]) for i in range(len(chain) - 1))
    dims["consistent"] = ok
    return dims
