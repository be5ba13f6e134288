"""The flat-model twistor chart ``U_I``.

On ``U_I`` the fiber coordinates are ``w_ij = z^{ijI}`` and every
homogeneous coordinate ``z^J = Z^J / Z^I`` is a signed sub-Pfaffian of the
antisymmetric matrix ``(w_ij)`` on the rows ``I xor J``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from . import spin_index as si
from gmpy2 import mpq

from .coeff_ring import ChartScalar, Layout, LocalRing, Polynomial, cinv, layout
from .exact_linalg import SingularMatrixError, bareiss_inverse, matmul


class ChartError(ValueError):
    pass


class DegenerateSplitError(ArithmeticError):
    """The stacked alpha / alpha-bar matrix is singular."""


@lru_cache(maxsize=None)
def _pfaffian(n: int, rows: tuple[int, ...]) -> Polynomial:
    """Pfaffian of ``(w_ij)`` restricted to ``rows`` by expansion along the first row."""
    lay = layout(n)
    if not rows:
        return Polynomial.const(lay, 1)
    if len(rows) & 1:
        return Polynomial.zero(lay)
    first, rest = rows[0], rows[1:]
    acc = Polynomial.zero(lay)
    for k, r in enumerate(rest):
        minor = _pfaffian(n, rest[:k] + rest[k + 1:])
        if not minor.terms:
            continue
        term = Polynomial.var(lay, lay.w(first, r)) * minor
        acc = acc - term if k & 1 else acc + term
    return acc


def pfaffian_w(n: int, rows: Sequence[int]) -> Polynomial:
    return _pfaffian(n, tuple(sorted(rows)))


def w_entry(lay: Layout, i: int, j: int, bar: bool = False) -> Polynomial:
    """Entry ``(i, j)`` of the antisymmetric matrix of ``w`` (or ``wb``)."""
    sign, (a, b) = _norm(i, j)
    if sign == 0:
        return Polynomial.zero(lay)
    v = lay.wbar(a, b) if bar else lay.w(a, b)
    return Polynomial.var(lay, v, sign)


def _norm(i: int, j: int) -> tuple[int, tuple[int, int]]:
    if i < j:
        return 1, (i, j)
    if i > j:
        return -1, (j, i)
    return 0, (i, i)


@dataclass
class VerticalVectorField:
    """Components on ``d/dw_ij`` (or ``d/dwb_ij`` when ``conj``), keyed by ``i < j``."""

    chart: "Chart"
    components: dict[tuple[int, int], ChartScalar]
    conj: bool = False

    def get(self, i: int, j: int) -> ChartScalar:
        sign, p = _norm(i, j)
        if sign == 0:
            return self.chart.ring.zero()
        c = self.components.get(p, self.chart.ring.zero())
        return c if sign > 0 else -c

    def conjugate(self) -> "VerticalVectorField":
        return VerticalVectorField(
            self.chart, {p: c.conjugate() for p, c in self.components.items()}, not self.conj
        )

    def __neg__(self):
        return VerticalVectorField(self.chart, {p: -c for p, c in self.components.items()}, self.conj)

    def __eq__(self, o):
        if not isinstance(o, VerticalVectorField) or o.conj != self.conj:
            return NotImplemented
        keys = set(self.components) | set(o.components)
        return all(self.get(*k) == o.get(*k) for k in keys)


@dataclass
class HorizontalForm:
    """Components on the coframe ``e^a``, ``a = 1..2n``."""

    chart: "Chart"
    components: dict[int, ChartScalar]

    def get(self, a: int) -> ChartScalar:
        return self.components.get(a, self.chart.ring.zero())

    def conjugate(self) -> "HorizontalForm":
        return HorizontalForm(self.chart, {a: c.conjugate() for a, c in self.components.items()})

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components.values())

    def __eq__(self, o):
        if not isinstance(o, HorizontalForm):
            return NotImplemented
        keys = set(self.components) | set(o.components)
        return all(self.get(a) == o.get(a) for a in keys)


@dataclass
class AntiholoSplit:
    """``e^a = sum_k p[a][k] alpha^{kI} + sum_k q[a][k] alphabar^{kI}``.

    ``det`` is the (+-) determinant of the stacked matrix; ``n_power`` and
    ``unit`` record how it factors as ``unit * N**n_power``.
    """

    p: list[list[ChartScalar]]
    q: list[list[ChartScalar]]
    det: Polynomial
    n_power: int
    unit: object


class Chart:
    """Coordinate patch ``U_I = {Z^I != 0}`` of ``Z^+`` (``|I|`` even) or ``Z^-`` (odd)."""

    def __init__(self, n: int, base: Sequence[int] = (), space_parity: int | str | None = None):
        if not 2 <= n:
            raise ChartError(f"n must be >= 2, got {n}")
        base = tuple(base)
        if list(base) != sorted(set(base)) or any(not 1 <= b <= n for b in base):
            raise ChartError(f"base index {base} is not reduced for n={n}")
        self.n = n
        self.base = base
        self.parity = si.parity(base)
        if space_parity is not None and si.parse_parity(space_parity) != self.parity:
            raise ChartError("base index parity does not match the twistor space")
        self.layout = layout(n)
        self._z: dict = {}
        self.N = self._norm()
        self.ring = LocalRing(self.layout, (self.N,), key=("chart", n, base))
        self._split: AntiholoSplit | None = None
        self._F: dict = {}

    def __repr__(self):
        return f"Chart(n={self.n}, base={self.base}, Z{si.parity_str(self.parity)})"

    def __eq__(self, o):
        return isinstance(o, Chart) and (o.n, o.base) == (self.n, self.base)

    def __hash__(self):
        return hash((self.n, self.base))

    # ---- homogeneous coordinates

    def z(self, seq: Sequence[int]) -> Polynomial:
        """``z^seq`` as a polynomial in ``w``; zero for the opposite parity."""
        seq = tuple(seq)
        hit = self._z.get(seq)
        if hit is not None:
            return hit
        d = si.reduce_dual(seq, self.n)
        if si.parity(d.index) != self.parity:
            out = Polynomial.zero(self.layout)
        else:
            rows = si.sym_diff(self.base, d.index)
            s = si.reduce_theta(rows + self.base, self.n)
            assert s.index == d.index and s.unit in (si.UNIT_ONE, si.UNIT_NEG)
            out = _pfaffian(self.n, rows).scale(si.unit_value(si.unit_mul(d.unit, s.unit)))
        self._z[seq] = out
        return out

    def zbar(self, seq: Sequence[int]) -> Polynomial:
        return self.z(seq).conjugate()

    def zs(self, seq: Sequence[int]) -> ChartScalar:
        return self.ring.scalar(self.z(seq))

    def zbars(self, seq: Sequence[int]) -> ChartScalar:
        return self.ring.scalar(self.zbar(seq))

    def _norm(self) -> Polynomial:
        acc = Polynomial.zero(self.layout)
        for J in si.spin_basis(self.n, self.parity):
            zj = self.z(J)
            acc = acc + zj * zj.conjugate()
        return acc

    def reduced_indices(self) -> list[tuple[int, ...]]:
        return si.all_reduced(self.n)

    # ---- vertical vector fields and horizontal forms

    def vector_field_F(self, a: int, b: int) -> VerticalVectorField:
        if a == b:
            raise ChartError("F_aa vanishes identically and is not constructed")
        n = self.n
        for t in (a, b):
            if not 1 <= t <= 2 * n:
                raise ChartError(f"index {t} outside 1..{2 * n}")
        key = (a, b)
        hit = self._F.get(key)
        if hit is not None:
            return hit
        I = self.base
        comps = {}
        for i, j in self.layout.pairs:
            c = (self.z((b, j) + I) * self.z((a, i) + I) - self.z((a, j) + I) * self.z((b, i) + I)).scale(
                _HALF
            )
            if c.terms:
                comps[(i, j)] = self.ring.scalar(c)
        vf = VerticalVectorField(self, comps)
        self._F[key] = vf
        return vf

    def vector_field_F_flow(self, a: int, b: int) -> VerticalVectorField:
        """Oracle: ``d/dt w_ij(t)`` at ``t = 0`` for ``Z^J(t) = cos(t/2) Z^J + sin(t/2) Z^{baJ}``."""
        I = self.base
        comps = {}
        for i, j in self.layout.pairs:
            c = (self.z((b, a, i, j) + I) - self.z((i, j) + I) * self.z((b, a) + I)).scale(_HALF)
            if c.terms:
                comps[(i, j)] = self.ring.scalar(c)
        return VerticalVectorField(self, comps)

    def alpha(self, J: Sequence[int]) -> HorizontalForm:
        J = tuple(J)
        comps = {}
        for a in range(1, 2 * self.n + 1):
            c = self.z((a,) + J)
            if c.terms:
                comps[a] = self.ring.scalar(-c)
        return HorizontalForm(self, comps)

    def alpha_bar(self, J: Sequence[int]) -> HorizontalForm:
        return self.alpha(J).conjugate()

    def alpha_basis(self) -> list[HorizontalForm]:
        """``alpha^{kI}``, ``k = 1..n``."""
        return [self.alpha((k,) + self.base) for k in range(1, self.n + 1)]

    # ---- type decomposition of the horizontal coframe

    def stacked_matrix(self) -> list[list[Polynomial]]:
        n = self.n
        rows = []
        for k in range(1, n + 1):
            rows.append([-self.z((a, k) + self.base) for a in range(1, 2 * n + 1)])
        for k in range(1, n + 1):
            rows.append([-self.zbar((a, k) + self.base) for a in range(1, 2 * n + 1)])
        return rows

    def antiholo_split(self) -> AntiholoSplit:
        if self._split is None:
            self._split = self._compute_split()
        return self._split

    def _compute_split(self) -> AntiholoSplit:
        n = self.n
        m = self.stacked_matrix()
        try:
            d, adj = bareiss_inverse(m)
        except SingularMatrixError as exc:
            raise DegenerateSplitError(str(exc)) from exc
        prod = matmul(m, adj)
        for i, row in enumerate(prod):
            for j, x in enumerate(row):
                if x != (d if i == j else Polynomial.zero(self.layout)):
                    raise DegenerateSplitError("adjugate check failed")
        # clear the determinant to unit * N**k
        k = 0
        rest = d
        while True:
            q = rest.divexact(self.N)
            if q is None:
                break
            rest, k = q, k + 1
        if len(rest.terms) != 1 or 0 not in rest.terms:
            raise DegenerateSplitError(
                f"determinant is not a constant times a power of N: leftover {rest.to_str()}"
            )
        inv = cinv(rest.terms[0])
        entries = [[self.ring.scalar(adj[a][r].scale(inv), k) for r in range(2 * n)] for a in range(2 * n)]
        p = [[entries[a][kk] for kk in range(n)] for a in range(2 * n)]
        q_ = [[entries[a][n + kk] for kk in range(n)] for a in range(2 * n)]
        split = AntiholoSplit(p=p, q=q_, det=d, n_power=k, unit=rest.constant_term())
        self._verify_split(split)
        return split

    def _verify_split(self, split: AntiholoSplit) -> None:
        """``e^a`` must be rebuilt exactly from the split coefficients."""
        n = self.n
        al = self.alpha_basis()
        alb = [x.conjugate() for x in al]
        for a in range(1, 2 * n + 1):
            for c in range(1, 2 * n + 1):
                acc = self.ring.zero()
                for k in range(n):
                    acc = acc + split.p[a - 1][k] * al[k].get(c) + split.q[a - 1][k] * alb[k].get(c)
                if acc != (1 if a == c else 0):
                    raise DegenerateSplitError(f"split does not rebuild e^{a}")


_HALF = (mpq(1, 2), mpq(0))


def check_quadrics(c: Chart, I: Sequence[int], J: Sequence[int], a: int, b: int) -> dict[int, Polynomial]:
    """Residuals of the three quadric relations; all zero on the twistor space."""
    I, J = tuple(I), tuple(J)
    n = c.n
    lay = c.layout
    d = si.sym_diff(si.reduce_dual(I, n).index, si.reduce_dual(J, n).index)
    r1 = Polynomial.zero(lay)
    for k in d:
        r1 = r1 + c.z((k,) + I) * c.z((k,) + J)
    r2 = Polynomial.zero(lay)
    for t in range(1, 2 * n + 1):
        r2 = r2 + c.z((t,) + I) * c.z((t,) + J)
    r3 = Polynomial.zero(lay)
    for k in d:
        r3 = r3 + c.z((a, k) + I) * c.z((b, k) + J)
    r3 = r3 - (c.z(I) * c.z((a, b) + J) - c.z((a, b) + I) * c.z(J))
    return {1: r1, 2: r2, 3: r3}


def four_term_residual(c: Chart, J: Sequence[int], quad: Sequence[int]) -> Polynomial:
    """``z^J z^{abcdJ} - (z^{abJ} z^{cdJ} - z^{acJ} z^{bdJ} + z^{adJ} z^{bcJ})`` (cleared of the division)."""
    J = tuple(J)
    a, b, cc, dd = quad
    z = c.z
    lhs = z(J) * z((a, b, cc, dd) + J)
    rhs = z((a, b) + J) * z((cc, dd) + J) - z((a, cc) + J) * z((b, dd) + J) + z((a, dd) + J) * z((b, cc) + J)
    return lhs - rhs


def pfaffian_matchings(n: int, rows: Sequence[int]) -> Polynomial:
    """Independent oracle: sum over perfect matchings with crossing signs."""
    lay = layout(n)
    rows = sorted(rows)
    if len(rows) & 1:
        return Polynomial.zero(lay)
    acc = Polynomial.zero(lay)
    for perm in itertools.permutations(range(len(rows))):
        ok = all(perm[2 * t] < perm[2 * t + 1] for t in range(len(rows) // 2)) and all(
            perm[2 * t] < perm[2 * t + 2] for t in range(len(rows) // 2 - 1)
        )
        if not ok:
            continue
        inv = sum(1 for x in range(len(perm)) for y in range(x + 1, len(perm)) if perm[x] > perm[y])
        term = Polynomial.const(lay, -1 if inv & 1 else 1)
        for t in range(len(rows) // 2):
            term = term * w_entry(lay, rows[perm[2 * t]], rows[perm[2 * t + 1]])
        acc = acc + term
    return acc
