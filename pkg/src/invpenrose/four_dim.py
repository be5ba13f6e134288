"""Orthonormal frames on flat ``R^4`` and the frame form of ``D``.

A frame ``e'_a = e_b h^b_a`` is given by an orthogonal matrix ``h`` of
rational functions of ``x``.  Cayley transforms of antisymmetric polynomial
matrices give such ``h`` exactly: ``h = adj(1 - A)(1 + A) / det(1 - A)``.
Scalars built from a frame live in the chart ring extended by that
denominator.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .coeff_ring import ChartScalar, LocalRing, Polynomial, cinv
from .form_calculus import (
    GeneralVectorField,
    TwistedForm,
    interior,
    lie,
    recast_form,
    wedge,
    _recast,
)
from .operators import op_D
from .fields import SymSpinorField, lift_j
from .twistor_chart import Chart, VerticalVectorField

DIM = 4


class FrameError(ValueError):
    pass


def _det(m: list[list[Polynomial]]) -> Polynomial:
    """Cofactor expansion (4x4 at most)."""
    size = len(m)
    if size == 1:
        return m[0][0]
    acc = Polynomial.zero(m[0][0].layout)
    for j in range(size):
        if not m[0][j].terms:
            continue
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        t = m[0][j] * _det(minor)
        acc = acc - t if j & 1 else acc + t
    return acc


def _adjugate(m: list[list[Polynomial]]) -> list[list[Polynomial]]:
    size = len(m)
    adj = [[None] * size for _ in range(size)]
    for i in range(size):
        for j in range(size):
            minor = [row[:j] + row[j + 1:] for k, row in enumerate(m) if k != i]
            c = _det(minor)
            adj[j][i] = -c if (i + j) & 1 else c
    return adj


class FrameField:
    """``h[b][a] = num[b][a] / den`` with ``e'_a = sum_b h[b][a] e_b``."""

    def __init__(
        self,
        chart: Chart,
        num: Sequence[Sequence[Polynomial]],
        den: Polynomial,
        name: str = "",
        ring: LocalRing | None = None,
        den_pows: tuple | None = None,
    ):
        if chart.n != 2:
            raise FrameError("frames are modelled on R^4 (n = 2)")
        self.chart = chart
        self.name = name
        self.num = [list(r) for r in num]
        self.den = den
        if den.conjugate() != den or not den.is_x_only():
            raise FrameError("frame denominator must be a real polynomial in x")
        self._pows = den_pows
        if ring is not None:
            if den_pows is None:
                raise FrameError("an explicit ring needs the denominator exponents")
            self.ring = ring
        elif den == Polynomial.const(chart.layout, 1):
            self.ring = chart.ring
        else:
            self.ring = chart.ring.extend([den], key=("frame", chart.n, chart.base, name, tuple(sorted(den.terms.items()))))
        self.h = [[self._s(self.num[b][a]) for a in range(DIM)] for b in range(DIM)]
        self._check_orthogonal()
        self._omega: ConnectionForm | None = None
        self._fbar: dict = {}

    def _s(self, p: Polynomial) -> ChartScalar:
        if self._pows is not None:
            return self.ring.scalar(p, self._pows)
        if self.ring is self.chart.ring:
            return self.ring.scalar(p)
        return self.ring.scalar(p, (0, 1))

    def _check_orthogonal(self):
        lay = self.chart.layout
        d2 = self.den * self.den
        for a in range(DIM):
            for b in range(DIM):
                acc = Polynomial.zero(lay)
                for c in range(DIM):
                    acc = acc + self.num[c][a] * self.num[c][b]
                if acc != (d2 if a == b else Polynomial.zero(lay)):
                    raise FrameError("frame matrix is not orthogonal")
        if _det(self.num) != d2 * d2:
            raise FrameError("frame matrix does not have determinant 1")

    def entry(self, b: int, a: int) -> ChartScalar:
        """``h^b_a`` (1-based)."""
        return self.h[b - 1][a - 1]

    def vector(self, a: int) -> GeneralVectorField:
        """``e'_a`` as a horizontal vector field."""
        return GeneralVectorField(self.chart, x={c: self.entry(c, a) for c in range(1, DIM + 1)}, ring=self.ring)

    def coframe(self, b: int) -> TwistedForm:
        """``e'^b = sum_c h^c_b e^c``."""
        terms = {}
        for c in range(1, DIM + 1):
            v = self.entry(c, b)
            if v:
                terms[1 << (c - 1)] = v
        return TwistedForm(self.chart, 0, terms, self.ring)

    def is_constant(self) -> bool:
        return all(p.total_degree() <= 0 for row in self.num for p in row) and self.den.total_degree() <= 0


def identity_frame(chart: Chart) -> FrameField:
    lay = chart.layout
    one, zero = Polynomial.const(lay, 1), Polynomial.zero(lay)
    return FrameField(chart, [[one if i == j else zero for j in range(DIM)] for i in range(DIM)], one, "identity")


def cayley_frame(chart: Chart, A: Sequence[Sequence[Polynomial]], name: str = "") -> FrameField:
    """``h = (1 - A)^{-1} (1 + A)`` for antisymmetric ``A`` with real polynomial entries."""
    lay = chart.layout
    A = [[A[i][j] if isinstance(A[i][j], Polynomial) else Polynomial.const(lay, A[i][j]) for j in range(DIM)] for i in range(DIM)]
    for i in range(DIM):
        for j in range(DIM):
            if A[i][j] != -A[j][i]:
                raise FrameError("A must be antisymmetric")
            if A[i][j].conjugate() != A[i][j] or not A[i][j].is_x_only():
                raise FrameError("A must be a real polynomial matrix in x")
    one = Polynomial.const(lay, 1)
    I_minus = [[(one if i == j else Polynomial.zero(lay)) - A[i][j] for j in range(DIM)] for i in range(DIM)]
    I_plus = [[(one if i == j else Polynomial.zero(lay)) + A[i][j] for j in range(DIM)] for i in range(DIM)]
    delta = _det(I_minus)
    if not delta.terms:
        raise FrameError("1 - A is singular")
    adj = _adjugate(I_minus)
    num = [[sum((adj[i][k] * I_plus[k][j] for k in range(DIM)), Polynomial.zero(lay)) for j in range(DIM)] for i in range(DIM)]
    # reduce to lowest terms when delta divides everything (e.g. constant A)
    if delta.total_degree() == 0:
        inv = cinv(delta.terms[0])
        num = [[p.scale(inv) for p in row] for row in num]
        delta = one
    return FrameField(chart, num, delta, name)


def compose_frames(f: FrameField, g: FrameField) -> tuple[FrameField, FrameField, FrameField]:
    """``f``, ``g`` and the frame ``e''_a = e'_b g^b_a`` (matrix ``f g``), all over one ring."""
    chart = f.chart
    one = Polynomial.const(chart.layout, 1)
    dens = [d for d in (f.den, g.den) if d != one]
    ring = chart.ring.extend(dens, key=("compose", f.name, g.name)) if dens else chart.ring
    k = len(dens)

    def pows(which: int) -> tuple:
        out = [0] * (1 + k)
        slot = 1
        for idx, d in enumerate((f.den, g.den)):
            if d != one:
                if which & (1 << idx):
                    out[slot] = 1
                slot += 1
        return tuple(out)

    fnum = [[f.num[i][j] for j in range(DIM)] for i in range(DIM)]
    gnum = [[g.num[i][j] for j in range(DIM)] for i in range(DIM)]
    prod = [[sum((fnum[i][t] * gnum[t][j] for t in range(DIM)), Polynomial.zero(chart.layout)) for j in range(DIM)] for i in range(DIM)]
    f2 = FrameField(chart, fnum, f.den, f.name, ring, pows(1))
    g2 = FrameField(chart, gnum, g.den, g.name, ring, pows(2))
    fg = FrameField(chart, prod, f.den * g.den, f"{f.name}*{g.name}", ring, pows(3))
    return f2, g2, fg


def antisym(lay, entries: dict[tuple[int, int], Polynomial | int]) -> list[list[Polynomial]]:
    """Antisymmetric 4x4 matrix from its upper entries (1-based keys)."""
    A = [[Polynomial.zero(lay) for _ in range(DIM)] for _ in range(DIM)]
    for (i, j), v in entries.items():
        p = v if isinstance(v, Polynomial) else Polynomial.const(lay, v)
        A[i - 1][j - 1] = p
        A[j - 1][i - 1] = -p
    return A


@dataclass
class ConnectionForm:
    """``omega[b][a]`` with ``nabla e'_a = e'_b omega^b_a``."""

    frame: FrameField
    omega: list[list[TwistedForm]]

    def get(self, b: int, a: int) -> TwistedForm:
        return self.omega[b - 1][a - 1]

    def is_zero(self) -> bool:
        return all(not w for row in self.omega for w in row)


def connection_form(f: FrameField) -> ConnectionForm:
    """``omega = h^T dh`` (flat Levi-Civita connection, standard frame parallel)."""
    if f._omega is None:
        f._omega = _connection_form(f)
    return f._omega


def _connection_form(f: FrameField) -> ConnectionForm:
    c = f.chart
    lay = c.layout
    dh = [[[f.h[r][s].partial(lay.x(e)) for e in range(1, DIM + 1)] for s in range(DIM)] for r in range(DIM)]
    omega = []
    for b in range(DIM):
        row = []
        for a in range(DIM):
            terms = {}
            for e in range(DIM):
                acc = f.ring.zero()
                for r in range(DIM):
                    d = dh[r][a][e]
                    if d:
                        acc = acc + f.h[r][b] * d
                if acc:
                    terms[1 << e] = acc
            row.append(TwistedForm(c, 0, terms, f.ring))
        omega.append(row)
    for a in range(DIM):
        for b in range(DIM):
            if omega[a][b] != -omega[b][a]:
                raise FrameError("connection form is not antisymmetric")
    return ConnectionForm(f, omega)


def _in_ring(u: TwistedForm, ring: LocalRing) -> TwistedForm:
    return u if u.ring.same(ring) else recast_form(u, ring)


def hatted_L(a: int, f: FrameField, u: TwistedForm, omega: ConnectionForm | None = None) -> TwistedForm:
    """``Lhat_{e'_a} = L_{e'_a} + i(e'_b) omega^b_a ^``."""
    u = _in_ring(u, f.ring)
    omega = omega or connection_form(f)
    out = lie(f.vector(a), u)
    for b in range(1, DIM + 1):
        w = omega.get(b, a)
        if w:
            out = out + interior(f.vector(b), wedge(w, u))
    return out


def frame_F(f: FrameField, a: int, b: int) -> VerticalVectorField:
    """``F'_ab = (h^{-1})^a_c F_cd h^d_b = h^c_a h^d_b F_cd``."""
    c = f.chart
    comps: dict = {}
    for cc in range(1, DIM + 1):
        for d in range(1, DIM + 1):
            if cc == d:
                continue
            coef = f.entry(cc, a) * f.entry(d, b)
            if not coef:
                continue
            for p, v in c.vector_field_F(cc, d).components.items():
                t = coef * _recast(f.ring, v)
                comps[p] = comps[p] + t if p in comps else t
    return VerticalVectorField(c, {p: v for p, v in comps.items() if v})


def frame_F_flow(f: FrameField, a: int, b: int) -> VerticalVectorField:
    """Flow oracle for ``F'_ab``: rotate in the plane of ``e'_a, e'_b`` (Clifford action of the rotated vectors)."""
    c = f.chart
    I = c.base
    half = Fraction(1, 2)
    comps = {}
    zba = f.ring.zero()
    for cc in range(1, DIM + 1):
        for d in range(1, DIM + 1):
            coef = f.entry(d, b) * f.entry(cc, a)
            if coef:
                zba = zba + coef * c.z((d, cc) + I)
    for i, j in c.layout.pairs:
        acc = f.ring.zero()
        for cc in range(1, DIM + 1):
            for d in range(1, DIM + 1):
                coef = f.entry(d, b) * f.entry(cc, a)
                if coef:
                    acc = acc + coef * c.z((d, cc, i, j) + I)
        acc = (acc - zba * c.z((i, j) + I)) * half
        if acc:
            comps[(i, j)] = acc
    return VerticalVectorField(c, comps)


def op_D_frame(f: FrameField, u: TwistedForm) -> TwistedForm:
    """``D = -Lhat_{e'_a} i(Fbar'_ab) e'^b`` built from the data of frame ``f``."""
    u = _in_ring(u, f.ring)
    om = connection_form(f)
    out = TwistedForm.zero(f.chart, u.charge, f.ring)
    for b in range(1, DIM + 1):
        eb = wedge(f.coframe(b), u)
        if not eb:
            continue
        for a in range(1, DIM + 1):
            if a == b:
                continue
            Fb = f._fbar.get((a, b))
            if Fb is None:
                Fb = f._fbar[(a, b)] = GeneralVectorField.from_vertical(frame_F(f, a, b).conjugate(), f.ring)
            step = interior(Fb, eb)
            if step:
                out = out - hatted_L(a, f, step, om)
    return out


def qm_four(phi: SymSpinorField, chart: Chart | None = None) -> TwistedForm:
    """``Q_m(phi) = j(phi) + D j(phi) / (m + 1)`` on ``Z^+(R^4)``."""
    if phi.n != 2:
        raise FrameError("qm_four is defined for n = 2")
    if phi.parity != 0:
        raise FrameError("qm_four is defined on Z^+")
    chart = chart or Chart(2, ())
    j = lift_j(phi, chart)
    return j + op_D(j).scale(Fraction(1, phi.m + 1))


def standard_test_frames(chart: Chart) -> list[FrameField]:
    """Cayley frames from constant, linear and quadratic ``A``."""
    lay = chart.layout
    x = [Polynomial.var(lay, lay.x(a)) for a in range(1, DIM + 1)]
    return [
        cayley_frame(chart, antisym(lay, {(1, 2): Polynomial.const(lay, Fraction(1, 2)), (3, 4): 2, (1, 3): -1}), "constant"),
        cayley_frame(chart, antisym(lay, {(1, 2): x[2], (2, 4): x[0] - 1}), "linear"),
        cayley_frame(chart, antisym(lay, {(1, 3): x[1] * x[3] - 1}), "quadratic"),
    ]
