"""Polynomial spinor fields, the field equations, the lifting ``j`` and ``Q_m``.

A field in ``S^m Delta^+-`` stores one x-polynomial per sorted ``m``-tuple of
reduced indices of its parity.  Components with unreduced indices pick up the
units of the dual reduction, since components pair with the dual basis.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial
from typing import Iterable, Mapping, Sequence

from . import spin_index as si
from .coeff_ring import C0, Polynomial, layout
from .exact_linalg import nullspace, rank, solve_rows
from .form_calculus import TwistedForm, form_layout, wedge_covector
from .operators import apply_F_deriv, d_powers, op_dH, op_E
from .twistor_chart import Chart

Tuple = tuple[tuple[int, ...], ...]


class FieldError(ValueError):
    pass


def index_order(idx: Sequence[int]) -> tuple:
    """Sort key of reduced indices matching :func:`spin_index.spin_basis`."""
    return (len(idx), tuple(idx))


def canonical_key(indices: Iterable[Sequence[int]]) -> Tuple:
    return tuple(sorted((tuple(i) for i in indices), key=index_order))


def _x_monomials(n: int, degree: int) -> list[tuple[int, ...]]:
    """Exponent vectors over ``x_1..x_2n`` of exactly ``degree``, lex-descending."""
    nx = 2 * n
    out = []
    for combo in itertools.combinations_with_replacement(range(nx), degree):
        e = [0] * nx
        for v in combo:
            e[v] += 1
        out.append(tuple(e))
    out.sort(reverse=True)
    return out


def _xpoly(n: int, exps: Sequence[int], c) -> Polynomial:
    lay = layout(n)
    full = list(exps) + [0] * (lay.nvars - len(exps))
    return Polynomial.from_exps(lay, [(full, c)])


@dataclass
class SymSpinorField:
    """A section of ``S^m Delta^parity`` with polynomial components in ``x``."""

    n: int
    m: int
    parity: int
    components: dict[Tuple, Polynomial] = field(default_factory=dict)

    def __post_init__(self):
        if self.n < 2 or self.m < 0:
            raise FieldError("need n >= 2 and m >= 0")
        self.parity = si.parse_parity(self.parity)
        lay = layout(self.n)
        clean = {}
        for key, p in self.components.items():
            key = tuple(tuple(k) for k in key)
            if len(key) != self.m:
                raise FieldError(f"component {key} does not have {self.m} indices")
            if key != canonical_key(key):
                raise FieldError(f"component key {key} is not sorted")
            for k in key:
                if list(k) != sorted(set(k)) or any(not 1 <= t <= self.n for t in k):
                    raise FieldError(f"index {k} is not reduced")
                if si.parity(k) != self.parity:
                    raise FieldError(f"index {k} has the wrong parity")
            if p.layout is not lay:
                raise FieldError("component polynomial from a foreign layout")
            if not p.is_x_only():
                raise FieldError("components must depend on x only")
            if p.terms:
                clean[key] = p
        self.components = clean

    # ---- access

    @property
    def layout(self):
        return layout(self.n)

    def keys(self) -> list[Tuple]:
        return component_keys(self.n, self.m, self.parity)

    def get(self, key: Sequence[Sequence[int]]) -> Polynomial:
        return self.component(key)

    def component(self, seqs: Sequence[Sequence[int]]) -> Polynomial:
        """Component for arbitrary (unsorted, unreduced) index sequences."""
        if len(seqs) != self.m:
            raise FieldError(f"expected {self.m} index sequences")
        unit = si.UNIT_ONE
        red = []
        for s in seqs:
            r = si.reduce_dual(tuple(s), self.n)
            if si.parity(r.index) != self.parity:
                return Polynomial.zero(self.layout)
            unit = si.unit_mul(unit, r.unit)
            red.append(r.index)
        p = self.components.get(canonical_key(red))
        if p is None:
            return Polynomial.zero(self.layout)
        return p.scale(si.unit_value(unit))

    def is_zero(self) -> bool:
        return not self.components

    def __add__(self, o: "SymSpinorField") -> "SymSpinorField":
        self._same(o)
        out = dict(self.components)
        for k, p in o.components.items():
            out[k] = out[k] + p if k in out else p
        return SymSpinorField(self.n, self.m, self.parity, out)

    def scale(self, c) -> "SymSpinorField":
        """Multiply every component by a number or by an ``x``-polynomial."""
        if isinstance(c, Polynomial):
            return SymSpinorField(self.n, self.m, self.parity, {k: p * c for k, p in self.components.items()})
        return SymSpinorField(self.n, self.m, self.parity, {k: p.scale(c) for k, p in self.components.items()})

    def __sub__(self, o):
        return self + o.scale(-1)

    def __eq__(self, o):
        if not isinstance(o, SymSpinorField):
            return NotImplemented
        return (self.n, self.m, self.parity) == (o.n, o.m, o.parity) and self.components == o.components

    def _same(self, o):
        if (self.n, self.m, self.parity) != (o.n, o.m, o.parity):
            raise FieldError("fields of different type")

    def degree(self) -> int:
        return max((p.total_degree() for p in self.components.values()), default=-1)

    def __repr__(self):
        body = ", ".join(f"{k}: {p.to_str()}" for k, p in sorted(self.components.items()))
        return f"SymSpinorField(n={self.n}, m={self.m}, {si.parity_str(self.parity)}, {{{body}}})"


def component_keys(n: int, m: int, parity: int) -> list[Tuple]:
    basis = si.spin_basis(n, si.parse_parity(parity))
    return [tuple(t) for t in itertools.combinations_with_replacement(basis, m)]


def multiplicity(key: Tuple) -> int:
    """Number of ordered tuples with the given sorted form."""
    out = factorial(len(key))
    for c in Counter(key).values():
        out //= factorial(c)
    return out


@dataclass
class DiracImage:
    """``d_m phi`` with components keyed by ``(K, sorted (m-1)-tuple)``."""

    n: int
    m: int
    parity: int
    components: dict[tuple, Polynomial] = field(default_factory=dict)

    def is_zero(self) -> bool:
        return all(not p.terms for p in self.components.values())


def dirac(phi: SymSpinorField) -> DiracImage:
    """``(d_m phi)^{K; J_2..J_m} = sum_a d/dx_a phi^{(a K), J_2, .., J_m}``."""
    if phi.m == 0:
        raise FieldError("m = 0 fields use laplacian_d0")
    n = phi.n
    lay = phi.layout
    opp = 1 - phi.parity
    out = {}
    for K in si.spin_basis(n, opp):
        for rest in itertools.combinations_with_replacement(si.spin_basis(n, phi.parity), phi.m - 1):
            acc = Polynomial.zero(lay)
            for a in range(1, 2 * n + 1):
                c = phi.component([(a,) + K] + list(rest))
                if c.terms:
                    acc = acc + c.partial(lay.x(a))
            if acc.terms:
                out[(K, tuple(rest))] = acc
    return DiracImage(n, phi.m, phi.parity, out)


def laplacian_d0(phi: SymSpinorField) -> Polynomial:
    """``-sum_a d^2 phi / dx_a^2`` for a scalar field (flat base, zero scalar curvature)."""
    if phi.m != 0:
        raise FieldError("laplacian_d0 needs m = 0")
    lay = phi.layout
    f = phi.components.get((), Polynomial.zero(lay))
    acc = Polynomial.zero(lay)
    for a in range(1, 2 * phi.n + 1):
        acc = acc + f.partial(lay.x(a)).partial(lay.x(a))
    return -acc


def is_solution(phi: SymSpinorField) -> bool:
    if phi.m == 0:
        return not laplacian_d0(phi).terms
    return dirac(phi).is_zero()


def field_equation_residual(phi: SymSpinorField) -> dict:
    if phi.m == 0:
        r = laplacian_d0(phi)
        return {(): r} if r.terms else {}
    return {k: p for k, p in dirac(phi).components.items() if p.terms}


# --------------------------------------------------------------------------
# solution spaces


def _field_from_vector(n: int, m: int, parity: int, unknowns: list, vec: Mapping[int, tuple]) -> SymSpinorField:
    comps: dict[Tuple, list] = {}
    for col, c in vec.items():
        key, exps = unknowns[col]
        comps.setdefault(key, []).append((exps, c))
    lay = layout(n)
    out = {}
    for key, items in comps.items():
        out[key] = Polynomial.from_exps(lay, [(list(e) + [0] * (lay.nvars - len(e)), c) for e, c in items])
    return SymSpinorField(n, m, parity, out)


def homogeneous_solutions(n: int, m: int, parity: int | str, degree: int) -> list[SymSpinorField]:
    """Kernel basis of the field equation on homogeneous components of ``degree``."""
    parity = si.parse_parity(parity)
    keys = component_keys(n, m, parity)
    monos = _x_monomials(n, degree)
    unknowns = [(k, e) for k in keys for e in monos]
    if m == 0 and degree < 2 or m >= 1 and degree < 1:
        return [_field_from_vector(n, m, parity, unknowns, {i: (1, 0)}) for i in range(len(unknowns))]
    rows: dict[tuple, dict[int, tuple]] = {}
    # the image of each unknown; rows are the output coefficients
    for col, (key, exps) in enumerate(unknowns):
        phi = SymSpinorField(n, m, parity, {key: _xpoly(n, exps, 1)})
        for okey, p in field_equation_residual(phi).items():
            for mono, c in p.terms.items():
                rows.setdefault((okey, mono), {})[col] = c
    basis = nullspace(list(rows.values()), len(unknowns))
    return [_field_from_vector(n, m, parity, unknowns, v) for v in basis]


def solution_basis(n: int, m: int, parity: int | str, degree: int) -> list[SymSpinorField]:
    """Exact basis of the solutions with components of total degree ``<= degree``.

    The field equations are homogeneous in ``x`` (they lower the degree by one or
    two), so the kernel splits degree by degree.
    """
    out = []
    for d in range(degree + 1):
        out.extend(homogeneous_solutions(n, m, parity, d))
    return out


def harmonic_count(nvars: int, degree: int) -> int:
    """Dimension of harmonic polynomials of degree ``<= degree`` (classical count)."""
    total = 0
    for d in range(degree + 1):
        total += comb(d + nvars - 1, nvars - 1) - (comb(d - 2 + nvars - 1, nvars - 1) if d >= 2 else 0)
    return total


# --------------------------------------------------------------------------
# lifting and the transform


def lift_charge(n: int, m: int) -> int:
    return 2 * n - 2 + m


def _check_chart(phi: SymSpinorField, chart: Chart) -> None:
    if phi.n != chart.n:
        raise FieldError("field and chart have different n")
    if phi.parity != chart.parity:
        raise FieldError(
            f"field parity {si.parity_str(phi.parity)} does not match chart parity {si.parity_str(chart.parity)}"
        )


def vertical_top(chart: Chart) -> int:
    """Mask of ``dwb_12 ^ ... ^ dwb_(n-1)n``."""
    return form_layout(chart.n).dwb_mask


def lift_polynomial(phi: SymSpinorField, chart: Chart) -> Polynomial:
    """``sum over ordered tuples of phi^{I_1..I_m} prod zb^{I_i}``."""
    acc = Polynomial.zero(chart.layout)
    for key, p in phi.components.items():
        prod = p.scale(multiplicity(key))
        for I in key:
            prod = prod * chart.zbar(I)
        acc = acc + prod
    return acc


def lift_j(phi: SymSpinorField, chart: Chart) -> TwistedForm:
    """``j(phi) = sum phi^{I..} prod zb^{I_i} N^{-(2n-2+m)} dwb_12 ^ ... ^ dwb_(n-1)n``."""
    _check_chart(phi, chart)
    c = lift_charge(phi.n, phi.m)
    coeff = chart.ring.scalar(lift_polynomial(phi, chart), c)
    terms = {vertical_top(chart): coeff} if coeff else {}
    return TwistedForm(chart, c, terms)


def basis_lift(chart: Chart, key: Sequence[Sequence[int]]) -> TwistedForm:
    """``sbar^{I_1..I_m}`` for one ordered tuple of chart-parity indices."""
    m = len(key)
    c = lift_charge(chart.n, m)
    prod = Polynomial.const(chart.layout, 1)
    for I in key:
        prod = prod * chart.zbar(tuple(I))
    coeff = chart.ring.scalar(prod, c)
    return TwistedForm(chart, c, {vertical_top(chart): coeff} if coeff else {})


def inverse_penrose(phi: SymSpinorField, chart: Chart, powers: list[TwistedForm] | None = None) -> TwistedForm:
    """``Q_m(phi) = (n+m-2)! F^(n+m-2)(D) j(phi)``."""
    l = phi.n + phi.m - 2
    j = lift_j(phi, chart)
    return apply_F_deriv(l, j, powers if powers is not None else d_powers(j)).scale(factorial(l))


def vertical_component(u: TwistedForm) -> TwistedForm:
    """Drop every term containing a horizontal covector ``e^a``."""
    mask = u.layout.e_mask
    return u._new({m: c for m, c in u.terms.items() if not m & mask})


def recover_field(u: TwistedForm, n: int, m: int, parity: int | str) -> SymSpinorField:
    """Invert ``lift_j`` on its image.

    The coefficient of the top ``dwb`` monomial times ``N^c`` is
    ``sum_T mult(T) phi^T prod zb^T``.  The products ``prod zb^T`` are
    expanded in ``wb`` monomials and the components solved for exactly; the
    solution must be unique and must reproduce the lifted polynomial.
    """
    chart = u.chart
    parity = si.parse_parity(parity)
    c = lift_charge(n, m)
    if u.charge != c and u.terms:
        raise FieldError(f"form has charge {u.charge}, a lift has charge {c}")
    top = vertical_top(chart)
    if any(k != top for k in u.terms):
        raise FieldError("form is not a multiple of the top vertical monomial")
    coef = u.terms.get(top, chart.ring.zero())
    if coef.npow > c:
        raise FieldError("coefficient has too many inverse powers of N")
    num = coef.num * chart.ring.gpow(0, c - coef.npow)
    keys = component_keys(n, m, parity)
    prods = []
    for key in keys:
        p = Polynomial.const(chart.layout, multiplicity(key))
        for I in key:
            p = p * chart.zbar(I)
        prods.append(p)
    lay = chart.layout
    nx = lay.nx
    xmask = (1 << (16 * nx)) - 1
    # rows: wb monomials; one right-hand side per x monomial
    rows: dict[int, dict[int, tuple]] = {}
    for col, p in enumerate(prods):
        for mono, cc in p.terms.items():
            rows.setdefault(mono, {})[col] = cc
    rhs_by_x: dict[int, dict[int, tuple]] = {}
    for mono, cc in num.terms.items():
        rhs_by_x.setdefault(mono & xmask, {})[mono & ~xmask] = cc
    row_keys = sorted(set(rows) | {k for r in rhs_by_x.values() for k in r})
    mat = [rows.get(k, {}) for k in row_keys]
    if rank(mat) != len(keys):
        raise FieldError("lifted products are linearly dependent; recovery is not unique")
    comps: dict[Tuple, Polynomial] = {}
    for xm, r in sorted(rhs_by_x.items()):
        sol = solve_rows(mat, [r.get(k, C0) for k in row_keys], len(keys))
        if sol is None:
            raise FieldError("form is not in the image of the lifting")
        for col, val in sol.items():
            term = Polynomial(lay, {xm: val})
            comps[keys[col]] = comps[keys[col]] + term if keys[col] in comps else term
    phi = SymSpinorField(n, m, parity, comps)
    if lift_j(phi, chart) != u.with_charge(c):
        raise FieldError("recovered field does not reproduce the form")
    return phi


# --------------------------------------------------------------------------
# the E + (n+m-1) d_H identity


@dataclass
class Verdict:
    ok: bool
    residual: TwistedForm | None = None
    detail: str = ""


def comp_e_sides(phi: SymSpinorField, chart: Chart) -> tuple[TwistedForm, TwistedForm]:
    """Left side ``(E + (n+m-1) d_H) j(phi)`` and the two-term right side."""
    _check_chart(phi, chart)
    n, m = phi.n, phi.m
    lay = chart.layout
    j = lift_j(phi, chart)
    lhs = op_E(j) + op_dH(j).scale(n + m - 1)
    ch = lift_charge(n, m)
    rhs = TwistedForm.zero(chart, ch)
    basis = si.spin_basis(n, chart.parity)
    # first term: -(m/2) d_a phi^{(a b I_1), I_2..} e^b ^ sbar^{I_1..I_m}
    if m:
        first = TwistedForm.zero(chart, ch)
        lifts = {}
        for tup in itertools.product(basis, repeat=m):
            s = lifts.get(tup)
            if s is None:
                s = lifts[tup] = basis_lift(chart, tup)
            for b in range(1, 2 * n + 1):
                acc = Polynomial.zero(lay)
                for a in range(1, 2 * n + 1):
                    comp = phi.component([(a, b) + tup[0]] + list(tup[1:]))
                    if comp.terms:
                        acc = acc + comp.partial(lay.x(a))
                if acc.terms:
                    first = first + _wedge_e(b, s.scale(acc))
        rhs = rhs + first.scale(Fraction(-m, 2))
    # second term: -((2n-2+m)/(2N)) zb^{aJ} alpha^J ^ d_a j(phi), J over all reduced indices
    second = TwistedForm.zero(chart, ch)
    for a in range(1, 2 * n + 1):
        dj = TwistedForm(chart, ch, {k: v.partial(lay.x(a)) for k, v in j.terms.items() if v.partial(lay.x(a))})
        if not dj:
            continue
        for J in si.all_reduced(n):
            zb = chart.zbar((a,) + J)
            if not zb.terms:
                continue
            al = chart.alpha(J)
            for b, cb in al.components.items():
                second = second + _wedge_e(b, dj.scale(cb * zb))
    second = second.scale(chart.ring.inv_denominator(0, 1)).scale(Fraction(-(2 * n - 2 + m), 2))
    rhs = rhs + second
    return lhs, rhs


def _wedge_e(b: int, u: TwistedForm) -> TwistedForm:
    return wedge_covector(b - 1, u)


def comp_E_identity(phi: SymSpinorField, chart: Chart) -> Verdict:
    lhs, rhs = comp_e_sides(phi, chart)
    res = lhs - rhs
    return Verdict(not res, None if not res else res)
