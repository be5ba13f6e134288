"""The vertical-horizontal operators ``D``, ``d_H``, ``E``, ``Gamma``, ``B`` and ``F^(l)(D)``.

All of them act on :class:`TwistedForm` values of one chart.  On the flat
chart ``L_{e_a}`` is the coefficient derivative ``d/dx_a``.
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial

from .coeff_ring import ChartScalar, LocalRing, Polynomial
from .form_calculus import (
    E,
    GeneralVectorField,
    TwistedForm,
    form_layout,
    interior,
    interior_bit,
    lie,
    partial_form,
    wedge,
    wedge_covector,
    _below,
    _recast,
)
from .twistor_chart import Chart

# per (chart, ring) cache of the coefficient table of D
_D_TABLE: dict = {}


def _d_table(chart: Chart, ring: LocalRing) -> dict[int, list[tuple[int, int, ChartScalar]]]:
    """For each ``a``: entries ``(e^b bit, dwb_ij bit, coefficient of Fbar_ab on d/dwb_ij)``."""
    key = (chart.n, chart.base, id(ring))
    hit = _D_TABLE.get(key)
    if hit is not None and hit[0] is ring:
        return hit[1]
    fl = form_layout(chart.n)
    n = chart.n
    table: dict[int, list] = {}
    for a in range(1, 2 * n + 1):
        rows = []
        for b in range(1, 2 * n + 1):
            if a == b:
                continue
            F = chart.vector_field_F(a, b)
            for (i, j), c in F.components.items():
                rows.append((fl.e(b), fl.dwb(i, j), _recast(ring, c.conjugate())))
        table[a] = rows
    _D_TABLE[key] = (ring, table)
    return table


def _accumulate(out: dict, m: int, p: ChartScalar) -> None:
    old = out.get(m)
    if old is None:
        out[m] = p
    else:
        s = old + p
        if s:
            out[m] = s
        else:
            del out[m]


def _d_core(u: TwistedForm, derivs: dict[int, TwistedForm]) -> TwistedForm:
    """``-sum_ab i(Fbar_ab)(e^b ^ U_a)`` for given forms ``U_a``."""
    table = _d_table(u.chart, u.ring)
    out: dict[int, ChartScalar] = {}
    for a, ua in derivs.items():
        rows = table[a]
        for m, c in ua.terms.items():
            for eb, wb, coef in rows:
                B = 1 << eb
                W = 1 << wb
                if m & B or not m & W:
                    continue
                # -i(d/dwb)(e^b ^ mono) = e^b ^ i(d/dwb) mono
                k = m ^ W
                s = _below(m, wb) + _below(k, eb)
                p = c * coef
                if not p:
                    continue
                _accumulate(out, k | B, -p if s & 1 else p)
    return u._new(out)


def _x_derivs(u: TwistedForm) -> dict[int, TwistedForm]:
    lay = u.chart.layout
    out = {}
    for a in range(1, 2 * u.chart.n + 1):
        d = partial_form(u, lay.x(a))
        if d:
            out[a] = d
    return out


def op_D(u: TwistedForm) -> TwistedForm:
    """``D u = 1/2 sum_{i<j} i(d/dwb_ij)(zb^{aiI} abar^{jI} - zb^{ajI} abar^{iI}) ^ L_{e_a} u``."""
    if not any(m & u.layout.dwb_mask for m in u.terms):
        return u._new({})
    return _d_core(u, _x_derivs(u))


def op_D_frame_definition(u: TwistedForm) -> TwistedForm:
    """Independent implementation of ``D = -L_{e_a} i(Fbar_ab) e^b`` from generic pieces."""
    c = u.chart
    out = TwistedForm.zero(c, u.charge, u.ring)
    for a in range(1, 2 * c.n + 1):
        for b in range(1, 2 * c.n + 1):
            if a == b:
                continue
            Fb = GeneralVectorField.from_vertical(c.vector_field_F(a, b).conjugate(), u.ring)
            eb = TwistedForm.monomial(c, [E(b)], 1, 0, u.ring)
            step = interior(Fb, wedge(eb, u))
            out = out - lie(GeneralVectorField.e(c, a, u.ring), step)
    return out


def op_D_coordinate_alpha(u: TwistedForm) -> TwistedForm:
    """The coordinate formula built literally from the forms ``abar^{kI}``."""
    c = u.chart
    n = c.n
    fl = u.layout
    out = TwistedForm.zero(c, u.charge, u.ring)
    abar = {k: TwistedForm.from_horizontal(c.alpha((k,) + c.base).conjugate(), 0, u.ring) for k in range(1, n + 1)}
    derivs = _x_derivs(u)
    for (i, j) in fl.pairs:
        for a, ua in derivs.items():
            beta = abar[j].scale(c.zbars((a, i) + c.base)) - abar[i].scale(c.zbars((a, j) + c.base))
            beta = TwistedForm(c, 0, {m: _recast(u.ring, v) for m, v in beta.terms.items()}, u.ring)
            if not beta:
                continue
            out = out + interior_bit(fl.dwb(i, j), wedge(beta, ua))
    return out.scale(Fraction(1, 2))


def op_dH(u: TwistedForm) -> TwistedForm:
    """``d_H = e^a ^ L_{e_a}``."""
    out = u._new({})
    for a, ua in _x_derivs(u).items():
        out = out + wedge_covector(a - 1, ua)
    return out


def op_E(u: TwistedForm) -> TwistedForm:
    """``E = -L_{e_a} L_{Fbar_ab} e^b``; the x-derivative commutes with the vertical Lie derivative."""
    c = u.chart
    out = u._new({})
    for a, ua in _x_derivs(u).items():
        for b in range(1, 2 * c.n + 1):
            if a == b:
                continue
            Fb = GeneralVectorField.from_vertical(c.vector_field_F(a, b).conjugate(), u.ring)
            out = out - lie(Fb, wedge_covector(b - 1, ua))
    return out


def laplacian_x(u: TwistedForm) -> TwistedForm:
    """``sum_c (d/dx_c)^2`` on coefficients."""
    lay = u.chart.layout
    out = u._new({})
    for a in range(1, 2 * u.chart.n + 1):
        out = out + partial_form(partial_form(u, lay.x(a)), lay.x(a))
    return out


def op_Gamma(u: TwistedForm) -> TwistedForm:
    """``Gamma = e^a ^ e^b ^ i(Fbar_ab) sum_c (L_{d/dx_c})^2``."""
    lap = laplacian_x(u)
    if not lap:
        return lap
    table = _d_table(u.chart, u.ring)
    out: dict[int, ChartScalar] = {}
    for a in range(1, 2 * u.chart.n + 1):
        ea = 1 << (a - 1)
        for eb, wb, coef in table[a]:
            B = 1 << eb
            W = 1 << wb
            for m, c in lap.terms.items():
                if not m & W:
                    continue
                k = m ^ W
                if k & B or k & ea:
                    continue
                s = _below(m, wb)
                # e^b ^ mono', then e^a ^ (...)
                s += _below(k, eb)
                k2 = k | B
                s += _below(k2, a - 1)
                p = c * coef
                _accumulate(out, k2 | ea, -p if s & 1 else p)
    return u._new(out)


def _xsq(u: TwistedForm) -> Polynomial:
    lay = u.chart.layout
    acc = Polynomial.zero(lay)
    for a in range(1, 2 * u.chart.n + 1):
        xa = Polynomial.var(lay, lay.x(a))
        acc = acc + xa * xa
    return acc


def op_B(u: TwistedForm) -> TwistedForm:
    """``B = -[D, |x|^2]``."""
    r = _xsq(u)
    return -(op_D(u.scale(r)) - op_D(u).scale(r))


def commutator_x(a: int, u: TwistedForm) -> TwistedForm:
    """``[D, x_a] u = D(x_a u) - x_a D u``."""
    lay = u.chart.layout
    xa = Polynomial.var(lay, lay.x(a))
    return op_D(u.scale(xa)) - op_D(u).scale(xa)


def commutator_x_expected(a: int, u: TwistedForm) -> TwistedForm:
    """``-i(Fbar_ab)(e^b ^ u)``: the closed form of :func:`commutator_x`."""
    return _d_core(u, {a: u})


def apply_D_power(u: TwistedForm, k: int) -> TwistedForm:
    for _ in range(k):
        if not u:
            break
        u = op_D(u)
    return u


def apply_F_deriv(l: int, u: TwistedForm, powers: list[TwistedForm] | None = None) -> TwistedForm:
    """``F^(l)(D) u = sum_{k=0}^{n} D^k u / (k! (l+k)!)``; ``D^{n+1} = 0`` truncates exactly."""
    if l < 0:
        raise ValueError("l must be non-negative")
    if powers is None:
        powers = d_powers(u)
    out = u._new({})
    for k, dk in enumerate(powers):
        if dk:
            out = out + dk.scale(Fraction(1, factorial(k) * factorial(l + k)))
    return out


def d_powers(u: TwistedForm) -> list[TwistedForm]:
    """``[u, Du, ..., D^n u]``."""
    out = [u]
    for _ in range(u.chart.n):
        out.append(op_D(out[-1]) if out[-1] else out[-1])
    return out


def F_deriv_scalar(l: int, x: Fraction | int = 0, terms: int = 40) -> Fraction:
    """``F^(l)(x)`` for ``F(x) = sum x^k / (k!)^2``, summed over the first ``terms`` terms (exact at x = 0)."""
    return sum((Fraction(x) ** k / (factorial(k) * factorial(l + k)) for k in range(terms)), Fraction(0))
