"""Seeded random polynomials, fields and forms for the verification suites."""

from __future__ import annotations

import random
from itertools import combinations_with_replacement

from gmpy2 import mpq

from .coeff_ring import Layout, Polynomial, layout
from .fields import SymSpinorField, component_keys
from .form_calculus import GeneralVectorField, TwistedForm, bits, form_layout
from .twistor_chart import Chart


def rng_for(seed: int, *salt) -> random.Random:
    """Independent stream per case, stable across processes and Python versions."""
    return random.Random(repr((seed,) + salt))


def _rational(rng: random.Random) -> mpq:
    num = rng.randint(-5, 5)
    return mpq(num, rng.choice((1, 1, 2, 3)))


def random_poly(
    lay: Layout, rng: random.Random, degree: int = 2, nterms: int = 3, x_only: bool = False, complex_: bool = True
) -> Polynomial:
    """Sum of ``nterms`` random monomials of total degree ``<= degree``.

    One term always has an ``x`` factor of degree two (when ``degree >= 2``) so
    second-order operators such as ``Gamma`` see non-trivial input.
    """
    vars_ = list(range(lay.nx)) if x_only else list(range(lay.nvars))
    items = []
    for t in range(nterms):
        d = rng.randint(0, degree)
        if t == 0 and degree >= 2:
            mono = [rng.randrange(lay.nx), rng.randrange(lay.nx)]
        else:
            mono = [rng.choice(vars_) for _ in range(d)]
        exps = [0] * lay.nvars
        for v in mono:
            exps[v] += 1
        im = _rational(rng) if complex_ and rng.random() < 0.5 else 0
        items.append((exps, (_rational(rng) or mpq(1), im)))
    return Polynomial.from_exps(lay, items)


def random_monomial_form(
    chart: Chart, mask: int, rng: random.Random, degree: int = 2, charge: int | None = None
) -> TwistedForm:
    """One covector monomial with a random coefficient polynomial over ``N^k``."""
    c = rng.randint(0, 3) if charge is None else charge
    p = random_poly(chart.layout, rng, degree)
    coeff = chart.ring.scalar(p, rng.randint(0, 2))
    return TwistedForm(chart, c, {mask: coeff} if coeff else {})


def random_form(chart: Chart, rng: random.Random, nterms: int = 3, degree: int = 2, charge: int | None = None) -> TwistedForm:
    """A few random monomials over the coordinate coframe, one shared charge."""
    fl = form_layout(chart.n)
    top = fl.dwb_mask | fl.dw_mask | fl.e_mask
    c = rng.randint(0, 3) if charge is None else charge
    out = TwistedForm.zero(chart, c)
    for _ in range(nterms):
        mask = rng.getrandbits(fl.off_abar) & top
        out = out + random_monomial_form(chart, mask, rng, degree, c)
    return out


def spanning_masks(n: int) -> list[int]:
    """Every monomial in ``e^a``, ``dw_ij``, ``dwb_ij`` (the abar slots are excluded)."""
    fl = form_layout(n)
    return list(range(1 << fl.off_abar))


def mask_degree(mask: int) -> int:
    return len(bits(mask))


def random_field(n: int, m: int, parity: int, rng: random.Random, degree: int = 2, nterms: int = 2) -> SymSpinorField:
    """A random polynomial section, generally not a solution."""
    L = layout(n)
    comps = {}
    for key in component_keys(n, m, parity):
        comps[key] = random_poly(L, rng, degree, nterms, x_only=True)
    return SymSpinorField(n, m, parity, comps)


def x_monomials(n: int, degree: int) -> list[tuple[int, ...]]:
    """Exponent vectors in ``x_1..x_2n`` of total degree exactly ``degree``."""
    out = []
    for combo in combinations_with_replacement(range(2 * n), degree):
        e = [0] * (2 * n)
        for v in combo:
            e[v] += 1
        out.append(tuple(e))
    return out


def random_vector_field(chart: Chart, rng: random.Random, nterms: int = 3, degree: int = 1) -> GeneralVectorField:
    """A few random components along ``d/dx``, ``d/dw`` and ``d/dwb`` with polynomial coefficients."""
    lay = chart.layout
    x, w, wb = {}, {}, {}
    for _ in range(nterms):
        coeff = chart.ring.scalar(random_poly(lay, rng, degree, 2), 0)
        kind = rng.randrange(3)
        if kind == 0:
            x[rng.randint(1, 2 * chart.n)] = coeff
        else:
            pair = rng.choice(lay.pairs)
            (w if kind == 1 else wb)[pair] = coeff
    return GeneralVectorField(chart, x, w, wb)
