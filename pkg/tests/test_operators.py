from fractions import Fraction
from math import factorial

import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from invpenrose import operators as O
from invpenrose import sampling as S
from invpenrose.coeff_ring import Polynomial, WBar, X
from invpenrose.form_calculus import DWBar, E, TwistedForm, covariant_d, form_layout
from invpenrose.twistor_chart import Chart


def mono(c, covs, coeff=1, charge=2):
    return TwistedForm.monomial(c, covs, coeff, charge)


def test_D_of_x1_dwbar_frozen(chart2):
    c = chart2
    lay = c.layout
    u = mono(c, [DWBar(1, 2)], c.ring.var(X(1)))
    wb = Polynomial.var(lay, WBar(1, 2))
    one = Polynomial.const(lay, 1)
    half = (mpq(1, 2), mpq(0))
    expected = (
        mono(c, [E(2)], c.ring.scalar((wb * wb + one).scale(half)))
        + mono(c, [E(3)], c.ring.scalar(wb.scale((0, -1))))
        + mono(c, [E(4)], c.ring.scalar((wb * wb - one).scale((0, mpq(1, 2)))))
    )
    assert O.op_D(u) == expected
    assert O.op_D_frame_definition(u) == expected
    assert O.op_D_coordinate_alpha(u) == expected


def test_D_without_dwbar_vanishes(chart2):
    u = mono(chart2, [E(1), E(3)], chart2.ring.var(X(2)))
    assert not O.op_D(u)


def test_dH_examples(chart2):
    c = chart2
    assert O.op_dH(TwistedForm.function(c, c.ring.var(X(1)))) == mono(c, [E(1)], charge=0)
    assert not O.op_dH(TwistedForm.function(c, c.ring.var(WBar(1, 2))))


def test_E_and_Gamma_trivial_cases(chart2):
    c = chart2
    # x-independent vertical form
    v = mono(c, [DWBar(1, 2)], c.ring.inv_denominator(0, 2))
    assert not O.op_E(v)
    lin = mono(c, [DWBar(1, 2)], c.ring.var(X(1)) + c.ring.var(X(3)))
    assert not O.op_Gamma(lin)
    quad = mono(c, [DWBar(1, 2)], c.ring.var(X(1)) * c.ring.var(X(1)))
    assert O.op_Gamma(quad)


def test_F_series_on_D_closed_form(chart2):
    u = mono(chart2, [E(1)], chart2.ring.var(X(2)))
    for l in range(5):
        assert O.apply_F_deriv(l, u) == u.scale(Fraction(1, factorial(l)))


def test_F_scalar_values():
    for l in range(8):
        assert O.F_deriv_scalar(l, 0) == Fraction(1, factorial(l))
    # F(x) = sum x^k/(k!)^2, so F(1) > 2 and F'(0) = 1
    assert O.F_deriv_scalar(0, 1) > 2
    with pytest.raises(ValueError):
        O.apply_F_deriv(-1, mono(Chart(2), [E(1)]))


def test_B_is_tensorial(chart2):
    rng = S.rng_for(1, "B-unit")
    u = S.random_form(chart2, rng)
    f = S.random_poly(chart2.layout, rng, 2)
    assert O.op_B(u.scale(f)) == O.op_B(u).scale(f)


charts = st.sampled_from([(2, ()), (2, (1,)), (3, ()), (3, (2,))])


def _form(cb, seed):
    c = Chart(*cb)
    return S.random_form(c, S.rng_for(seed, "op-prop", cb), nterms=2)


@given(charts, st.integers(0, 10**6))
@settings(max_examples=10, deadline=None)
def test_E_is_commutator_with_d(cb, seed):
    u = _form(cb, seed)
    assert O.op_E(u) == covariant_d(O.op_D(u)) - O.op_D(covariant_d(u))


@given(charts, st.integers(0, 10**6))
@settings(max_examples=10, deadline=None)
def test_ED_commutator(cb, seed):
    u = _form(cb, seed)
    lhs = O.op_E(O.op_D(u)) - O.op_D(O.op_E(u))
    assert lhs == O.op_Gamma(u) - O.op_D(O.op_dH(u)).scale(2)


@given(charts, st.integers(0, 10**6))
@settings(max_examples=10, deadline=None)
def test_commuting_pairs(cb, seed):
    u = _form(cb, seed)
    Du = O.op_D(u)
    assert O.op_Gamma(Du) == O.op_D(O.op_Gamma(u))
    assert O.op_dH(Du) == O.op_D(O.op_dH(u))
    assert O.op_B(Du) == O.op_D(O.op_B(u))
    assert not O.apply_D_power(u, u.chart.n + 1)


@given(charts, st.integers(0, 10**6), st.data())
@settings(max_examples=10, deadline=None)
def test_x_commutator(cb, seed, data):
    u = _form(cb, seed)
    a = data.draw(st.integers(1, 2 * u.chart.n))
    cx = O.commutator_x(a, u)
    assert cx == O.commutator_x_expected(a, u)
    assert O.commutator_x(a, O.op_D(u)) == O.op_D(cx)


@given(charts, st.integers(0, 10**6))
@settings(max_examples=8, deadline=None)
def test_three_implementations_of_D(cb, seed):
    u = _form(cb, seed)
    Du = O.op_D(u)
    assert O.op_D_frame_definition(u) == Du
    assert O.op_D_coordinate_alpha(u) == Du


@given(charts, st.integers(0, 10**6), st.integers(0, 4))
@settings(max_examples=10, deadline=None)
def test_F_recurrence(cb, seed, l):
    u = _form(cb, seed)
    lhs = O.op_D(O.apply_F_deriv(l + 2, u)) + O.apply_F_deriv(l + 1, u).scale(l + 1)
    assert lhs == O.apply_F_deriv(l, u)


def test_induction_identity_n3():
    c = Chart(3, ())
    x1, x2 = c.ring.var(X(1)), c.ring.var(X(2))
    u = S.random_form(c, S.rng_for(7, "induction"), nterms=3, charge=2)
    u = u + mono(c, [DWBar(1, 2), DWBar(2, 3)], x1 * x1 + x2 * c.ring.var(WBar(1, 3)))
    assert O.op_Gamma(u)
    P = O.apply_D_power
    for k in range(1, 5):
        lhs = covariant_d(P(u, k)) - P(covariant_d(u), k)
        rhs = P(O.op_E(u), k - 1).scale(k) - P(O.op_dH(u), k - 1).scale(k * (k - 1))
        if k >= 2:
            rhs = rhs + P(O.op_Gamma(u), k - 2).scale(Fraction(k * (k - 1), 2))
        assert lhs == rhs


def test_D_preserves_type(chart3):
    from invpenrose.form_calculus import expand_abar, project_holo_part

    fl = form_layout(3)
    rng = S.rng_for(4, "type")
    for _ in range(3):
        mask = rng.getrandbits(fl.nbits) & (fl.abar_mask | fl.dwb_mask)
        w = expand_abar(S.random_monomial_form(chart3, mask, rng))
        assert not project_holo_part(O.op_D(w))
