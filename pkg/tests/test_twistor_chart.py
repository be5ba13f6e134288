import itertools

import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from invpenrose import spin_index as si
from invpenrose.coeff_ring import GaussianRational, Polynomial, W
from invpenrose.form_calculus import TwistedForm, project_antiholo
from invpenrose.twistor_chart import (
    Chart,
    ChartError,
    check_quadrics,
    four_term_residual,
    pfaffian_matchings,
    pfaffian_w,
)


def w(lay, i, j):
    return Polynomial.var(lay, W(i, j))


def test_z_coordinate_conventions(chart3):
    lay = chart3.layout
    assert chart3.z(()) == Polynomial.const(lay, 1)
    for i, j in lay.pairs:
        assert chart3.z((i, j)) == w(lay, i, j)
        assert chart3.z((j, i)) == -w(lay, i, j)
    # odd-length indices are zero functions on an even chart
    assert not chart3.z((1,)).terms


def test_z_length_four_n4():
    c = Chart(4, ())
    lay = c.layout
    expected = w(lay, 1, 2) * w(lay, 3, 4) - w(lay, 1, 3) * w(lay, 2, 4) + w(lay, 1, 4) * w(lay, 2, 3)
    assert c.z((1, 2, 3, 4)) == expected
    assert pfaffian_matchings(4, (1, 2, 3, 4)) == expected


@pytest.mark.parametrize("n", [2, 3, 4])
def test_pfaffian_oracle(n):
    for k in range(0, n + 1, 2):
        for rows in itertools.combinations(range(1, n + 1), k):
            assert pfaffian_w(n, rows) == pfaffian_matchings(n, rows)


def test_odd_chart_base():
    c = Chart(3, (1,))
    assert c.parity == si.ODD
    assert c.z((1,)) == Polynomial.const(c.layout, 1)
    assert c.N.constant_term() == GaussianRational(1)


def test_relation_three_example(chart3):
    res = check_quadrics(chart3, (), (), 1, 2)
    assert all(not r.terms for r in res.values())


def test_relation_two_same_index(chart3):
    for I in si.all_reduced(3):
        assert not check_quadrics(chart3, I, I, 1, 1)[2].terms


@pytest.mark.parametrize("n,base", [(2, ()), (3, ()), (3, (2,)), (4, ())])
def test_four_term_relation(n, base):
    c = Chart(n, base)
    for quad in itertools.combinations(range(1, 2 * n + 1), 4):
        assert not four_term_residual(c, base, quad).terms


def test_vector_field_frozen_values(chart2):
    lay = chart2.layout
    half = (mpq(1, 2), mpq(0))
    F12 = chart2.vector_field_F(1, 2)
    assert F12.components[(1, 2)] == chart2.ring.scalar((w(lay, 1, 2) ** 2 + Polynomial.const(lay, 1)).scale(half))
    F13 = chart2.vector_field_F(1, 3)
    assert F13.components[(1, 2)] == chart2.ring.scalar(w(lay, 1, 2).scale((0, 1)))


def test_vector_field_diagonal_rejected(chart2):
    with pytest.raises(ChartError):
        chart2.vector_field_F(1, 1)
    with pytest.raises(ChartError):
        chart2.vector_field_F(1, 5)


@pytest.mark.parametrize("base", [(), (1,)])
def test_vector_field_matches_flow_n3(base):
    c = Chart(3, base)
    for a in range(1, 7):
        for b in range(1, 7):
            if a != b:
                assert c.vector_field_F(a, b) == c.vector_field_F_flow(a, b)
                assert c.vector_field_F(a, b) == -c.vector_field_F(b, a)


def test_alpha_example(chart2):
    lay = chart2.layout
    a1 = chart2.alpha((1,))
    assert a1.get(2) == chart2.ring.scalar(w(lay, 1, 2))
    # chart-parity indices give zero forms
    assert a1.is_zero() is False
    assert chart2.alpha(()).is_zero()
    bar = a1.conjugate()
    for a in range(1, 5):
        assert bar.get(a) == a1.get(a).conjugate()


@pytest.mark.parametrize(
    "n,base,unit",
    [(2, (), GaussianRational(-4)), (3, (), GaussianRational(0, 8)), (3, (1,), GaussianRational(0, -8)), (4, (), GaussianRational(16))],
)
def test_split_determinant(n, base, unit):
    c = Chart(n, base)
    sp = c.antiholo_split()
    assert sp.n_power == 2
    assert sp.unit == unit
    assert sp.det == c.N ** 2 * Polynomial.const(c.layout, unit)


def test_split_symmetry_and_projection(chart3):
    sp = chart3.antiholo_split()
    for a in range(6):
        for k in range(3):
            assert sp.q[a][k] == sp.p[a][k].conjugate()
    for al in chart3.alpha_basis():
        assert not project_antiholo(TwistedForm.from_horizontal(al, 0))


@given(st.lists(st.integers(-3, 3), min_size=6, max_size=6), st.lists(st.integers(-3, 3), min_size=6, max_size=6))
@settings(max_examples=25, deadline=None)
def test_split_projection_idempotent_rank(xs, ws):
    from invpenrose.exact_linalg import rank

    c = Chart(2, ())
    lay = c.layout
    sp = c.antiholo_split()
    alb = [x.conjugate() for x in c.alpha_basis()]
    point = {lay.x(a): xs[a - 1] for a in range(1, 5)}
    val = GaussianRational(ws[0], ws[1])
    point[lay.w(1, 2)] = val
    point[lay.wbar(1, 2)] = val.conjugate()
    P = [[sum((sp.q[a][k] * alb[k].get(b + 1) for k in range(2)), c.ring.zero()).evaluate(point) for b in range(4)] for a in range(4)]
    P2 = [[sum((P[a][r] * P[r][b] for r in range(4)), GaussianRational()) for b in range(4)] for a in range(4)]
    assert P2 == P
    assert rank([{b: P[a][b].pair for b in range(4) if P[a][b]} for a in range(4)]) == 2


def test_chart_validation():
    with pytest.raises(ChartError):
        Chart(3, (2, 1))
    with pytest.raises(ChartError):
        Chart(2, (3,))
