import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from invpenrose import sampling as S
from invpenrose.coeff_ring import RingError, W, WBar, X
from invpenrose.form_calculus import (
    ABar,
    DW,
    DWBar,
    E,
    FormTypeError,
    GeneralVectorField,
    TwistedForm,
    bracket,
    covariant_d,
    curvature,
    curvature_pairing,
    dbar,
    expand_abar,
    form_layout,
    interior,
    lie,
    project_antiholo,
    project_holo_part,
    wedge,
)
from invpenrose.twistor_chart import Chart


def mono(c, covs, coeff=1, charge=0):
    return TwistedForm.monomial(c, covs, coeff, charge)


def fn(c, var, charge=0):
    return TwistedForm.function(c, c.ring.var(var), charge)


def test_wedge_signs(chart2):
    e1, e2 = mono(chart2, [E(1)]), mono(chart2, [E(2)])
    assert not wedge(e1, e1)
    assert wedge(e1, e2) == -wedge(e2, e1)
    f = chart2.ring.var(X(1))
    g = chart2.ring.var(W(1, 2))
    u = wedge(mono(chart2, [DWBar(1, 2)], f), mono(chart2, [E(3)], g))
    assert u == mono(chart2, [DWBar(1, 2), E(3)], f * g)
    assert u == -mono(chart2, [E(3), DWBar(1, 2)], f * g)


def test_interior_basics(chart2):
    d = GeneralVectorField.d_wbar(chart2, 1, 2)
    assert interior(d, mono(chart2, [DWBar(1, 2)])) == TwistedForm.function(chart2, 1)
    assert not interior(d, fn(chart2, X(1)))
    for a in range(1, 5):
        for b in range(1, 5):
            r = interior(GeneralVectorField.e(chart2, a), mono(chart2, [E(b)]))
            assert r == TwistedForm.function(chart2, 1 if a == b else 0)


def test_covariant_d_flat_and_curved(chart2):
    assert covariant_d(fn(chart2, X(1))) == mono(chart2, [E(1)])
    f = TwistedForm.function(chart2, chart2.ring.var(X(2)) * chart2.ring.var(WBar(1, 2)))
    assert not covariant_d(covariant_d(f))
    for charge in (1, 3):
        g = f.with_charge(charge)
        omega = curvature(chart2, charge).with_charge(0)
        assert omega
        assert covariant_d(covariant_d(g)) == wedge(omega, g)


def test_lie_of_functions_and_dwbar(chart2):
    f = S.random_monomial_form(chart2, 0, S.rng_for(3, "lie"), charge=2)
    for a in range(1, 5):
        assert lie(GeneralVectorField.e(chart2, a), f) == f._new({0: f.terms[0].partial(X(a))})
        assert not lie(GeneralVectorField.e(chart2, a), mono(chart2, [DWBar(1, 2)]))


def test_projection_examples(chart2):
    c = chart2
    for k in (1, 2):
        al = TwistedForm.from_horizontal(c.alpha((k,)), 0)
        assert not project_antiholo(al)
        alb = TwistedForm.from_horizontal(c.alpha((k,)).conjugate(), 0)
        assert project_antiholo(alb) == mono(c, [ABar(k)])
    assert project_antiholo(mono(c, [DWBar(1, 2)])) == mono(c, [DWBar(1, 2)])
    assert not project_antiholo(mono(c, [DW(1, 2)]))


def test_dbar_examples(chart2):
    assert not dbar(fn(chart2, W(1, 2)))
    assert dbar(fn(chart2, WBar(1, 2))) == mono(chart2, [DWBar(1, 2)])
    with pytest.raises(FormTypeError):
        dbar(mono(chart2, [DW(1, 2)]))


def test_charge_mismatch(chart2):
    with pytest.raises(RingError):
        fn(chart2, X(1), 1) + fn(chart2, X(1), 2)


def test_calibration_rho(chart2):
    c = chart2
    Fb = GeneralVectorField.from_vertical(c.vector_field_F(1, 2).conjugate())
    rho = TwistedForm.function(c, c.ring.inv_denominator(), 1)
    FN = Fb.apply(c.ring.scalar(c.N))
    assert FN
    assert lie(Fb, rho) == TwistedForm.function(c, -(FN * c.ring.inv_denominator(0, 2)), 1)


# ---- identities on random inputs


charts = st.sampled_from([(2, ()), (2, (1,)), (3, ())])


@given(charts, st.integers(0, 10**6))
@settings(max_examples=12, deadline=None)
def test_lie_commutator_is_curvature(cb, seed):
    c = Chart(*cb)
    rng = S.rng_for(seed, "lie-comm")
    v, v2 = S.random_vector_field(c, rng), S.random_vector_field(c, rng)
    u = S.random_form(c, rng, nterms=2, degree=1)
    lhs = lie(v, lie(v2, u)) - lie(v2, lie(v, u)) - lie(bracket(v, v2), u)
    assert lhs == u.scale(curvature_pairing(v, v2, u.charge))


@given(charts, st.integers(0, 10**6))
@settings(max_examples=12, deadline=None)
def test_cartan_naturality(cb, seed):
    c = Chart(*cb)
    rng = S.rng_for(seed, "cartan")
    v = S.random_vector_field(c, rng)
    u = S.random_form(c, rng, nterms=2, degree=1)
    u2 = S.random_form(c, rng, nterms=2, degree=1, charge=0)
    assert lie(v, wedge(u, u2)) == wedge(lie(v, u), u2) + wedge(u, lie(v, u2))


@given(charts, st.integers(0, 10**6), st.integers(1, 4))
@settings(max_examples=12, deadline=None)
def test_lie_interior_commutator(cb, seed, a):
    c = Chart(*cb)
    rng = S.rng_for(seed, "li")
    v = S.random_vector_field(c, rng)
    u = S.random_form(c, rng, nterms=2, degree=1)
    ea = GeneralVectorField.e(c, a)
    assert lie(ea, interior(v, u)) - interior(v, lie(ea, u)) == interior(bracket(ea, v), u)


@given(charts, st.integers(0, 10**6))
@settings(max_examples=15, deadline=None)
def test_dbar_squared(cb, seed):
    c = Chart(*cb)
    fl = form_layout(c.n)
    rng = S.rng_for(seed, "dbar2")
    mask = rng.getrandbits(fl.nbits) & (fl.abar_mask | fl.dwb_mask)
    u = expand_abar(S.random_monomial_form(c, mask, rng))
    assert not project_holo_part(u)
    assert not dbar(dbar(u))


@given(charts, st.integers(0, 10**6))
@settings(max_examples=15, deadline=None)
def test_projection_idempotent(cb, seed):
    c = Chart(*cb)
    u = S.random_form(c, S.rng_for(seed, "proj"))
    P = project_antiholo(u)
    assert project_antiholo(expand_abar(P)) == P
    assert not project_antiholo(project_holo_part(u))
