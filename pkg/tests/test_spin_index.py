import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from invpenrose import spin_index as si
from invpenrose.spin_index import UNIT_I, UNIT_NEG, UNIT_NEG_I, UNIT_ONE, ScaledIndex


@pytest.mark.parametrize(
    "seq,n,expected",
    [
        ((1, 1), 2, ScaledIndex(UNIT_NEG, ())),
        ((2, 1), 2, ScaledIndex(UNIT_NEG, (1, 2))),
        ((3,), 2, ScaledIndex(UNIT_I, (1,))),
        ((1, 2), 3, ScaledIndex(UNIT_ONE, (1, 2))),
    ],
)
def test_reduce_theta_rules(seq, n, expected):
    assert si.reduce_theta(seq, n) == expected


def test_reduce_dual_rules():
    assert si.reduce_dual((3,), 2) == ScaledIndex(UNIT_NEG_I, (1,))
    assert si.reduce_dual((1, 1), 3) == ScaledIndex(UNIT_NEG, ())
    assert si.reduce_dual((1, 3), 3) == ScaledIndex(UNIT_ONE, (1, 3))


def test_imaginary_generator_inside_index():
    # e_{n+i} on an index containing i gives -i, then the square e_i e_i gives -1
    assert si.reduce_theta((3, 1), 2) == ScaledIndex(UNIT_I, ())


def test_parity_and_sym_diff():
    assert si.parity(()) == si.EVEN
    assert si.parity((1, 2)) == si.EVEN
    assert si.parity((1,)) == si.ODD
    assert si.sym_diff((1, 2), (2, 3)) == (1, 3)
    assert si.sym_diff((1, 3), (1, 3)) == ()
    assert si.sym_diff((), (2,)) == (2,)


def test_spin_basis_order():
    assert si.spin_basis(2, si.EVEN) == [(), (1, 2)]
    assert si.spin_basis(2, si.ODD) == [(1,), (2,)]
    assert si.spin_basis(3, si.EVEN) == [(), (1, 2), (1, 3), (2, 3)]
    assert len(si.all_reduced(4)) == 16


def test_validation():
    with pytest.raises(si.MultiIndexError):
        si.reduce_theta((5,), 2)
    with pytest.raises(si.MultiIndexError):
        si.reduce_theta((1,), 1)
    with pytest.raises(ValueError):
        si.parse_parity("?")
    assert si.parse_parity("-") == si.ODD and si.parity_str(si.EVEN) == "+"


@st.composite
def sequences(draw):
    n = draw(st.integers(2, 5))
    seq = draw(st.lists(st.integers(1, 2 * n), max_size=3 * n))
    return n, tuple(seq)


@given(sequences(), st.integers(0, 2**32))
@settings(max_examples=300, deadline=None)
def test_strategies_agree(ns, salt):
    n, seq = ns
    right = si.reduce_theta(seq, n)
    assert si.reduce_theta_left(seq, n) == right
    assert si.reduce_theta_random(seq, n, random.Random(salt)) == right


@given(sequences())
@settings(max_examples=300, deadline=None)
def test_dual_is_conjugate(ns):
    n, seq = ns
    t, d = si.reduce_theta(seq, n), si.reduce_dual(seq, n)
    assert t.index == d.index
    assert d.unit == si.unit_conj(t.unit)


@given(sequences(), st.data())
@settings(max_examples=200, deadline=None)
def test_clifford_square(ns, data):
    n, seq = ns
    a = data.draw(st.integers(1, 2 * n))
    base = si.reduce_theta(seq, n)
    assert si.reduce_theta((a, a) + seq, n) == base.scale(UNIT_NEG)


@given(sequences())
@settings(max_examples=200, deadline=None)
def test_parity_preserved(ns):
    n, seq = ns
    r = si.reduce_theta(seq, n)
    assert si.parity(r.index) == len(seq) % 2
    assert list(r.index) == sorted(set(r.index))


@given(st.integers(2, 5), st.data())
def test_reduced_is_fixed_point(n, data):
    idx = data.draw(st.sampled_from(si.all_reduced(n)))
    assert si.reduce_theta(idx, n) == ScaledIndex(UNIT_ONE, idx)
    assert si.reduce_dual(idx, n) == ScaledIndex(UNIT_ONE, idx)
