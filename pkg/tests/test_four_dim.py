from math import factorial

import pytest

from invpenrose import fields as F
from invpenrose import operators as O
from invpenrose import sampling as S
from invpenrose.coeff_ring import Polynomial
from invpenrose.form_calculus import GeneralVectorField, TwistedForm, dbar, lie, recast_form
from invpenrose.four_dim import (
    FrameError,
    antisym,
    cayley_frame,
    compose_frames,
    connection_form,
    frame_F,
    frame_F_flow,
    hatted_L,
    identity_frame,
    op_D_frame,
    qm_four,
    standard_test_frames,
)


@pytest.fixture(scope="module")
def frames(chart2):
    return standard_test_frames(chart2)


def test_cayley_zero_is_identity(chart2):
    f = cayley_frame(chart2, antisym(chart2.layout, {}))
    for a in range(1, 5):
        for b in range(1, 5):
            assert f.entry(b, a) == chart2.ring.const(1 if a == b else 0)
    assert connection_form(f).is_zero()


def test_constant_frame_is_flat(frames):
    assert frames[0].is_constant()
    assert connection_form(frames[0]).is_zero()


def test_rotation_in_one_plane(chart2):
    lay = chart2.layout
    x3 = Polynomial.var(lay, lay.x(3))
    f = cayley_frame(chart2, antisym(lay, {(1, 2): x3}))
    om = connection_form(f)
    # a rotation by 2 arctan(x3) in the 12-plane: omega^1_2 = 2 dx3 / (1 + x3^2)
    expected = TwistedForm(chart2, 0, {1 << 2: f.ring.scalar(Polynomial.const(lay, 2), (0, 1))}, f.ring)
    assert om.get(1, 2) == expected
    assert om.get(2, 1) == -expected
    nonzero = [(b, a) for b in range(1, 5) for a in range(1, 5) if om.get(b, a)]
    assert nonzero == [(1, 2), (2, 1)]


def test_singular_cayley_rejected(chart2):
    lay = chart2.layout
    # det(I - A) = 1 + a^2 vanishes at a = i
    with pytest.raises(FrameError):
        cayley_frame(chart2, antisym(lay, {(1, 2): Polynomial.const(lay, (0, 1))}))


def test_hatted_L_standard_frame(chart2):
    ident = identity_frame(chart2)
    u = S.random_form(chart2, S.rng_for(0, "hatL"))
    for a in range(1, 5):
        assert hatted_L(a, ident, u) == lie(GeneralVectorField.e(chart2, a), u)


def test_frame_covariance_of_L(chart2, frames):
    f2, g2, fg = compose_frames(frames[1], frames[2])
    rng = S.rng_for(1, "trL")
    u = recast_form(S.random_form(chart2, rng, nterms=2), f2.ring)
    for a in range(1, 5):
        rhs = TwistedForm.zero(chart2, u.charge, f2.ring)
        for b in range(1, 5):
            rhs = rhs + hatted_L(b, f2, u.scale(g2.entry(b, a)))
        assert hatted_L(a, fg, u) == rhs


def test_frame_covariance_of_F(frames):
    for f in frames:
        for a, b in [(1, 2), (1, 4), (3, 2)]:
            assert frame_F(f, a, b) == frame_F_flow(f, a, b)


def test_D_frame_independent(chart2, frames):
    rng = S.rng_for(2, "frame-D")
    for f in frames + [identity_frame(chart2)]:
        u = S.random_form(chart2, rng)
        assert op_D_frame(f, u) == recast_form(O.op_D(u), f.ring)


@pytest.mark.parametrize("m", [0, 1, 2])
def test_qm_four(chart2, frames, m):
    rng = S.rng_for(m, "qm4")
    phi = S.random_field(2, m, 0, rng)
    j = F.lift_j(phi, chart2)
    Q = qm_four(phi, chart2)
    assert not O.op_D(O.op_D(j))
    assert not op_D_frame(frames[1], op_D_frame(frames[1], j))
    assert Q == O.apply_F_deriv(m, j).scale(factorial(m))
    assert Q == F.inverse_penrose(phi, chart2)


def test_qm_four_constant(chart2):
    phi = F.SymSpinorField(2, 1, 0, {((1, 2),): Polynomial.const(chart2.layout, 1)})
    assert qm_four(phi) == F.lift_j(phi, chart2)


def test_qm_four_solutions_closed(chart2):
    for m in range(3):
        for phi in F.solution_basis(2, m, 0, 2)[-3:]:
            assert not dbar(qm_four(phi, chart2))


def test_qm_four_rejects(chart2):
    with pytest.raises(FrameError):
        qm_four(S.random_field(3, 0, 0, S.rng_for(0, "x")))
    with pytest.raises(FrameError):
        qm_four(S.random_field(2, 0, 1, S.rng_for(0, "x")))


def test_frames_nontrivial(frames):
    assert not connection_form(frames[1]).is_zero()
    assert not connection_form(frames[2]).is_zero()
    assert len({f.name for f in frames}) == 3
