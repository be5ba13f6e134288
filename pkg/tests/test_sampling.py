from invpenrose import sampling as S
from invpenrose.coeff_ring import layout
from invpenrose.twistor_chart import Chart


def test_streams_are_reproducible():
    a = [S.rng_for(3, "x", 1).random() for _ in range(3)]
    b = [S.rng_for(3, "x", 1).random() for _ in range(3)]
    assert a == b
    assert S.rng_for(3, "x", 2).random() != a[0]


def test_random_poly_has_quadratic_x_term():
    lay = layout(3)
    p = S.random_poly(lay, S.rng_for(0, "q"), degree=2)
    assert any(sum(e[: lay.nx]) == 2 for e, _ in p.sorted_terms())


def test_random_objects_reproducible():
    c = Chart(2, ())
    assert S.random_form(c, S.rng_for(1, "f")) == S.random_form(c, S.rng_for(1, "f"))
    assert S.random_field(2, 1, 0, S.rng_for(1, "g")) == S.random_field(2, 1, 0, S.rng_for(1, "g"))
    assert len(S.spanning_masks(2)) == 64 and len(S.spanning_masks(3)) == 4096
