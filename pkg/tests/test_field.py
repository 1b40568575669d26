import pytest

from app.exceptions import GuardExceeded, ValidationError
from app.models.field import (canonical_root, element_order, embed,
                              field_create, frobenius, least_irreducible,
                              multiplicative_order, norm_trace, parse_element,
                              restrict, roots_of_unity)


@pytest.mark.parametrize('p, n, expected', [
    (3, 2, (1, 0, 1)),
    (2, 2, (1, 1, 1)),
    (2, 3, (1, 1, 0, 1)),
    (5, 1, (0, 1)),
])
def test_least_irreducible(p, n, expected):
    assert least_irreducible(p, n) == expected


def test_field_create_rejects_bad_input():
    with pytest.raises(ValidationError):
        field_create(4, 1)
    with pytest.raises(ValidationError):
        field_create(3, 0)
    with pytest.raises(GuardExceeded):
        field_create(2, 41)


def test_frobenius_has_order_n(rng):
    F = field_create(3, 4)
    for _ in range(10):
        x = F.random(rng)
        assert frobenius(x, 4) == x
        assert frobenius(frobenius(x, 1), 3) == x
        assert frobenius(x, 1) == x ** 3


def test_norm_and_trace_of_generator(f9):
    x = f9.generator()
    norm, trace = norm_trace(x, 1)
    # x^2 = -1, so the conjugate of x is -x
    assert norm == f9.one()
    assert trace == f9.zero()


def test_trace_array_matches_norm_trace(rng):
    F = field_create(5, 3)
    values = [F.random(rng) for _ in range(8)]
    traces = F.trace_array(F.array(v.value for v in values))
    for x, t in zip(values, traces):
        assert norm_trace(x, 1)[1] == F.constant(int(t))


def test_multiplicative_order():
    assert multiplicative_order(3, 4) == 2
    assert multiplicative_order(2, 9) == 6
    assert multiplicative_order(5, 1) == 1
    with pytest.raises(ValidationError):
        multiplicative_order(3, 6)


def test_roots_of_unity(f9):
    roots = roots_of_unity(f9, 4)
    assert len(roots) == 4
    assert all((z ** 4).is_one() for z in roots)
    assert element_order(canonical_root(f9, 4)) == 4
    with pytest.raises(ValidationError):
        roots_of_unity(f9, 5)


def test_embedding_is_a_ring_homomorphism(rng, f9):
    F81 = field_create(3, 4)
    for _ in range(10):
        x, y = f9.random(rng), f9.random(rng)
        assert embed(x * y, F81) == embed(x, F81) * embed(y, F81)
        assert embed(x + y, F81) == embed(x, F81) + embed(y, F81)
        assert restrict(embed(x, F81), f9) == x


def test_restrict_rejects_elements_outside_the_subfield(f9):
    F81 = field_create(3, 4)
    outside = next(x for x in F81.elements() if frobenius(x, 2) != x)
    with pytest.raises(ValidationError):
        restrict(outside, f9)


def test_element_text(f9):
    x = f9.element([2, 1])
    assert str(x) == '3^2:1,0,1:2,1'
    assert parse_element(str(x)) == x
    with pytest.raises(ValidationError):
        parse_element('3^2:2,0,1:2,1')
    with pytest.raises(ValidationError):
        parse_element('3^2:1,0,1:2')
