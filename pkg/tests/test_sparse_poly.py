import pytest

from app.exceptions import ValidationError
from app.models.additive import AdditivePoly
from app.utils.sparse_poly import SparsePoly


@pytest.fixture
def square_plus_one(f3):
    """x^2 + 1 over F_3."""
    return SparsePoly.from_terms(f3, [(2, 1), (0, 1)])


def test_terms_are_merged_and_trimmed(f3):
    P = SparsePoly.from_terms(f3, [(2, 1), (2, 2), (1, 1)])
    assert P.terms == ((1, f3.one()),)
    assert P.degree == 1
    zero = SparsePoly.from_terms(f3, [(4, 1), (4, 2)])
    assert zero.is_zero() and zero.degree == -1 and str(zero) == '0'
    with pytest.raises(ValidationError):
        SparsePoly.from_terms(f3, [(-1, 1)])


def test_frobenius_is_the_pth_power(square_plus_one, f9):
    assert square_plus_one.frobenius() == square_plus_one ** 3
    y = f9.generator()
    P = SparsePoly.from_terms(f9, [(1, y), (0, f9.one())])
    assert P.frobenius(2) == P ** 9


def test_compose_and_evaluate(square_plus_one, f3, f9):
    shift = SparsePoly.from_terms(f3, [(1, 1), (0, 1)])
    composed = square_plus_one.compose(shift)
    assert composed == SparsePoly.from_terms(f3, [(2, 1), (1, 2), (0, 2)])
    for x in f9.elements():
        assert composed.evaluate(x) == square_plus_one.evaluate(shift(x))


def test_additive_polynomials_as_classical_ones(x3, f3):
    P = SparsePoly.from_additive(AdditivePoly.from_values(f3, [1, 2]))
    assert P == SparsePoly.from_terms(f3, [(1, 1), (3, 2)])
    assert SparsePoly.from_additive(x3).coefficient(3) == f3.one()
    assert (P - P).is_zero()
    assert (P * 2) + P == SparsePoly.zero(f3)
    assert hash(P) == hash(SparsePoly.from_terms(f3, [(3, 2), (1, 1)]))


def test_restriction(square_plus_one, f3, f9):
    lifted = square_plus_one.over(f9)
    assert lifted.field == f9
    assert lifted.restrict(f3) == square_plus_one
    twisted = SparsePoly.monomial(f9, 2, f9.generator())
    assert not twisted.is_rational(f3)
    with pytest.raises(ValidationError):
        twisted.restrict(f3)
