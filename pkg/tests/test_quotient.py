import numpy as np
import pytest

from app.exceptions import ValidationError
from app.models.additive import AdditivePoly, evaluate
from app.models.field import field_create
from app.models.quotient import (IsotropicDatum, iterated_quotient,
                                 kernel_isotropy, push_element,
                                 quotient_identity_holds,
                                 right_divides, single_quotient,
                                 verify_morphism)
from app.models.symplectic import build, completely_anisotropic, submodule
from app.utils import linalg
from app.utils.sparse_poly import SparsePoly


@pytest.fixture
def imprimitive(x3_over_f9, limits):
    """R = x^3 over F_9 with m = 2: V_R has isotropic lines."""
    M = build(x3_over_f9, 2, limits)
    witness = completely_anisotropic(M, limits).witness
    return x3_over_f9, M, witness


def test_single_quotient_step(imprimitive):
    R, M, witness = imprimitive
    beta = M.element_of(witness.basis[0])
    step = single_quotient(R, IsotropicDatum.for_beta(R, beta))
    assert step.P1.e == 0
    assert step.u.e == 1
    assert quotient_identity_holds(step.R, step.u, step.P1, step.delta0)


def test_induction_data_for_a_line(imprimitive, limits):
    R, M, witness = imprimitive
    data = iterated_quotient(R, 2, witness, M, limits)
    assert data.e_prime == 0
    assert data.extension_degree == 3
    assert data.r.base == R.base
    assert verify_morphism(R, data.R1, data.r, data.delta, 2) == (True, [])
    assert right_divides(R, data)
    assert kernel_isotropy(M, data)
    doc = data.to_json()
    assert doc['F_prime_degree'] == 3
    assert doc['e_prime'] == 0


def test_quotient_by_a_lagrangian_plane(limits):
    # over F_81 both T and S act on V_(x^9) as −1 when d = 2
    F = field_create(3, 4)
    R = AdditivePoly.monomial(F, 2)
    M = build(R, 5, limits)
    assert M.d == 2 and M.dim == 4
    plane = next(basis for basis in linalg.iter_subspaces(3, 4, 2)
                 if linalg.is_isotropic(3, basis, M.gram))
    U = submodule(M, plane)
    assert U.is_submodule
    data = iterated_quotient(R, 5, U, M, limits)
    assert data.e_prime == 0
    assert data.extension_degree == 9
    assert verify_morphism(R, data.R1, data.r, data.delta, 5)[0]


def test_verify_morphism_flags_a_trivial_r(x3_over_f9, f9):
    ok, reasons = verify_morphism(x3_over_f9, x3_over_f9, AdditivePoly.identity(f9), SparsePoly.zero(f9), 2)
    assert not ok
    assert reasons == ["r is trivial (degree 1)"]


def test_quotients_need_odd_p_and_isotropic_u(imprimitive, limits):
    R, M, witness = imprimitive
    with pytest.raises(ValidationError):
        IsotropicDatum.for_beta(R, M.ambient.zero())
    F2 = field_create(2, 1)
    with pytest.raises(ValidationError):
        iterated_quotient(AdditivePoly.monomial(F2, 1), 1, [])
    whole = submodule(M, [[1, 0], [0, 1]])
    with pytest.raises(ValidationError):
        iterated_quotient(R, 2, whole, M, limits)


def test_push_element(limits):
    F = field_create(3, 4)
    R = AdditivePoly.monomial(F, 2)
    M = build(R, 5, limits)
    plane = next(basis for basis in linalg.iter_subspaces(3, 4, 2)
                 if linalg.is_isotropic(3, basis, M.gram))
    first, second = (IsotropicDatum.for_beta(R, M.element_of(row)) for row in plane)
    step = single_quotient(R, first)
    pushed = push_element(step, second.beta, second.gamma)
    assert pushed.in_h()
    assert pushed.beta == evaluate(step.u, second.beta)
    assert not pushed.beta.is_zero()
    with pytest.raises(ValidationError):
        push_element(step, second.beta, second.gamma + second.beta.field.one())


def test_push_element_needs_orthogonality(imprimitive):
    R, M, witness = imprimitive
    step = single_quotient(R, IsotropicDatum.for_beta(R, M.element_of(witness.basis[0])))
    other = next(v for v in ([1, 0], [0, 1])
                 if linalg.rank(3, np.array([list(witness.basis[0]), v])) == 2)
    datum = IsotropicDatum.for_beta(R, M.element_of(other))
    with pytest.raises(ValidationError):
        push_element(step, datum.beta, datum.gamma)
