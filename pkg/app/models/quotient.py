"""Quotients of the curve a^p − a = xR(x) by isotropic subgroups (p odd).

One step divides by the line F_p·β with u = x^p − β^{p−1}x; iterating over a
basis of a totally isotropic submodule U gives r = kernel polynomial of U,
R1 and Δ with x·R(x) = r·R1(r) + Δ^p − Δ.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

from app.exceptions import TheoremViolation, ValidationError
from app.models import group
from app.models.additive import (AdditivePoly, compose, d_r, d_rm, e_r,
                                 evaluate, f_r, is_reduced, kernel, mu_scaling,
                                 right_divmod)
from app.models.field import FieldElement
from app.models.symplectic import (Submodule, SympModule, build, perp,
                                   submodule)
from app.utils import linalg
from app.utils.limits import DEFAULT_LIMITS, Limits
from app.utils.sparse_poly import SparsePoly

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class IsotropicDatum:
    beta: FieldElement
    gamma: FieldElement

    @classmethod
    def for_beta(cls, R: AdditivePoly, beta: FieldElement) -> 'IsotropicDatum':
        """γ = f_R(β, β)/2, after checking E_R(β) = 0 and β ≠ 0."""
        if R.p == 2:
            raise ValidationError("isotropic data need p ≠ 2")
        if beta.is_zero():
            raise ValidationError("β must be nonzero")
        R_amb = R.over(beta.field)
        if not evaluate(e_r(R_amb), beta).is_zero():
            raise ValidationError(f"β = {beta} is not a root of E_R")
        gamma = f_r(R_amb).evaluate(beta, beta) / beta.field.constant(2)
        if gamma ** R.p - gamma != beta * evaluate(R_amb, beta):
            raise TheoremViolation(f"γ = f_R(β,β)/2 fails γ^p − γ = βR(β) for β = {beta}")
        return cls(beta, gamma)


@dataclass(frozen=True)
class QuotientStep:
    R: AdditivePoly
    datum: IsotropicDatum
    u: AdditivePoly
    delta0: SparsePoly
    P1: AdditivePoly


def single_quotient(R: AdditivePoly, datum: IsotropicDatum) -> QuotientStep:
    """Quotient by ⟨(1, β, γ)⟩: xR(x) = u·P1(u) + Δ0^p − Δ0."""
    if R.p == 2:
        raise ValidationError("curve quotients are only built for p ≠ 2")
    if R.e < 1:
        raise ValidationError("the quotient step needs e ≥ 1")
    F = datum.beta.field
    p = F.p
    R = R.over(F)
    beta, gamma = datum.beta, datum.gamma
    if not evaluate(e_r(R), beta).is_zero():
        raise ValidationError(f"β = {beta} is not a root of E_R")
    inv_beta = beta.inverse()
    # f_R(x, β) = Σ g_u x^{p^u}
    g = [F.zero() for _ in range(R.e + 1)]
    for (u_idx, v_idx), c in f_r(R).terms:
        g[u_idx] = g[u_idx] + c * beta ** (p ** v_idx)
    R_beta = evaluate(R, beta)
    inner = [-(beta * a) for a in R.coeffs]
    inner[1] = inner[1] + beta ** (1 - p) * R_beta + gamma * inv_beta ** p
    inner[0] = inner[0] + gamma * inv_beta
    for i, gi in enumerate(g):
        inner[i] = inner[i] - gi
    P = AdditivePoly(F, tuple(c * inv_beta ** p for c in inner))
    u = AdditivePoly(F, (-(beta ** (p - 1)), F.one()))
    P1, rem = right_divmod(P, u)
    if not rem.is_zero():
        logger.error(f"P is not divisible by u for β = {beta}: remainder {rem}")
        raise TheoremViolation("the quotient polynomial P leaves a nonzero remainder after division by u")
    if P1.e != R.e - 1:
        raise TheoremViolation(f"P1 has index {P1.e}, expected {R.e - 1}")
    terms = [(2, -gamma * inv_beta ** 2)] + [(p ** i + 1, inv_beta * gi) for i, gi in enumerate(g)]
    delta0 = SparsePoly.from_terms(F, terms)
    step = QuotientStep(R, datum, u, delta0, P1)
    if not quotient_identity_holds(R, u, P1, delta0):
        logger.error(f"xR(x) = uP1(u) + Δ0^p − Δ0 fails for β = {beta}")
        raise TheoremViolation("single quotient identity does not hold")
    return step


def quotient_identity_holds(R: AdditivePoly, r: AdditivePoly, R1: AdditivePoly, delta: SparsePoly) -> bool:
    """x·R(x) == r(x)·R1(r(x)) + Δ^p − Δ as polynomials."""
    F = R.base
    x = SparsePoly.monomial(F, 1)
    lhs = x * SparsePoly.from_additive(R)
    rhs = SparsePoly.from_additive(r) * SparsePoly.from_additive(compose(R1, r)) + delta.frobenius() - delta
    return lhs == rhs


def push_element(step: QuotientStep, beta2: FieldElement, gamma2: FieldElement) -> group.GroupElement:
    """(1, β′, γ′) ↦ (1, u(β′), γ′ − Δ0(β′)) in H_{P1}."""
    R = step.R
    table = f_r(R)
    beta = step.datum.beta
    if not (table.evaluate(beta, beta2) - table.evaluate(beta2, beta)).is_zero():
        raise ValidationError(f"ω_R(β, β′) ≠ 0 for β′ = {beta2}")
    if gamma2 * 2 != table.evaluate(beta2, beta2):
        raise ValidationError("γ′ must equal f_R(β′, β′)/2")
    image_beta = evaluate(step.u, beta2)
    image_gamma = gamma2 - step.delta0.evaluate(beta2)
    ctx = group.GroupContext.lightweight(step.P1)
    if f_r(step.P1).evaluate(image_beta, image_beta) != image_gamma * 2:
        raise TheoremViolation("pushed element violates γ = f(β, β)/2 for P1")
    # validation of the element checks E_{P1}(u(β′)) = 0 and the Artin-Schreier relation
    return group.GroupElement(ctx, ctx.ambient.one(), image_beta, image_gamma)


@dataclass(frozen=True)
class InductionData:
    r: AdditivePoly
    R1: AdditivePoly
    delta: SparsePoly
    e_prime: int
    delta_matches_gamma: bool = field(default=True, compare=False)

    @property
    def extension_degree(self) -> int:
        return self.r.degree

    def to_json(self) -> dict:
        return {
            'r': [str(c) for c in self.r.coeffs],
            'R1': [str(c) for c in self.R1.coeffs],
            'Delta': self.delta.to_json(),
            'e_prime': self.e_prime,
            'F_prime_degree': self.extension_degree,
            'delta_matches_gamma': self.delta_matches_gamma,
        }


def _as_submodule(M: SympModule, U) -> Submodule:
    if isinstance(U, Submodule):
        return submodule(M, U.basis)
    return submodule(M, [M.coords_of(x) for x in U])


def iterated_quotient(R: AdditivePoly, m: int, U, M: Optional[SympModule] = None,
                      limits: Limits = DEFAULT_LIMITS) -> InductionData:
    """Quotient by the isotropic submodule U, one basis vector at a time."""
    if R.p == 2:
        raise ValidationError("curve quotients are only built for p ≠ 2")
    if M is None:
        M = build(R, m, limits)
    U = _as_submodule(M, U)
    if U.dim == 0:
        raise ValidationError("U must be nonzero")
    if not (U.isotropic and U.is_submodule):
        raise ValidationError("U must be a totally isotropic 𝓗-submodule")
    F = M.ambient
    base = R.base
    basis = [M.element_of(row) for row in U.basis]
    data = [IsotropicDatum.for_beta(R, b) for b in basis]
    current = R.over(F)
    r = AdditivePoly.identity(F)
    delta = SparsePoly.zero(F)
    pending = data
    while pending:
        head, rest = pending[0], pending[1:]
        step = single_quotient(current, head)
        r_sparse = SparsePoly.from_additive(r)
        delta = delta + step.delta0.compose(r_sparse)
        r = compose(step.u, r)
        pushed = [push_element(step, d.beta, d.gamma) for d in rest]
        pending = [IsotropicDatum(g.beta, g.gamma) for g in pushed]
        current = step.P1
    e_prime = current.e
    logger.debug(f"Quotient by a {U.dim}-dimensional isotropic submodule leaves e' = {e_prime}")
    try:
        r_q, R1_q, delta_q = r.restrict(base), current.restrict(base), delta.restrict(base)
    except ValidationError as e:
        logger.error(f"Quotient data are not defined over F_q: {e}")
        raise TheoremViolation(f"quotient data are not rational over F_q: {e}")
    matches = all(delta.evaluate(d.beta) == d.gamma for d in data)
    if not matches:
        logger.warning("Δ(β_i) differs from γ_i on the basis of U (diagnostic only)")
    result = InductionData(r_q, R1_q, delta_q, e_prime, matches)
    ok, reasons = verify_morphism(R, R1_q, r_q, delta_q, m)
    if not ok:
        logger.error(f"Quotient morphism failed verification: {reasons}")
        raise TheoremViolation(f"quotient morphism failed verification: {reasons}")
    return result


def verify_morphism(R: AdditivePoly, R1: AdditivePoly, r: AdditivePoly, delta: SparsePoly, m: int) -> tuple[bool, list[str]]:
    """Recheck every condition on (a, x) ↦ (a − Δ(x), r(x)); returns (ok, reasons)."""
    reasons = []
    base = R.base
    if r.base != base or R1.base != base or delta.field != base:
        reasons.append("r, R1 and Δ must have coefficients in F_q")
        return False, reasons
    if r.is_zero() or R1.is_zero():
        reasons.append("r and R1 must be nonzero")
        return False, reasons
    if r.e < 1:
        reasons.append("r is trivial (degree 1)")
    if not is_reduced(r):
        reasons.append("r is not reduced")
    if r.e + R1.e != R.e:
        reasons.append(f"deg r · deg R1 = p^{r.e + R1.e}, expected p^{R.e}")
    if delta.coefficient(0) != base.zero():
        reasons.append("Δ(0) ≠ 0")
    d = d_rm(R, m)
    if d_r(R1) % d:
        reasons.append(f"d_(R,m) = {d} does not divide d_R1 = {d_r(R1)}")
    if not mu_scaling(r, d):
        reasons.append(f"r(αx) ≠ αr(x) for α in μ_{d}")
    if not quotient_identity_holds(R, r, R1, delta):
        reasons.append("xR(x) ≠ r(x)R1(r(x)) + Δ(x)^p − Δ(x)")
    return not reasons, reasons


def right_divides(R: AdditivePoly, data: InductionData) -> bool:
    """E_{R1}(r(x)) right-divides E_R(x)."""
    composite = compose(e_r(data.R1), data.r)
    return right_divmod(e_r(R), composite)[1].is_zero()


def kernel_isotropy(M: SympModule, data: InductionData) -> bool:
    """ker r ⊆ (ker r)^⊥ and {x : E_{R1}(r(x)) = 0} ⊆ (ker r)^⊥ inside V_R."""
    F = M.ambient
    p = M.p

    def inside(f: AdditivePoly) -> Submodule:
        rows = kernel(f.over(F), F)
        return submodule(M, [M.coords_of(F.element(row)) for row in rows])

    U = inside(data.r)
    V_prime = inside(compose(e_r(data.R1), data.r))
    U_perp = perp(M, U)
    contained = linalg.rank(p, linalg.as_matrix(p, list(V_prime.basis) + list(U_perp.basis), M.dim)) == U_perp.dim
    return U.isotropic and contained
