"""The finite groups Q_R ⊇ Q_{R,m} ⊇ H_R built from an additive polynomial R.

Elements are triples (α, β, γ) in one ambient field with α in μ_d,
E_R(β) = 0 and γ^p − γ = β·R(β). The product is
(α1α2, β1 + α1β2, γ1 + γ2 + f_R(β1, α1β2)).
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Optional

import numpy as np

from app.exceptions import GuardExceeded, TheoremViolation, ValidationError
from app.models.additive import (AdditivePoly, d_r, d_rm, e_r, evaluate,
                                 f_r, splitting_field)
from app.models.field import (FieldDesc, FieldElement, canonical_root,
                              field_create, frobenius, multiplicative_order)
from app.utils import linalg
from app.utils.limits import DEFAULT_LIMITS, Limits

logger = logging.getLogger(__name__)

SCOPES = ('H', 'Q_R', 'Q_Rm')


@dataclass(frozen=True)
class GroupContext:
    R: AdditivePoly
    m: int
    d: int
    ambient: FieldDesc
    basis: tuple[FieldElement, ...] = field(default=(), compare=False)

    @cached_property
    def R_ambient(self) -> AdditivePoly:
        return self.R.over(self.ambient)

    @cached_property
    def E_ambient(self) -> AdditivePoly:
        return e_r(self.R_ambient)

    @cached_property
    def pairing(self):
        return f_r(self.R_ambient)

    @property
    def p(self) -> int:
        return self.R.p

    @property
    def e(self) -> int:
        return self.R.e

    def f(self, x: FieldElement, y: FieldElement) -> FieldElement:
        return self.pairing.evaluate(x, y)

    @classmethod
    def lightweight(cls, R: AdditivePoly, m: int = 1) -> 'GroupContext':
        """Context whose ambient field is R's own coefficient field; no basis of V_R."""
        return cls(R, m, 1, R.base)


@dataclass(frozen=True)
class GroupElement:
    ctx: GroupContext
    alpha: FieldElement
    beta: FieldElement
    gamma: FieldElement

    def __post_init__(self):
        ctx = self.ctx
        for name in ('alpha', 'beta', 'gamma'):
            if getattr(self, name).field != ctx.ambient:
                raise ValidationError(f"{name} = {getattr(self, name)} is not in the ambient field {ctx.ambient}")
        if self.alpha.is_zero() or not (self.alpha ** ctx.d).is_one():
            raise ValidationError(f"α = {self.alpha} is not in μ_{ctx.d}")
        if not evaluate(ctx.E_ambient, self.beta).is_zero():
            raise ValidationError(f"β = {self.beta} is not a root of E_R")
        if frobenius(self.gamma, 1) - self.gamma != self.beta * evaluate(ctx.R_ambient, self.beta):
            raise ValidationError(f"γ = {self.gamma} does not satisfy γ^p − γ = βR(β)")

    def in_h(self) -> bool:
        return self.alpha.is_one()

    def is_identity(self) -> bool:
        return self.alpha.is_one() and self.beta.is_zero() and self.gamma.is_zero()

    def key(self) -> tuple[int, int, int]:
        return self.alpha.value, self.beta.value, self.gamma.value

    def __mul__(self, other: 'GroupElement') -> 'GroupElement':
        return multiply(self, other)

    def to_json(self) -> dict:
        return {'alpha': str(self.alpha), 'beta': str(self.beta), 'gamma': str(self.gamma)}


def gamma_zero(ctx: GroupContext, beta: FieldElement) -> FieldElement:
    """A fixed solution of γ^p − γ = βR(β): f_R(β,β)/2 for odd p, a linear solve for p = 2."""
    F = ctx.ambient
    if ctx.p != 2:
        return ctx.f(beta, beta) / F.constant(2)
    target = beta * evaluate(ctx.R_ambient, beta)
    solution = linalg.solve(2, _artin_schreier_matrix(F), target.coords)
    if solution is None:
        raise ValidationError(f"γ^2 + γ = {target} has no solution in {F}")
    return F.element(solution)


def _artin_schreier_matrix(F: FieldDesc) -> np.ndarray:
    basis = F.basis_array()
    return F.operator_matrix(basis ** F.p - basis)


def _needs_doubling(R: AdditivePoly, F: FieldDesc, basis: np.ndarray) -> bool:
    # β ↦ Tr(βR(β)) is additive on V_R, so the basis decides solvability
    g = R.over(F)
    for row in basis:
        beta = F.element(row)
        value = beta * evaluate(g, beta)
        if F.trace_array(value.gf.reshape(1))[0] != 0:
            return True
    return False


def build_context(R: AdditivePoly, m: int = 1, scope: str = 'Q_Rm',
                  limits: Limits = DEFAULT_LIMITS) -> GroupContext:
    if scope not in SCOPES:
        raise ValidationError(f"unknown group scope {scope!r}")
    dR = d_r(R)
    dm = d_rm(R, m)
    d = {'H': 1, 'Q_R': dR, 'Q_Rm': dm}[scope]
    E = e_r(R)
    mu_degree = R.base.n * multiplicative_order(R.base.order % dR, dR) if dR > 1 else 1
    F, basis = splitting_field(E, extra_degree=mu_degree, min_degree=R.base.n, limits=limits)
    if R.p == 2 and _needs_doubling(R, F, basis):
        if not limits.field_fits(2, 2 * F.n):
            raise GuardExceeded(f"γ-roots need F_2^{2 * F.n}, beyond the 2^{limits.field_bits} guard")
        F = field_create(2, 2 * F.n, limits.field_bits)
        basis = splitting_field(E, extra_degree=F.n, min_degree=R.base.n, limits=limits)[1]
    logger.debug(f"Group context for {R} (m={m}, scope={scope}) lives in F_{F.p}^{F.n}")
    return GroupContext(R, m, d, F, tuple(F.element(row) for row in basis))


def identity(ctx: GroupContext) -> GroupElement:
    F = ctx.ambient
    return GroupElement(ctx, F.one(), F.zero(), F.zero())


def element(ctx: GroupContext, alpha: FieldElement, beta: FieldElement,
            gamma: Optional[FieldElement] = None) -> GroupElement:
    if gamma is None:
        gamma = gamma_zero(ctx, beta)
    return GroupElement(ctx, alpha, beta, gamma)


def multiply(g1: GroupElement, g2: GroupElement) -> GroupElement:
    if g1.ctx != g2.ctx:
        raise ValidationError("elements belong to different groups")
    ctx = g1.ctx
    shifted = g1.alpha * g2.beta
    return GroupElement(ctx, g1.alpha * g2.alpha, g1.beta + shifted,
                        g1.gamma + g2.gamma + ctx.f(g1.beta, shifted))


def inverse(g: GroupElement) -> GroupElement:
    a_inv = g.alpha.inverse()
    return GroupElement(g.ctx, a_inv, -(a_inv * g.beta), -g.gamma + g.ctx.f(g.beta, g.beta))


def power(g: GroupElement, k: int) -> GroupElement:
    if k < 0:
        return power(inverse(g), -k)
    result, base = identity(g.ctx), g
    while k:
        if k & 1:
            result = multiply(result, base)
        base = multiply(base, base)
        k >>= 1
    return result


def commutator(g1: GroupElement, g2: GroupElement) -> GroupElement:
    """g1 g2 g1^{-1} g2^{-1}; for elements of H_R this is (1, 0, ω(β1, β2))."""
    c = multiply(multiply(g1, g2), multiply(inverse(g1), inverse(g2)))
    if g1.in_h() and g2.in_h():
        if not (c.alpha.is_one() and c.beta.is_zero() and c.gamma.in_prime_field()):
            raise TheoremViolation(f"commutator of H_R elements is not central: {c.to_json()}")
    return c


def twist(g: GroupElement, k: int = 1) -> GroupElement:
    """(α, β, γ) ↦ (α, β, γ)^{q^{-k}}, the action of k ∈ Z on Q_{R,m}."""
    F = g.ctx.ambient
    shift = (-k * g.ctx.R.base.n) % F.n
    return GroupElement(g.ctx, frobenius(g.alpha, shift), frobenius(g.beta, shift), frobenius(g.gamma, shift))


def act_on_curve(g: GroupElement, point: tuple[FieldElement, FieldElement]) -> tuple[FieldElement, FieldElement]:
    """(a, x) ↦ (a + f_R(x, β) + γ, α^{-1}(x + β)) on a^p − a = xR(x)."""
    ctx = g.ctx
    if not on_curve(ctx, point):
        raise ValidationError(f"({point[0]}, {point[1]}) is not a point of a^p − a = xR(x)")
    a, x = point
    image = (a + ctx.f(x, g.beta) + g.gamma, g.alpha.inverse() * (x + g.beta))
    if not on_curve(ctx, image):
        raise TheoremViolation(f"{g.to_json()} moved a point off the curve")
    return image


def on_curve(ctx: GroupContext, point: tuple[FieldElement, FieldElement]) -> bool:
    a, x = point
    return frobenius(a, 1) - a == x * evaluate(ctx.R_ambient, x)


def span_elements(ctx: GroupContext) -> Iterator[FieldElement]:
    """All elements of V_R in the ambient field."""
    F = ctx.ambient
    rows = [np.array(b.coords, dtype=np.int64) for b in ctx.basis]
    for combo in itertools.product(range(ctx.p), repeat=len(rows)):
        v = np.zeros(F.n, dtype=np.int64)
        for c, row in zip(combo, rows):
            v = v + c * row
        yield F.element(v % ctx.p)


def h_elements(ctx: GroupContext, limits: Limits = DEFAULT_LIMITS) -> list[GroupElement]:
    size = ctx.p ** (2 * ctx.e + 1)
    if size > limits.group_enum:
        raise GuardExceeded(f"|H_R| = {size} exceeds the enumeration guard {limits.group_enum}")
    F = ctx.ambient
    out = []
    for beta in span_elements(ctx):
        g0 = gamma_zero(ctx, beta)
        for c in range(ctx.p):
            out.append(GroupElement(ctx, F.one(), beta, g0 + c))
    return out


def generators(ctx: GroupContext) -> list[GroupElement]:
    F = ctx.ambient
    gens = [element(ctx, F.one(), b) for b in ctx.basis]
    gens.append(GroupElement(ctx, F.one(), F.zero(), F.one()))
    return gens


def group_orders(R: AdditivePoly, m: int) -> dict:
    p, e = R.p, R.e
    dR, dm = d_r(R), d_rm(R, m)
    return {
        'H_R': p ** (2 * e + 1),
        'Q_R': dR * p ** (2 * e + 1),
        'Q_Rm': dm * p ** (2 * e + 1),
        'index_Q_Rm_in_Q_R': dR // dm,
    }


@dataclass(frozen=True)
class GroupAnalysis:
    order: int
    center_order: int
    commutator_order: int
    center_is_prime_field: bool
    center_equals_commutator: bool
    pth_powers_central: bool
    beta_image_dim: int
    is_extra_special: bool
    degenerate: bool = False

    @property
    def quotient_order(self) -> int:
        return self.order // self.center_order

    def to_json(self) -> dict:
        return {
            'order': self.order,
            'center_order': self.center_order,
            'commutator_order': self.commutator_order,
            'quotient_order': self.quotient_order,
            'center_is_prime_field': self.center_is_prime_field,
            'center_equals_commutator': self.center_equals_commutator,
            'pth_powers_central': self.pth_powers_central,
            'beta_image_dim': self.beta_image_dim,
            'is_extra_special': self.is_extra_special,
            'degenerate': self.degenerate,
        }


def _closure(ctx: GroupContext, seeds: list[GroupElement]) -> set[tuple[int, int, int]]:
    seen = {identity(ctx).key(): identity(ctx)}
    frontier = list(seen.values())
    while frontier:
        grown = []
        for g in frontier:
            for s in seeds:
                h = multiply(g, s)
                if h.key() not in seen:
                    seen[h.key()] = h
                    grown.append(h)
        frontier = grown
    return set(seen)


def analyze(ctx: GroupContext, limits: Limits = DEFAULT_LIMITS) -> GroupAnalysis:
    """Center, commutator subgroup and the extra-special verdict of H_R by enumeration."""
    p, e = ctx.p, ctx.e
    if e == 0:
        logger.info("e = 0: H_R = F_p is abelian, reported as degenerate")
        return GroupAnalysis(order=p, center_order=p, commutator_order=1, center_is_prime_field=True,
                             center_equals_commutator=False, pth_powers_central=True, beta_image_dim=0,
                             is_extra_special=False, degenerate=True)
    elements = h_elements(ctx, limits)
    gens = generators(ctx)
    center = [h for h in elements
              if all(multiply(h, g).key() == multiply(g, h).key() for g in gens)]
    center_keys = {h.key() for h in center}
    commutators = [commutator(a, b) for a, b in itertools.combinations(gens, 2)]
    derived = _closure(ctx, [c for c in commutators if not c.is_identity()])
    pth_central = all(power(h, p).key() in center_keys for h in elements)
    rows = [h.beta.coords for h in elements]
    beta_dim = linalg.rank(p, linalg.as_matrix(p, rows, ctx.ambient.n))
    center_prime = all(h.beta.is_zero() and h.gamma.in_prime_field() for h in center)
    extra_special = (len(center) == p and derived == center_keys and len(center) < len(elements))
    logger.debug(f"|H_R| = {len(elements)}, |Z| = {len(center)}, |[H,H]| = {len(derived)}")
    return GroupAnalysis(order=len(elements), center_order=len(center), commutator_order=len(derived),
                         center_is_prime_field=center_prime, center_equals_commutator=derived == center_keys,
                         pth_powers_central=pth_central, beta_image_dim=beta_dim,
                         is_extra_special=extra_special)
