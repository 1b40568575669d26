"""Root systems Φ(α, β): orbit invariants, symplectic types and the monomial case."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional

import galois
import numpy as np

from app.exceptions import TheoremViolation, ValidationError
from app.models.additive import AdditivePoly, d_rm
from app.models.field import (FieldDesc, FieldElement, canonical_root, embed,
                              element_order, field_create, frobenius,
                              multiplicative_order, norm_trace)
from app.models.symplectic import SympModule
from app.utils import linalg
from app.utils.limits import DEFAULT_LIMITS, Limits

logger = logging.getLogger(__name__)

TYPES = ('A', 'B', 'C', 'not_symplectic')


@dataclass(frozen=True)
class RootSystem:
    alpha: FieldElement
    beta: FieldElement
    q_degree: int

    def __post_init__(self):
        if self.alpha.is_zero() or self.beta.is_zero():
            raise ValidationError("root systems live in (F^×)^2")
        if self.alpha.field != self.beta.field:
            raise ValidationError("α and β must lie in one field")
        if self.field.n % self.q_degree:
            raise ValidationError(f"F_q of degree {self.q_degree} is not a subfield of {self.field}")

    @property
    def field(self) -> FieldDesc:
        return self.alpha.field

    @property
    def p(self) -> int:
        return self.field.p

    def theta(self, k: int = 1) -> 'RootSystem':
        return RootSystem(frobenius(self.alpha, k % self.field.n), frobenius(self.beta, k % self.field.n), self.q_degree)

    def sigma(self, k: int = 1) -> 'RootSystem':
        """(α, β) ↦ (α^{q^{-k}}, β)."""
        shift = (-k * self.q_degree) % self.field.n
        return RootSystem(frobenius(self.alpha, shift), self.beta, self.q_degree)

    def orbit(self) -> set[tuple[int, int]]:
        n, f = self.field.n, self.q_degree
        out = set()
        for i in range(n):
            for j in range(0, n, f):
                out.add((frobenius(self.alpha, (i - j) % n).value, frobenius(self.beta, i).value))
        return out


@dataclass(frozen=True)
class RSInvariants:
    a: int
    b: int
    c: int
    e_prime: int
    f_prime: int

    def to_json(self) -> dict:
        return {'a': self.a, 'b': self.b, 'c': self.c, 'e_prime': self.e_prime, 'f_prime': self.f_prime}


def invariants(W: RootSystem) -> RSInvariants:
    """a, b, c by direct minimality scans; e′, f′ as multiplicative orders."""
    alpha, beta, f = W.alpha, W.beta, W.q_degree
    n = W.field.n
    a = next(k for k in range(1, n + 1) if frobenius(alpha, (f * k) % n) == alpha)
    q_orbit = {frobenius(alpha, (f * x) % n).value for x in range(a)}
    b = next(k for k in range(1, n + 1)
             if frobenius(alpha, k % n).value in q_orbit and frobenius(beta, k % n) == beta)
    target = frobenius(alpha, b % n)
    c = next(k for k in range(a) if frobenius(alpha, (f * k) % n) == target)
    return RSInvariants(a, b, c, element_order(alpha), element_order(beta))


def belongs(W: RootSystem, d: int, r: int) -> bool:
    q = W.p ** W.q_degree
    if d < 1 or r < 1 or pow(q, r, d) != 1 % d:
        raise ValidationError(f"𝓗_(d={d}, r={r}) is malformed: q^r must be 1 mod d")
    inv = invariants(W)
    return d % inv.e_prime == 0 and r % (inv.a * inv.f_prime) == 0


def _in_mu(x: FieldElement, n: int) -> bool:
    return (x ** n).is_one()


@dataclass(frozen=True)
class Classification:
    type: str
    structures: int

    def to_json(self) -> dict:
        return {'type': self.type, 'symplectic_structures': self.structures}


def classify(W: RootSystem, inv: Optional[RSInvariants] = None) -> Classification:
    inv = inv or invariants(W)
    p, q = W.p, W.p ** W.q_degree
    a, b, c = inv.a, inv.b, inv.c
    alpha, beta = W.alpha, W.beta
    minus_one = -W.field.one()
    if a % 2 == 0 and _in_mu(alpha, q ** (a // 2) + 1) and beta == minus_one:
        return Classification('A', 2 if p != 2 else 1)
    if b % 2 == 0:
        half = p ** (b // 2)
        beta_ok = _in_mu(beta, half + 1)
        if c % 2 == 0 and beta_ok and _in_mu(alpha, half + q ** (c // 2)):
            return Classification('B', 1)
        if (c - a) % 2 == 0 and beta_ok and _in_mu(alpha, half + q ** ((a + c) // 2)):
            return Classification('C', 1)
    return Classification('not_symplectic', 0)


def v2(n: int) -> int:
    return (n & -n).bit_length() - 1


def ggf_prediction(e: int, f: int, c: int) -> str:
    """Type predicted from the 2-adic valuations of e and f and the parity of c."""
    if v2(e) >= v2(f):
        return 'A'
    return 'B' if c % 2 == 0 else 'C'


def formula_invariants(f: int, e: int) -> tuple[int, int, int, int]:
    """(e1, a, b, c) from e1 = gcd(f, 2e)."""
    e1 = math.gcd(f, 2 * e)
    c = next(c for c in range(2 * e) if (f * c - e1) % (2 * e) == 0)
    return e1, 2 * e // e1, e1, c


@dataclass(frozen=True)
class MonomialRootSystem:
    system: RootSystem
    invariants: RSInvariants
    e1: int
    classification: Classification
    predicted_type: str

    def to_json(self, nu: str = 'n/a') -> dict:
        return {
            'a': self.invariants.a, 'b': self.invariants.b, 'c': self.invariants.c,
            'e1': self.e1, 'e_prime': self.invariants.e_prime, 'f_prime': self.invariants.f_prime,
            'type': self.classification.type if self.classification.type in ('A', 'B', 'C') else 'none',
            'symplectic_structures': self.classification.structures,
            'predicted_type': self.predicted_type,
            'nu_label': nu,
        }


def monomial_root_system(p: int, f: int, e: int, a_e: FieldElement, m: int = 1,
                         limits: Limits = DEFAULT_LIMITS, ambient: Optional[FieldDesc] = None) -> MonomialRootSystem:
    """W = Φ(α, β) for R = a_e x^{p^e} with α a primitive d_(R,m)-th root and β = Nr(−a_e^{−(p^e−1)})."""
    if a_e.is_zero():
        raise ValidationError("a_e must be nonzero")
    if e < 1:
        raise ValidationError("the monomial root system needs e ≥ 1")
    base = a_e.field
    if base.p != p or base.n != f:
        raise ValidationError(f"a_e must lie in F_{p}^{f}")
    R = AdditivePoly.monomial(base, e, a_e)
    d = d_rm(R, m)
    if d < 2 or multiplicative_order(p % d, d) != 2 * e:
        raise ValidationError(f"F_p(μ_{d}) is not F_(p^{2 * e}); the monomial formulas do not apply")
    if ambient is None:
        ambient = field_create(p, math.lcm(f, 2 * e), limits.field_bits)
    alpha = canonical_root(ambient, d)
    e1, a, b, c = formula_invariants(f, e)
    beta, _ = norm_trace(-(a_e ** (-(p ** e - 1))), e1)
    W = RootSystem(alpha, embed(beta, ambient), f)
    inv = invariants(W)
    if (inv.a, inv.b, inv.c) != (a, b, c) or inv.e_prime != d:
        logger.error(f"Root system invariants {inv} disagree with the closed forms a={a}, b={b}, c={c}, e'={d}")
        raise TheoremViolation("monomial root system invariants disagree with their closed forms")
    cls = classify(W, inv)
    predicted = ggf_prediction(e, f, inv.c)
    if cls.type != predicted:
        logger.error(f"classify gave {cls.type}, 2-adic prediction {predicted} (p={p}, f={f}, e={e})")
        raise TheoremViolation(f"type {cls.type} contradicts the predicted type {predicted}")
    return MonomialRootSystem(W, inv, e1, cls, predicted)


def matches_VR(M: SympModule, W: RootSystem, inv: Optional[RSInvariants] = None) -> bool:
    """Check the defining relations τη = αη, σ^a η = βη of M(W) on V_R."""
    if len(M.parts) != 1 or not M.parts[0][0].is_monomial():
        raise ValidationError("matches_VR applies to modules of a monomial R only")
    inv = inv or invariants(W)
    if M.dim != inv.a * inv.b:
        return False
    F = M.ambient
    if W.field != F:
        raise ValidationError("build the root system in the ambient field of V_R")
    beta = W.beta
    shift = (M.q_degree * inv.a) % F.n
    if any(frobenius(eta, shift) != beta * eta for eta in M.elements):
        return False
    p, d, T = M.p, M.d, M.T
    identity = np.eye(M.dim, dtype=np.int64)
    if not np.array_equal(linalg.matrix_power(p, T, d), identity):
        return False
    # eigenvalues of T must all be primitive d-th roots of unity
    for k in galois.divisors(d):
        if k == d:
            continue
        if linalg.rank(p, (linalg.matrix_power(p, T, int(k)) - identity) % p) != M.dim:
            return False
    return True


def same_system(W1: RootSystem, W2: RootSystem) -> bool:
    if W1.field != W2.field or W1.q_degree != W2.q_degree:
        return False
    return (W2.alpha.value, W2.beta.value) in W1.orbit()


def nu_label(kind: str, doubled_pair: bool = False) -> str:
    if kind in ('B', 'C'):
        return '(M(W),0)'
    if kind == 'A' and doubled_pair:
        return '(M(W),2)'
    return 'n/a'
