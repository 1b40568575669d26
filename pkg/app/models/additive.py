"""Additive (linearised) polynomials Σ a_i x^{p^i} over a finite field.

Polynomials are stored by their p-power coefficient vectors, so composition
is the twisted product of the skew polynomial ring and right division is the
primitive for decompositions f = f1∘f2.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Optional, Sequence

import galois
import numpy as np

from app.exceptions import GuardExceeded, TheoremViolation, ValidationError
from app.models.field import (FieldDesc, FieldElement, embed, field_create,
                              frobenius, restrict)
from app.utils import linalg
from app.utils.limits import DEFAULT_LIMITS, Limits

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AdditivePoly:
    base: FieldDesc
    coeffs: tuple[FieldElement, ...] = ()

    def __post_init__(self):
        coeffs = list(self.coeffs)
        for c in coeffs:
            if c.field != self.base:
                raise ValidationError(f"coefficient {c} does not lie in {self.base}")
        while coeffs and coeffs[-1].is_zero():
            coeffs.pop()
        object.__setattr__(self, 'coeffs', tuple(coeffs))

    @classmethod
    def from_values(cls, base: FieldDesc, values: Iterable) -> 'AdditivePoly':
        """Build from FieldElements, prime-field ints or coordinate lists (constant first)."""
        coeffs = []
        for v in values:
            if isinstance(v, FieldElement):
                coeffs.append(v)
            elif isinstance(v, int):
                coeffs.append(base.constant(v))
            else:
                coeffs.append(base.element(v))
        return cls(base, tuple(coeffs))

    @classmethod
    def monomial(cls, base: FieldDesc, i: int, c=1) -> 'AdditivePoly':
        return cls.from_values(base, [0] * i + [c])

    @classmethod
    def identity(cls, base: FieldDesc) -> 'AdditivePoly':
        return cls.monomial(base, 0)

    @property
    def p(self) -> int:
        return self.base.p

    @property
    def e(self) -> int:
        """Top index: deg f = p^e. The zero polynomial has index -1."""
        return len(self.coeffs) - 1

    @property
    def degree(self) -> int:
        return self.p ** self.e if self.coeffs else 0

    def is_zero(self) -> bool:
        return not self.coeffs

    def coefficient(self, i: int) -> FieldElement:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else self.base.zero()

    def support(self) -> list[int]:
        return [i for i, c in enumerate(self.coeffs) if not c.is_zero()]

    def is_monomial(self) -> bool:
        return len(self.support()) == 1

    def __add__(self, other: 'AdditivePoly') -> 'AdditivePoly':
        _same_base(self, other)
        n = max(len(self.coeffs), len(other.coeffs))
        return AdditivePoly(self.base, tuple(self.coefficient(i) + other.coefficient(i) for i in range(n)))

    def __neg__(self) -> 'AdditivePoly':
        return AdditivePoly(self.base, tuple(-c for c in self.coeffs))

    def __sub__(self, other: 'AdditivePoly') -> 'AdditivePoly':
        return self + (-other)

    def scale(self, c) -> 'AdditivePoly':
        if isinstance(c, int):
            c = self.base.constant(c)
        return AdditivePoly(self.base, tuple(c * a for a in self.coeffs))

    def over(self, target: FieldDesc) -> 'AdditivePoly':
        return _lift(self, target)

    def restrict(self, subfield: FieldDesc) -> 'AdditivePoly':
        return restrict_poly(self, subfield)

    def __call__(self, x: FieldElement) -> FieldElement:
        return evaluate(self, x)

    def __str__(self) -> str:
        if not self.coeffs:
            return '0'
        parts = [f"({c})*x^({self.p}^{i})" for i, c in enumerate(self.coeffs) if not c.is_zero()]
        return ' + '.join(reversed(parts))


@lru_cache(maxsize=4096)
def _lift(f: AdditivePoly, target: FieldDesc) -> AdditivePoly:
    if f.base == target:
        return f
    return AdditivePoly(target, tuple(embed(c, target) for c in f.coeffs))


def _same_base(f: AdditivePoly, g: AdditivePoly) -> None:
    if f.base != g.base:
        raise ValidationError(f"additive polynomials over {f.base} and {g.base} cannot be combined")


def _nonzero(f: AdditivePoly) -> None:
    if f.is_zero():
        raise ValidationError("the zero additive polynomial is not allowed here")


def evaluate(f: AdditivePoly, x: FieldElement) -> FieldElement:
    if x.field.p != f.p or x.field.n % f.base.n:
        raise ValidationError(f"{x} does not lie in an extension of {f.base}")
    g = f.over(x.field)
    total, power = x.field.zero(), x
    for i, a in enumerate(g.coeffs):
        if i:
            power = frobenius(power, 1)
        total = total + a * power
    return total


def evaluate_array(f: AdditivePoly, F: FieldDesc, arr: galois.FieldArray) -> galois.FieldArray:
    """Vectorised evaluation of f on an array of elements of F."""
    g = f.over(F)
    total = F.gf(np.zeros(np.shape(arr), dtype=np.int64))
    power = arr
    for i, a in enumerate(g.coeffs):
        if i:
            power = power ** F.p
        if not a.is_zero():
            total = total + F.gf(a.value) * power
    return total


def compose(f: AdditivePoly, g: AdditivePoly) -> AdditivePoly:
    """f∘g: the coefficient of x^{p^{i+j}} collects a_i · b_j^{p^i}."""
    _same_base(f, g)
    if f.is_zero() or g.is_zero():
        return AdditivePoly(f.base)
    acc = [f.base.zero() for _ in range(f.e + g.e + 1)]
    for i, a in enumerate(f.coeffs):
        if a.is_zero():
            continue
        for j, b in enumerate(g.coeffs):
            acc[i + j] = acc[i + j] + a * frobenius(b, i)
    return AdditivePoly(f.base, tuple(acc))


def right_divmod(f: AdditivePoly, g: AdditivePoly) -> tuple[AdditivePoly, AdditivePoly]:
    """(h, r) with f = h∘g + r and deg r < deg g."""
    _same_base(f, g)
    if g.is_zero():
        raise ValidationError("right division by the zero polynomial")
    base = f.base
    quotient = [base.zero() for _ in range(max(f.e - g.e + 1, 0))]
    rem = f
    lead = g.coeffs[-1]
    while rem.e >= g.e:
        k = rem.e - g.e
        c = rem.coeffs[-1] / frobenius(lead, k)
        quotient[k] = quotient[k] + c
        rem = rem - compose(AdditivePoly.monomial(base, k, c), g)
    return AdditivePoly(base, tuple(quotient)), rem


def right_divides(g: AdditivePoly, f: AdditivePoly) -> bool:
    return right_divmod(f, g)[1].is_zero()


def e_r(R: AdditivePoly) -> AdditivePoly:
    """E_R(x) = R(x)^{p^e} + Σ (a_i x)^{p^{e-i}}, of degree p^{2e}."""
    _nonzero(R)
    p, e = R.p, R.e
    if (p, e) == (2, 0):
        raise ValidationError("E_R is undefined for p = 2 and e = 0")
    base = R.base
    acc = [base.zero() for _ in range(2 * e + 1)]
    for i, a in enumerate(R.coeffs):
        acc[e + i] = acc[e + i] + frobenius(a, e)
        acc[e - i] = acc[e - i] + frobenius(a, e - i)
    E = AdditivePoly(base, tuple(acc))
    # for e = 0 both sums land on x
    expected = R.coeffs[-1] * (2 if e == 0 else 1)
    if E.coefficient(0) != expected:
        raise TheoremViolation(f"coefficient of x in E_R is {E.coefficient(0)}, expected {expected}")
    return E


def check_m(p: int, m: int) -> None:
    if m < 1:
        raise ValidationError(f"m must be a positive integer, got {m}")
    if m % p == 0:
        raise ValidationError(f"m = {m} must be prime to p = {p}")


def d_r(R: AdditivePoly) -> int:
    _nonzero(R)
    d = 0
    for i in R.support():
        d = math.gcd(d, R.p ** i + 1)
    return d


def d_rm(R: AdditivePoly, m: int) -> int:
    check_m(R.p, m)
    d = d_r(R)
    return d // math.gcd(d, m)


def mu_scaling(f: AdditivePoly, d: int) -> bool:
    """Whether f(αx) = αf(x) for every α in μ_d."""
    if d < 1 or d % f.p == 0:
        raise ValidationError(f"d = {d} must be a positive integer prime to p = {f.p}")
    return all((f.p ** i - 1) % d == 0 for i in f.support())


# Bivariate pairing f_R

@dataclass(frozen=True)
class BivariateTable:
    """Σ c_{uv} x^{p^u} y^{p^v}, keyed by (u, v)."""
    field: FieldDesc
    terms: tuple[tuple[tuple[int, int], FieldElement], ...] = ()

    @classmethod
    def from_terms(cls, field: FieldDesc, items: Iterable[tuple[tuple[int, int], FieldElement]]) -> 'BivariateTable':
        acc: dict[tuple[int, int], FieldElement] = {}
        for key, c in items:
            acc[key] = acc[key] + c if key in acc else c
        return cls(field, tuple(sorted((k, c) for k, c in acc.items() if not c.is_zero())))

    def as_dict(self) -> dict[tuple[int, int], FieldElement]:
        return dict(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: 'BivariateTable') -> 'BivariateTable':
        return BivariateTable.from_terms(self.field, list(self.terms) + list(other.terms))

    def __neg__(self) -> 'BivariateTable':
        return BivariateTable(self.field, tuple((k, -c) for k, c in self.terms))

    def __sub__(self, other: 'BivariateTable') -> 'BivariateTable':
        return self + (-other)

    def frobenius(self) -> 'BivariateTable':
        """The p-th power, term by term."""
        p = self.field.p
        return BivariateTable(self.field, tuple(((u + 1, v + 1), c ** p) for (u, v), c in self.terms))

    def evaluate(self, x: FieldElement, y: FieldElement) -> FieldElement:
        if x.field != y.field:
            raise ValidationError(f"arguments in {x.field} and {y.field}")
        F = x.field
        total = F.zero()
        for (u, v), c in self.terms:
            total = total + embed(c, F) * frobenius(x, u) * frobenius(y, v)
        return total


def f_r(R: AdditivePoly) -> BivariateTable:
    """The pairing f_R as a table of x^{p^u} y^{p^v} monomials (a_i convention)."""
    _nonzero(R)
    e = R.e
    items = []
    for i in range(e):
        a_i = R.coefficient(i)
        for j in range(e - i):
            items.append(((i + j, j), -frobenius(a_i, j)))
        for k, a_k in enumerate(R.coeffs):
            items.append(((i, k + i), -frobenius(a_k, i)))
    return BivariateTable.from_terms(R.base, items)


@lru_cache(maxsize=256)
def _f_r_cached(R: AdditivePoly) -> BivariateTable:
    return f_r(R)


def f_r_eval(R: AdditivePoly, x: FieldElement, y: FieldElement) -> FieldElement:
    return _f_r_cached(R).evaluate(x, y)


def pairing_identity_residual(R: AdditivePoly) -> BivariateTable:
    """f_R^p − f_R − (−x^{p^e}E_R(y) + xR(y) + yR(x)); zero iff the identity holds."""
    table = f_r(R)
    E = e_r(R)
    rhs = [((R.e, k), -c) for k, c in enumerate(E.coeffs)]
    rhs += [((0, k), c) for k, c in enumerate(R.coeffs)]
    rhs += [((k, 0), c) for k, c in enumerate(R.coeffs)]
    return table.frobenius() - table - BivariateTable.from_terms(R.base, rhs)


# Kernels and kernel polynomials

def kernel_poly_from_basis(basis: Sequence[FieldElement]) -> AdditivePoly:
    """Monic additive polynomial vanishing exactly on the F_p-span of basis."""
    if not basis:
        raise ValidationError("kernel_poly needs at least one element")
    F = basis[0].field
    p = F.p
    L = AdditivePoly.identity(F)
    for w in basis:
        value = evaluate(L, w)
        if value.is_zero():
            continue
        # L <- Π_{c in F_p} (L − c L(w)) = L^p − L(w)^{p-1} L
        shifted = AdditivePoly(F, (F.zero(),) + tuple(frobenius(c, 1) for c in L.coeffs))
        L = shifted - L.scale(value ** (p - 1))
    return L


def kernel_poly(W: Sequence[FieldElement]) -> AdditivePoly:
    """Π_{w in W} (x − w) for an F_p-subspace W given by all of its elements."""
    if not W:
        raise ValidationError("W must contain at least the zero vector")
    F = W[0].field
    values = {w.value for w in W}
    if len(values) != len(W):
        raise ValidationError("W lists an element twice")
    rows = linalg.rref(F.p, linalg.as_matrix(F.p, [w.coords for w in W], F.n))
    if F.p ** rows.shape[0] != len(values) or 0 not in values:
        raise ValidationError(f"the {len(W)} given elements do not form an F_{F.p}-subspace")
    basis = [F.element(row) for row in rows]
    L = kernel_poly_from_basis(basis) if basis else AdditivePoly.identity(F)
    if L.degree != len(W):
        raise TheoremViolation(f"kernel polynomial has degree {L.degree}, expected {len(W)}")
    return L


def is_reduced(f: AdditivePoly) -> bool:
    _nonzero(f)
    return not f.coefficient(0).is_zero()


def rationality(f: AdditivePoly, subfield: FieldDesc) -> bool:
    """Whether every coefficient of f lies in the subfield."""
    _nonzero(f)
    if subfield.p != f.p or f.base.n % subfield.n:
        raise ValidationError(f"{subfield} is not a subfield of {f.base}")
    return all(frobenius(c, subfield.n) == c for c in f.coeffs)


def restrict_poly(f: AdditivePoly, subfield: FieldDesc) -> AdditivePoly:
    return AdditivePoly(subfield, tuple(restrict(c, subfield) for c in f.coeffs))


def operator_matrix(f: AdditivePoly, F: FieldDesc) -> np.ndarray:
    """Matrix of x ↦ f(x) on F, as an F_p-linear map on column coordinates."""
    return F.operator_matrix(evaluate_array(f, F, F.basis_array()))


def kernel(f: AdditivePoly, F: FieldDesc) -> np.ndarray:
    """RREF rows (coordinates in F) spanning ker f inside F."""
    return linalg.null_space(F.p, operator_matrix(f, F), F.n)


def kernel_elements(f: AdditivePoly, F: FieldDesc) -> list[FieldElement]:
    return [F.element(row) for row in kernel(f, F)]


def splitting_field(f: AdditivePoly, extra_degree: int = 1, min_degree: int = 1,
                    limits: Limits = DEFAULT_LIMITS) -> tuple[FieldDesc, np.ndarray]:
    """Smallest field over f.base holding all p^e roots of a reduced f, widened as asked.

    Returns the field and the RREF coordinate basis of ker f inside it.
    """
    if not is_reduced(f):
        raise ValidationError("splitting_field needs a reduced polynomial")
    p, base_n = f.p, f.base.n
    k = 1
    while True:
        if not limits.field_fits(p, base_n * k):
            raise GuardExceeded(f"roots of a degree-{p}^{f.e} polynomial need a field beyond 2^{limits.field_bits}")
        F = field_create(p, base_n * k, limits.field_bits)
        if kernel(f, F).shape[0] == f.e:
            break
        k += 1
    degree = math.lcm(base_n * k, extra_degree, min_degree)
    logger.debug(f"Kernel of index-{f.e} polynomial splits over F_{p}^{base_n * k}, ambient degree {degree}")
    F = field_create(p, degree, limits.field_bits)
    basis = kernel(f, F)
    if basis.shape[0] != f.e:
        raise TheoremViolation(f"kernel dimension {basis.shape[0]} in F_{p}^{degree}, expected {f.e}")
    return F, basis


def frobenius_on_subspace(F: FieldDesc, basis: np.ndarray, power: int) -> np.ndarray:
    """Matrix (in the given basis coordinates) of x ↦ x^{p^power} on a stable subspace."""
    cols = []
    for row in basis:
        image = frobenius(F.element(row), power)
        coords = linalg.coordinates(F.p, basis, image.coords)
        if coords is None:
            raise TheoremViolation("subspace is not stable under Frobenius")
        cols.append(coords)
    return np.array(cols, dtype=np.int64).T.reshape(basis.shape[0], basis.shape[0]) % F.p


def find_right_factor(f: AdditivePoly, limits: Limits = DEFAULT_LIMITS) -> Optional[AdditivePoly]:
    """A right factor g over f.base with 1 < deg g < deg f, or None when f is prime."""
    _nonzero(f)
    if f.e <= 0:
        raise ValidationError("primality needs deg f > 1")
    base = f.base
    if not is_reduced(f):
        # f = (Σ a_i x^{p^{i-1}})∘x^p
        return None if f.e == 1 else AdditivePoly.monomial(base, 1)
    F, basis = splitting_field(f, limits=limits)
    sigma = frobenius_on_subspace(F, basis, base.n)
    best = None
    for v in linalg.line_representatives(F.p, f.e):
        span = linalg.span_closure(F.p, v.reshape(1, -1), [sigma])
        if span.shape[0] == f.e:
            continue
        key = (span.shape[0], linalg.canonical(F.p, span))
        if best is None or key < best:
            best = key
    if best is None:
        return None
    vectors = (np.array(best[1], dtype=np.int64) @ basis) % F.p
    g = kernel_poly_from_basis([F.element(row) for row in vectors]).restrict(base)
    if not right_divides(g, f):
        raise TheoremViolation(f"kernel polynomial of a stable subspace does not right-divide {f}")
    return g


def is_prime(f: AdditivePoly, limits: Limits = DEFAULT_LIMITS) -> bool:
    return find_right_factor(f, limits) is None


# Coefficient transport to F_q[y]

def phi_iso(f: AdditivePoly, t: int) -> galois.Poly:
    """Σ c_i x^{p^{ti}} ↦ Σ c_i y^i."""
    _nonzero(f)
    if t < 1 or t % f.base.n:
        raise ValidationError(f"t = {t} must be a positive multiple of [F_q:F_p] = {f.base.n}")
    bad = [i for i in f.support() if i % t]
    if bad:
        raise ValidationError(f"exponents p^{bad} are not powers of p^{t}")
    coeffs = [f.coefficient(i * t).value for i in range(f.e // t + 1)]
    return galois.Poly(list(reversed(coeffs)), field=f.base.gf)


def phi_inverse(poly: galois.Poly, base: FieldDesc, t: int) -> AdditivePoly:
    if t < 1 or t % base.n:
        raise ValidationError(f"t = {t} must be a positive multiple of [F_q:F_p] = {base.n}")
    ascending = [int(c) for c in reversed(poly.coeffs.view(np.ndarray))]
    coeffs = [base.zero()] * (t * (len(ascending) - 1) + 1)
    for i, c in enumerate(ascending):
        coeffs[i * t] = FieldElement(base, c)
    return AdditivePoly(base, tuple(coeffs))


def is_reciprocal(poly: galois.Poly) -> bool:
    coeffs = [int(c) for c in poly.coeffs.view(np.ndarray)]
    return coeffs == coeffs[::-1]


def phi_irreducible(f: AdditivePoly, t: int) -> bool:
    poly = phi_iso(f, t)
    return poly.degree >= 1 and poly.is_irreducible()
