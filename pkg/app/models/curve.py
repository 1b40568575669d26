"""The Artin-Schreier curve C_R : a^p − a = xR(x) over F_q.

deg xR(x) = p^e + 1 is prime to p, so the smooth projective model has a single
point at infinity and genus g = (p − 1)p^e/2. The zeta numerator P(T) is
rebuilt from N_1..N_g with Newton's identities and the functional equation;
the ψ-isotypic factors L(ψ_c, T) come from exact character sums in Z[ζ_p].
"""

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from sympy import Poly, Rational, Symbol

from app.exceptions import TheoremViolation, ValidationError
from app.models.additive import AdditivePoly
from app.utils.counters import BaseCounter, cross_check, select_counter
from app.utils.cyclotomic import CyclotomicRing, series_product
from app.utils.limits import DEFAULT_LIMITS, Limits

logger = logging.getLogger(__name__)

T = Symbol('T')
WEIL_TOLERANCE = 1e-9


@dataclass(frozen=True)
class CountSeries:
    p: int
    q: int
    counts: tuple[int, ...]

    def __post_init__(self):
        if any(n % self.p for n in self.counts):
            raise TheoremViolation(f"point counts {self.counts} are not all divisible by p = {self.p}")

    def __getitem__(self, k: int):
        """N_k, 1-indexed."""
        return self.counts[k - 1]

    def __len__(self):
        return len(self.counts)


@dataclass(frozen=True)
class ZetaNumerator:
    q: int
    genus: int
    coeffs: tuple[int, ...]
    sign: int = 1

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def as_poly(self):
        return Poly(list(reversed(self.coeffs)), T)

    def symmetric(self):
        g, q = self.genus, self.q
        return all(self.coeffs[2 * g - j] == self.sign * q ** (g - j) * self.coeffs[j] for j in range(g + 1))

    def to_json(self):
        return list(self.coeffs)


@dataclass(frozen=True)
class PsiLPolynomial:
    p: int
    c: int
    coeffs: tuple[Poly, ...] = field(compare=False)
    vectors: tuple[tuple[int, ...], ...]

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def to_json(self):
        return {'c': self.c, 'degree': self.degree, 'coeffs': [list(v) for v in self.vectors]}


def genus(R: AdditivePoly) -> int:
    p, e = R.p, R.e
    if R.is_zero():
        raise ValidationError("R must be nonzero")
    if (p, e) == (2, 0):
        raise ValidationError("(p, e) = (2, 0) is excluded")
    return (p - 1) * p ** e // 2


def point_count(R: AdditivePoly, k: int, limits: Limits = DEFAULT_LIMITS,
                counter: Optional[BaseCounter] = None) -> int:
    counter = counter or select_counter(R, limits)
    return counter.point_count(k)


def count_series(R: AdditivePoly, K: int, limits: Limits = DEFAULT_LIMITS,
                 counter: Optional[BaseCounter] = None) -> CountSeries:
    counter = counter or select_counter(R, limits)
    counts = tuple(counter.point_count(k) for k in range(1, K + 1))
    logger.debug(f"Affine counts N_1..N_{K} = {counts}")
    return CountSeries(R.p, R.base.order, counts)


def _newton_coefficients(power_sums: Sequence, degree: int) -> list:
    """c_0..c_degree of Π(1 − λT) from the power sums s_k = Σ λ^k."""
    c = [Rational(1)]
    for j in range(1, degree + 1):
        c.append(-sum(power_sums[i - 1] * c[j - i] for i in range(1, j + 1)) / j)
    return c


def zeta_numerator(R: AdditivePoly, limits: Limits = DEFAULT_LIMITS, max_k: Optional[int] = None,
                   counter: Optional[BaseCounter] = None) -> tuple[ZetaNumerator, CountSeries]:
    """P(T) from N_1..N_g; counts up to max_k > g are checked against P."""
    g = genus(R)
    q = R.base.order
    counter = counter or select_counter(R, limits)
    K = max(g, max_k or 0)
    series = count_series(R, K, limits, counter)
    # projective count N_k + 1 = q^k + 1 − Σλ^k
    power_sums = [q ** k - series[k] for k in range(1, K + 1)]
    low = _newton_coefficients(power_sums[:g], g)
    if any(not c.is_integer for c in low):
        logger.error(f"Non-integral zeta coefficients {low} from counts {series.counts}")
        raise TheoremViolation("zeta numerator has non-integral coefficients")
    coeffs = [int(c) for c in low] + [0] * g
    for j in range(g + 1, 2 * g + 1):
        coeffs[j] = q ** (j - g) * coeffs[2 * g - j]
    P = ZetaNumerator(q, g, tuple(coeffs))
    if K > g:
        predicted = predicted_counts(P, K)
        if predicted[g:] != list(series.counts[g:]):
            logger.error(f"Counts {series.counts} disagree with P(T) predictions {predicted}")
            raise TheoremViolation("point counts beyond the genus contradict the zeta numerator")
    logger.info(f"Zeta numerator of degree {P.degree} for q = {q}")
    return P, series


def predicted_counts(P: ZetaNumerator, K: int) -> list[int]:
    """N_1..N_K implied by P through Newton's identities."""
    c = list(P.coeffs) + [0] * max(0, K - P.degree)
    s = []
    for k in range(1, K + 1):
        s.append(-k * c[k] - sum(s[i - 1] * c[k - i] for i in range(1, k)))
    return [P.q ** k - s[k - 1] for k in range(1, K + 1)]


def weil_check(P: ZetaNumerator, tolerance: float = WEIL_TOLERANCE) -> bool:
    """|λ|² = q for every reciprocal root, on the square-free part of P."""
    squarefree = P.as_poly().sqf_part()
    if squarefree.degree() < 1:
        return P.degree == 0
    roots = np.roots([float(c) for c in squarefree.all_coeffs()])
    magnitudes = 1.0 / np.abs(roots) ** 2
    return bool(np.all(np.abs(magnitudes - P.q) < tolerance * P.q))


def check_supersingular(P: ZetaNumerator) -> bool:
    """True iff every λ²/q is a root of unity (Kronecker's criterion)."""
    q, n = P.q, P.degree
    if n == 0:
        return True
    y = Symbol('y')
    # T^n P(1/T) = Π(T − λ) = E(T²) + T·O(T²); both lists are highest degree first
    even = Poly(list(P.coeffs[0::2]), y)
    odd = Poly(list(P.coeffs[1::2]), y)
    squares = even ** 2 - Poly(y, y) * odd ** 2
    # Π(y − λ²/q): the coefficient of y^{n−i} is divided by q^i
    scaled = [Rational(c, q ** i) for i, c in enumerate(squares.all_coeffs())]
    if not all(c.is_integer for c in scaled):
        return False
    _, factors = Poly([int(c) for c in scaled], y).factor_list()
    return all(factor.is_cyclotomic for factor, _ in factors)


def _character_sums(ring: CyclotomicRing, counter: BaseCounter, c: int, K: int) -> list[Poly]:
    sums = []
    for k in range(1, K + 1):
        dist = counter.distribution(k)
        sums.append(ring.from_exponents({c * t: int(n) for t, n in enumerate(dist)}))
    return sums


def psi_l_polynomial(R: AdditivePoly, c: int, limits: Limits = DEFAULT_LIMITS,
                     counter: Optional[BaseCounter] = None) -> PsiLPolynomial:
    """L(ψ_c, T) = exp(Σ S_k T^k / k) cut at degree p^e."""
    p = R.p
    if c % p == 0:
        raise ValidationError(f"c = {c} must be a unit mod {p}")
    c %= p
    degree = p ** R.e
    ring = CyclotomicRing(p)
    counter = counter or select_counter(R, limits)
    S = _character_sums(ring, counter, c, degree)
    coeffs = [ring.one()]
    for j in range(1, degree + 1):
        acc = ring.zero()
        for i in range(1, j + 1):
            acc = acc + S[i - 1] * coeffs[j - i]
        coeffs.append(ring.reduce(acc * Rational(1, j)))
    if not all(ring.is_integral(x) for x in coeffs):
        logger.error(f"L(ψ_{c}) has non-integral coefficients for R = {R}")
        raise TheoremViolation(f"L(ψ_{c}, T) has coefficients outside Z[ζ_{p}]")
    if coeffs[-1].is_zero:
        raise TheoremViolation(f"L(ψ_{c}, T) has degree below p^e = {degree}")
    vectors = tuple(tuple(ring.vector(x)) for x in coeffs)
    return PsiLPolynomial(p, c, tuple(coeffs), vectors)


def psi_l_polynomials(R: AdditivePoly, P: ZetaNumerator, limits: Limits = DEFAULT_LIMITS,
                      counter: Optional[BaseCounter] = None) -> list[PsiLPolynomial]:
    """All L(ψ_c) for c ∈ F_p^×, checked to multiply out to P."""
    p = R.p
    ring = CyclotomicRing(p)
    counter = counter or select_counter(R, limits)
    factors = [psi_l_polynomial(R, c, limits, counter) for c in range(1, p)]
    product = [ring.one()]
    for L in factors:
        product = series_product(ring, product, L.coeffs)
    if not all(ring.is_rational(x) for x in product):
        raise TheoremViolation("the product of the L(ψ_c) is not a rational polynomial")
    values = [int(ring.rational_value(x)) for x in product]
    if values != list(P.coeffs):
        logger.error(f"Π L(ψ_c) = {values} differs from P = {list(P.coeffs)}")
        raise TheoremViolation("the ψ-factorisation of the zeta numerator fails")
    return factors


def galois_conjugate(L: PsiLPolynomial, c2: int) -> list[Poly]:
    """Image of L(ψ_c) under ζ ↦ ζ^{c2/c}."""
    ring = CyclotomicRing(L.p)
    a = (c2 * pow(L.c, -1, L.p)) % L.p
    return [ring.galois(x, a) for x in L.coeffs]


@dataclass(frozen=True)
class CurveSummary:
    series: CountSeries
    genus: int
    zeta: ZetaNumerator
    weil: bool
    supersingular: bool
    psi_factors: tuple[PsiLPolynomial, ...]
    backend: str
    cross_check: dict = field(default_factory=dict, compare=False)

    def to_json(self):
        out = {
            'counts': list(self.series.counts),
            'genus': self.genus,
            'zeta_numerator': self.zeta.to_json(),
            'functional_equation_sign': self.zeta.sign,
            'weil': self.weil,
            'supersingular': self.supersingular,
            'psi_L_degrees': [L.degree for L in self.psi_factors],
            'psi_L': [L.to_json() for L in self.psi_factors],
            'count_backend': self.backend,
        }
        if self.cross_check:
            out['count_cross_check'] = {str(k): v for k, v in sorted(self.cross_check.items())}
        return out


def curve_summary(R: AdditivePoly, limits: Limits = DEFAULT_LIMITS, max_k: Optional[int] = None,
                  oracle: bool = False, backend: str = 'auto') -> CurveSummary:
    counter = select_counter(R, limits, backend)
    P, series = zeta_numerator(R, limits, max_k, counter)
    if not P.symmetric():
        raise TheoremViolation("zeta numerator fails the functional equation")
    weil = weil_check(P)
    if not weil:
        logger.error(f"Reciprocal roots of {P.coeffs} miss |λ|² = {P.q}")
        raise TheoremViolation("zeta numerator violates the Weil bound")
    factors = psi_l_polynomials(R, P, limits, counter)
    checks = cross_check(R, range(1, len(series) + 1), limits) if oracle else {}
    return CurveSummary(series, P.genus, P, weil, check_supersingular(P), tuple(factors), counter.name, checks)
