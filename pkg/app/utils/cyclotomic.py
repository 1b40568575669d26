"""Exact arithmetic in Z[ζ_p] ⊂ Q(ζ_p).

Elements are sympy polynomials in ``z`` over QQ, reduced modulo the p-th
cyclotomic polynomial. Rational coefficients are allowed so that Newton
recursions can divide by k; integrality is checked separately.
"""
from __future__ import annotations

from typing import Mapping, Sequence

import sympy
from sympy import QQ, Poly, Rational, Symbol, cyclotomic_poly

from app.exceptions import ValidationError

z = Symbol('z')


class CyclotomicRing:
    def __init__(self, p: int):
        if not sympy.isprime(p):
            raise ValidationError(f"p = {p} is not prime")
        self.p = p
        self.modulus = Poly(cyclotomic_poly(p, z), z, domain=QQ)

    def __repr__(self) -> str:
        return f"CyclotomicRing({self.p})"

    def reduce(self, x: Poly) -> Poly:
        return x.rem(self.modulus)

    def zero(self) -> Poly:
        return Poly(0, z, domain=QQ)

    def one(self) -> Poly:
        return Poly(1, z, domain=QQ)

    def from_int(self, n) -> Poly:
        return Poly(Rational(n), z, domain=QQ)

    def zeta(self, k: int) -> Poly:
        return self.reduce(Poly(z ** (k % self.p), z, domain=QQ))

    def from_exponents(self, weights: Mapping[int, int] | Sequence[int]) -> Poly:
        """Σ_k weights[k] ζ^k, exponents taken mod p."""
        items = weights.items() if isinstance(weights, Mapping) else enumerate(weights)
        acc = {}
        for k, w in items:
            if w:
                key = int(k) % self.p
                acc[key] = acc.get(key, 0) + int(w)
        if not acc:
            return self.zero()
        return self.reduce(Poly.from_dict({(k,): v for k, v in acc.items()}, z, domain=QQ))

    def mul(self, a: Poly, b: Poly) -> Poly:
        return self.reduce(a * b)

    def galois(self, x: Poly, a: int) -> Poly:
        """Image of x under ζ ↦ ζ^a."""
        if a % self.p == 0:
            raise ValidationError(f"ζ ↦ ζ^{a} is not an automorphism")
        return self.reduce(x.compose(Poly(z ** (a % self.p), z, domain=QQ)))

    def is_integral(self, x: Poly) -> bool:
        return all(c.is_integer for c in x.all_coeffs())

    def is_rational(self, x: Poly) -> bool:
        return x.is_zero or x.degree() == 0

    def rational_value(self, x: Poly) -> Rational:
        x = self.reduce(x)
        if not self.is_rational(x):
            raise ValidationError(f"{x.as_expr()} is not a rational number")
        return Rational(x.as_expr())

    def vector(self, x: Poly) -> list[int]:
        """Integer coordinates on 1, ζ, …, ζ^{p−2}."""
        x = self.reduce(x)
        if not self.is_integral(x):
            raise ValidationError(f"{x.as_expr()} is not a cyclotomic integer")
        coeffs = [int(c) for c in reversed(x.all_coeffs())] if not x.is_zero else []
        return coeffs + [0] * (self.p - 1 - len(coeffs))


def series_product(ring: CyclotomicRing, a: Sequence[Poly], b: Sequence[Poly]) -> list[Poly]:
    """Product of two polynomials in T with coefficients in the ring."""
    out = [ring.zero() for _ in range(len(a) + len(b) - 1)]
    for i, x in enumerate(a):
        if x.is_zero:
            continue
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return [ring.reduce(c) for c in out]
