"""Classical polynomials in one variable over a finite field.

Used for the non-additive pieces of the curve quotient (Δ, Δ0) and for
checking polynomial identities such as x·R(x) = r·R1(r) + Δ^p − Δ
coefficient by coefficient. Arithmetic is done by ``galois.Poly``; this
wrapper keeps the coefficient field as a FieldDesc so that Frobenius
twists, embeddings and restrictions follow the canonical moduli.
"""
import galois
import numpy as np

from app.exceptions import ValidationError
from app.models.field import FieldElement, embed, restrict


class SparsePoly:
    def __init__(self, field, poly=None):
        self.field = field
        self.poly = poly if poly is not None else galois.Poly.Zero(field=field.gf)

    @classmethod
    def from_terms(cls, field, terms):
        items = terms.items() if isinstance(terms, dict) else terms
        acc = {}
        for exp, coeff in items:
            if exp < 0:
                raise ValidationError(f"negative exponent {exp}")
            if isinstance(coeff, int):
                coeff = field.constant(coeff)
            if coeff.field != field:
                raise ValidationError(f"coefficient in {coeff.field}, polynomial over {field}")
            acc[exp] = acc[exp] + coeff if exp in acc else coeff
        acc = {e: c for e, c in acc.items() if not c.is_zero()}
        if not acc:
            return cls(field)
        degrees = sorted(acc)
        coeffs = field.gf([acc[e].value for e in degrees])
        return cls(field, galois.Poly.Degrees(degrees, coeffs, field=field.gf))

    @classmethod
    def zero(cls, field):
        return cls(field)

    @classmethod
    def monomial(cls, field, exp, coeff=1):
        return cls.from_terms(field, [(exp, coeff)])

    @classmethod
    def from_additive(cls, f):
        """Classical form Σ a_i x^{p^i} of an additive polynomial."""
        p = f.base.p
        return cls.from_terms(f.base, [(p ** i, a) for i, a in enumerate(f.coeffs)])

    # Basic accessors

    @property
    def terms(self):
        """(exponent, coefficient) pairs with nonzero coefficient, by increasing exponent."""
        if self.is_zero():
            return ()
        pairs = zip(self.poly.nonzero_degrees.tolist(), self.poly.nonzero_coeffs.tolist())
        return tuple(sorted((int(e), FieldElement(self.field, int(c))) for e, c in pairs))

    def as_dict(self):
        return dict(self.terms)

    def is_zero(self):
        return not np.any(self.poly.coeffs)

    @property
    def degree(self):
        return -1 if self.is_zero() else int(self.poly.degree)

    def coefficient(self, exp):
        return self.as_dict().get(exp, self.field.zero())

    def __eq__(self, other):
        if not isinstance(other, SparsePoly):
            return NotImplemented
        return self.field == other.field and self.terms == other.terms

    def __hash__(self):
        return hash((self.field, self.terms))

    # Ring operations

    def _constant(self, c):
        return galois.Poly([c.value], field=self.field.gf)

    def _check(self, other):
        if other.field != self.field:
            raise ValidationError(f"polynomials over {self.field} and {other.field} cannot be combined")

    def __add__(self, other):
        self._check(other)
        return SparsePoly(self.field, self.poly + other.poly)

    def __neg__(self):
        return SparsePoly(self.field, -self.poly)

    def __sub__(self, other):
        self._check(other)
        return SparsePoly(self.field, self.poly - other.poly)

    def scale(self, c):
        if isinstance(c, int):
            c = self.field.constant(c)
        return SparsePoly(self.field, self.poly * self._constant(c))

    def __mul__(self, other):
        if not isinstance(other, SparsePoly):
            return self.scale(other)
        self._check(other)
        return SparsePoly(self.field, self.poly * other.poly)

    __rmul__ = __mul__

    def frobenius(self, k=1):
        """self^{p^k}, which in characteristic p acts term by term."""
        q = self.field.p ** k
        return SparsePoly.from_terms(self.field, [(e * q, c ** q) for e, c in self.terms])

    def __pow__(self, n):
        if n < 0:
            raise ValidationError("negative powers of polynomials are not defined")
        return SparsePoly(self.field, self.poly ** n)

    def compose(self, g):
        """self(g(x))."""
        self._check(g)
        result = galois.Poly.Zero(field=self.field.gf)
        for exp, c in self.terms:
            result = result + (g.poly ** exp) * self._constant(c)
        return SparsePoly(self.field, result)

    def evaluate(self, x):
        F = x.field
        total = F.zero()
        for exp, c in self.terms:
            total = total + embed(c, F) * x ** exp
        return total

    def __call__(self, x):
        return self.evaluate(x)

    # Change of coefficient field

    def over(self, target):
        return SparsePoly.from_terms(target, [(e, embed(c, target)) for e, c in self.terms])

    def restrict(self, subfield):
        return SparsePoly.from_terms(subfield, [(e, restrict(c, subfield)) for e, c in self.terms])

    def is_rational(self, subfield):
        try:
            self.restrict(subfield)
        except ValidationError:
            return False
        return True

    def to_json(self):
        return [[e, str(c)] for e, c in self.terms]

    def __repr__(self):
        return f"SparsePoly({self.field}, {self})"

    def __str__(self):
        if self.is_zero():
            return '0'
        return ' + '.join(f"({c})*x^{e}" for e, c in reversed(self.terms))
