"""Finite fields F_{p^n} with a deterministic modulus.

Arithmetic is delegated to ``galois``; this module pins down the choice of
modulus (lexicographically least monic irreducible, constant coefficient
first), the canonical embeddings between fields, and the element text form
``"p^n:modulus_csv:coords_csv"``.
"""
from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

import galois
import numpy as np

from app.exceptions import GuardExceeded, ValidationError
from app.utils import linalg
from app.utils.limits import DEFAULT_LIMITS

logger = logging.getLogger(__name__)

# Largest subfield we are willing to enumerate when locating a root of its modulus
SUBFIELD_SCAN_LIMIT = 2 ** 22


@dataclass(frozen=True)
class FieldDesc:
    p: int
    n: int
    modulus: tuple[int, ...]

    @property
    def order(self) -> int:
        return self.p ** self.n

    @cached_property
    def gf(self) -> type[galois.FieldArray]:
        if self.n == 1:
            return galois.GF(self.p)
        poly = galois.Poly(list(reversed(self.modulus)), field=galois.GF(self.p))
        return galois.GF(self.p ** self.n, irreducible_poly=poly, verify=False)

    @cached_property
    def primitive_element(self) -> 'FieldElement':
        return FieldElement(self, int(self.gf.primitive_element))

    @cached_property
    def _place_values(self) -> np.ndarray:
        return np.array([self.p ** i for i in range(self.n)], dtype=np.int64)

    def __str__(self) -> str:
        return f"{self.p}^{self.n}"

    # Element constructors

    def zero(self) -> 'FieldElement':
        return FieldElement(self, 0)

    def one(self) -> 'FieldElement':
        return FieldElement(self, 1)

    def constant(self, c: int) -> 'FieldElement':
        return FieldElement(self, c % self.p)

    def element(self, coords: Sequence[int]) -> 'FieldElement':
        coords = list(coords)
        if len(coords) > self.n:
            raise ValidationError(f"{len(coords)} coordinates given for a degree-{self.n} field")
        value = sum((int(c) % self.p) * self.p ** i for i, c in enumerate(coords))
        return FieldElement(self, value)

    def generator(self) -> 'FieldElement':
        """The power-basis generator (class of x)."""
        if self.n == 1:
            return self.zero()
        return FieldElement(self, self.p)

    def random(self, rng: np.random.Generator, nonzero: bool = False) -> 'FieldElement':
        low = 1 if nonzero else 0
        return FieldElement(self, int(rng.integers(low, self.order)))

    def elements(self) -> list['FieldElement']:
        return [FieldElement(self, v) for v in range(self.order)]

    # Vectorised helpers on galois arrays

    def array(self, values: Iterable[int]) -> galois.FieldArray:
        return self.gf(np.array(list(values), dtype=np.int64))

    def basis_array(self) -> galois.FieldArray:
        return self.gf(self._place_values.copy())

    def coords_matrix(self, arr: galois.FieldArray) -> np.ndarray:
        """Rows of constant-first coordinates for each entry of arr."""
        ints = np.atleast_1d(arr.view(np.ndarray).astype(np.int64))
        return (ints[:, None] // self._place_values[None, :]) % self.p

    def from_coords_matrix(self, mat: np.ndarray) -> galois.FieldArray:
        mat = np.asarray(mat, dtype=np.int64) % self.p
        return self.gf(mat @ self._place_values)

    def operator_matrix(self, images: galois.FieldArray) -> np.ndarray:
        """Matrix (acting on column coordinates) of the F_p-linear map sending basis_j to images[j]."""
        return self.coords_matrix(images).T.copy()

    def trace_array(self, arr: galois.FieldArray) -> np.ndarray:
        """Absolute traces Tr_{F/F_p}, as integers mod p."""
        total = arr.copy()
        power = arr
        for _ in range(1, self.n):
            power = power ** self.p
            total = total + power
        return self.coords_matrix(total)[:, 0]


@dataclass(frozen=True)
class FieldElement:
    field: FieldDesc
    value: int

    @property
    def coords(self) -> tuple[int, ...]:
        p, v = self.field.p, self.value
        digits = []
        for _ in range(self.field.n):
            v, c = divmod(v, p)
            digits.append(c)
        return tuple(digits)

    @property
    def gf(self) -> galois.FieldArray:
        return self.field.gf(self.value)

    def is_zero(self) -> bool:
        return self.value == 0

    def is_one(self) -> bool:
        return self.value == 1

    def in_prime_field(self) -> bool:
        return self.value < self.field.p

    def to_int(self) -> int:
        if not self.in_prime_field():
            raise ValidationError(f"{self} is not in the prime field")
        return self.value

    def _coerce(self, other) -> 'FieldElement':
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise ValidationError(f"incompatible fields {self.field} and {other.field}")
            return other
        if isinstance(other, (int, np.integer)):
            return self.field.constant(int(other))
        return NotImplemented

    def _wrap(self, arr) -> 'FieldElement':
        return FieldElement(self.field, int(arr))

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self._wrap(self.gf + other.gf)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self._wrap(self.gf - other.gf)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self._wrap(self.gf * other.gf)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if other.is_zero():
            raise ZeroDivisionError("division by zero in a finite field")
        return self._wrap(self.gf / other.gf)

    def __neg__(self) -> 'FieldElement':
        return self._wrap(-self.gf)

    def __pow__(self, k: int) -> 'FieldElement':
        k = int(k)
        if self.is_zero():
            if k < 0:
                raise ZeroDivisionError("zero has no inverse")
            return self.field.one() if k == 0 else self
        k %= self.field.order - 1
        return self._wrap(self.gf ** k)

    def inverse(self) -> 'FieldElement':
        return self ** -1

    def __str__(self) -> str:
        return element_text(self)

    def __repr__(self) -> str:
        return f"FieldElement({element_text(self)})"


def least_irreducible(p: int, n: int) -> tuple[int, ...]:
    """Lexicographically least monic irreducible of degree n, constant coefficient first."""
    if n == 1:
        return (0, 1)
    GFp = galois.GF(p)
    # a zero constant term means x divides the polynomial, so c0 starts at 1
    for c0 in range(1, p):
        for rest in itertools.product(range(p), repeat=n - 1):
            coeffs = (c0,) + rest + (1,)
            if galois.Poly(list(reversed(coeffs)), field=GFp).is_irreducible():
                return coeffs
    raise AssertionError(f"no irreducible polynomial of degree {n} over F_{p}")


@lru_cache(maxsize=None)
def field_create(p: int, n: int, max_bits: int = DEFAULT_LIMITS.field_bits) -> FieldDesc:
    if not isinstance(p, int) or p < 2 or not galois.is_prime(p):
        raise ValidationError(f"p = {p} is not prime")
    if n < 1:
        raise ValidationError(f"extension degree must be at least 1, got {n}")
    if p ** n > 2 ** max_bits:
        raise GuardExceeded(f"field F_{p}^{n} exceeds the 2^{max_bits} size guard")
    modulus = least_irreducible(p, n)
    logger.debug(f"Created F_{p}^{n} with modulus {modulus}")
    return FieldDesc(p, n, modulus)


def frobenius(x: FieldElement, k: int) -> FieldElement:
    """x^{p^k}."""
    if k < 0:
        raise ValidationError("Frobenius exponent must be non-negative")
    k %= x.field.n
    if k == 0 or x.is_zero():
        return x
    return x ** (x.field.p ** k)


def norm_trace(x: FieldElement, sub_degree: int) -> tuple[FieldElement, FieldElement]:
    n = x.field.n
    if sub_degree < 1 or n % sub_degree:
        raise ValidationError(f"subfield degree {sub_degree} does not divide {n}")
    norm, trace = x.field.one(), x.field.zero()
    for i in range(n // sub_degree):
        conj = frobenius(x, sub_degree * i)
        norm = norm * conj
        trace = trace + conj
    for value in (norm, trace):
        if frobenius(value, sub_degree) != value:
            raise AssertionError(f"norm/trace of {x} left the subfield of degree {sub_degree}")
    return norm, trace


def multiplicative_order(a: int, d: int) -> int:
    if d < 1:
        raise ValidationError(f"modulus must be positive, got {d}")
    if math.gcd(a, d) != 1:
        raise ValidationError(f"{a} is not a unit modulo {d}")
    if d == 1:
        return 1
    k, power = 1, a % d
    while power != 1:
        power = (power * a) % d
        k += 1
    return k


def element_order(x: FieldElement) -> int:
    if x.is_zero():
        raise ValidationError("zero has no multiplicative order")
    for k in galois.divisors(x.field.order - 1):
        if (x ** k).is_one():
            return int(k)
    raise AssertionError("element order must divide the group order")


def _sorted_by_coords(items: Iterable[FieldElement]) -> list[FieldElement]:
    return sorted(items, key=lambda z: z.coords)


def roots_of_unity(F: FieldDesc, d: int) -> list[FieldElement]:
    if d < 1 or (F.order - 1) % d:
        raise ValidationError(f"{d} does not divide {F.order} - 1")
    if d == 1:
        return [F.one()]
    h = F.primitive_element ** ((F.order - 1) // d)
    roots, power = [], F.one()
    for _ in range(d):
        roots.append(power)
        power = power * h
    return _sorted_by_coords(roots)


@lru_cache(maxsize=None)
def canonical_root(F: FieldDesc, d: int) -> FieldElement:
    """First element of μ_d (in coordinate order) of exact order d."""
    for z in roots_of_unity(F, d):
        if element_order(z) == d:
            return z
    raise AssertionError(f"μ_{d} has no generator in F_{F.p}^{F.n}")


@lru_cache(maxsize=None)
def _least_root(source: FieldDesc, target: FieldDesc) -> FieldElement:
    if source.n == 1:
        return target.zero()
    if source.order > SUBFIELD_SCAN_LIMIT:
        raise GuardExceeded(f"subfield F_{source.p}^{source.n} too large to scan for a root")
    h = target.primitive_element ** ((target.order - 1) // (source.order - 1))
    count = source.order - 1
    values = target.array([1])
    # doubling: [h^0..h^{k-1}] -> [h^0..h^{2k-1}]
    while len(values) < count:
        shift = h ** len(values)
        shifted = values * target.gf(shift.value)
        values = target.gf(np.concatenate([values.view(np.ndarray), shifted.view(np.ndarray)]))
    subfield = values.view(np.ndarray)[:count].astype(np.int64)
    values = target.gf(subfield)
    acc = target.gf(np.zeros_like(subfield))
    for c in reversed(source.modulus):
        acc = acc * values + target.gf(c)
    roots = [FieldElement(target, int(v)) for v in subfield[acc.view(np.ndarray) == 0]]
    if len(roots) != source.n:
        raise AssertionError(f"modulus of {source} has {len(roots)} roots in {target}")
    return _sorted_by_coords(roots)[0]


@lru_cache(maxsize=None)
def embedding_matrix(source: FieldDesc, target: FieldDesc) -> np.ndarray:
    """target.n × source.n matrix mapping source coordinates to target coordinates."""
    if source.p != target.p or target.n % source.n:
        raise ValidationError(f"no embedding of {source} into {target}")
    theta = _least_root(source, target)
    columns, power = [], target.one()
    for _ in range(source.n):
        columns.append(power.coords)
        power = power * theta
    return np.array(columns, dtype=np.int64).T


def embed(x: FieldElement, target: FieldDesc) -> FieldElement:
    if x.field == target:
        return x
    mat = embedding_matrix(x.field, target)
    coords = (mat @ np.array(x.coords, dtype=np.int64)) % target.p
    return target.element(coords)


def restrict(x: FieldElement, subfield: FieldDesc) -> FieldElement:
    """Preimage of x under the canonical embedding of subfield."""
    if x.field == subfield:
        return x
    mat = embedding_matrix(subfield, x.field)
    coords = linalg.solve(subfield.p, mat, x.coords)
    if coords is None:
        raise ValidationError(f"{x} does not lie in the subfield {subfield}")
    return subfield.element(coords)


def common_field(p: int, degrees: Iterable[int], max_bits: int = DEFAULT_LIMITS.field_bits) -> FieldDesc:
    return field_create(p, math.lcm(*degrees), max_bits)


def element_text(x: FieldElement) -> str:
    F = x.field
    modulus = ','.join(str(c) for c in F.modulus)
    coords = ','.join(str(c) for c in x.coords)
    return f"{F.p}^{F.n}:{modulus}:{coords}"


def parse_element(text: str, max_bits: int = DEFAULT_LIMITS.field_bits) -> FieldElement:
    try:
        head, modulus, coords = text.strip().split(':')
        p, n = (int(part) for part in head.split('^'))
        modulus = tuple(int(c) for c in modulus.split(','))
        coords = [int(c) for c in coords.split(',')]
    except ValueError as e:
        raise ValidationError(f"malformed field element {text!r}: {e}")
    F = field_create(p, n, max_bits)
    if modulus != F.modulus:
        raise ValidationError(f"modulus {modulus} is not the canonical modulus {F.modulus} of F_{p}^{n}")
    if len(coords) != n or any(not 0 <= c < p for c in coords):
        raise ValidationError(f"coordinates {coords} do not describe an element of F_{p}^{n}")
    return F.element(coords)
