"""The symplectic F_p[𝓗]-module (V_R, ω_R).

V_R = ker E_R is stored through an F_p-basis inside one ambient field;
vectors of the module are coordinate columns with respect to that basis.
𝓗 acts through two matrices: T (multiplication by the canonical generator
of μ_d) and S (x ↦ x^q).
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from app.exceptions import GuardExceeded, TheoremViolation, ValidationError
from app.models.additive import (AdditivePoly, check_m, compose, d_rm, e_r,
                                 f_r, kernel_poly_from_basis,
                                 mu_scaling, rationality, right_divmod,
                                 splitting_field)
from app.models.field import (FieldDesc, FieldElement, canonical_root,
                              frobenius, multiplicative_order)
from app.utils import linalg
from app.utils.limits import DEFAULT_LIMITS, Limits

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class SympModule:
    p: int
    q_degree: int
    ambient: FieldDesc
    gram: np.ndarray
    T: np.ndarray
    S: np.ndarray
    d: int
    r: int
    alpha: FieldElement
    # one ambient element per basis vector; empty for abstract direct sums
    elements: tuple[FieldElement, ...] = ()
    parts: tuple[tuple[AdditivePoly, int], ...] = field(default=())

    @property
    def dim(self) -> int:
        return int(self.gram.shape[0])

    @property
    def q(self) -> int:
        return self.p ** self.q_degree

    def element_of(self, v: Sequence[int]) -> FieldElement:
        if not self.elements:
            raise ValidationError("this module has no embedding into a single field")
        total = self.ambient.zero()
        for c, b in zip(v, self.elements):
            total = total + b * int(c)
        return total

    def coords_of(self, x: FieldElement) -> np.ndarray:
        if not self.elements:
            raise ValidationError("this module has no embedding into a single field")
        basis = linalg.as_matrix(self.p, [b.coords for b in self.elements], self.ambient.n)
        solution = linalg.solve(self.p, basis.T, x.coords)
        if solution is None:
            raise ValidationError(f"{x} does not lie in V_R")
        return solution

    def describe(self, v: Sequence[int]):
        if self.elements:
            return str(self.element_of(v))
        return [int(c) for c in v]


@dataclass(frozen=True, eq=False)
class Submodule:
    basis: np.ndarray
    t_stable: bool
    s_stable: bool
    isotropic: bool

    @property
    def dim(self) -> int:
        return int(self.basis.shape[0])

    @property
    def is_submodule(self) -> bool:
        return self.t_stable and self.s_stable

    def key(self, p: int) -> tuple:
        return self.dim, linalg.canonical(p, self.basis)

    def to_json(self, M: SympModule) -> dict:
        return {
            'dim': self.dim,
            'basis': [M.describe(row) for row in self.basis],
            't_stable': self.t_stable,
            's_stable': self.s_stable,
            'totally_isotropic': self.isotropic,
        }


def submodule(M: SympModule, vectors) -> Submodule:
    """Wrap a spanning set, recomputing every flag."""
    basis = linalg.rref(M.p, linalg.as_matrix(M.p, vectors, M.dim))
    return Submodule(basis,
                     t_stable=linalg.is_stable(M.p, basis, M.T),
                     s_stable=linalg.is_stable(M.p, basis, M.S),
                     isotropic=linalg.is_isotropic(M.p, basis, M.gram))


def _action_matrix(F: FieldDesc, elements: Sequence[FieldElement], func) -> np.ndarray:
    basis = linalg.as_matrix(F.p, [b.coords for b in elements], F.n).T
    cols = []
    for b in elements:
        coords = linalg.solve(F.p, basis, func(b).coords)
        if coords is None:
            raise TheoremViolation("V_R is not stable under the 𝓗-action")
        cols.append(coords)
    n = len(elements)
    return np.array(cols, dtype=np.int64).reshape(n, n).T % F.p


def sigma_order(p: int, S: np.ndarray, q: int, d: int) -> int:
    """Least r ≥ 1 with S^r = I and q^r ≡ 1 (mod d)."""
    r, power = 1, np.asarray(S, dtype=np.int64) % p
    identity = np.eye(power.shape[0], dtype=np.int64)
    while not (np.array_equal(power, identity) and (pow(q, r, d) == 1 % d)):
        power = (power @ S) % p
        r += 1
    return r


def mu_degree(p: int, q_degree: int, d: int) -> int:
    """Degree over F_p of the field F_q(μ_d)."""
    return math.lcm(q_degree, multiplicative_order(p % d, d)) if d > 1 else q_degree


def _check_module(M: SympModule) -> None:
    p, G, T, S = M.p, M.gram, M.T, M.S
    problems = []
    if M.dim:
        if np.any((G + G.T) % p) or np.any(np.diag(G) % p):
            problems.append("gram matrix is not alternating")
        if linalg.rank(p, G) != M.dim:
            problems.append("gram matrix is degenerate")
        if linalg.rank(p, T) != M.dim or linalg.rank(p, S) != M.dim:
            problems.append("action matrices are not invertible")
        if not np.array_equal((S @ T) % p, (linalg.matrix_power(p, T, M.q) @ S) % p):
            problems.append("S T S^{-1} differs from T^q")
        for name, A in (('T', T), ('S', S)):
            if not np.array_equal((A.T @ G @ A) % p, G % p):
                problems.append(f"{name} does not preserve the form")
    if problems:
        logger.error(f"Symplectic module checks failed: {problems}")
        raise TheoremViolation('; '.join(problems))


def build(R: AdditivePoly, m: int = 1, limits: Limits = DEFAULT_LIMITS, min_degree: int = 1) -> SympModule:
    check_m(R.p, m)
    E = e_r(R)
    p, f = R.p, R.base.n
    d = d_rm(R, m)
    degree = math.lcm(mu_degree(p, f, d), min_degree)
    F, kernel = splitting_field(E, extra_degree=degree, min_degree=f, limits=limits)
    elements = tuple(F.element(row) for row in kernel)
    alpha = canonical_root(F, d)
    n = len(elements)
    table = f_r(R.over(F)) if R.e >= 1 else None
    gram = np.zeros((n, n), dtype=np.int64)
    for i in range(n):
        for j in range(i + 1, n):
            value = table.evaluate(elements[i], elements[j]) - table.evaluate(elements[j], elements[i])
            if not value.in_prime_field():
                logger.error(f"ω_R({elements[i]}, {elements[j]}) = {value} is not in F_{p}")
                raise TheoremViolation("the pairing ω_R left the prime field")
            gram[i, j] = value.value
            gram[j, i] = (-value.value) % p
    if n:
        T = _action_matrix(F, elements, lambda x: alpha * x)
        S = _action_matrix(F, elements, lambda x: frobenius(x, f))
    else:
        T = S = np.zeros((0, 0), dtype=np.int64)
    r = sigma_order(p, S, p ** f, d)
    M = SympModule(p, f, F, gram, T, S, d, r, alpha, elements, ((R, m),))
    _check_module(M)
    logger.debug(f"Built V_R of dimension {n} in F_{p}^{F.n} (d = {d}, r = {r})")
    return M


def build_common(pairs: Sequence[tuple[AdditivePoly, int]], limits: Limits = DEFAULT_LIMITS) -> list[SympModule]:
    """Build several modules inside one ambient field so they share α."""
    if not pairs:
        raise ValidationError("build_common needs at least one (R, m) pair")
    degrees = []
    for R, m in pairs:
        check_m(R.p, m)
        F, _ = splitting_field(e_r(R), extra_degree=mu_degree(R.p, R.base.n, d_rm(R, m)),
                               min_degree=R.base.n, limits=limits)
        degrees.append(F.n)
    common = math.lcm(*degrees)
    return [build(R, m, limits, min_degree=common) for R, m in pairs]


def omega(M: SympModule, v, w) -> int:
    """ω(v, w) for coordinate vectors or ambient elements of V_R."""
    v = M.coords_of(v) if isinstance(v, FieldElement) else np.asarray(v, dtype=np.int64)
    w = M.coords_of(w) if isinstance(w, FieldElement) else np.asarray(w, dtype=np.int64)
    if v.shape != (M.dim,) or w.shape != (M.dim,):
        raise ValidationError(f"vectors must have {M.dim} coordinates")
    return int((v @ M.gram @ w) % M.p)


def cyclic_submodule(M: SympModule, v) -> Submodule:
    vec = np.asarray(v, dtype=np.int64).reshape(1, M.dim) % M.p
    return submodule(M, linalg.span_closure(M.p, vec, [M.T, M.S]))


def perp(M: SympModule, W: Submodule) -> Submodule:
    if W.dim == 0:
        return submodule(M, np.eye(M.dim, dtype=np.int64))
    constraints = (W.basis @ M.gram) % M.p
    return submodule(M, linalg.null_space(M.p, constraints, M.dim))


@dataclass(frozen=True, eq=False)
class AnisotropyResult:
    anisotropic: bool
    witness: Optional[Submodule]
    scanned: int

    def to_json(self, M: SympModule) -> dict:
        return {
            'completely_anisotropic': self.anisotropic,
            'witness': self.witness.to_json(M) if self.witness is not None else None,
            'scanned': self.scanned,
        }


def _best(candidates, p: int) -> Optional[Submodule]:
    best = None
    for W in candidates:
        if W is None:
            continue
        if best is None or W.key(p) < best.key(p):
            best = W
    return best


def completely_anisotropic(M: SympModule, limits: Limits = DEFAULT_LIMITS) -> AnisotropyResult:
    """Scan the cyclic submodules; a nonzero isotropic submodule always contains one."""
    if M.dim == 0:
        return AnisotropyResult(True, None, 0)
    reps = list(linalg.line_representatives(M.p, M.dim))

    def isotropic_span(v):
        W = cyclic_submodule(M, v)
        return W if W.isotropic else None

    if limits.workers > 1:
        with ThreadPoolExecutor(max_workers=limits.workers) as pool:
            found = list(pool.map(isotropic_span, reps))
    else:
        found = [isotropic_span(v) for v in reps]
    witness = _best(found, M.p)
    logger.debug(f"Scanned {len(reps)} cyclic submodules, isotropic witness: {witness is not None}")
    return AnisotropyResult(witness is None, witness, len(reps))


def oracle_anisotropic(M: SympModule, limits: Limits = DEFAULT_LIMITS) -> AnisotropyResult:
    """Exhaustive search over all subspaces of dimension ≤ dim/2."""
    if M.dim > limits.oracle_dim:
        raise GuardExceeded(f"dim V_R = {M.dim} exceeds the oracle limit {limits.oracle_dim}")
    scanned = 0
    for k in range(1, M.dim // 2 + 1):
        found = []
        for basis in linalg.iter_subspaces(M.p, M.dim, k):
            scanned += 1
            if (linalg.is_isotropic(M.p, basis, M.gram) and linalg.is_stable(M.p, basis, M.T)
                    and linalg.is_stable(M.p, basis, M.S)):
                found.append(Submodule(basis, True, True, True))
        if found:
            return AnisotropyResult(False, _best(found, M.p), scanned)
    return AnisotropyResult(True, None, scanned)


@dataclass(frozen=True, eq=False)
class Decomposition:
    f1: AdditivePoly
    f2: AdditivePoly
    kernel: tuple[FieldElement, ...]

    @property
    def dim(self) -> int:
        return len(self.kernel)

    def to_json(self) -> dict:
        return {
            'f1': [str(c) for c in self.f1.coeffs],
            'f2': [str(c) for c in self.f2.coeffs],
            'kernel_dim': self.dim,
        }


def decomposition_route(R: AdditivePoly, m: int = 1, limits: Limits = DEFAULT_LIMITS) -> Optional[Decomposition]:
    """Search E_R = f1∘f2 with f2 over F_q, μ_d-equivariant, and an isotropic kernel.

    Works on the field side only: candidate kernels are spans in the ambient
    field under x ↦ αx and x ↦ x^q.
    """
    check_m(R.p, m)
    E = e_r(R)
    if R.e == 0:
        return None
    p, f = R.p, R.base.n
    d = d_rm(R, m)
    F, kernel = splitting_field(E, extra_degree=mu_degree(p, f, d), min_degree=f, limits=limits)
    alpha = canonical_root(F, d)
    basis = F.basis_array()
    scale_op = F.operator_matrix(basis * F.gf(alpha.value))
    frob_op = F.operator_matrix(basis ** (p ** f))
    table = f_r(R.over(F))
    spans = {}
    for v in linalg.line_representatives(p, kernel.shape[0]):
        start = ((v @ kernel) % p).reshape(1, F.n)
        span = linalg.span_closure(p, start, [scale_op, frob_op])
        if span.shape[0] < kernel.shape[0]:
            spans.setdefault(linalg.canonical(p, span), span)
    for key in sorted(spans, key=lambda k: (len(k), k)):
        elements = [F.element(row) for row in spans[key]]
        if any(not (table.evaluate(a, b) - table.evaluate(b, a)).is_zero()
               for i, a in enumerate(elements) for b in elements[i + 1:]):
            continue
        f2 = kernel_poly_from_basis(elements)
        if not rationality(f2, R.base):
            raise TheoremViolation("kernel polynomial of a Frobenius-stable subspace is not rational")
        f2 = f2.restrict(R.base)
        if not mu_scaling(f2, d):
            raise TheoremViolation(f"kernel polynomial of a μ_{d}-stable subspace fails the scaling test")
        f1, rem = right_divmod(E, f2)
        if not rem.is_zero():
            raise TheoremViolation("kernel polynomial of a subspace of V_R does not right-divide E_R")
        if compose(f1, f2) != E:
            raise TheoremViolation("E_R differs from f1∘f2 after an exact division")
        logger.debug(f"Decomposition route found an isotropic kernel of dimension {len(elements)}")
        return Decomposition(f1, f2, tuple(elements))
    return None


def direct_sum(M1: SympModule, M2: SympModule) -> SympModule:
    if M1.p != M2.p or M1.q_degree != M2.q_degree:
        raise ValidationError("direct sums need the same p and q")
    if M1.d != M2.d:
        raise ValidationError(f"direct sums need equal d, got {M1.d} and {M2.d}")
    if M1.dim and M2.dim and (M1.ambient != M2.ambient or M1.alpha != M2.alpha):
        raise ValidationError("summands must be built in one ambient field (use build_common)")
    if M2.dim == 0:
        return M1
    if M1.dim == 0:
        return M2

    def block(A, B):
        out = np.zeros((A.shape[0] + B.shape[0],) * 2, dtype=np.int64)
        out[:A.shape[0], :A.shape[0]] = A
        out[A.shape[0]:, A.shape[0]:] = B
        return out

    S = block(M1.S, M2.S)
    r = sigma_order(M1.p, S, M1.q, M1.d)
    M = SympModule(M1.p, M1.q_degree, M1.ambient, block(M1.gram, M2.gram), block(M1.T, M2.T), S,
                   M1.d, r, M1.alpha, (), M1.parts + M2.parts)
    _check_module(M)
    return M


def restrict_sigma(M: SympModule, t: int) -> SympModule:
    """The module for F_{q^t}: S becomes S^t."""
    if t < 1:
        raise ValidationError(f"t must be positive, got {t}")
    if t == 1:
        return M
    S = linalg.matrix_power(M.p, M.S, t)
    q_degree = M.q_degree * t
    r = sigma_order(M.p, S, M.p ** q_degree, M.d)
    return SympModule(M.p, q_degree, M.ambient, M.gram, M.T, S, M.d, r, M.alpha, M.elements, M.parts)


def minimal_imprimitive_unramified_degree(M: SympModule, limits: Limits = DEFAULT_LIMITS) -> int:
    """Least t with restrict_sigma(M, t) not completely anisotropic (d ≤ 2 only)."""
    if M.d > 2:
        raise ValidationError(f"unramified instability is only asserted for d_(R,m) ≤ 2, got {M.d}")
    if M.dim == 0:
        raise ValidationError("the zero module stays anisotropic over every extension")
    for t in range(1, M.r + 1):
        if not completely_anisotropic(restrict_sigma(M, t), limits).anisotropic:
            return t
    raise TheoremViolation(f"no isotropic submodule after restricting σ to σ^{M.r}")
