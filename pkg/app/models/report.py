"""Invariants of τ_{ψ,R,m}: Swan conductor, ramification, primitivity and the full report."""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import galois
from sympy import Rational

from app.exceptions import GuardExceeded, TheoremViolation, ValidationError
from app.models import group
from app.models.additive import (AdditivePoly, check_m, d_r, d_rm, e_r,
                                 is_prime)
from app.models.curve import curve_summary
from app.models.field import FieldElement
from app.models.quotient import (InductionData, iterated_quotient,
                                 kernel_isotropy, right_divides)
from app.models.root_system import (matches_VR, monomial_root_system,
                                    nu_label)
from app.models.symplectic import (AnisotropyResult, Decomposition,
                                   SympModule, build, completely_anisotropic,
                                   decomposition_route,
                                   minimal_imprimitive_unramified_degree,
                                   oracle_anisotropic)
from app.utils.limits import DEFAULT_LIMITS, Limits
from app.utils.serialize import base_field, parse_r, rational

logger = logging.getLogger(__name__)

VERDICTS = ('primitive', 'imprimitive', 'primitive_unramified_unstable')
SUBGROUPS = ('G', 'Gal(N/F_r)', 'Gal(N/T)', 'Gal(N/M)', '1')


def _check_parameters(p: int, e: int, d_R: int, m: int) -> None:
    if not galois.is_prime(p):
        raise ValidationError(f"p = {p} is not prime")
    if e < 0:
        raise ValidationError(f"e must be non-negative, got {e}")
    if m < 1:
        raise ValidationError(f"m must be positive, got {m}")
    if d_R < 1 or (p ** e + 1) % d_R:
        raise ValidationError(f"d_R = {d_R} does not divide p^e + 1 = {p ** e + 1}")


def swan(p: int, e: int, d_R: int, m: int) -> int:
    """Sw = m(p^e + 1)/d_R, always an integer."""
    _check_parameters(p, e, d_R, m)
    return m * (p ** e + 1) // d_R


def herbrand(p: int, e: int, d_R: int, m: int, t) -> Rational:
    _check_parameters(p, e, d_R, m)
    t = Rational(t)
    q2 = p ** (2 * e)
    if t <= 0:
        return t
    if t <= Rational(m, d_R):
        return d_R * t
    if t <= Rational((p ** e + 1) * m, p ** e * d_R):
        return q2 * d_R * t - (q2 - 1) * m
    return q2 * p * d_R * t - (p ** e + 1) * (p ** (e + 1) - 1) * m


@dataclass(frozen=True)
class RamificationProfile:
    p: int
    e: int
    d_R: int
    m: int

    @property
    def breakpoints(self) -> tuple[Rational, ...]:
        pe = self.p ** self.e
        return Rational(0), Rational(self.m, self.d_R), Rational((pe + 1) * self.m, pe * self.d_R)

    @property
    def jumps(self) -> tuple[Rational, ...]:
        return (Rational(-1),) + self.breakpoints

    @property
    def slopes(self) -> tuple[int, ...]:
        q2 = self.p ** (2 * self.e)
        return 1, self.d_R, q2 * self.d_R, q2 * self.p * self.d_R

    @property
    def max_jump(self) -> Rational:
        return self.breakpoints[-1]

    def psi(self, t) -> Rational:
        return herbrand(self.p, self.e, self.d_R, self.m, t)

    def to_json(self) -> dict:
        bounds = [None] + list(self.jumps)
        filtration = [{'above': None if lo is None else rational(lo), 'group': label}
                      for lo, label in zip(bounds, SUBGROUPS)]
        return {
            'jumps': [rational(j) for j in self.jumps],
            'filtration': filtration,
            'psi': {
                'breakpoints': [rational(b) for b in self.breakpoints],
                'slopes': list(self.slopes),
                'values': [rational(self.psi(b)) for b in self.breakpoints],
            },
        }


def profile(p: int, e: int, d_R: int, m: int) -> RamificationProfile:
    _check_parameters(p, e, d_R, m)
    prof = RamificationProfile(p, e, d_R, m)
    if p ** e * prof.max_jump != swan(p, e, d_R, m):
        raise TheoremViolation("Swan conductor differs from p^e times the largest jump")
    return prof


def valuations(p: int, e: int, d_R: int, m: int) -> tuple[Rational, Rational, Rational]:
    """Valuations of α_R, β_{R,m} and γ_{R,m}."""
    _check_parameters(p, e, d_R, m)
    q2 = p ** (2 * e)
    return (Rational(1, d_R), Rational(-m, q2 * d_R), Rational(-m * (p ** e + 1), q2 * p * d_R))


@dataclass(frozen=True, eq=False)
class Verdict:
    kind: str
    module: SympModule
    anisotropy: AnisotropyResult
    decomposition: Optional[Decomposition]
    induction: Optional[InductionData] = None
    unramified_degree: Optional[int] = None
    e_r_prime: Optional[bool] = None
    oracle: Optional[bool] = None

    @property
    def primitive(self) -> bool:
        return self.kind != 'imprimitive'

    def to_json(self) -> dict:
        out = {
            'verdict': self.kind,
            'routes': {
                'anisotropy': self.anisotropy.anisotropic,
                'decomposition': self.decomposition is None,
                'quotient': None if self.induction is None else False,
            },
            'witness': self.anisotropy.witness.to_json(self.module) if self.anisotropy.witness is not None else None,
            'decomposition': self.decomposition.to_json() if self.decomposition is not None else None,
            'induction_data': self.induction.to_json() if self.induction is not None else None,
            'cyclic_submodules_scanned': self.anisotropy.scanned,
            'e_r_prime': self.e_r_prime,
        }
        if self.unramified_degree is not None:
            out['unramified_degree'] = self.unramified_degree
        if self.oracle is not None:
            out['routes']['subspace_oracle'] = self.oracle
        return out


def primitivity(R: AdditivePoly, m: int = 1, limits: Limits = DEFAULT_LIMITS,
                oracle: bool = False) -> Verdict:
    """Decide primitivity through every available route; disagreement is fatal."""
    if R.is_zero():
        raise ValidationError("R must be nonzero")
    check_m(R.p, m)
    M = build(R, m, limits)
    aniso = completely_anisotropic(M, limits)
    decomposition = decomposition_route(R, m, limits)
    if aniso.anisotropic != (decomposition is None):
        logger.error(f"Anisotropy route says {aniso.anisotropic}, decomposition route found "
                     f"{decomposition is not None} for R = {R}, m = {m}")
        raise TheoremViolation("the anisotropy and decomposition routes disagree")
    e_r_prime = is_prime(e_r(R), limits) if R.e >= 1 else None
    if e_r_prime and not aniso.anisotropic:
        logger.error(f"E_R is prime but V_R has an isotropic submodule (R = {R})")
        raise TheoremViolation("prime E_R with a non-anisotropic V_R")
    oracle_verdict = None
    if oracle:
        try:
            oracle_verdict = oracle_anisotropic(M, limits).anisotropic
        except GuardExceeded as e:
            logger.info(f"Subspace oracle skipped: {e}")
        if oracle_verdict is not None and oracle_verdict != aniso.anisotropic:
            logger.error(f"Subspace oracle says {oracle_verdict}, cyclic scan {aniso.anisotropic}")
            raise TheoremViolation("the exhaustive subspace oracle disagrees with the cyclic scan")

    if not aniso.anisotropic:
        induction = None
        if R.p != 2:
            induction = iterated_quotient(R, m, aniso.witness, M, limits)
            if not right_divides(R, induction):
                raise TheoremViolation("E_R1 ∘ r does not right-divide E_R")
            if not kernel_isotropy(M, induction):
                raise TheoremViolation("ker r is not isotropic with V' inside its orthogonal")
        logger.info(f"R = {R}, m = {m}: imprimitive (witness of dimension {aniso.witness.dim})")
        return Verdict('imprimitive', M, aniso, decomposition, induction, None, e_r_prime, oracle_verdict)
    if M.d <= 2 and M.dim:
        t = minimal_imprimitive_unramified_degree(M, limits)
        logger.info(f"R = {R}, m = {m}: primitive, imprimitive after the degree-{t} unramified extension")
        return Verdict('primitive_unramified_unstable', M, aniso, None, None, t, e_r_prime, oracle_verdict)
    logger.info(f"R = {R}, m = {m}: primitive")
    return Verdict('primitive', M, aniso, None, None, None, e_r_prime, oracle_verdict)


def root_system_section(R: AdditivePoly, m: int, M: SympModule, limits: Limits = DEFAULT_LIMITS) -> Optional[dict]:
    """Monomial R only, and only when F_p(μ_d) = F_{p^{2e}}."""
    if not R.is_monomial() or R.e < 1:
        return None
    try:
        W = monomial_root_system(R.p, R.base.n, R.e, R.coefficient(R.e), m, limits, ambient=M.ambient)
    except ValidationError as e:
        logger.debug(f"No monomial root system: {e}")
        return None
    out = W.to_json(nu_label(W.classification.type))
    out['matches_VR'] = matches_VR(M, W.system, W.invariants)
    return out


@dataclass(frozen=True)
class ReportOptions:
    curve: bool = False
    max_k: Optional[int] = None
    oracle: bool = False
    backend: str = 'auto'


def validate(R: AdditivePoly, m: int) -> None:
    if R.is_zero():
        raise ValidationError("R must be nonzero")
    check_m(R.p, m)
    if (R.p, R.e) == (2, 0):
        raise ValidationError("(p, e) = (2, 0) is excluded: τ is not defined there")


def full_report(p: int, f: int, coeffs: AdditivePoly | str | Sequence, m: int = 1, e: Optional[int] = None,
                options: Optional[ReportOptions] = None, limits: Limits = DEFAULT_LIMITS) -> dict:
    options = options or ReportOptions()
    if isinstance(coeffs, AdditivePoly):
        R = coeffs
        if R.p != p or R.base.n != f:
            raise ValidationError(f"R is not defined over F_{p}^{f}")
    else:
        R = parse_r(coeffs, base_field(p, f, limits), e)
    validate(R, m)
    e = R.e
    dR, dm = d_r(R), d_rm(R, m)
    logger.info(f"Report for p={p}, f={f}, R={R}, m={m}")
    verdict = primitivity(R, m, limits, oracle=options.oracle)
    M = verdict.module
    doc = {
        'input': {
            'p': p, 'f': f, 'q': p ** f, 'm': m, 'e': e,
            'R': [str(c) for c in R.coeffs],
            'modulus': list(R.base.modulus),
        },
        'degree': p ** e,
        'd_R': dR,
        'd_Rm': dm,
        'swan': swan(p, e, dR, m),
        'valuations': dict(zip(('alpha_R', 'beta_Rm', 'gamma_Rm'),
                               (rational(v) for v in valuations(p, e, dR, m)))),
        'ramification': profile(p, e, dR, m).to_json(),
        'groups': group.group_orders(R, m),
        'symplectic': {'dim': M.dim, 'd': M.d, 'r': M.r, 'ambient_degree': M.ambient.n},
        'verdict': verdict.kind,
        'primitivity': verdict.to_json(),
        'root_system': root_system_section(R, m, M, limits),
        'curve': None,
    }
    if options.curve:
        doc['curve'] = curve_summary(R, limits, options.max_k, options.oracle, options.backend).to_json()
    if options.oracle:
        try:
            analysis = group.analyze(group.build_context(R, m, 'H', limits), limits)
            doc['group_analysis'] = analysis.to_json()
        except GuardExceeded as e:
            doc['group_analysis'] = {'skipped': str(e)}
    return doc


def scan(p: int, f: int, e: int, ms: Sequence[int], limits: Limits = DEFAULT_LIMITS) -> dict:
    """Run every primitivity route on all R over F_q with top index e."""
    F = base_field(p, f, limits)
    if (p, e) == (2, 0):
        raise ValidationError("(p, e) = (2, 0) is excluded")
    if e < 0:
        raise ValidationError(f"e must be non-negative, got {e}")
    q = F.order
    total = q ** e * (q - 1)
    valid = [m for m in ms if m >= 1 and m % p]
    if total * max(1, len(valid)) > limits.count_enum:
        raise GuardExceeded(f"scan over {total} polynomials exceeds the limit {limits.count_enum}")
    by_m = {}
    for m in valid:
        tally = {kind: 0 for kind in VERDICTS}
        with_data = 0
        for low in itertools.product(range(q), repeat=e):
            for top in range(1, q):
                R = AdditivePoly(F, tuple(FieldElement(F, v) for v in low) + (FieldElement(F, top),))
                verdict = primitivity(R, m, limits)
                tally[verdict.kind] += 1
                with_data += verdict.induction is not None
        tally['with_induction_data'] = with_data
        by_m[str(m)] = tally
        logger.info(f"scan p={p} f={f} e={e} m={m}: {tally}")
    return {
        'p': p, 'f': f, 'e': e, 'q': q,
        'polynomials': total,
        'by_m': by_m,
        'skipped_m': [m for m in ms if m not in valid],
        'routes_agree': True,
    }
