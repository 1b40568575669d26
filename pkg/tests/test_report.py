import itertools
import json
import os

import numpy as np
import pytest
from sympy import Rational

from app.exceptions import GuardExceeded, ValidationError
from app.models.additive import AdditivePoly
from app.models.field import field_create
from app.models.quotient import verify_morphism
from app.models.report import (ReportOptions, full_report, herbrand,
                               primitivity, profile, scan, swan, valuations)

SCHEMA = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'schema', 'report.schema.json')


@pytest.mark.parametrize('m', [1, 2, 4, 5])
def test_swan_of_the_frobenius_curve(m):
    assert swan(3, 1, 4, m) == m


def test_swan_rejects_bad_parameters():
    with pytest.raises(ValidationError):
        swan(3, 1, 3, 1)
    with pytest.raises(ValidationError):
        swan(4, 1, 5, 1)
    with pytest.raises(ValidationError):
        swan(3, 1, 4, 0)


def test_valuations():
    assert valuations(3, 1, 4, 1) == (Rational(1, 4), Rational(-1, 36), Rational(-1, 27))


@pytest.mark.parametrize('p, e, d_R, m', [(3, 1, 4, 1), (3, 1, 2, 5), (5, 2, 26, 3), (2, 1, 3, 1)])
def test_herbrand_function_is_continuous(p, e, d_R, m):
    prof = profile(p, e, d_R, m)
    eps = Rational(1, 10 ** 6)
    assert herbrand(p, e, d_R, m, 0) == 0
    for b, slope in zip(prof.breakpoints, prof.slopes[1:]):
        assert prof.psi(b + eps) == prof.psi(b) + slope * eps
    assert p ** e * prof.max_jump == swan(p, e, d_R, m)


def test_ramification_json():
    doc = profile(3, 1, 4, 1).to_json()
    assert doc['jumps'] == [{'num': -1, 'den': 1}, {'num': 0, 'den': 1},
                            {'num': 1, 'den': 4}, {'num': 1, 'den': 3}]
    assert [level['group'] for level in doc['filtration']] == ['G', 'Gal(N/F_r)', 'Gal(N/T)', 'Gal(N/M)', '1']
    assert doc['psi']['slopes'] == [1, 4, 36, 108]


def test_frobenius_curve_is_primitive(x3, limits):
    verdict = primitivity(x3, 1, limits, oracle=True)
    assert verdict.kind == 'primitive'
    assert verdict.e_r_prime is True
    assert verdict.oracle is True
    assert verdict.to_json()['witness'] is None


def test_small_d_is_unramified_unstable(x3, limits):
    verdict = primitivity(x3, 2, limits)
    assert verdict.kind == 'primitive_unramified_unstable'
    assert verdict.unramified_degree == 2


def test_imprimitive_case_carries_induction_data(x3_over_f9, limits):
    verdict = primitivity(x3_over_f9, 2, limits)
    assert verdict.kind == 'imprimitive'
    doc = verdict.to_json()
    assert doc['routes'] == {'anisotropy': False, 'decomposition': False, 'quotient': False}
    assert doc['induction_data']['e_prime'] == 0
    assert doc['induction_data']['F_prime_degree'] == 3
    assert doc['decomposition'] is not None


def test_characteristic_two(limits):
    R = AdditivePoly.monomial(field_create(2, 1), 1)
    verdict = primitivity(R, 1, limits)
    assert verdict.kind == 'primitive'
    assert verdict.e_r_prime is False


def test_full_report_layout(limits):
    with open(SCHEMA, encoding='utf-8') as fh:
        schema = json.load(fh)
    doc = full_report(3, 1, ['1'], 1, e=1, limits=limits)
    assert set(schema['required']) <= set(doc)
    assert set(schema['properties']['input']['required']) <= set(doc['input'])
    assert doc['d_R'] == 4 and doc['d_Rm'] == 4 and doc['swan'] == 1
    assert doc['degree'] == 3
    assert doc['valuations']['gamma_Rm'] == {'num': -1, 'den': 27}
    assert doc['groups']['H_R'] == 27
    assert doc['symplectic']['dim'] == 2
    assert doc['verdict'] == 'primitive'
    assert doc['root_system']['type'] == 'A'
    assert doc['root_system']['matches_VR'] is True
    assert doc['curve'] is None


def test_full_report_with_curve_and_oracle(limits):
    options = ReportOptions(curve=True, oracle=True)
    doc = full_report(3, 1, '0;1', 1, options=options, limits=limits)
    assert doc['curve']['genus'] == 3
    assert doc['curve']['counts'][0] == 3
    assert doc['curve']['supersingular']
    assert doc['group_analysis']['is_extra_special']


def test_full_report_validation(limits):
    with pytest.raises(ValidationError):
        full_report(3, 1, ['1'], 3, e=1, limits=limits)
    with pytest.raises(ValidationError):
        full_report(2, 1, ['1'], 1, e=0, limits=limits)
    with pytest.raises(ValidationError):
        full_report(3, 1, ['1', '0'], 1, limits=limits)


def test_scan_over_f3(limits):
    result = scan(3, 1, 1, [1, 2, 3], limits)
    assert result['polynomials'] == 6
    assert result['skipped_m'] == [3]
    assert set(result['by_m']) == {'1', '2'}
    for tally in result['by_m'].values():
        assert sum(tally[kind] for kind in ('primitive', 'imprimitive', 'primitive_unramified_unstable')) == 6
    assert result['routes_agree']


def check_routes(R, m, limits):
    """Run every route on (R, m); imprimitive verdicts must carry a verified morphism."""
    verdict = primitivity(R, m, limits, oracle=True)
    if verdict.oracle is not None:
        assert verdict.oracle == verdict.anisotropy.anisotropic
    assert verdict.anisotropy.anisotropic == (verdict.decomposition is None)
    if verdict.kind == 'imprimitive':
        data = verdict.induction
        assert verify_morphism(R, data.R1, data.r, data.delta, m) == (True, [])
    return verdict


@pytest.mark.parametrize('m', [1, 2, 4])
def test_routes_agree_on_every_linear_r_over_f3(f3, m, limits):
    for a0, a1 in itertools.product(range(3), range(1, 3)):
        R = AdditivePoly.from_values(f3, [a0, a1])
        check_routes(R, m, limits)
    with pytest.raises(ValidationError):
        primitivity(AdditivePoly.monomial(f3, 1), 3, limits)


def test_routes_agree_on_sampled_quadratic_r(rng, limits):
    checked = 0
    for _ in range(60):
        if checked == 20:
            break
        F = field_create(3, int(rng.integers(1, 3)))
        coeffs = [F.random(rng), F.random(rng), F.random(rng, nonzero=True)]
        m = int(rng.choice([1, 2, 4, 5, 7]))
        try:
            check_routes(AdditivePoly(F, tuple(coeffs)), m, limits)
        except GuardExceeded:
            continue
        checked += 1
    assert checked == 20


@pytest.mark.parametrize('e, f, m', [(1, 1, 1), (1, 1, 5), (1, 1, 7), (1, 2, 1), (1, 2, 5), (1, 2, 7),
                                     (2, 1, 1), (2, 1, 7), (2, 2, 1), (2, 2, 7)])
def test_monomials_prime_to_m_are_primitive(e, f, m, limits):
    R = AdditivePoly.monomial(field_create(3, f), e)
    assert np.gcd(3 ** e + 1, m) == 1
    verdict = primitivity(R, m, limits, oracle=True)
    assert verdict.kind == 'primitive'
    assert verdict.anisotropy.anisotropic
    assert verdict.decomposition is None
    assert verdict.oracle is True
