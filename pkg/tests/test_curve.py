import itertools

import numpy as np
import pytest

from app.exceptions import TheoremViolation, ValidationError
from app.models.additive import AdditivePoly
from app.models.curve import (CountSeries, ZetaNumerator, check_supersingular,
                              count_series, curve_summary, galois_conjugate,
                              genus, point_count, predicted_counts,
                              psi_l_polynomial, psi_l_polynomials, weil_check,
                              zeta_numerator)
from app.models.field import field_create
from app.utils.counters import (FieldScanCounter, QuadraticFormCounter,
                                count_pairs, cross_check, cyclic_convolve,
                                select_counter, square_distribution)
from app.utils.cyclotomic import CyclotomicRing, series_product
from app.utils.linalg import congruence_diagonal


def test_frobenius_curve_counts(x3, limits):
    assert genus(x3) == 3
    assert point_count(x3, 1, limits) == 3
    series = count_series(x3, 4, limits)
    assert all(n % 3 == 0 for n in series.counts)


def test_genus_rejects_the_excluded_case():
    with pytest.raises(ValidationError):
        genus(AdditivePoly.identity(field_create(2, 1)))


def test_backends_agree(rng, x3, f9, limits):
    R = AdditivePoly(f9, (f9.random(rng), f9.random(rng, nonzero=True)))
    for poly in (x3, R, AdditivePoly.from_values(f9, [1, 2])):
        checks = cross_check(poly, range(1, 4), limits)
        assert set(checks) == {1, 2, 3}
        assert all(len(set(values.values())) == 1 for values in checks.values())
    assert 'pairs' in cross_check(x3, [2], limits)[2]


def test_pair_count_matches_the_trace_count(x3, limits):
    for k in (1, 2, 3):
        assert count_pairs(x3, k, limits) == point_count(x3, k, limits)


def test_scan_is_independent_of_workers(limits, parallel_limits):
    R = AdditivePoly.monomial(field_create(2, 1), 1)
    serial = FieldScanCounter(R, limits).distribution(17)
    parallel = FieldScanCounter(R, parallel_limits).distribution(17)
    assert np.array_equal(serial, parallel)
    assert int(serial.sum()) == 2 ** 17


def test_select_counter(x3, limits):
    assert select_counter(x3, limits).name == 'quadratic'
    assert select_counter(x3, limits, 'scan').name == 'scan'
    assert select_counter(AdditivePoly.monomial(field_create(2, 1), 1), limits).name == 'scan'
    with pytest.raises(ValidationError):
        select_counter(x3, limits, 'magic')
    with pytest.raises(ValidationError):
        QuadraticFormCounter(AdditivePoly.monomial(field_create(2, 1), 1), limits)


def test_congruence_diagonal_preserves_value_counts(rng):
    p, n = 5, 3
    for _ in range(5):
        a = rng.integers(0, p, (n, n))
        sym = (a + a.T) % p
        brute = np.zeros(p, dtype=np.int64)
        for v in itertools.product(range(p), repeat=n):
            v = np.array(v)
            brute[int(v @ sym @ v) % p] += 1
        dist = np.zeros(p, dtype=np.int64)
        dist[0] = 1
        for lam in congruence_diagonal(p, sym):
            dist = cyclic_convolve(dist, square_distribution(p, lam))
        assert np.array_equal(dist, brute)


def test_congruence_diagonal_of_a_hyperbolic_plane():
    assert congruence_diagonal(3, np.array([[0, 1], [1, 0]])) == [2, 1]
    with pytest.raises(ValueError):
        congruence_diagonal(2, np.eye(2, dtype=np.int64))


@pytest.mark.parametrize('p, f', [(3, 1), (3, 2), (5, 1)])
def test_zeta_numerator_of_monomials(p, f, limits):
    R = AdditivePoly.monomial(field_create(p, f), 1)
    P, series = zeta_numerator(R, limits)
    g = genus(R)
    assert P.degree == 2 * g
    assert P.coeffs[0] == 1
    assert P.symmetric()
    assert predicted_counts(P, g) == list(series.counts)
    assert weil_check(P)
    assert check_supersingular(P)
    factors = psi_l_polynomials(R, P, limits)
    assert [L.degree for L in factors] == [p] * (p - 1)
    ring = CyclotomicRing(p)
    product = [ring.one()]
    for L in factors:
        product = series_product(ring, product, L.coeffs)
    assert all(ring.is_rational(x) for x in product)
    assert [int(ring.rational_value(x)) for x in product] == list(P.coeffs)


def test_counts_beyond_the_genus_are_checked(x3, limits):
    P, series = zeta_numerator(x3, limits, max_k=5)
    assert len(series) == 5
    assert predicted_counts(P, 5) == list(series.counts)


def test_supersingularity_controls():
    assert not check_supersingular(ZetaNumerator(3, 1, (1, -1, 3)))
    assert check_supersingular(ZetaNumerator(3, 1, (1, -3, 3)))
    assert check_supersingular(ZetaNumerator(2, 1, (1, 0, 2)))


def test_weil_check_rejects_real_roots():
    assert weil_check(ZetaNumerator(3, 1, (1, -3, 3)))
    assert not weil_check(ZetaNumerator(3, 1, (1, 5, 3)))


def test_count_series_needs_multiples_of_p():
    with pytest.raises(TheoremViolation):
        CountSeries(3, 3, (3, 10))
    assert CountSeries(3, 3, (3, 9))[2] == 9


def test_psi_parts_of_the_frobenius_curve(x3, limits):
    P, _ = zeta_numerator(x3, limits)
    factors = psi_l_polynomials(x3, P, limits)
    assert [L.degree for L in factors] == [3, 3]
    ring = CyclotomicRing(3)
    conjugate = galois_conjugate(factors[0], 2)
    assert [ring.vector(x) for x in conjugate] == [list(v) for v in factors[1].vectors]


def test_psi_part_needs_a_unit(x3, limits):
    with pytest.raises(ValidationError):
        psi_l_polynomial(x3, 3, limits)


def test_curve_summary_over_f2(limits):
    R = AdditivePoly.monomial(field_create(2, 1), 1)
    summary = curve_summary(R, limits, oracle=True)
    doc = summary.to_json()
    assert doc['genus'] == 1
    assert doc['counts'] == [2]
    assert doc['zeta_numerator'] == [1, 0, 2]
    assert doc['supersingular']
    assert doc['psi_L_degrees'] == [2]
    assert doc['count_backend'] == 'scan'
    assert doc['count_cross_check']['1']['pairs'] == 2


def test_curve_summary_backends_agree(x3, limits):
    quadratic = curve_summary(x3, limits, backend='quadratic').to_json()
    scan = curve_summary(x3, limits, backend='scan').to_json()
    assert quadratic.pop('count_backend') == 'quadratic'
    assert scan.pop('count_backend') == 'scan'
    assert quadratic == scan
