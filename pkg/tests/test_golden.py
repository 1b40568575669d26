import json
import os

import pytest

from app.models.report import ReportOptions, full_report
from app.utils.serialize import InputSpec, dumps

GOLDEN_NAMES = ['x3_f1_m1', 'x3_f2_m2', 'x_plus_x3_f1_m1', 'x5_f1_m1', 'x2_f1_m1', 'x9_f1_m1']


def load(app, filename):
    with open(os.path.join(app.config['GOLDEN_DIR'], filename), encoding='utf-8') as fh:
        return json.load(fh)


@pytest.fixture
def golden_inputs(app):
    """Canonical inputs pinned under tests/golden/."""
    return load(app, 'inputs.json')


@pytest.fixture
def golden_expected(app):
    """Hand-checked invariants of every canonical input."""
    return load(app, 'expected.json')


def report(data, limits):
    spec = InputSpec.from_mapping(data)
    options = ReportOptions(curve=spec.curve, max_k=spec.max_k, oracle=spec.oracle)
    return full_report(spec.p, spec.f, list(spec.R), spec.m, e=spec.e, options=options, limits=limits)


def render(data, limits) -> str:
    return dumps(report(data, limits)) + '\n'


def test_reports_are_byte_identical(golden_inputs, limits, parallel_limits):
    for name, data in sorted(golden_inputs.items()):
        first = render(data, limits)
        assert render(data, limits) == first, name
        assert render(data, parallel_limits) == first, name


def test_every_input_is_pinned(golden_inputs, golden_expected):
    assert sorted(golden_inputs) == sorted(GOLDEN_NAMES)
    assert sorted(golden_expected) == sorted(GOLDEN_NAMES)


@pytest.mark.parametrize('name', GOLDEN_NAMES)
def test_pinned_reports(name, app, golden_inputs, golden_expected):
    expected = golden_expected[name]
    doc = report(golden_inputs[name], app.limits)
    for key in ('degree', 'd_R', 'd_Rm', 'swan', 'verdict'):
        assert doc[key] == expected[key], key
    assert doc['symplectic']['dim'] == expected['dim']
    if 'root_system' in expected:
        assert doc['root_system']['type'] == expected['root_system']
    if 'genus' in expected:
        assert doc['curve']['genus'] == expected['genus']
        assert doc['curve']['counts'][:len(expected['counts'])] == expected['counts']
    # full documents written by scripts/make_golden.py are compared byte for byte
    path = os.path.join(app.config['GOLDEN_DIR'], f'{name}.json')
    if os.path.exists(path):
        with open(path, encoding='utf-8') as fh:
            assert dumps(doc) + '\n' == fh.read()


def test_golden_inputs_are_well_formed(golden_inputs):
    for name, data in golden_inputs.items():
        spec = InputSpec.from_mapping(data)
        assert spec.p in (2, 3, 5), name
        assert spec.m % spec.p != 0, name
