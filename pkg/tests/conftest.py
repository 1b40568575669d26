import os
import sys

import numpy as np
import pytest
from click.testing import CliRunner

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from app import create_app
from app.models.additive import AdditivePoly
from app.models.field import field_create
from app.utils.limits import Limits
from config import TestingConfig


@pytest.fixture
def app():
    """Create an application instance with the testing configuration."""
    app = create_app(TestingConfig)
    yield app


@pytest.fixture
def limits(app):
    """Size guards resolved from the testing configuration."""
    return app.limits


@pytest.fixture
def parallel_limits(limits):
    """The same guards with two worker threads."""
    return Limits(limits.field_bits, limits.group_enum, limits.count_enum, limits.oracle_dim, workers=2)


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def rng():
    """Seeded generator so random cases are reproducible."""
    return np.random.default_rng(20240611)


@pytest.fixture
def f3():
    return field_create(3, 1)


@pytest.fixture
def f9():
    return field_create(3, 2)


@pytest.fixture
def f5():
    return field_create(5, 1)


@pytest.fixture
def x3(f3):
    """R = x^3 over F_3."""
    return AdditivePoly.monomial(f3, 1)


@pytest.fixture
def x3_over_f9(f9):
    return AdditivePoly.monomial(f9, 1)
