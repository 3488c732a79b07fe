import os

import pytest

os.environ.setdefault('FREEPROD_ENV', 'testing')

from freeprod import create_app  # noqa: E402
from freeprod.config import TestingConfig  # noqa: E402
from freeprod.models.group import Presentation  # noqa: E402


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: large grids and long Monte Carlo runs")


@pytest.fixture
def c2c2():
    return Presentation.parse('C2*C2')


@pytest.fixture
def c2c3():
    return Presentation.parse('C2*C3')


@pytest.fixture
def c2c4():
    return Presentation.parse('C2*C4')


@pytest.fixture
def c3c4():
    return Presentation.parse('C3*C4')


@pytest.fixture
def f2():
    return Presentation.parse('F2')


@pytest.fixture
def app():
    return create_app(TestingConfig)


@pytest.fixture
def client(app):
    return app.test_client()
