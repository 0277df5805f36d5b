"""Shared fixtures: fields, small truncations and bundled objects"""

import pytest

from src.models.exactlin import Field
from src.models.simplicial import Truncation
from src.services.fixtures import get_fixture


@pytest.fixture
def qq():
    return Field(0)


@pytest.fixture
def f2():
    return Field(2)


@pytest.fixture(params=['q', 'fp:2'], ids=['QQ', 'F2'])
def field(request):
    return Field.parse(request.param)


@pytest.fixture
def small():
    """(N, W) = (2, 2): every block is a handful of trees"""
    return Truncation(2, 2)


@pytest.fixture
def K1(field, small):
    return get_fixture('K1', field, small)


@pytest.fixture
def free1(field, small):
    return get_fixture('free1', field, small)


@pytest.fixture
def build():
    """Build a fixture by name over a field and truncation"""
    def _build(name, field=Field(0), N=2, W=2):
        return get_fixture(name, field, Truncation(N, W))
    return _build
