"""Shared fixtures of the test suite."""
import json

import pytest

from teich_window.fn_space import FNMap
from teich_window.pants_graph import build_template, window

@pytest.fixture
def flute():
    return build_template('flute')

@pytest.fixture
def handle():
    return build_template('flute-handle')

@pytest.fixture
def genus2():
    return build_template('genus2')

@pytest.fixture
def flute_window(flute):
    """Three pants of the flute with both chain curves interior."""
    return window(flute, 1, 1)

@pytest.fixture
def unit_flute(flute):
    return FNMap(flute)

@pytest.fixture
def surface_file(tmp_path):
    """Write a surface document and return its path."""
    def writer(document, name='surface.json'):
        path = tmp_path / name
        path.write_text(json.dumps(document), encoding='utf-8')
        return path
    return writer
