"""Tests of decomposition templates and windows."""
import json

from hypothesis import given, settings
import hypothesis.strategies as st
import pytest

from teich_window.exceptions import (CurveLookupError, StructuralError,
                                     UsageError)
from teich_window.pants_graph import (FluteTemplate, Side, build_template,
                                      check_degrees, load_template,
                                      template_from_json, window)

@pytest.mark.parametrize('kind', ['flute', 'flute-handle', 'ladder',
                                  'binary-tree', 'genus2'])
def test_degrees_and_legs_agree(kind):
    template = build_template(kind)
    check_degrees(template, 10_000)
    for curve in template.curve_ids(10_000):
        for att in template.adjacency(curve):
            leg = template.pants(att.pants).legs[att.leg]
            assert leg.curve == curve
            assert leg.side is att.side

def test_flute_layout(flute):
    assert flute.pants(0).legs[2].curve == 2
    assert [leg.curve for leg in flute.pants(3).legs] == [6, 8, 7]
    assert FluteTemplate.chain_curve(4) == 10
    assert flute.is_boundary(0) and flute.is_boundary(1)
    assert flute.is_boundary(9)
    assert not flute.is_boundary(10)
    assert flute.neighbours(3) == [(2, 6), (4, 8)]
    assert flute.pants(3).leg_index(8, Side.A) == 1
    with pytest.raises(CurveLookupError):
        flute.pants(3).leg_index(8, Side.B)

def test_flute_handle(handle):
    assert not handle.has_curve(1)
    assert not handle.is_boundary(0)
    assert handle.pants(0).self_glued() == (0, 1, 2)
    assert handle.pants(0).partner(0) == 2
    assert handle.pants(0).partner(1) == 2
    assert handle.neighbours(0) == [(1, 2)]

def test_window_of_flute(flute):
    win = window(flute, 5, 2)
    assert win.pants == frozenset({3, 4, 5, 6, 7})
    assert win.interior == frozenset({8, 10, 12, 14})
    assert win.frontier == frozenset({6, 16, 7, 9, 11, 13, 15})
    assert win.edges() == [(3, 4, 8), (4, 5, 10), (5, 6, 12), (6, 7, 14)]
    graph = win.dual_graph()
    assert sorted(graph.edges(keys=True)) == win.edges()
    assert sorted(graph.nodes) == [3, 4, 5, 6, 7]

def test_window_radius_zero_keeps_self_gluing(handle):
    win = window(handle, 0, 0)
    assert win.pants == frozenset({0})
    assert win.interior == frozenset({0})
    assert win.frontier == frozenset({2})

def test_ladder_double_edges():
    ladder = build_template('ladder')
    win = window(ladder, 0, 1)
    assert win.pants == frozenset({0, 1})
    assert win.interior == frozenset({1, 2})
    assert [curve for _, _, curve in win.edges()] == [1, 2]
    assert win.dual_graph().number_of_edges(0, 1) == 2

@given(st.integers(0, 200), st.integers(0, 3))
@settings(deadline=None)
def test_window_partition(center, radius):
    template = build_template('binary-tree')
    win = window(template, center, radius)
    assert not win.interior & win.frontier
    legs = {leg.curve for pid in win.pants
            for leg in template.pants(pid).legs}
    assert legs == win.interior | win.frontier
    for curve in win.interior:
        assert all(att.pants in win.pants
                   for att in template.adjacency(curve))

@given(st.sampled_from(['flute', 'ladder', 'binary-tree']),
       st.integers(0, 100), st.integers(0, 3))
@settings(deadline=None)
def test_windows_grow_with_radius(kind, center, radius):
    template = build_template(kind)
    small = window(template, center, radius)
    large = window(template, center, radius + 1)
    assert small.pants <= large.pants
    assert small.interior <= large.interior

def test_window_errors(flute):
    with pytest.raises(UsageError):
        window(flute, 0, -1)
    with pytest.raises(CurveLookupError):
        window(build_template('genus2'), 5, 1)

def test_lookup_errors(flute, handle):
    with pytest.raises(CurveLookupError):
        flute.pants(-1)
    with pytest.raises(CurveLookupError):
        handle.adjacency(1)
    with pytest.raises(UsageError):
        build_template('torus')

def test_custom_template_validation():
    with pytest.raises(StructuralError, match='degree 3'):
        template_from_json({'pants': [
            {'id': 0, 'legs': [[0, 'A'], [0, 'B'], [0, 'A']]}]})
    with pytest.raises(StructuralError, match='twice on side'):
        template_from_json({'pants': [
            {'id': 0, 'legs': [[0, 'A'], [1, 'A'], [2, 'A']]},
            {'id': 1, 'legs': [[0, 'A'], [1, 'B'], [2, 'B']]}]})
    with pytest.raises(StructuralError, match='disconnected'):
        template_from_json({'pants': [
            {'id': 0, 'legs': [[0, 'A'], [1, 'A'], [2, 'A']]},
            {'id': 1, 'legs': [[3, 'A'], [4, 'A'], [5, 'A']]}]})
    with pytest.raises(StructuralError, match='Dangling'):
        template_from_json({'curves': [0, 1],
                            'pants': [{'id': 0, 'legs': [[0, 'A'], [1, 'A'],
                                                         [2, 'A']]}]})

def test_template_document_round_trip(tmp_path, genus2):
    path = tmp_path / 'genus2.json'
    path.write_text(json.dumps(genus2.to_json()), encoding='utf-8')
    loaded = load_template(str(path))
    assert loaded == genus2
    assert loaded.pants(1).legs[0].side is Side.B
    assert load_template('builtin:flute') == FluteTemplate()
    assert load_template('builtin:flute') != FluteTemplate(handle=True)

def test_unpaired_legs_need_a_boundary_declaration():
    legs = [[0, 'A'], [1, 'A'], [2, 'A']]
    with pytest.raises(StructuralError, match='Dangling leg.*curve 0'):
        template_from_json({'pants': [{'id': 0, 'legs': legs}]})
    with pytest.raises(StructuralError, match='Dangling leg.*curve 2'):
        template_from_json({'boundary': [0, 1],
                            'pants': [{'id': 0, 'legs': legs}]})
    with pytest.raises(StructuralError, match='Boundary curve 5'):
        template_from_json({'boundary': [0, 1, 2, 5],
                            'pants': [{'id': 0, 'legs': legs}]})
    pants = template_from_json({'boundary': [0, 1, 2],
                                'pants': [{'id': 0, 'legs': legs}]})
    assert all(pants.is_boundary(curve) for curve in range(3))
    assert template_from_json(pants.params) == pants
    assert template_from_json({'curves': [0, 1, 2],
                                'pants': [{'id': 0, 'legs': legs}]}) == pants
