"""Tests of Fenchel-Nielsen coordinates and their distance."""
import math

from hypothesis import given, settings
import hypothesis.strategies as st
import numpy as np
import pytest

from teich_window.exceptions import (CurveLookupError, NonCauchyError,
                                     NumericError, UsageError)
from teich_window.fn_space import (TWO_PI, FNMap, LengthTwist, Profile,
                                   apply_arclength_twist, apply_dehn_twists,
                                   cauchy_limit, embed_linf, fn_distance,
                                   shiga_check, shiga_diverging)
from teich_window.pants_graph import build_template

@st.composite
def flute_maps(draw, curves=range(2, 12)):
    """Tabulated flute maps with random lengths and twists."""
    seed = draw(st.integers(min_value=0, max_value=2**32 - 1))
    rng = np.random.default_rng(seed)
    table = {c: (float(np.exp(rng.uniform(-3, 2))),
                 float(rng.uniform(-4, 4))) for c in curves}
    return FNMap.tabulated(build_template('flute'), table)

def test_profiles():
    assert Profile.parse('exp-neg:2')(3) == pytest.approx(math.exp(-6))
    assert Profile.parse('exp-neg-square')(2) == pytest.approx(math.exp(-4))
    assert Profile.parse(0.5)(10) == 0.5
    assert Profile.parse('exp-neg:2') == Profile.parse('exp-neg:2.0')
    with pytest.raises(UsageError):
        Profile.parse('const')
    with pytest.raises(UsageError):
        Profile.parse('sinh:1')

def test_lookup_and_boundary(flute):
    H = FNMap(flute, Profile.parse('exp-neg:1'), Profile.parse('const:0.5'))
    assert H.length(4) == pytest.approx(math.exp(-4))
    assert H.twist(1) is None
    assert H.twist(4) == 0.5
    assert H.arclength_twist(4) == pytest.approx(math.exp(-4) * 0.5 / TWO_PI)

def test_invalid_coordinates(flute):
    with pytest.raises(NumericError):
        LengthTwist(0.0, 0.0)
    with pytest.raises(NumericError):
        LengthTwist(1.0, math.nan)
    with pytest.raises(UsageError):
        FNMap(flute, overrides=((1, LengthTwist(1.0, 0.3)),))
    H = FNMap(flute, Profile.parse('exp:1'))
    with pytest.raises(NumericError, match='curve 800'):
        H.length(800)

def test_from_json(flute):
    H = FNMap.from_json({'default': {'l': 'const:2'},
                         'overrides': {'4': {'l': 0.5, 'theta': 1.0},
                                       '3': {'l': 3}},
                         'dehn': {'6': 2}}, flute)
    assert H.length(4) == 0.5 and H.twist(4) == 1.0
    assert H.length(3) == 3.0 and H.twist(3) is None
    assert H.twist(6) == pytest.approx(2 * TWO_PI)
    assert FNMap.from_json(H.to_json(), flute) == H
    with pytest.raises(CurveLookupError):
        FNMap.from_json({'overrides': {'1': {'l': 1}}},
                        build_template('flute-handle'))
    with pytest.raises(UsageError):
        FNMap.from_json({'overrides': {'1': {'l': 1, 'theta': 0}}}, flute)

def test_dehn_twists_are_exact(unit_flute):
    twisted = apply_dehn_twists(unit_flute, {4: 3, 6: -1})
    assert twisted.twist(4) == pytest.approx(3 * TWO_PI)
    assert twisted.dehn_order(6) == -1
    assert apply_dehn_twists(twisted, {4: -3, 6: 1}) == unit_flute
    with pytest.raises(UsageError):
        apply_dehn_twists(unit_flute, {1: 1})

def test_arclength_twist(unit_flute):
    H = apply_arclength_twist(unit_flute, 4, 0.25)
    assert H.arclength_twist(4) == pytest.approx(0.25)
    assert apply_arclength_twist(H, 4, -0.25).arclength_twist(4) == \
        pytest.approx(0.0, abs=1e-15)

def test_embedding_and_distance(flute):
    A = FNMap.tabulated(flute, {4: (1.0, 0.0), 6: (2.0, 0.0)})
    B = FNMap.tabulated(flute, {4: (1.0, 0.5), 6: (1.0, 0.0)})
    assert embed_linf(A, [1, 4]) == [(0.0,), (0.0, 0.0)]
    d = fn_distance(A, B, range(10))
    assert d.value == pytest.approx(math.log(2))
    assert d.exact
    partial = fn_distance(A, B, range(5))
    assert not partial.exact
    assert partial.value == pytest.approx(0.5)
    with pytest.raises(UsageError):
        fn_distance(A, FNMap(build_template('ladder')), range(3))
    with pytest.raises(UsageError):
        fn_distance(A, B, [])

def test_scan_skips_missing_curves(handle):
    A = FNMap(handle)
    B = FNMap.tabulated(handle, {0: (2.0, 0.0)})
    assert fn_distance(A, B, range(3)).value == pytest.approx(math.log(2))

@given(flute_maps(), flute_maps(), flute_maps())
@settings(deadline=None, max_examples=1000)
def test_fn_metric_axioms(A, B, C):
    scan = range(14)
    ab = fn_distance(A, B, scan).value
    assert fn_distance(A, A, scan).value == 0
    assert ab == fn_distance(B, A, scan).value
    ac = fn_distance(A, C, scan).value
    bc = fn_distance(B, C, scan).value
    assert ac <= ab + bc + 1e-12

@given(flute_maps(), st.integers(3, 12))
@settings(deadline=None, max_examples=50)
def test_fn_distance_is_sup_norm(A, n):
    B = apply_arclength_twist(A, 6, 0.5)
    scan = range(n)
    expected = max((abs(x - y) for pa, pb in zip(embed_linf(A, scan),
                                                 embed_linf(B, scan))
                    for x, y in zip(pa, pb)), default=0.0)
    assert fn_distance(A, B, scan).value == expected

@given(flute_maps(), flute_maps(), st.sampled_from([2, 4, 6, 8, 10]),
       st.floats(-5, 5))
@settings(deadline=None, max_examples=300)
def test_fn_distance_ignores_shared_twists(A, B, i, s):
    scan = range(14)
    before = fn_distance(A, B, scan).value
    after = fn_distance(apply_arclength_twist(A, i, s),
                        apply_arclength_twist(B, i, s), scan).value
    assert after == pytest.approx(before, rel=1e-9, abs=1e-9)

def test_named_profiles_compare_by_callable(flute):
    first = Profile.named('lengths', lambda i: 1.0)
    second = Profile.named('lengths', lambda i: 2.0)
    assert first == first
    assert first != second
    assert FNMap(flute, first) != FNMap(flute, second)
    assert hash(Profile.parse('const:1')) == hash(Profile.parse(1))

def test_shiga(flute):
    H = FNMap(flute, Profile.parse('inv-shift:1'))
    report = shiga_check(H, 20)
    assert report.holds_up_to == 20
    assert report.witness_max == pytest.approx(2.0)
    assert report.m_estimate == pytest.approx(2.0)
    assert not shiga_diverging(H, 20)
    shrinking = FNMap(flute, Profile.parse('exp-neg:1'))
    assert shiga_diverging(shrinking, 20)
    overflow = shiga_check(FNMap(flute, Profile.parse('exp:10')), 100)
    assert overflow.truncated
    assert overflow.m_estimate == math.inf
    with pytest.raises(UsageError):
        shiga_check(H, 0)

def test_cauchy_limit(flute):
    sequence = [FNMap.tabulated(flute, {4: (1.0, 2.0 * (1 - 2.0 ** -n))})
                for n in range(1, 30)]
    result = cauchy_limit(sequence, range(8), tol=1e-6, log=lambda *_: None)
    assert result.limit.twist(4) == pytest.approx(2.0, abs=1e-6)
    assert not result.non_converged

def test_cauchy_limit_rejects_growth(flute):
    sequence = [FNMap.tabulated(flute, {4: (1.0, float(n * n))})
                for n in range(1, 8)]
    with pytest.raises(NonCauchyError) as info:
        cauchy_limit(sequence, range(8), log=lambda *_: None)
    assert info.value.indices == (4,)
    with pytest.raises(UsageError):
        cauchy_limit(sequence[:2], range(8))
