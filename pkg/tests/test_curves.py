"""Tests of curve families, enumeration and twist recovery."""
import json
import math

import pytest

from teich_window.curves import (Curve, Strand, chain_curve,
                                 curve_from_json, dehn_twist_curve,
                                 dual_curve, enumerate_candidates,
                                 intersection_with_pants_curve, pants_curve,
                                 recover_twist, twist_forward_surface,
                                 twisted_dual)
from teich_window.exceptions import InconsistentObservationsError, UsageError
from teich_window.hyp_kernel import curve_length
from teich_window.pants_graph import build_template, window

def quiet(*args):
    pass

def test_dual_of_flute_curve(flute):
    beta = dual_curve(flute, 4)
    assert beta.strands == (Strand(1, 1, 1), Strand(2, 0, 0))
    assert intersection_with_pants_curve(beta, 4) == 2
    assert intersection_with_pants_curve(beta, 6) == 0
    with pytest.raises(UsageError):
        dual_curve(flute, 1)

def test_dual_of_self_glued_curve(handle):
    beta = dual_curve(handle, 0)
    assert beta.strands == (Strand(0, 0, 1),)
    assert intersection_with_pants_curve(beta, 0) == 1

def test_dehn_twist_of_curves(flute):
    beta = twisted_dual(flute, 4, 2)
    assert beta.family == 'twisted-dual'
    assert [c.winding for c in beta.crossings] == [2, 2]
    assert dehn_twist_curve(beta, 4, -2) == dual_curve(flute, 4)
    assert dehn_twist_curve(beta, 6, 5) is beta
    assert dehn_twist_curve(pants_curve(4), 4, 1) == pants_curve(4)

def test_chain_curve(flute):
    chain = chain_curve(flute, [1, 2, 3], windings=[1, 0])
    assert [s.pants for s in chain.strands] == [1, 2, 3, 2]
    assert [(c.curve, c.winding) for c in chain.crossings] == \
        [(4, 1), (6, 0), (6, 0), (4, 1)]
    assert chain.strands[0] == Strand(1, 1, 1)
    assert chain.strands[1] == Strand(2, 0, 1)
    assert chain.strands[3] == Strand(2, 1, 0)
    with pytest.raises(UsageError):
        chain_curve(flute, [1])
    with pytest.raises(UsageError):
        chain_curve(flute, [1, 3])
    with pytest.raises(UsageError, match='share 2 curves'):
        chain_curve(build_template('ladder'), [0, 1])

def test_curve_validation():
    with pytest.raises(UsageError):
        Curve('figure-eight')
    with pytest.raises(UsageError):
        Curve('chain', (Strand(0, 0, 1),), ())

def test_candidates_of_single_self_glued_pants(handle):
    family = enumerate_candidates(window(handle, 0, 0), 3, 2)
    assert len(family) == 6
    assert family[0] == pants_curve(0)
    assert {c.family for c in family[1:]} == {'dual', 'twisted-dual'}

def test_candidate_counts(flute):
    win = window(flute, 2, 2)
    # four interior curves, one path of each length three and four
    family = enumerate_candidates(win, 4, 1)
    pants_curves = [c for c in family if c.family == 'pants-curve']
    duals = [c for c in family if c.family in ('dual', 'twisted-dual')]
    chains = [c for c in family if c.family == 'chain']
    assert len(pants_curves) == 4
    assert len(duals) == 12
    assert len(chains) == 3 * 3 ** 2 + 2 * 3 ** 3
    assert len({c.key() for c in family}) == len(family)

def test_candidates_are_sorted_and_deterministic(flute):
    win = window(flute, 2, 2)
    family = enumerate_candidates(win, 3, 2)
    assert family == sorted(family, key=Curve.sort_key)
    assert [c.key() for c in family] == \
        [c.key() for c in enumerate_candidates(win, 3, 2)]
    with pytest.raises(UsageError):
        enumerate_candidates(win, -1, 0)

def test_curve_documents(flute):
    for curve in enumerate_candidates(window(flute, 2, 1), 3, 1):
        document = json.loads(json.dumps(curve.to_json()))
        assert curve_from_json(document, flute) == curve
    with pytest.raises(UsageError):
        curve_from_json({'family': 'spiral'}, flute)

def _observations(win, i, theta):
    lengths = {c: 1.0 for c in win.curves}
    H = twist_forward_surface(win, lengths, i, theta)
    template = win.template
    return (lengths, curve_length(win, H, dual_curve(template, i)),
            curve_length(win, H, twisted_dual(template, i, 1)))

@pytest.mark.parametrize('step', range(-24, 25))
def test_twist_recovery_round_trip(flute_window, step):
    theta = step * math.pi / 8
    lengths, beta, beta_prime = _observations(flute_window, 4, theta)
    result = recover_twist(flute_window, 4, lengths, beta, beta_prime,
                           log=quiet)
    assert result.theta == pytest.approx(theta, abs=1e-6)
    assert result.sign_resolved
    assert result.flat == (step == 0)

def test_twist_recovery_on_self_glued_pants(handle):
    win = window(handle, 0, 1)
    lengths, beta, beta_prime = _observations(win, 0, -1.3)
    result = recover_twist(win, 0, lengths, beta, beta_prime, log=quiet)
    assert result.theta == pytest.approx(-1.3, abs=1e-6)

def test_twist_recovery_without_sign(flute_window):
    lengths, beta, _ = _observations(flute_window, 4, -2.0)
    result = recover_twist(flute_window, 4, lengths, beta, log=quiet)
    assert result.theta == pytest.approx(2.0, abs=1e-6)
    assert not result.sign_resolved

def test_twist_recovery_rejects_short_dual(flute_window):
    lengths, beta, beta_prime = _observations(flute_window, 4, 0.0)
    with pytest.raises(InconsistentObservationsError):
        recover_twist(flute_window, 4, lengths, 0.5 * beta, log=quiet)
    _, beta, _ = _observations(flute_window, 4, 1.0)
    with pytest.raises(InconsistentObservationsError):
        recover_twist(flute_window, 4, lengths, beta, beta_prime + 1.0,
                      log=quiet)

def test_twist_recovery_needs_all_lengths(flute_window):
    with pytest.raises(UsageError, match='Missing observed lengths'):
        twist_forward_surface(flute_window, {4: 1.0}, 4, 0.5)
    with pytest.raises(UsageError):
        recover_twist(flute_window, 1, {}, 1.0, log=quiet)
