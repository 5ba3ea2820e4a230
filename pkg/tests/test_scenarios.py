"""Tests of the scenario tables."""
import csv
import io
import json
import math

import pytest

from teich_window.exceptions import (InvariantViolation, NonCauchyError,
                                     UsageError)
from teich_window.fn_space import TWO_PI, FNMap, cauchy_limit, fn_distance
from teich_window.pants_graph import FluteTemplate, window
from teich_window.scenarios import (COLUMNS, SCENARIOS, ScenarioRow,
                                    asymptotic_onset, constant_generator,
                                    cumulative_multitwist_generator,
                                    run_completeness_sim,
                                    run_damped_completeness,
                                    run_example_long_curves,
                                    run_example_short_curves,
                                    run_prop_non_inc, run_prop_non_inc2,
                                    short_order, short_twist)

def quiet(*args):
    pass

def _fn_bound(row):
    return 2 * math.pi * math.log(-row.log_eps)

def test_short_twist():
    t, shear, ok = short_twist(2)
    assert t == 6
    assert shear == pytest.approx(6 * math.exp(-2))
    assert ok
    assert [short_order(k) for k in range(1, 7)] == [0, 1, 2, 2, 3, 3]

def test_prop_non_inc_table():
    table = run_prop_non_inc(10, log=quiet)
    assert len(table) == 10
    first = table.rows[0]
    assert first.t == 6
    assert first.d_fn.value == pytest.approx(2 * math.pi * 6 * math.exp(-2))
    for row in table:
        assert 'fn-bound-ok' in row.flags
        assert row.d_fn.value >= row.analytic_bound * (1 - 1e-12)
        assert math.isfinite(row.d_ls_upper)
        assert row.d_ls_lower <= row.d_ls_upper
    bounds = table.column('analytic_bound')
    assert bounds[-1] / bounds[0] >= 2.5
    assert table.column('d_fn') == sorted(table.column('d_fn'))

def test_prop_non_inc_analytic_mode():
    table = run_prop_non_inc(27, log=quiet)
    last = table.rows[-1]
    assert 'analytic-mode' in last.flags
    assert last.to_json()['eps'] == 'exp(-756)'
    assert 'fn-bound-ok' in last.flags
    assert 'analytic-mode' not in table.rows[24].flags
    with pytest.raises(UsageError):
        run_prop_non_inc(0, log=quiet)

def test_prop_non_inc2_table():
    table = run_prop_non_inc2(20, log=quiet)
    for row in table:
        assert row.d_fn.value >= _fn_bound(row) * (1 - 1e-12)
        if row.n >= 3:
            assert row.d_ls_upper <= math.log1p(2 / row.n)
            assert 'ls-bound-ok' in row.flags
    assert table.rows[-1].d_ls_upper < 0.05
    assert table.notes['n_0'] <= 3
    fn_values = table.column('d_fn')
    assert fn_values[-1] > fn_values[0]

def test_example_short_curves():
    table = run_example_short_curves(6, log=quiet)
    uppers = table.column('d_ls_upper')
    assert all(b < a for a, b in zip(uppers[1:], uppers[2:]))
    assert uppers[2] <= 2e-5
    assert uppers[2] == pytest.approx(5.94e-6, rel=1e-2)
    assert table.column('t') == [0, 1, 2, 2, 3, 3]
    tail = [value for m, n, value in table.cauchy if m >= 4 and n >= 4]
    assert max(tail) < 1e-5
    assert table.notes['cauchy_tail_max'] < 1e-5
    assert table.certificate.verdict == 'certified-divergent'
    assert table.certificate.sup_order == 3
    for row in table:
        assert row.d_ls_lower <= row.d_ls_upper
        assert ('lower-trivial' in row.flags) == (row.n >= 4)
    with pytest.raises(UsageError):
        run_example_short_curves(1, log=quiet)

def test_example_long_curves():
    table = run_example_long_curves(6, log=quiet)
    assert all(row.d_ls_upper == math.inf for row in table)
    assert all('unverified-hypothesis' in row.flags for row in table)
    assert 'lower-trivial' not in table.rows[2].flags
    assert 'lower-trivial' in table.rows[3].flags
    assert table.rows[0].d_ls_lower > 0
    assert table.certificate.verdict == 'inapplicable'
    assert table.to_json()['rows'][0]['d_ls_upper'] == 'inf'

def test_damped_completeness():
    table = run_damped_completeness(steps=20, completeness_radius=3,
                                    log=quiet)
    targets = table.notes['targets']
    for curve, theta in targets.items():
        assert table.limit.twist(int(curve)) == pytest.approx(theta,
                                                              abs=1e-6)
    lowers = table.column('d_ls_lower')
    assert lowers[-1] < 1e-3
    assert all(b <= a + 1e-12 for a, b in zip(lowers[9:], lowers[10:]))
    assert 'converged' in table.rows[-1].flags

def test_constant_sequence_is_complete():
    flute = FluteTemplate()
    win = window(flute, 0, 2)
    H = FNMap.tabulated(flute, {2: (0.7, 1.0), 4: (1.2, -0.5)})
    table = run_completeness_sim(constant_generator(H), win, steps=5,
                                 log=quiet)
    assert fn_distance(table.limit, H, win.curves).value == 0
    assert all(row.d_ls_lower == 0 for row in table)
    assert all(row.d_ls_upper == 0 for row in table)

def test_growing_twists_are_not_cauchy():
    flute = FluteTemplate()
    win = window(flute, 0, 2)
    sequence = [(4, k) for k in range(1, 9)]
    generator = cumulative_multitwist_generator(FNMap(flute), sequence)
    with pytest.raises(NonCauchyError):
        run_completeness_sim(generator, win, steps=8, log=quiet)
    with pytest.raises(UsageError):
        run_completeness_sim(generator, win, steps=2, log=quiet)

def test_cumulative_short_curve_twists_converge():
    flute = FluteTemplate()
    ks = range(2, 6)
    base = FNMap.tabulated(flute, {FluteTemplate.chain_curve(k):
                                   (math.exp(-k * k), 0.0) for k in ks})
    sequence = [(FluteTemplate.chain_curve(k), short_order(k)) for k in ks]
    generator = cumulative_multitwist_generator(base, sequence)
    maps = [generator(n) for n in range(1, 8)]
    result = cauchy_limit(maps, range(14), log=quiet)
    assert not result.non_converged
    for k in ks:
        curve = FluteTemplate.chain_curve(k)
        assert result.limit.twist(curve) == pytest.approx(
            TWO_PI * short_order(k))
        assert result.limit.length(curve) == math.exp(-k * k)

def test_table_output():
    table = run_example_short_curves(3, log=quiet)
    stream = io.StringIO()
    table.write_csv(stream)
    lines = stream.getvalue().splitlines()
    assert next(csv.reader(lines[:1])) == list(COLUMNS)
    assert lines[-2].startswith('# certificate: ')
    assert lines[-1].startswith('# cauchy_tail_max: ')
    stream = io.StringIO()
    table.write_json(stream)
    data = json.loads(stream.getvalue())
    assert data['scenario'] == 'ex51'
    assert len(data['rows']) == 3
    assert data['cauchy'][0] == [2, 1, table.cauchy[0][2]]

def test_rows_and_onset():
    estimate = fn_distance(FNMap(FluteTemplate()), FNMap(FluteTemplate()),
                           range(4))
    rows = [ScenarioRow(n, estimate, 0.0, 1.0, flags=flags)
            for n, flags in enumerate([('ok',), (), ('ok',), ('ok',)])]
    assert asymptotic_onset(rows, 'ok') == 2
    assert asymptotic_onset(rows[:2], 'ok') is None
    assert ScenarioRow(1, estimate, 0.0, 1.0, log_eps=-800.0).csv_row()[1] \
        == 'exp(-800)'
    with pytest.raises(InvariantViolation):
        ScenarioRow(1, estimate, 2.0, 1.0)

def test_registry():
    assert sorted(SCENARIOS) == ['complete', 'ex51', 'ex52', 'prop41',
                                 'prop42']
