"""Tests of the teichwin command line program."""
import functools
import json

import pytest

from teich_window import data_handler
from teich_window.exceptions import InvariantViolation
from teich_window.teichwin import teichwin

SHORT = {'default': {'l': 'const:1', 'theta': 'const:0'},
         'overrides': {'4': {'l': 0.5, 'theta': 0.0}}}
TWISTED = {'default': {'l': 'const:1', 'theta': 'const:0'},
           'overrides': {'4': {'l': 0.5, 'theta': 0.0}},
           'dehn': {'4': 1}}

def test_surface_report(surface_file, capsys):
    path = surface_file(SHORT)
    code = teichwin(['surface', '--surface', str(path), '--window', '1:1',
                     '--template-dump'])
    assert code == 0
    report = json.loads(capsys.readouterr().out)
    assert report['holonomy']['boundary_traces'] == 'passed'
    assert report['holonomy']['window']['interior'] == [2, 4]
    assert report['shiga']['witness_min'] == 0.5
    assert report['template']['kind'] == 'flute'
    assert report['surface']['overrides']['4'] == {'l': 0.5, 'theta': 0.0}

def test_metric_report(surface_file, capsys):
    first = surface_file(SHORT, 'a.json')
    second = surface_file(TWISTED, 'b.json')
    code = teichwin(['metric', '--surface', str(first), '--surface',
                     str(second), '--window', '1:1', '--max-wind', '1'])
    assert code == 0
    report = json.loads(capsys.readouterr().out)
    assert report['fn_distance']['exact']
    assert report['ls']['lower'] > 0
    assert report['ls']['lower'] <= report['ls']['upper']
    assert report['qc_lower'] == report['ls']['lower']

def test_metric_without_multitwist(surface_file, capsys):
    first = surface_file(SHORT, 'a.json')
    second = surface_file({'overrides': {'4': {'l': 0.7}}}, 'b.json')
    code = teichwin(['metric', '--surface', str(first), '--surface',
                     str(second), '--window', '1:1'])
    assert code == 0
    assert json.loads(capsys.readouterr().out)['ls']['upper'] == 'n/a'

def test_scenario_output_is_stable(capsys):
    args = ['scenario', '--scenario', 'ex51', '--n-max', '4',
            '--max-wind', '1']
    assert teichwin(args) == 0
    first = capsys.readouterr().out
    assert teichwin(args) == 0
    assert capsys.readouterr().out == first
    data = json.loads(first)
    assert data['certificate']['verdict'] == 'certified-divergent'
    assert len(data['rows']) == 4

def test_short_curve_scenario_past_the_holonomy_floor(capsys):
    code = teichwin(['scenario', '--scenario', 'ex51', '--n-max', '6',
                     '--max-wind', '1'])
    assert code == 0
    rows = json.loads(capsys.readouterr().out)['rows']
    assert len(rows) == 6
    assert all(row['d_ls_lower'] == 0 for row in rows[3:])

def test_scenario_csv_to_file(tmp_path, capsys):
    out = tmp_path / 'ex52.csv'
    code = teichwin(['scenario', '--scenario', 'ex52', '--n-max', '3',
                     '--max-wind', '1', '--format', 'csv', '--out', str(out)])
    assert code == 0
    assert capsys.readouterr().out == ''
    lines = out.read_text(encoding='utf-8').splitlines()
    assert lines[0].startswith('n,eps,t,d_fn')
    assert len([line for line in lines if not line.startswith('#')]) == 4
    assert '# certificate: inapplicable' in lines

def test_config_file(tmp_path, capsys):
    config = tmp_path / 'user.cfg'
    config.write_text('[scenarios]\nn_max = 3\n', encoding='utf-8')
    code = teichwin(['scenario', '--scenario', 'prop42', '--config',
                     str(config), '--max-wind', '1'])
    assert code == 0
    assert len(json.loads(capsys.readouterr().out)['rows']) == 3

@pytest.mark.parametrize('args', [
    [],
    ['scenario', '--scenario', 'prop99'],
    ['scenario', '--scenario', 'ex51', '--n-max', '-1'],
    ['surface'],
    ['surface', '--surface', 'missing.json'],
    ['surface', '--window', '1:x'],
])
def test_usage_errors(args):
    assert teichwin(args) == 2

def test_usage_errors_with_surfaces(surface_file, tmp_path):
    path = surface_file(SHORT)
    assert teichwin(['metric', '--surface', str(path)]) == 2
    assert teichwin(['surface', '--surface', str(path), '--format',
                     'csv']) == 2
    broken = tmp_path / 'broken.json'
    broken.write_text('{"default": ', encoding='utf-8')
    assert teichwin(['surface', '--surface', str(broken)]) == 2
    other = surface_file({'template': {'kind': 'ladder', 'params': {}}},
                         'ladder.json')
    assert teichwin(['surface', '--surface', str(other)]) == 2
    assert teichwin(['surface', '--surface', str(path), '--window',
                     '0:0']) == 0

def test_invariant_violation_exit_code(surface_file, monkeypatch):
    def fail(self, H):
        raise InvariantViolation('boundary relation off')

    monkeypatch.setattr(data_handler.SurfaceManager, 'surface_report', fail)
    path = surface_file(SHORT)
    assert teichwin(['surface', '--surface', str(path)]) == 1

def test_verbose_log_file(surface_file, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    path = surface_file(SHORT)
    assert teichwin(['surface', '--surface', str(path), '--vv']) == 0
    assert (tmp_path / 'debug_teichwin.log').is_file()

def test_metric_normalization_from_config(surface_file, tmp_path, capsys):
    first = surface_file(SHORT, 'a.json')
    second = surface_file(TWISTED, 'b.json')
    args = ['metric', '--surface', str(first), '--surface', str(second),
            '--window', '1:1', '--max-wind', '1']
    assert teichwin(args) == 0
    half = json.loads(capsys.readouterr().out)['ls']
    config = tmp_path / 'user.cfg'
    config.write_text('[metrics]\nnormalization = 1.0\n', encoding='utf-8')
    assert teichwin(args + ['--config', str(config)]) == 0
    full = json.loads(capsys.readouterr().out)['ls']
    assert full['lower'] == pytest.approx(2 * half['lower'])
    assert full['upper'] == pytest.approx(2 * half['upper'])

def test_kernel_tolerances_from_config(surface_file, tmp_path, monkeypatch):
    seen = {}
    build = data_handler.build_holonomy

    @functools.wraps(build)
    def spy(window, H, **kwargs):
        seen.update(kwargs)
        return build(window, H, **kwargs)

    monkeypatch.setattr(data_handler, 'build_holonomy', spy)
    config = tmp_path / 'user.cfg'
    config.write_text('[hyp_kernel]\ntrace_tol = 1e-7\n', encoding='utf-8')
    path = surface_file(SHORT)
    assert teichwin(['surface', '--surface', str(path), '--config',
                     str(config)]) == 0
    assert seen == {'trace_tol': 1e-7, 'det_tol': 1e-12,
                    'parabolic_tol': 1e-12}
