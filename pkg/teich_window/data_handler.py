"""Handle surfaces and computations for teichwin."""
from functools import cached_property
from typing import Dict, List, Mapping, TextIO, Union
import json
import sys

from .environment import RunConfig
from .exceptions import UsageError
from .fn_space import FNMap, fn_distance, shiga_check, shiga_diverging
from .helpers.logger import LoggedObject
from .helpers.utils import get_func_params
from .hyp_kernel import build_holonomy
from .metrics import NORMALIZATION, ls_estimate, multitwist_of
from .pants_graph import (DecompositionTemplate, Window, load_template,
                          template_from_json, window)
from .scenarios import SCENARIOS, ScenarioTable

class SurfaceManager(LoggedObject):
    """Manage the surfaces of a run.

    Attributes:
      run: run configuration.
    """

    def __init__(self, run: RunConfig, **kwargs):
        super().__init__(name='teichwin', **kwargs)
        self.run = run

    @cached_property
    def template(self) -> DecompositionTemplate:
        self.info('Loading template: %s', self.run.template)
        return load_template(self.run.template)

    @cached_property
    def surfaces(self) -> List[FNMap]:
        """Surfaces of the run on the run template.

        Documents may name their own template, which must match.
        """
        surfaces = []
        for path, document in self.run.surfaces:
            self.info('Reading surface: %s', path)
            if not isinstance(document, Mapping):
                raise UsageError(f'{path}: surface document is not an object')
            if 'template' in document and \
                    template_from_json(document['template']) != self.template:
                raise UsageError(f'{path}: template mismatch with '
                                 f'{self.run.template}')
            surfaces.append(FNMap.from_json(document, self.template))
        return surfaces

    @cached_property
    def window(self) -> Window:
        center, radius = self.run.window
        return window(self.template, center, radius)

    @cached_property
    def holonomy(self) -> Dict[str, float]:
        """Tolerances of the holonomy charts."""
        return get_func_params(build_holonomy, self.run.config['hyp_kernel'],
                               ignore_keys=['window', 'H'],
                               float_keys=['trace_tol', 'det_tol',
                                           'parabolic_tol'])

    @property
    def normalization(self) -> float:
        return self.run.config.getfloat('metrics', 'normalization',
                                        fallback=NORMALIZATION)

    def surface_report(self, H: FNMap) -> Dict:
        """Normalized surface with its validation report."""
        section = self.run.config['fn_space']
        report = shiga_check(H, self.run.scan)
        if shiga_diverging(H, self.run.scan,
                           growth=section.getfloat('shiga_growth',
                                                   fallback=10.0)):
            self.warn('Shiga constant grows across the scan: %s',
                      report.m_estimate)
        self.debug('Building holonomy on window %s', self.run.window)
        chart = build_holonomy(self.window, H, **self.holonomy)
        data = {'surface': H.to_json(),
                'shiga': report.to_json(),
                'holonomy': {'window': self.window.to_json(),
                             'boundary_traces': 'passed',
                             'pants': len(chart.window.pants)}}
        if self.run.template_dump:
            data['template'] = self.template.to_json()
        return data

    def metric_report(self, A: FNMap, B: FNMap) -> Dict:
        """Distances between two surfaces."""
        scan = range(self.run.scan)
        d_fn = fn_distance(A, B, scan)
        twists = multitwist_of(A, B, scan) if d_fn.exact else None
        if twists is None:
            self.info('Surfaces are not a multi-twist pair on the scan')
        estimate = ls_estimate(A, B, self.window, twists=twists,
                               max_chain=self.run.max_chain,
                               max_wind=self.run.max_wind,
                               jobs=self.run.jobs,
                               normalization=self.normalization,
                               holonomy=self.holonomy, log=self.debug)
        ls = estimate.to_json()
        if twists is None:
            ls['upper'] = 'n/a'
        return {'fn_distance': d_fn.to_json(),
                'ls': ls,
                'qc_lower': estimate.lower}

    def scenario_table(self) -> ScenarioTable:
        """Run the scenario of the configuration."""
        name = self.run.scenario
        runner = SCENARIOS[name]
        section = self.run.config['scenarios']
        n_max = self.run.n_max or section.getint('n_max', fallback=10)
        steps = self.run.n_max or section.getint('completeness_steps',
                                                 fallback=20)
        cfgvars = {'n_max': n_max, 'k_max': n_max, 'steps': steps,
                   'seed': self.run.seed,
                   'tol': self.run.config.getfloat('fn_space', 'cauchy_tol',
                                                   fallback=1e-5),
                   'max_chain': self.run.max_chain,
                   'max_wind': self.run.max_wind,
                   'jobs': self.run.jobs,
                   'normalization': self.normalization,
                   'holonomy': self.holonomy}
        params = get_func_params(
            runner, section, ignore_keys=['log'],
            float_keys=['amplitude', 'max_holonomy_length'],
            int_keys=['analytic_threshold', 'holonomy_log_floor',
                      'window_radius', 'completeness_radius'],
            cfgvars=cfgvars)
        self.info('Running scenario %s', name)
        return runner(log=self.debug, **params)

    def write(self, result: Union[Dict, ScenarioTable]) -> None:
        """Write a result to the output file or standard output."""
        if self.run.out is None:
            self._write(result, sys.stdout)
        else:
            self.info('Writing %s', self.run.out)
            with self.run.out.open('w', encoding='utf-8') as stream:
                self._write(result, stream)

    def _write(self, result: Union[Dict, ScenarioTable],
               stream: TextIO) -> None:
        if isinstance(result, ScenarioTable):
            if self.run.fmt == 'csv':
                result.write_csv(stream)
            else:
                result.write_json(stream)
        else:
            json.dump(result, stream, indent=2, sort_keys=True)
            stream.write('\n')
