"""Convergence tables of twist deformations of flute surfaces.

Every scenario starts from the flute with chain curves `α_n` joining pants
`n` and `n+1` and lengths 1 elsewhere:

    - `prop41`: lengths `ε_n = e^{-(n²+n)}` twisted cumulatively by
      `t_n = ⌊log|log ε_n|/ε_n⌋ + 1`; the FN distance diverges while the
      length-spectrum distance stays finite.
    - `prop42`: the same base twisted on one curve at a time; the FN distance
      diverges while the length-spectrum distance goes to 0.
    - `ex51`: lengths `e^{-k²}` and orders `⌊log k²⌋`; length-spectrum Cauchy
      with a quasiconformal divergence certificate.
    - `ex52`: lengths `e^k` twisted once.
    - `complete`: limits of damped twist sequences.

Lengths below the floating point range switch a row to analytic mode, where
the length-dependent columns are evaluated in log-space.
"""
from dataclasses import dataclass, field
from decimal import ROUND_FLOOR, Decimal, localcontext
from typing import (Callable, Dict, Iterator, List, Mapping, Optional,
                    Sequence, TextIO, Tuple)
import csv
import json
import math

import numpy as np

from .common_types import PantsCurveId
from .exceptions import InvariantViolation, UsageError
from .fn_space import (TWO_PI, FNDistanceEstimate, FNMap, apply_dehn_twists,
                       cauchy_limit, fn_distance)
from .hyp_kernel import collar_width, collar_width_from_log
from .metrics import (BRACKET_TOL, NORMALIZATION, DivergenceCertificate,
                      ls_lower, ls_upper_from_collars, ls_upper_multitwist,
                      multitwist_of, qc_divergence_certificate)
from .pants_graph import DecompositionTemplate, FluteTemplate, Window, window

COLUMNS = ('n', 'eps', 't', 'd_fn', 'd_ls_lower', 'd_ls_upper',
           'analytic_bound', 'flags')

FLUTE = FluteTemplate()

@dataclass(frozen=True)
class ScenarioRow:
    """One step of a scenario."""
    n: int
    """Step index."""
    d_fn: FNDistanceEstimate
    """FN distance to the reference point."""
    d_ls_lower: float
    """Length-spectrum lower bound."""
    d_ls_upper: float
    """Length-spectrum upper bound or +∞."""
    analytic_bound: Optional[float] = None
    """Analytic bound asserted at this step."""
    log_eps: Optional[float] = None
    """Log-length of the twisted curve."""
    t: int = 0
    """Twist order."""
    flags: Tuple[str, ...] = ()
    """Verdicts and evaluation modes."""

    def __post_init__(self):
        if self.d_ls_lower > self.d_ls_upper + \
                BRACKET_TOL * max(1.0, self.d_ls_upper):
            raise InvariantViolation(
                f'Row {self.n}: lower bound {self.d_ls_lower} above upper '
                f'bound {self.d_ls_upper}')

    @property
    def eps(self) -> Optional[float]:
        if self.log_eps is None:
            return None
        return math.exp(self.log_eps)

    def _eps_text(self) -> str:
        if self.log_eps is None:
            return ''
        eps = self.eps
        if eps == 0 or not math.isfinite(eps):
            return f'exp({self.log_eps:.17g})'
        return repr(eps)

    def csv_row(self) -> List[str]:
        return [str(self.n), self._eps_text(), str(self.t),
                repr(self.d_fn.value), repr(self.d_ls_lower),
                repr(self.d_ls_upper) if math.isfinite(self.d_ls_upper)
                else 'inf',
                '' if self.analytic_bound is None
                else repr(self.analytic_bound),
                ';'.join(self.flags)]

    def to_json(self) -> Dict:
        return {'n': self.n,
                'eps': self._eps_text() or None,
                't': self.t,
                'd_fn': self.d_fn.to_json(),
                'd_ls_lower': self.d_ls_lower,
                'd_ls_upper': self.d_ls_upper
                if math.isfinite(self.d_ls_upper) else 'inf',
                'analytic_bound': self.analytic_bound,
                'flags': list(self.flags)}

@dataclass(frozen=True)
class ScenarioTable:
    """Rows of a scenario with its certificate and notes."""
    name: str
    """Scenario name."""
    rows: Tuple[ScenarioRow, ...]
    """Rows ordered by step."""
    certificate: Optional[DivergenceCertificate] = None
    """Divergence certificate of the scanned sequence."""
    cauchy: Tuple[Tuple[int, int, float], ...] = ()
    """Pairwise upper bounds `(m, n, d_ls_upper)`."""
    notes: Dict[str, object] = field(default_factory=dict)
    """Scalar annotations."""
    limit: Optional[FNMap] = None
    """Extracted limit of a completeness run."""

    def __iter__(self) -> Iterator[ScenarioRow]:
        return iter(self.rows)

    def __len__(self) -> int:
        return len(self.rows)

    def column(self, name: str) -> List:
        if name == 'd_fn':
            return [row.d_fn.value for row in self.rows]
        return [getattr(row, name) for row in self.rows]

    def to_json(self) -> Dict:
        data = {'scenario': self.name,
                'rows': [row.to_json() for row in self.rows],
                'notes': dict(self.notes)}
        if self.certificate is not None:
            data['certificate'] = self.certificate.to_json()
        if self.cauchy:
            data['cauchy'] = [list(entry) for entry in self.cauchy]
        if self.limit is not None:
            data['limit'] = self.limit.to_json()
        return data

    def write_json(self, stream: TextIO) -> None:
        json.dump(self.to_json(), stream, indent=2, sort_keys=True)
        stream.write('\n')

    def write_csv(self, stream: TextIO) -> None:
        """Rows as CSV; the certificate and notes become comment lines."""
        writer = csv.writer(stream, lineterminator='\n')
        writer.writerow(COLUMNS)
        for row in self.rows:
            writer.writerow(row.csv_row())
        if self.certificate is not None:
            stream.write(f'# certificate: {self.certificate.verdict}\n')
        for key, value in sorted(self.notes.items()):
            stream.write(f'# {key}: {value}\n')

def asymptotic_onset(rows: Sequence[ScenarioRow],
                     flag: str) -> Optional[int]:
    """First step after which every row carries `flag`."""
    onset = None
    for row in reversed(rows):
        if flag not in row.flags:
            break
        onset = row.n
    return onset

def short_twist(m: int) -> Tuple[int, float, bool]:
    """Twist order of the curve of length `e^{-m}`.

    Returns `t = ⌊log(m)·e^m⌋ + 1`, the arclength twist `t·e^{-m}` and
    whether `t·e^{-m} >= log m`, decided in decimal arithmetic.
    """
    with localcontext() as ctx:
        ctx.prec = int(m / math.log(10)) + 40
        dm = Decimal(m)
        t = int((dm.ln() * dm.exp()).to_integral_value(
            rounding=ROUND_FLOOR)) + 1
        shear = Decimal(t) * (-dm).exp()
        return t, float(shear), shear >= dm.ln()

def short_base(exponents: Mapping[int, int],
               analytic_threshold: int = 700) -> FNMap:
    """Flute with `α_n` of length `e^{-m_n}`, lengths 1 elsewhere.

    Curves in analytic mode keep length 1.
    """
    table = {FLUTE.chain_curve(n): (math.exp(-m), 0.0)
             for n, m in exponents.items() if m <= analytic_threshold}
    return FNMap.tabulated(FLUTE, table)

def _scan(n: int) -> range:
    return range(0, FLUTE.chain_curve(n) + 2)

def _collar(m: int, analytic_threshold: int) -> float:
    if m > analytic_threshold:
        return collar_width_from_log(-m)
    return collar_width(math.exp(-m))

def _short_lower(base: FNMap, H: FNMap, n: int, m: int, *,
                 holonomy_log_floor: int, window_radius: int,
                 max_chain: int, max_wind: int, jobs: int,
                 normalization: float,
                 holonomy: Optional[Mapping[str, float]],
                 log: Callable) -> Tuple[float, Tuple[str, ...]]:
    if m > holonomy_log_floor:
        return 0.0, ('lower-trivial',)
    win = window(FLUTE, n, window_radius)
    estimate = ls_lower(base, H, win, max_chain=max_chain,
                        max_wind=max_wind, jobs=jobs,
                        normalization=normalization, holonomy=holonomy,
                        log=log)
    return estimate.lower, ()

def run_prop_non_inc(n_max: int,
                     analytic_threshold: int = 700,
                     holonomy_log_floor: int = 9,
                     window_radius: int = 1,
                     max_chain: int = 3,
                     max_wind: int = 1,
                     jobs: int = 1,
                     normalization: float = NORMALIZATION,
                     holonomy: Optional[Mapping[str, float]] = None,
                     log: Callable = print) -> ScenarioTable:
    """Cumulative twists with infinite FN distance and finite d_ls.

    Row `n` twists `α_1, ..., α_n` by their orders `t_k`.

    Args:
      n_max: number of rows.
      analytic_threshold: optional; log-length below which rows switch to
        analytic mode.
      holonomy_log_floor: optional; log-length below which the holonomy lower
        bound is skipped.
      window_radius: optional; radius of the window around pants `n`.
      max_chain: optional; candidate chain bound.
      max_wind: optional; candidate winding bound.
      jobs: optional; worker threads.
      normalization: optional; factor in front of the log-ratios.
      holonomy: optional; tolerances of the holonomy charts.
      log: optional; logging function.
    """
    if n_max < 1:
        raise UsageError(f'n_max must be >= 1, got {n_max}')
    exponents = {n: n * n + n for n in range(1, n_max + 1)}
    base = short_base(exponents, analytic_threshold)
    rows, orders, collars = [], {}, []
    d_fn = 0.0
    for n, m in exponents.items():
        t, shear, fn_ok = short_twist(m)
        flags = ['fn-bound-ok' if fn_ok else 'fn-bound-violated']
        collars.append((shear, _collar(m, analytic_threshold)))
        upper = ls_upper_from_collars(collars, normalization)
        if m > analytic_threshold:
            flags.append('analytic-mode')
            d_fn = max(d_fn, TWO_PI * shear)
            estimate = FNDistanceEstimate(d_fn, _scan(n), True)
            lower = 0.0
            flags.append('lower-trivial')
        else:
            orders[FLUTE.chain_curve(n)] = t
            H = apply_dehn_twists(base, orders)
            estimate = fn_distance(base, H, _scan(n))
            lower, extra = _short_lower(
                base, H, n, m, holonomy_log_floor=holonomy_log_floor,
                window_radius=window_radius, max_chain=max_chain,
                max_wind=max_wind, jobs=jobs, normalization=normalization,
                holonomy=holonomy, log=log)
            flags.extend(extra)
        log(f'prop41 row {n}: d_fn={estimate.value:.6g} upper={upper:.6g}')
        rows.append(ScenarioRow(n, estimate, lower, upper,
                                analytic_bound=TWO_PI * math.log(m),
                                log_eps=-float(m), t=t, flags=tuple(flags)))

    return ScenarioTable('prop41', tuple(rows))

def run_prop_non_inc2(n_max: int,
                      analytic_threshold: int = 700,
                      holonomy_log_floor: int = 9,
                      window_radius: int = 1,
                      max_chain: int = 3,
                      max_wind: int = 1,
                      jobs: int = 1,
                      normalization: float = NORMALIZATION,
                      holonomy: Optional[Mapping[str, float]] = None,
                      log: Callable = print) -> ScenarioTable:
    """Single twists with diverging FN distance and vanishing d_ls.

    Row `n` twists `α_n` alone by `t_n`; its upper bound is compared with
    `log(1 + 2/n)`, which holds only for large `n`.

    Args:
      n_max: number of rows.
      analytic_threshold: optional; log-length below which rows switch to
        analytic mode.
      holonomy_log_floor: optional; log-length below which the holonomy lower
        bound is skipped.
      window_radius: optional; radius of the window around pants `n`.
      max_chain: optional; candidate chain bound.
      max_wind: optional; candidate winding bound.
      jobs: optional; worker threads.
      normalization: optional; factor in front of the log-ratios.
      holonomy: optional; tolerances of the holonomy charts.
      log: optional; logging function.
    """
    if n_max < 1:
        raise UsageError(f'n_max must be >= 1, got {n_max}')
    exponents = {n: n * n + n for n in range(1, n_max + 1)}
    base = short_base(exponents, analytic_threshold)
    rows = []
    for n, m in exponents.items():
        t, shear, fn_ok = short_twist(m)
        flags = ['fn-bound-ok' if fn_ok else 'fn-bound-violated']
        upper = ls_upper_from_collars(
            [(shear, _collar(m, analytic_threshold))], normalization)
        bound = math.log1p(2 / n)
        if upper <= bound:
            flags.append('ls-bound-ok')
        else:
            flags.append('ls-bound-exceeded')
            log(f'prop42 row {n}: upper bound {upper:.6g} exceeds '
                f'log(1 + 2/n) = {bound:.6g}')
        if m > analytic_threshold:
            flags.extend(['analytic-mode', 'lower-trivial'])
            estimate = FNDistanceEstimate(TWO_PI * shear, _scan(n), True)
            lower = 0.0
        else:
            H = apply_dehn_twists(base, {FLUTE.chain_curve(n): t})
            estimate = fn_distance(base, H, _scan(n))
            lower, extra = _short_lower(
                base, H, n, m, holonomy_log_floor=holonomy_log_floor,
                window_radius=window_radius, max_chain=max_chain,
                max_wind=max_wind, jobs=jobs, normalization=normalization,
                holonomy=holonomy, log=log)
            flags.extend(extra)
        log(f'prop42 row {n}: d_fn={estimate.value:.6g} upper={upper:.6g}')
        rows.append(ScenarioRow(n, estimate, lower, upper,
                                analytic_bound=bound, log_eps=-float(m), t=t,
                                flags=tuple(flags)))

    return ScenarioTable('prop42', tuple(rows),
                         notes={'n_0': asymptotic_onset(rows, 'ls-bound-ok')})

def short_order(k: int) -> int:
    """Twist order `⌊log k²⌋` of the curve of length `e^{-k²}`."""
    return math.floor(2 * math.log(k))

def run_example_short_curves(k_max: int,
                             analytic_threshold: int = 700,
                             holonomy_log_floor: int = 9,
                             window_radius: int = 1,
                             max_chain: int = 3,
                             max_wind: int = 1,
                             jobs: int = 1,
                             normalization: float = NORMALIZATION,
                             holonomy: Optional[Mapping[str, float]] = None,
                             log: Callable = print) -> ScenarioTable:
    """Short curves twisted by slowly growing orders.

    Row `k` twists `α_k` alone. The pairwise table bounds the cumulative
    sequence, and its certificate covers the same sequence.

    Args:
      k_max: number of rows, at least 2.
      analytic_threshold: optional; log-length below which rows switch to
        analytic mode.
      holonomy_log_floor: optional; log-length below which the holonomy lower
        bound is skipped.
      window_radius: optional; radius of the window around pants `k`.
      max_chain: optional; candidate chain bound.
      max_wind: optional; candidate winding bound.
      jobs: optional; worker threads.
      normalization: optional; factor in front of the log-ratios.
      holonomy: optional; tolerances of the holonomy charts.
      log: optional; logging function.
    """
    if k_max < 2:
        raise UsageError(f'k_max must be >= 2, got {k_max}')
    exponents = {k: k * k for k in range(1, k_max + 1)}
    base = short_base(exponents, analytic_threshold)
    rows, terms, sequence = [], {}, []
    for k, m in exponents.items():
        t = short_order(k)
        width = _collar(m, analytic_threshold)
        shear = t * math.exp(-m)
        terms[k] = (shear, width)
        sequence.append((FLUTE.chain_curve(k), t))
        upper = ls_upper_from_collars([(shear, width)], normalization)
        bound = t / (2 * width)
        flags = ['ls-bound-ok' if upper <= bound else 'ls-bound-exceeded']
        if m > analytic_threshold:
            flags.extend(['analytic-mode', 'lower-trivial'])
            estimate = FNDistanceEstimate(TWO_PI * shear, _scan(k), True)
            lower = 0.0
        else:
            H = apply_dehn_twists(base, {FLUTE.chain_curve(k): t})
            estimate = fn_distance(base, H, _scan(k))
            lower, extra = _short_lower(
                base, H, k, m, holonomy_log_floor=holonomy_log_floor,
                window_radius=window_radius, max_chain=max_chain,
                max_wind=max_wind, jobs=jobs, normalization=normalization,
                holonomy=holonomy, log=log)
            flags.extend(extra)
        log(f'ex51 row {k}: upper={upper:.6g}')
        rows.append(ScenarioRow(k, estimate, lower, upper,
                                analytic_bound=bound, log_eps=-float(m), t=t,
                                flags=tuple(flags)))

    cauchy = []
    for m in range(2, k_max + 1):
        for n in range(1, m):
            value = ls_upper_from_collars(
                (terms[j] for j in range(n + 1, m + 1)), normalization)
            cauchy.append((m, n, value))
    tail = [value for m, n, value in cauchy if n >= 4]
    certificate = qc_divergence_certificate(
        base, sequence, log_lengths=[-float(m) for m in exponents.values()],
        description='cumulative twists of order floor(log k^2) on alpha_k',
        log=log)

    return ScenarioTable('ex51', tuple(rows), certificate, tuple(cauchy),
                         notes={'cauchy_tail_max': max(tail, default=0.0)})

def run_example_long_curves(k_max: int,
                            max_holonomy_length: float = 30.0,
                            window_radius: int = 1,
                            max_chain: int = 3,
                            max_wind: int = 1,
                            jobs: int = 1,
                            normalization: float = NORMALIZATION,
                            holonomy: Optional[Mapping[str, float]] = None,
                            log: Callable = print) -> ScenarioTable:
    """Long curves `a_k = e^k` twisted once.

    The arc-length hypothesis on the long curves is not checked, so every row
    is flagged. The collar bound is vacuous for long curves.

    Args:
      k_max: number of rows.
      max_holonomy_length: optional; longest curve for which the holonomy
        lower bound is evaluated.
      window_radius: optional; radius of the window around pants `k`.
      max_chain: optional; candidate chain bound.
      max_wind: optional; candidate winding bound.
      jobs: optional; worker threads.
      normalization: optional; factor in front of the log-ratios.
      holonomy: optional; tolerances of the holonomy charts.
      log: optional; logging function.
    """
    if k_max < 1:
        raise UsageError(f'k_max must be >= 1, got {k_max}')
    table = {FLUTE.chain_curve(k): (math.exp(k), 0.0)
             for k in range(1, k_max + 1)}
    base = FNMap.tabulated(FLUTE, table)
    rows, sequence = [], []
    for k in range(1, k_max + 1):
        curve = FLUTE.chain_curve(k)
        sequence.append((curve, 1))
        H = apply_dehn_twists(base, {curve: 1})
        estimate = fn_distance(base, H, _scan(k))
        upper = ls_upper_multitwist(base, {curve: base.length(curve)},
                                    normalization)
        flags = ['unverified-hypothesis']
        lower = 0.0
        if base.length(curve) <= max_holonomy_length:
            win = window(FLUTE, k, window_radius)
            lower = ls_lower(base, H, win, max_chain=max_chain,
                             max_wind=max_wind, jobs=jobs,
                             normalization=normalization,
                             holonomy=holonomy, log=log).lower
        else:
            flags.append('lower-trivial')
        rows.append(ScenarioRow(k, estimate, lower, upper,
                                analytic_bound=1 / k, log_eps=float(k), t=1,
                                flags=tuple(flags)))
    certificate = qc_divergence_certificate(
        base, sequence, log_lengths=[float(k) for k in range(1, k_max + 1)],
        description='single twists on alpha_k of length e^k', log=log)

    return ScenarioTable('ex52', tuple(rows), certificate)

def damped_twist_generator(template: DecompositionTemplate,
                           curves: Sequence[PantsCurveId],
                           amplitude: float = 3.0,
                           seed: int = 0) -> Tuple[Callable[[int], FNMap],
                                                   Dict[PantsCurveId, float]]:
    """Twists `θ_n = (1 - 2^{-n})·Θ` with random targets `Θ`.

    Returns the generator and the closed-form limit twists.
    """
    rng = np.random.default_rng(seed)
    targets = rng.uniform(-amplitude, amplitude, size=len(curves))
    limit = {curve: float(x) for curve, x in zip(curves, targets)}

    def generator(n: int) -> FNMap:
        factor = 1 - 2.0 ** -n
        return FNMap.tabulated(template, {c: (1.0, factor * x)
                                          for c, x in limit.items()})

    return generator, limit

def constant_generator(H: FNMap) -> Callable[[int], FNMap]:
    return lambda n: H

def cumulative_multitwist_generator(
        base: FNMap,
        sequence: Sequence[Tuple[PantsCurveId, int]]
) -> Callable[[int], FNMap]:
    """The n-th map twists the first `n` curves of `sequence`."""
    def generator(n: int) -> FNMap:
        orders = {}
        for curve, t in sequence[:n]:
            orders[curve] = orders.get(curve, 0) + t
        return apply_dehn_twists(base, orders)
    return generator

def run_completeness_sim(generator: Callable[[int], FNMap],
                         win: Window,
                         steps: int = 20,
                         tol: float = 1e-5,
                         max_chain: int = 3,
                         max_wind: int = 1,
                         jobs: int = 1,
                         normalization: float = NORMALIZATION,
                         holonomy: Optional[Mapping[str, float]] = None,
                         log: Callable = print) -> ScenarioTable:
    """Limit of a coordinate Cauchy sequence and distances to it.

    Args:
      generator: map `n -> x_n` for `n >= 1`.
      win: window where distances are evaluated.
      steps: optional; number of terms.
      tol: optional; convergence tolerance of the limit extraction.
      max_chain: optional; candidate chain bound.
      max_wind: optional; candidate winding bound.
      jobs: optional; worker threads.
      normalization: optional; factor in front of the log-ratios.
      holonomy: optional; tolerances of the holonomy charts.
      log: optional; logging function.
    """
    if steps < 3:
        raise UsageError(f'Completeness run needs >= 3 steps, got {steps}')
    sequence = [generator(n) for n in range(1, steps + 1)]
    limit = cauchy_limit(sequence, win.curves, tol=tol, log=log).limit
    rows = []
    for n, x in enumerate(sequence, start=1):
        residual = fn_distance(x, limit, win.curves)
        lower = ls_lower(x, limit, win, max_chain=max_chain,
                         max_wind=max_wind, jobs=jobs,
                         normalization=normalization, holonomy=holonomy,
                         log=log).lower
        twists = multitwist_of(x, limit, win.curves)
        upper = math.inf if twists is None else \
            ls_upper_multitwist(x, twists, normalization)
        flags = ('converged',) if residual.value < tol else ()
        rows.append(ScenarioRow(n, residual, lower, upper, flags=flags))
        log(f'complete step {n}: residual={residual.value:.3g} '
            f'lower={lower:.3g}')

    return ScenarioTable('complete', tuple(rows), limit=limit,
                         notes={'steps': steps})

def run_damped_completeness(steps: int = 20,
                            completeness_radius: int = 3,
                            amplitude: float = 3.0,
                            seed: int = 0,
                            tol: float = 1e-5,
                            max_chain: int = 3,
                            max_wind: int = 1,
                            jobs: int = 1,
                            normalization: float = NORMALIZATION,
                            holonomy: Optional[Mapping[str, float]] = None,
                            log: Callable = print) -> ScenarioTable:
    """Completeness run of damped twists on a flute window at pants 0."""
    win = window(FLUTE, 0, completeness_radius)
    generator, targets = damped_twist_generator(
        FLUTE, sorted(win.interior), amplitude=amplitude, seed=seed)
    table = run_completeness_sim(generator, win, steps=steps, tol=tol,
                                 max_chain=max_chain, max_wind=max_wind,
                                 jobs=jobs, normalization=normalization,
                                 holonomy=holonomy, log=log)
    table.notes['targets'] = {str(c): x for c, x in sorted(targets.items())}
    return table

SCENARIOS = {
    'prop41': run_prop_non_inc,
    'prop42': run_prop_non_inc2,
    'ex51': run_example_short_curves,
    'ex52': run_example_long_curves,
    'complete': run_damped_completeness,
}
"""Scenario runners by name."""
