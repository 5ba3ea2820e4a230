"""Distance estimators between points of Teichmüller space.

The length-spectrum distance is `d_ls = ½ log L` with `L` the supremum of
the two-sided length ratios over simple closed curves. This module brackets
it on a window:

    - `ls_lower` maximizes over the enumerated candidate curves;
    - `ls_upper_multitwist` bounds multi-twists with the collar widths;
    - `qc_lower` passes `ls_lower` on as a quasiconformal lower bound;
    - `qc_divergence_certificate` asserts qualitative quasiconformal
      divergence of multi-twist sequences.
"""
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, Mapping, Optional, Sequence, Tuple
import math

from .common_types import PantsCurveId
from .curves import Curve, enumerate_candidates
from .exceptions import InvariantViolation, UsageError
from .fn_space import FNMap
from .hyp_kernel import build_holonomy, collar_width
from .pants_graph import Window

NORMALIZATION = 0.5
BRACKET_TOL = 1e-12

VERDICTS = ('certified-divergent', 'not-certified', 'inapplicable')

def _json_float(value: float):
    return value if math.isfinite(value) else 'inf'

@dataclass(frozen=True)
class MetricEstimate:
    """Bracket of the length-spectrum distance."""
    lower: float
    """Lower bound."""
    upper: float = math.inf
    """Upper bound, +∞ when unknown or vacuous."""
    witness: Optional[Curve] = None
    """Candidate attaining the lower bound."""
    window: Optional[Window] = None
    """Window of the enumeration."""
    enumeration: Dict[str, int] = field(default_factory=dict)
    """Enumeration bounds."""

    def __post_init__(self):
        if self.lower < 0:
            raise InvariantViolation(f'Negative lower bound {self.lower}')
        if self.lower > self.upper + BRACKET_TOL * max(1.0, self.upper):
            raise InvariantViolation(
                f'Lower bound {self.lower} above upper bound {self.upper}')

    def to_json(self) -> Dict:
        data = {'lower': self.lower,
                'upper': _json_float(self.upper),
                'witness': None if self.witness is None
                else self.witness.to_json(),
                'enumeration': dict(self.enumeration)}
        if self.window is not None:
            data['window'] = self.window.to_json()
        return data

@dataclass(frozen=True)
class DivergenceCertificate:
    """Qualitative quasiconformal divergence of a multi-twist sequence."""
    description: str
    """Sequence description."""
    orders: Tuple[int, ...]
    """Twist orders on the scan."""
    length_bound: float
    """Uniform length bound over the twisted curves."""
    verdict: str
    """certified-divergent, not-certified or inapplicable."""

    @property
    def sup_order(self) -> int:
        return max((abs(t) for t in self.orders), default=0)

    def to_json(self) -> Dict:
        return {'description': self.description,
                'scan': len(self.orders),
                'sup_order': self.sup_order,
                'length_bound': _json_float(self.length_bound),
                'verdict': self.verdict}

def _check_pair(A: FNMap, B: FNMap, window: Window) -> None:
    if A.template != B.template:
        raise UsageError(
            f'Template mismatch: {A.template.kind} vs {B.template.kind}')
    if window.template != A.template:
        raise UsageError('Window and surface templates differ')

def log_ratio(length_a: float, length_b: float,
              normalization: float = NORMALIZATION) -> float:
    """Normalized absolute log-ratio of two lengths."""
    return normalization * abs(math.log(length_b) - math.log(length_a))

def ls_lower(A: FNMap, B: FNMap, window: Window,
             max_chain: int = 3,
             max_wind: int = 2,
             jobs: int = 1,
             normalization: float = NORMALIZATION,
             holonomy: Optional[Mapping[str, float]] = None,
             log: Callable = print) -> MetricEstimate:
    """Length-spectrum lower bound over the candidates of a window.

    Ties are broken by the first candidate in serialization order.

    Args:
      A, B: coordinate maps on the same template.
      window: window of the template.
      max_chain: optional; maximum pants of a chain candidate.
      max_wind: optional; maximum winding of a candidate.
      jobs: optional; worker threads for the length evaluations.
      normalization: optional; factor in front of the log-ratio.
      holonomy: optional; tolerances of the holonomy charts.
      log: optional; logging function.
    """
    _check_pair(A, B, window)
    candidates = enumerate_candidates(window, max_chain, max_wind)
    if not candidates:
        raise UsageError('Window too small: no candidate curves')
    log(f'Evaluating {len(candidates)} candidate curves')
    holonomy = holonomy or {}
    lengths_a = build_holonomy(window, A, **holonomy).lengths(candidates,
                                                              jobs=jobs)
    lengths_b = build_holonomy(window, B, **holonomy).lengths(candidates,
                                                              jobs=jobs)
    best, witness = 0.0, candidates[0]
    for curve, la, lb in zip(candidates, lengths_a, lengths_b):
        value = log_ratio(la, lb, normalization)
        if value > best:
            best, witness = value, curve

    return MetricEstimate(best, witness=witness, window=window,
                          enumeration={'max_chain': max_chain,
                                       'max_wind': max_wind})

def witness_value(A: FNMap, B: FNMap, window: Window, curve: Curve,
                  normalization: float = NORMALIZATION,
                  holonomy: Optional[Mapping[str, float]] = None) -> float:
    """Re-evaluate the log-ratio of a single curve."""
    _check_pair(A, B, window)
    holonomy = holonomy or {}
    la = build_holonomy(window, A, **holonomy).length(curve)
    lb = build_holonomy(window, B, **holonomy).length(curve)
    return log_ratio(la, lb, normalization)

def qc_lower(A: FNMap, B: FNMap, window: Window,
             max_chain: int = 3,
             max_wind: int = 2,
             jobs: int = 1,
             holonomy: Optional[Mapping[str, float]] = None,
             log: Callable = print) -> float:
    """Quasiconformal lower bound, equal to `ls_lower`."""
    return ls_lower(A, B, window, max_chain=max_chain, max_wind=max_wind,
                    jobs=jobs, holonomy=holonomy, log=log).lower

def ls_upper_from_collars(collars: Iterable[Tuple[float, float]],
                          normalization: float = NORMALIZATION) -> float:
    """Upper bound from arclength twists and collar widths.

    Every crossing of a collar of width `w` adds at most `|s|` to the length
    of a curve and costs it at least `2w`, so both log-ratios are bounded by
    `-log(1 - r)` with `r = |s| / (2w)`.

    Args:
      collars: pairs `(s, w)` of arclength twist and collar width.
      normalization: optional; factor in front of the log-ratio.
    """
    value = 0.0
    for s, w in collars:
        r = abs(s) / (2 * w)
        if r >= 1:
            return math.inf
        value = max(value, -math.log1p(-r))

    return normalization * value

def ls_upper_multitwist(A: FNMap,
                        twists: Mapping[PantsCurveId, float],
                        normalization: float = NORMALIZATION) -> float:
    """Upper bound for `A` against `A` sheared by `twists`.

    Args:
      A: coordinate map.
      twists: arclength twist per interior curve.
      normalization: optional; factor in front of the log-ratio.
    """
    collars = []
    for i, s in sorted(twists.items()):
        if A.template.is_boundary(i):
            raise UsageError(f'Twist on boundary curve {i}')
        collars.append((s, collar_width(A.length(i))))

    return ls_upper_from_collars(collars, normalization)

def multitwist_of(A: FNMap, B: FNMap,
                  indices: Iterable[PantsCurveId],
                  rel_tol: float = 1e-12) -> Optional[Dict[PantsCurveId,
                                                           float]]:
    """Arclength twists taking `A` to `B` on the scanned indices.

    Returns `None` unless the lengths agree on the scan.
    """
    if A.template != B.template:
        raise UsageError(
            f'Template mismatch: {A.template.kind} vs {B.template.kind}')
    twists = {}
    for i in indices:
        if not A.template.has_curve(i):
            continue
        if not math.isclose(A.length(i), B.length(i), rel_tol=rel_tol):
            return None
        if A.template.is_boundary(i):
            continue
        s = B.arclength_twist(i) - A.arclength_twist(i)
        if s != 0:
            twists[i] = s
    return twists

def ls_estimate(A: FNMap, B: FNMap, window: Window,
                twists: Optional[Mapping[PantsCurveId, float]] = None,
                max_chain: int = 3,
                max_wind: int = 2,
                jobs: int = 1,
                normalization: float = NORMALIZATION,
                holonomy: Optional[Mapping[str, float]] = None,
                log: Callable = print) -> MetricEstimate:
    """Bracket `[ls_lower, ls_upper_multitwist]`.

    The upper bound is +∞ unless `B` is declared a multi-twist of `A`.
    """
    lower = ls_lower(A, B, window, max_chain=max_chain, max_wind=max_wind,
                     jobs=jobs, normalization=normalization,
                     holonomy=holonomy, log=log)
    if twists is None:
        return lower
    upper = ls_upper_multitwist(A, twists, normalization=normalization)

    return MetricEstimate(lower.lower, upper, lower.witness, window,
                          lower.enumeration)

def _records(values: Sequence[float]) -> list:
    """Positions where the running maximum strictly increases."""
    records, best = [], -math.inf
    for k, value in enumerate(values):
        if k > 0 and value > best:
            records.append(k)
        best = max(best, value)
    return records

def _recent(records: Sequence[int], scan: int) -> bool:
    return bool(records) and records[-1] >= scan - math.ceil(scan / 2)

def qc_divergence_certificate(base: FNMap,
                              sequence: Sequence[Tuple[PantsCurveId, int]],
                              scan: Optional[int] = None,
                              length_bound: Optional[float] = None,
                              log_lengths: Optional[Sequence[float]] = None,
                              description: str = '',
                              log: Callable = print) -> DivergenceCertificate:
    """Certify quasiconformal divergence of a multi-twist sequence.

    A sequence twisting curves of uniformly bounded length by unbounded
    orders leaves every quasiconformal ball. On a finite scan, orders count
    as unbounded when their running maximum keeps growing through the last
    half of the scan. Without an explicit `length_bound`, lengths count as
    bounded unless their running maximum grows there.

    Args:
      base: base coordinates.
      sequence: pairs `(curve, order)` per step.
      scan: optional; number of steps inspected, the whole sequence by
        default.
      length_bound: optional; uniform length bound L.
      log_lengths: optional; log-lengths of the twisted curves, for lengths
        outside floating point range.
      description: optional; sequence description.
      log: optional; logging function.
    """
    scan = len(sequence) if scan is None else scan
    if scan < 1 or scan > len(sequence):
        raise UsageError(f'Invalid certificate scan {scan}')
    steps = list(sequence)[:scan]
    orders = tuple(abs(int(t)) for _, t in steps)
    if log_lengths is None:
        log_lengths = [math.log(base.length(i)) for i, _ in steps]
    else:
        log_lengths = list(log_lengths)[:scan]
    largest = max(log_lengths)
    bound = math.exp(largest) if largest < 709 else math.inf

    if length_bound is not None:
        bounded = largest <= math.log(length_bound)
        bound = length_bound
    else:
        bounded = not _recent(_records(log_lengths), scan)
    if not bounded:
        verdict = 'inapplicable'
    else:
        records = _records(orders)
        growing = len(records) >= 2 and _recent(records, scan)
        verdict = 'certified-divergent' if growing else 'not-certified'
    log(f'Certificate over {scan} steps: {verdict}')

    return DivergenceCertificate(description, orders, bound, verdict)
