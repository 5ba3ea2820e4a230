"""Simple closed curves relative to the pants decomposition.

Curves are cyclic itineraries: a strand through a pants (from an entry leg
to an exit leg) followed by a crossing of the exit curve, and so on until the
itinerary closes. A strand with equal entry and exit legs turns back around
the partner leg. Every crossing carries an integer winding: the number of
extra full turns taken along the crossed curve.

Only constructively simple families are built:

    - pants curves `C_i`;
    - duals `β_i` and their Dehn twists;
    - chains through three or more pants, turning back at both ends.
"""
from dataclasses import dataclass, replace
from itertools import permutations, product
from typing import (Callable, Dict, Iterator, List, Mapping, Optional,
                    Sequence, Tuple)
import json

import networkx as nx
from scipy.optimize import brentq

from .common_types import PantsCurveId, PantsId
from .exceptions import InconsistentObservationsError, UsageError
from .fn_space import TWO_PI, FNMap
from .hyp_kernel import curve_length
from .pants_graph import DecompositionTemplate, Window

FAMILIES = ('pants-curve', 'dual', 'twisted-dual', 'chain')

@dataclass(frozen=True)
class Strand:
    """Arc of a curve inside one pants."""
    pants: PantsId
    """Pants id."""
    entry: int
    """Entry leg index."""
    exit: int
    """Exit leg index."""

    def reversed(self) -> 'Strand':
        return Strand(self.pants, self.exit, self.entry)

@dataclass(frozen=True)
class Crossing:
    """Crossing of a pants curve."""
    curve: PantsCurveId
    """Crossed curve."""
    winding: int = 0
    """Extra full turns along the crossed curve."""

@dataclass(frozen=True)
class Curve:
    """Simple closed curve given by its itinerary.

    Crossing `k` follows strand `k`. Pants curves have an empty itinerary and
    carry their id in `index`.
    """
    family: str
    """One of pants-curve, dual, twisted-dual or chain."""
    strands: Tuple[Strand, ...] = ()
    """Strands in cyclic order."""
    crossings: Tuple[Crossing, ...] = ()
    """Crossings in cyclic order."""
    index: Optional[PantsCurveId] = None
    """Pants curve id or dual curve id."""

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise UsageError(f'Unknown curve family: {self.family}')
        if len(self.strands) != len(self.crossings):
            raise UsageError('Itinerary strands and crossings do not pair')

    def to_json(self) -> Dict:
        if self.family == 'pants-curve':
            return {'family': self.family, 'i': self.index}
        if self.family in ('dual', 'twisted-dual'):
            return {'family': self.family, 'i': self.index,
                    'k': self.crossings[0].winding}
        return {'family': self.family,
                'strands': [[s.pants, s.entry, s.exit] for s in self.strands],
                'itinerary': [[c.curve, c.winding] for c in self.crossings]}

    def key(self) -> str:
        """Deterministic serialization used for ordering and ties."""
        return json.dumps(self.to_json(), sort_keys=True)

    def sort_key(self) -> Tuple[int, str]:
        return FAMILIES.index(self.family), self.key()

def pants_curve(i: PantsCurveId) -> Curve:
    return Curve('pants-curve', index=i)

def intersection_with_pants_curve(curve: Curve, i: PantsCurveId) -> int:
    """Number of crossings of `curve` with `C_i`."""
    return sum(1 for crossing in curve.crossings if crossing.curve == i)

def dehn_twist_curve(curve: Curve, i: PantsCurveId, k: int) -> Curve:
    """Image of `curve` under `k` Dehn twists along `C_i`."""
    if k == 0 or intersection_with_pants_curve(curve, i) == 0:
        return curve
    crossings = tuple(Crossing(c.curve, c.winding + k) if c.curve == i else c
                      for c in curve.crossings)
    family = curve.family
    if family in ('dual', 'twisted-dual'):
        family = 'dual' if crossings[0].winding == 0 else 'twisted-dual'

    return replace(curve, family=family, crossings=crossings)

def dual_curve(template: DecompositionTemplate, i: PantsCurveId) -> Curve:
    """Curve meeting `C_i` minimally and no other pants curve.

    Across two distinct pants the curve turns back around the partner leg in
    each of them; a pants glued to itself is crossed once by the strand
    joining its two glued legs.
    """
    attachments = template.adjacency(i)
    if len(attachments) == 1:
        raise UsageError(f'Curve {i} is a boundary curve')
    first, second = attachments
    if first.pants == second.pants:
        strands = (Strand(first.pants, first.leg, second.leg),)
        crossings = (Crossing(i),)
    else:
        strands = (Strand(first.pants, first.leg, first.leg),
                   Strand(second.pants, second.leg, second.leg))
        crossings = (Crossing(i), Crossing(i))

    return Curve('dual', strands, crossings, index=i)

def twisted_dual(template: DecompositionTemplate, i: PantsCurveId,
                 k: int) -> Curve:
    """Dual curve of `C_i` twisted `k` times along `C_i`."""
    return dehn_twist_curve(dual_curve(template, i), i, k)

def _leg_on(template: DecompositionTemplate, pid: PantsId,
            curve: PantsCurveId) -> int:
    for att in template.adjacency(curve):
        if att.pants == pid:
            return att.leg
    raise UsageError(f'Curve {curve} is not a leg of pants {pid}')

def chain_curve(template: DecompositionTemplate,
                path: Sequence[PantsId],
                joins: Optional[Sequence[PantsCurveId]] = None,
                windings: Optional[Sequence[int]] = None) -> Curve:
    """Curve running along a path of distinct pants and back.

    The curve turns back at both ends and crosses every joining curve twice
    with the same winding.

    Args:
      template: decomposition template.
      path: pants ids `p0, ..., pr` with `r >= 1`.
      joins: optional; curve joining `p(k-1)` and `pk`. Required when two
        consecutive pants share more than one curve.
      windings: optional; winding on each joining curve.
    """
    path = list(path)
    r = len(path) - 1
    if r < 1 or len(set(path)) != len(path):
        raise UsageError(f'Chain needs distinct pants, got {path}')
    if joins is None:
        joins = []
        for prev, pid in zip(path, path[1:]):
            shared = [curve for other, curve in template.neighbours(prev)
                      if other == pid]
            if len(shared) != 1:
                raise UsageError(
                    f'Pants {prev} and {pid} share {len(shared)} curves')
            joins.append(shared[0])
    if windings is None:
        windings = [0] * r
    if len(joins) != r or len(windings) != r:
        raise UsageError('Chain joins and windings must match the path')

    # into[k] / out[k]: legs of pants k on joins[k-1] and joins[k]
    into = [None] + [_leg_on(template, path[k], joins[k - 1])
                     for k in range(1, r + 1)]
    out = [_leg_on(template, path[k], joins[k]) for k in range(r)] + [None]
    strands = [Strand(path[0], out[0], out[0])]
    crossings = [Crossing(joins[0], windings[0])]
    for k in range(1, r):
        strands.append(Strand(path[k], into[k], out[k]))
        crossings.append(Crossing(joins[k], windings[k]))
    strands.append(Strand(path[r], into[r], into[r]))
    crossings.append(Crossing(joins[r - 1], windings[r - 1]))
    for k in range(r - 1, 0, -1):
        strands.append(Strand(path[k], out[k], into[k]))
        crossings.append(Crossing(joins[k - 1], windings[k - 1]))

    return Curve('chain', tuple(strands), tuple(crossings))

def _simple_paths(window: Window,
                  max_pants: int) -> Iterator[Tuple[List[PantsId],
                                                    List[PantsCurveId]]]:
    """Paths of 3 to `max_pants` distinct pants, one per orientation."""
    if max_pants < 3:
        return
    graph = window.dual_graph()
    for source, target in permutations(sorted(graph), 2):
        for edges in nx.all_simple_edge_paths(graph, source, target,
                                              cutoff=max_pants - 1):
            path = [source] + [v for _, v, _ in edges]
            if len(path) >= 3 and tuple(path) < tuple(reversed(path)):
                yield path, [curve for _, _, curve in edges]

def enumerate_candidates(window: Window, max_chain: int,
                         max_wind: int) -> List[Curve]:
    """Constructively simple curves supported in `window`.

    Args:
      window: window of a template.
      max_chain: maximum number of pants of a chain (chains start at 3).
      max_wind: maximum |winding| at each crossing.
    """
    if max_chain < 0 or max_wind < 0:
        raise UsageError('Enumeration bounds must be non-negative')
    template = window.template
    windings = range(-max_wind, max_wind + 1)
    curves = {}
    for i in sorted(window.interior):
        for curve in [pants_curve(i)] + [twisted_dual(template, i, k)
                                         for k in windings]:
            curves[curve.key()] = curve
    for path, joins in _simple_paths(window, max_chain):
        for wind in product(windings, repeat=len(joins)):
            curve = chain_curve(template, path, joins, wind)
            curves[curve.key()] = curve

    return sorted(curves.values(), key=Curve.sort_key)

def curve_from_json(data: Mapping, template: DecompositionTemplate) -> Curve:
    """Curve from its JSON document."""
    family = data.get('family')
    if family == 'pants-curve':
        return pants_curve(int(data['i']))
    if family in ('dual', 'twisted-dual'):
        return twisted_dual(template, int(data['i']), int(data.get('k', 0)))
    if family == 'chain':
        strands = tuple(Strand(*map(int, s)) for s in data['strands'])
        crossings = tuple(Crossing(int(c), int(w))
                          for c, w in data['itinerary'])
        return Curve('chain', strands, crossings)
    raise UsageError(f'Unknown curve family: {family}')

@dataclass(frozen=True)
class TwistRecovery:
    """Twist recovered from length observations."""
    theta: float
    """Twist in radians."""
    flat: bool = False
    """|θ| below the resolution of the dual length; reported as 0."""
    sign_resolved: bool = True
    """The sign was fixed by the twisted dual observation."""

def twist_forward_surface(window: Window,
                          lengths: Mapping[PantsCurveId, float],
                          i: PantsCurveId,
                          theta: float) -> FNMap:
    """Surface with the given window lengths, twist `theta` on `C_i` and no
    other twist."""
    missing = [c for c in window.curves if c not in lengths]
    if missing:
        raise UsageError(f'Missing observed lengths for curves {missing}')
    table = {c: (lengths[c], theta if c == i else 0.0)
             for c in window.curves}

    return FNMap.tabulated(window.template, table)

def recover_twist(window: Window,
                  i: PantsCurveId,
                  lengths: Mapping[PantsCurveId, float],
                  L_beta: float,
                  L_beta_prime: Optional[float] = None,
                  tol: float = 1e-6,
                  flat_threshold: float = 1e-4,
                  xtol: float = 1e-14,
                  max_doublings: int = 60,
                  log: Callable = print) -> TwistRecovery:
    """Invert the dual lengths of `C_i` into its twist.

    All other twists are taken to be 0. The dual length is even and
    increasing in |θ|, so |θ| follows from a bracketed root search; the sign
    follows from the length of the once twisted dual.

    Args:
      window: window containing both sides of `C_i`.
      i: interior curve of `window`.
      lengths: observed lengths of the window curves.
      L_beta: observed length of the dual curve.
      L_beta_prime: optional; observed length of the once twisted dual.
      tol: optional; tolerance on reproduced lengths.
      flat_threshold: optional; |θ| reported as 0 below this value.
      xtol: optional; absolute tolerance of the root search.
      max_doublings: optional; bracket expansion limit.
      log: optional; logging function.
    """
    if i not in window.interior:
        raise UsageError(f'Curve {i} is not interior to the window')
    template = window.template
    length = lengths[i]
    beta = dual_curve(template, i)

    def surface(s: float) -> FNMap:
        return twist_forward_surface(window, lengths, i, TWO_PI * s / length)

    def excess(s: float) -> float:
        return curve_length(window, surface(s), beta) - L_beta

    at_zero = excess(0.0)
    if at_zero > tol * max(1.0, L_beta):
        raise InconsistentObservationsError(
            f'Dual length {L_beta} below its minimum {L_beta + at_zero}')
    if at_zero >= 0:
        s_abs = 0.0
    else:
        upper = length
        for _ in range(max_doublings):
            if excess(upper) >= 0:
                break
            upper *= 2
        else:
            raise InconsistentObservationsError(
                f'No twist up to {upper} reproduces dual length {L_beta}')
        log(f'Twist bracket for curve {i}: [0, {upper}]')
        s_abs = brentq(excess, 0.0, upper, xtol=xtol)
    theta = TWO_PI * s_abs / length
    if theta < flat_threshold:
        return TwistRecovery(0.0, flat=True,
                             sign_resolved=L_beta_prime is not None)
    if L_beta_prime is None:
        return TwistRecovery(theta, sign_resolved=False)

    beta_prime = twisted_dual(template, i, 1)
    residuals = []
    for sign in (1, -1):
        predicted = curve_length(window, surface(sign * s_abs), beta_prime)
        residuals.append((abs(predicted - L_beta_prime), sign))
    residual, sign = min(residuals)
    if residual > tol * max(1.0, L_beta_prime):
        raise InconsistentObservationsError(
            f'Twisted dual length {L_beta_prime} not reproduced '
            f'(residual {residual})')

    return TwistRecovery(sign * theta)
