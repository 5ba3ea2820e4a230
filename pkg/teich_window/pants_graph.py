"""Combinatorial pants decompositions and their finite windows.

A decomposition is exposed through a pure adjacency oracle: `pants(pid)`
returns the three legs of a pants and `adjacency(curve)` the one or two
attachments of a curve. Infinite kinds compute both from closed formulas, so
nothing is ever materialized globally.

Curve numbering of the infinite kinds:

    flute         pants n >= 1 has legs (2n, B), (2n+2, A), (2n+1, A); the
                  chain curve 2n+2 joins pants n and n+1 and 2n+1 is the
                  cuff of pants n. Pants 0 has boundary legs 0 and 1.
    flute-handle  as flute but pants 0 is glued to itself along curve 0.
    ladder        pants 2n has legs (3n, B), (3n+1, A), (3n+2, A) and pants
                  2n+1 has legs (3n+1, B), (3n+2, B), (3n+3, A).
    binary-tree   pants v has legs (v, B), (2v+1, A), (2v+2, A).

Curve 0 is a boundary curve (side A) in every infinite kind except
flute-handle.
"""
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Dict, FrozenSet, Iterator, List, Mapping, Optional, Tuple
import json

import networkx as nx

from .common_types import PantsCurveId, PantsId
from .exceptions import CurveLookupError, StructuralError, UsageError

class Side(str, Enum):
    """Side of a pants curve."""
    A = 'A'
    B = 'B'

    @property
    def opposite(self) -> 'Side':
        return Side.B if self is Side.A else Side.A

@dataclass(frozen=True)
class Leg:
    """Boundary leg of a pants attached to a curve."""
    curve: PantsCurveId
    """Curve the leg is glued to."""
    side: Side
    """Side of the curve the pants lies on."""

@dataclass(frozen=True)
class Attachment:
    """A pants seen from one of its curves."""
    pants: PantsId
    """Pants id."""
    side: Side
    """Side of the curve."""
    leg: int
    """Index of the leg within the pants (0, 1 or 2)."""

@dataclass(frozen=True)
class Pants:
    """Generalized pair of pants with three boundary legs."""
    id: PantsId
    """Pants id."""
    legs: Tuple[Leg, Leg, Leg]
    """Legs in cyclic order."""

    def __post_init__(self):
        if len(self.legs) != 3:
            raise StructuralError(
                f'Pants {self.id} has {len(self.legs)} legs instead of 3')

    def leg_index(self, curve: PantsCurveId, side: Side) -> int:
        """Index of the leg glued to `curve` on `side`."""
        for i, leg in enumerate(self.legs):
            if leg.curve == curve and leg.side is side:
                return i
        raise CurveLookupError(
            f'Pants {self.id} has no leg on curve {curve} side {side.value}')

    def self_glued(self) -> Optional[Tuple[int, int, int]]:
        """Legs `(j, j', m)` if two legs share a curve, else `None`."""
        for a, b in ((0, 1), (1, 2), (0, 2)):
            if self.legs[a].curve == self.legs[b].curve:
                return a, b, 3 - a - b
        return None

    def partner(self, leg: int) -> int:
        """Leg whose seam foot marks the twist origin on `leg`.

        The partner is the next leg in cyclic order, except that both legs of
        a self-glued pair are marked by the seam to the third leg.
        """
        glued = self.self_glued()
        if glued is not None and leg in glued[:2]:
            return glued[2]
        return (leg + 1) % 3

class DecompositionTemplate(ABC):
    """Countable pants decomposition given by an adjacency oracle."""
    kind: str = ''

    @abstractmethod
    def has_pants(self, pid: PantsId) -> bool:
        """Is `pid` a pants of the decomposition?"""

    @abstractmethod
    def has_curve(self, curve: PantsCurveId) -> bool:
        """Is `curve` a curve of the decomposition?"""

    @abstractmethod
    def _pants(self, pid: PantsId) -> Pants:
        pass

    @abstractmethod
    def _adjacency(self, curve: PantsCurveId) -> Tuple[Attachment, ...]:
        pass

    @property
    @abstractmethod
    def params(self) -> Dict:
        """Parameters that rebuild the template with `build_template`."""

    @property
    def finite(self) -> bool:
        return False

    @property
    def key(self) -> str:
        return json.dumps({'kind': self.kind, 'params': self.params},
                          sort_keys=True)

    def __eq__(self, other) -> bool:
        if not isinstance(other, DecompositionTemplate):
            return NotImplemented
        return self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def pants(self, pid: PantsId) -> Pants:
        """The pants with id `pid`."""
        if not self.has_pants(pid):
            raise CurveLookupError(f'Pants {pid} not in {self.kind} template')
        return self._pants(pid)

    def adjacency(self, curve: PantsCurveId) -> Tuple[Attachment, ...]:
        """Attachments of `curve`, sorted by pants and side."""
        if not self.has_curve(curve):
            raise CurveLookupError(
                f'Curve {curve} not in {self.kind} template')
        return self._adjacency(curve)

    def is_boundary(self, curve: PantsCurveId) -> bool:
        return len(self.adjacency(curve)) == 1

    def neighbours(self, pid: PantsId) -> List[Tuple[PantsId,
                                                     PantsCurveId]]:
        """Adjacent pants and the curves joining them (no self loops)."""
        edges = set()
        for leg in self.pants(pid).legs:
            for att in self.adjacency(leg.curve):
                if att.pants != pid:
                    edges.add((att.pants, leg.curve))
        return sorted(edges)

    def curve_ids(self, limit: int) -> Iterator[PantsCurveId]:
        """Curve ids below `limit` in increasing order."""
        for curve in range(limit):
            if self.has_curve(curve):
                yield curve

    def to_json(self) -> Dict:
        return {'kind': self.kind, 'params': self.params}

@dataclass(frozen=True, eq=False)
class FluteTemplate(DecompositionTemplate):
    """Flute surface: a ray of pants, each with one cuff."""
    handle: bool = False
    """Glue pants 0 to itself along curve 0."""

    @property
    def kind(self) -> str:
        return 'flute-handle' if self.handle else 'flute'

    @property
    def params(self) -> Dict:
        return {}

    @staticmethod
    def chain_curve(n: int) -> PantsCurveId:
        """Curve joining pants n and n+1."""
        if n < 0:
            raise CurveLookupError(f'No chain curve with index {n}')
        return 2 * n + 2

    def has_pants(self, pid: PantsId) -> bool:
        return isinstance(pid, int) and pid >= 0

    def has_curve(self, curve: PantsCurveId) -> bool:
        if not isinstance(curve, int) or curve < 0:
            return False
        return not (self.handle and curve == 1)

    def _pants(self, pid: PantsId) -> Pants:
        if pid == 0:
            first = (Leg(0, Side.A), Leg(0, Side.B)) if self.handle else \
                (Leg(0, Side.A), Leg(1, Side.A))
            return Pants(0, first + (Leg(2, Side.A),))
        return Pants(pid, (Leg(2*pid, Side.B), Leg(2*pid + 2, Side.A),
                           Leg(2*pid + 1, Side.A)))

    def _adjacency(self, curve: PantsCurveId) -> Tuple[Attachment, ...]:
        if curve == 0:
            if self.handle:
                return (Attachment(0, Side.A, 0), Attachment(0, Side.B, 1))
            return (Attachment(0, Side.A, 0),)
        if curve == 1:
            return (Attachment(0, Side.A, 1),)
        n, rem = divmod(curve - 1, 2)
        if rem == 0:
            return (Attachment(n, Side.A, 2),)
        n = (curve - 2) // 2
        return (Attachment(n, Side.A, 2 if n == 0 else 1),
                Attachment(n + 1, Side.B, 0))

@dataclass(frozen=True, eq=False)
class LadderTemplate(DecompositionTemplate):
    """Ladder surface: an infinite chain of handles."""
    kind = 'ladder'

    @property
    def params(self) -> Dict:
        return {}

    def has_pants(self, pid: PantsId) -> bool:
        return isinstance(pid, int) and pid >= 0

    def has_curve(self, curve: PantsCurveId) -> bool:
        return isinstance(curve, int) and curve >= 0

    def _pants(self, pid: PantsId) -> Pants:
        n, odd = divmod(pid, 2)
        if odd:
            return Pants(pid, (Leg(3*n + 1, Side.B), Leg(3*n + 2, Side.B),
                               Leg(3*n + 3, Side.A)))
        first = Leg(0, Side.A) if n == 0 else Leg(3*n, Side.B)
        return Pants(pid, (first, Leg(3*n + 1, Side.A),
                           Leg(3*n + 2, Side.A)))

    def _adjacency(self, curve: PantsCurveId) -> Tuple[Attachment, ...]:
        n, rem = divmod(curve, 3)
        if curve == 0:
            return (Attachment(0, Side.A, 0),)
        if rem == 0:
            return (Attachment(2*n - 1, Side.A, 2),
                    Attachment(2*n, Side.B, 0))
        return (Attachment(2*n, Side.A, rem), Attachment(2*n + 1, Side.B,
                                                         rem - 1))

@dataclass(frozen=True, eq=False)
class BinaryTreeTemplate(DecompositionTemplate):
    """Surface whose dual graph is the rooted binary tree."""
    kind = 'binary-tree'

    @property
    def params(self) -> Dict:
        return {}

    def has_pants(self, pid: PantsId) -> bool:
        return isinstance(pid, int) and pid >= 0

    def has_curve(self, curve: PantsCurveId) -> bool:
        return isinstance(curve, int) and curve >= 0

    def _pants(self, pid: PantsId) -> Pants:
        first = Leg(0, Side.A) if pid == 0 else Leg(pid, Side.B)
        return Pants(pid, (first, Leg(2*pid + 1, Side.A),
                           Leg(2*pid + 2, Side.A)))

    def _adjacency(self, curve: PantsCurveId) -> Tuple[Attachment, ...]:
        if curve == 0:
            return (Attachment(0, Side.A, 0),)
        parent = (curve - 1) // 2
        return (Attachment(parent, Side.A, 1 if curve % 2 else 2),
                Attachment(curve, Side.B, 0))

@dataclass(frozen=True, eq=False)
class FiniteTemplate(DecompositionTemplate):
    """Finite decomposition given by an explicit list of pants."""
    pants_list: Tuple[Pants, ...]
    """All pants, sorted by id."""
    _by_id: Mapping[PantsId, Pants] = field(init=False, repr=False)
    _attachments: Mapping[PantsCurveId, Tuple[Attachment, ...]] = field(
        init=False, repr=False)
    kind = 'custom-finite'

    def __post_init__(self):
        by_id = {}
        for pants in self.pants_list:
            if pants.id in by_id:
                raise StructuralError(f'Pants id {pants.id} repeated')
            by_id[pants.id] = pants
        attachments = {}
        for pants in self.pants_list:
            for j, leg in enumerate(pants.legs):
                attachments.setdefault(leg.curve, []).append(
                    Attachment(pants.id, leg.side, j))
        for curve, atts in attachments.items():
            if len(atts) > 2:
                raise StructuralError(
                    f'Curve {curve} has degree {len(atts)}, expected 1 or 2')
            if len(atts) == 2 and atts[0].side is atts[1].side:
                raise StructuralError(
                    f'Curve {curve} is glued twice on side '
                    f'{atts[0].side.value}')
        object.__setattr__(self, '_by_id', by_id)
        object.__setattr__(
            self, '_attachments',
            {c: tuple(sorted(a, key=lambda x: (x.pants, x.side.value)))
             for c, a in attachments.items()})
        self._check_connected()

    def _check_connected(self) -> None:
        if not self.pants_list:
            raise StructuralError('Template without pants')
        graph = nx.Graph()
        graph.add_nodes_from(self._by_id)
        for pid in self._by_id:
            graph.add_edges_from((pid, other)
                                 for other, _ in self.neighbours(pid))
        if not nx.is_connected(graph):
            reached = nx.node_connected_component(graph,
                                                  self.pants_list[0].id)
            missing = sorted(set(self._by_id) - reached)
            raise StructuralError(
                f'Dual graph disconnected at pants {missing}')

    @property
    def finite(self) -> bool:
        return True

    @property
    def params(self) -> Dict:
        params = {'pants': [{'id': p.id,
                             'legs': [[leg.curve, leg.side.value]
                                      for leg in p.legs]}
                            for p in self.pants_list]}
        boundary = [c for c in self.curve_ids() if self.is_boundary(c)]
        if boundary:
            params['boundary'] = boundary
        return params

    def has_pants(self, pid: PantsId) -> bool:
        return pid in self._by_id

    def has_curve(self, curve: PantsCurveId) -> bool:
        return curve in self._attachments

    def _pants(self, pid: PantsId) -> Pants:
        return self._by_id[pid]

    def _adjacency(self, curve: PantsCurveId) -> Tuple[Attachment, ...]:
        return self._attachments[curve]

    def curve_ids(self, limit: Optional[int] = None) -> Iterator[PantsCurveId]:
        for curve in sorted(self._attachments):
            if limit is None or curve < limit:
                yield curve

GENUS2 = {'pants': [{'id': 0, 'legs': [[0, 'A'], [1, 'A'], [2, 'A']]},
                    {'id': 1, 'legs': [[0, 'B'], [1, 'B'], [2, 'B']]}]}

def _finite_from_params(params: Mapping) -> FiniteTemplate:
    """Validate a custom adjacency document and build the template.

    A curve attached to a single pants is a boundary curve only when the
    document lists it under `boundary` or `curves`; otherwise the leg is
    dangling.
    """
    try:
        raw_pants = params['pants']
    except (KeyError, TypeError) as exc:
        raise StructuralError('Custom template needs a "pants" list') from exc
    declared = params.get('curves')
    boundary = set(params.get('boundary', ()))
    pants_list = []
    for raw in raw_pants:
        try:
            pid = int(raw['id'])
            legs = tuple(Leg(int(curve), Side(side))
                         for curve, side in raw['legs'])
        except (KeyError, TypeError, ValueError) as exc:
            raise StructuralError(f'Malformed pants entry: {raw}') from exc
        for leg in legs:
            if leg.curve < 0:
                raise StructuralError(f'Negative curve id {leg.curve}')
            if declared is not None and leg.curve not in declared:
                raise StructuralError(
                    f'Dangling leg: pants {pid} references missing curve '
                    f'{leg.curve}')
        pants_list.append(Pants(pid, legs))
    template = FiniteTemplate(tuple(sorted(pants_list, key=lambda p: p.id)))
    if declared is not None:
        for curve in declared:
            if not template.has_curve(curve):
                raise StructuralError(f'Curve {curve} has degree 0')
        boundary.update(declared)
    for curve in template.curve_ids():
        atts = template.adjacency(curve)
        if len(atts) == 1 and curve not in boundary:
            raise StructuralError(
                f'Dangling leg: pants {atts[0].pants} leaves curve {curve} '
                'unpaired and it is not declared as boundary')
    for curve in sorted(boundary - set(declared or ())):
        if not (template.has_curve(curve) and template.is_boundary(curve)):
            raise StructuralError(
                f'Boundary curve {curve} is not attached exactly once')

    return template

def build_template(kind: str,
                   params: Optional[Mapping] = None) -> DecompositionTemplate:
    """Build a decomposition template.

    Args:
      kind: one of flute, flute-handle, ladder, binary-tree, genus2 or
        custom-finite.
      params: optional; adjacency document for custom-finite, or
        `{'handle': bool}` for flute.
    """
    params = {} if params is None else params
    if kind == 'flute':
        return FluteTemplate(handle=bool(params.get('handle', False)))
    elif kind == 'flute-handle':
        return FluteTemplate(handle=True)
    elif kind == 'ladder':
        return LadderTemplate()
    elif kind == 'binary-tree':
        return BinaryTreeTemplate()
    elif kind == 'genus2':
        return _finite_from_params(GENUS2)
    elif kind == 'custom-finite':
        return _finite_from_params(params)
    raise UsageError(f'Unknown template kind: {kind}')

def load_template(spec: str) -> DecompositionTemplate:
    """Load a template from `builtin:NAME` or a JSON file.

    The file holds either a custom adjacency document or
    `{"kind": ..., "params": ...}`.
    """
    if spec.startswith('builtin:'):
        return build_template(spec.split(':', 1)[1])
    with Path(spec).expanduser().open() as fin:
        data = json.load(fin)

    return template_from_json(data)

def template_from_json(data: Mapping) -> DecompositionTemplate:
    """Template from its JSON document."""
    if 'kind' in data:
        return build_template(data['kind'], data.get('params'))
    return build_template('custom-finite', data)

def adjacency(template: DecompositionTemplate,
              curve: PantsCurveId) -> Tuple[Attachment, ...]:
    """Attachments of `curve` in `template`."""
    return template.adjacency(curve)

def check_degrees(template: DecompositionTemplate, n: int) -> None:
    """Check the degree of the first `n` curve ids is 1 or 2."""
    for curve in template.curve_ids(n):
        degree = len(template.adjacency(curve))
        if degree not in (1, 2):
            raise StructuralError(f'Curve {curve} has degree {degree}')

@dataclass(frozen=True)
class Window:
    """Finite connected union of pants of a template."""
    template: DecompositionTemplate
    """Decomposition template."""
    center: PantsId
    """Centre pants."""
    radius: int
    """Graph radius around the centre."""
    pants: FrozenSet[PantsId]
    """Pants in the window."""
    interior: FrozenSet[PantsCurveId]
    """Curves with both attachments inside."""
    frontier: FrozenSet[PantsCurveId]
    """Remaining legs, treated as geodesic boundary."""

    @property
    def curves(self) -> List[PantsCurveId]:
        return sorted(self.interior | self.frontier)

    def edges(self) -> List[Tuple[PantsId, PantsId, PantsCurveId]]:
        """Interior curves joining two distinct pants of the window."""
        edges = []
        for curve in sorted(self.interior):
            first, second = self.template.adjacency(curve)
            if first.pants != second.pants:
                edges.append((first.pants, second.pants, curve))
        return edges

    def dual_graph(self) -> nx.MultiGraph:
        """Pants of the window joined by their interior curves.

        Edges are keyed by curve id.
        """
        graph = nx.MultiGraph()
        graph.add_nodes_from(sorted(self.pants))
        for a, b, curve in self.edges():
            graph.add_edge(a, b, key=curve)
        return graph

    def to_json(self) -> Dict:
        return {'center': self.center,
                'radius': self.radius,
                'pants': sorted(self.pants),
                'interior': sorted(self.interior),
                'frontier': sorted(self.frontier)}

def window(template: DecompositionTemplate, center: PantsId,
           radius: int) -> Window:
    """Extract the pants within graph distance `radius` of `center`.

    Args:
      template: decomposition template.
      center: centre pants id.
      radius: graph radius.
    """
    if radius < 0:
        raise UsageError(f'Negative window radius: {radius}')
    if not template.has_pants(center):
        raise CurveLookupError(f'Window centre {center} not in template')
    ball = nx.Graph()
    ball.add_node(center)
    shell = [center]
    for _ in range(radius):
        grown = []
        for pid in shell:
            for other, _ in template.neighbours(pid):
                if other not in ball:
                    grown.append(other)
                ball.add_edge(pid, other)
        shell = grown
    dist = nx.single_source_shortest_path_length(ball, center, cutoff=radius)

    interior, frontier = set(), set()
    for pid in dist:
        for leg in template.pants(pid).legs:
            atts = template.adjacency(leg.curve)
            if len(atts) == 2 and all(att.pants in dist for att in atts):
                interior.add(leg.curve)
            else:
                frontier.add(leg.curve)

    return Window(template, center, radius, frozenset(dist),
                  frozenset(interior), frozenset(frontier))
