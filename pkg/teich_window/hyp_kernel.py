"""Holonomy of windows and trace lengths.

Hyperbolic structures are developed by walking a frame along piecewise
geodesic paths: `move d` translates the frame forward by `d` and `turn q`
rotates it by `q` quarter turns to the left. The product of the elementary
isometries along a closed walk is conjugate to the holonomy of the walked
loop, so its trace gives the geodesic length.

Each pants is cut by its three seams into two right-angled hexagons. Moving
along a leg in the forward direction keeps the pants on the left. The twist
origin of a leg (its marker) is the foot of the seam to its partner leg, and
the gluing across a curve shifts the marker of side B by the arclength
twist `l·θ/(2π)` measured from the marker of side A.

Walks across thin pants travel far and their products cancel massively, so
they are multiplied in decimal arithmetic. The working precision grows with
the distance travelled by the walk, seams are recomputed at that precision
and quarter turns are exact.

Two charts evaluate the same walks:

    - the primary chart works in SL(2, R), with stable seam formulas;
    - the oracle walks every curve backwards from another starting strand
      in the SO(2, 1) hyperboloid model, with the classical seam formula.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from decimal import Decimal, DecimalException, localcontext
from functools import lru_cache
from typing import (TYPE_CHECKING, Callable, Dict, Iterable, List, Mapping,
                    Optional, Sequence, Tuple, Union)
import math

import numpy as np
import numpy.typing as npt

from .common_types import PantsCurveId, PantsId
from .exceptions import (DomainError, InvariantViolation, NonHyperbolicError,
                         NumericError, UsageError)
from .fn_space import FNMap
from .pants_graph import Pants, Window

if TYPE_CHECKING:
    from .curves import Curve

DET_TOL = 1e-12
TRACE_TOL = 1e-9
PARABOLIC_TOL = 1e-12
GUARD_DIGITS = 30
"""Decimal digits kept beyond the growth of a walk product."""
LOG10 = math.log(10)
MODELS = ('sl2', 'so21')

Real = Union[float, Decimal]
Move = Tuple[str, Real]

def _finite(x: Real) -> bool:
    if isinstance(x, Decimal):
        return x.is_finite()
    return math.isfinite(x)

def _matrix(rows: Sequence[Sequence[Real]]) -> npt.NDArray:
    return np.array([[Decimal(x) for x in row] for row in rows],
                    dtype=object)

def exact_sum(values: Iterable[Real]) -> Decimal:
    """Sum of floats or decimals without rounding."""
    values = [Decimal(x) for x in values]
    top = max(x.adjusted() for x in values)
    bottom = min(x.as_tuple().exponent for x in values)
    with localcontext() as ctx:
        ctx.prec = max(GUARD_DIGITS, top - bottom + 2)
        return sum(values, Decimal(0))

@dataclass(frozen=True)
class Isometry2:
    """Orientation preserving isometry as a unit determinant matrix.

    Entries are floats or decimals, never mixed.
    """
    matrix: npt.NDArray = field(compare=False)
    """Real 2x2 matrix."""

    def __post_init__(self):
        if not all(_finite(x) for x in self.matrix.flat):
            raise NumericError('Non-finite isometry entries')

    def __matmul__(self, other: 'Isometry2') -> 'Isometry2':
        return Isometry2(_renormalize(self.matrix @ other.matrix))

    @property
    def exact_trace(self) -> Decimal:
        return exact_sum(np.diagonal(self.matrix))

    @property
    def trace(self) -> float:
        return float(self.exact_trace)

    @property
    def det(self) -> float:
        (a, b), (c, d) = self.matrix
        return float(a * d - b * c)

    def inverse(self) -> 'Isometry2':
        (a, b), (c, d) = self.matrix
        return Isometry2(np.array([[d, -b], [-c, a]]))

    def to_list(self) -> List[List[float]]:
        return [[float(f'{x:.16g}') for x in row] for row in self.matrix]

def _renormalize(matrix: npt.NDArray) -> npt.NDArray:
    """Divide by the square root of the determinant."""
    if not all(_finite(x) for x in matrix.flat):
        raise NumericError('Non-finite holonomy product')
    det = matrix[0, 0] * matrix[1, 1] - matrix[0, 1] * matrix[1, 0]
    if det <= 0:
        raise NumericError(f'Holonomy product with determinant {det}')
    if isinstance(det, Decimal):
        return matrix / det.sqrt()
    return matrix / math.sqrt(det)

def _cosh(x: Decimal) -> Decimal:
    e = x.exp()
    return (e + 1 / e) / 2

def _sinh(x: Decimal) -> Decimal:
    e = x.exp()
    return (e - 1 / e) / 2

def _acosh(x: Decimal) -> Decimal:
    return (x + ((x - 1) * (x + 1)).sqrt()).ln()

def _asinh(x: Decimal) -> Decimal:
    return (x + (x * x + 1).sqrt()).ln()

def _eighth_turn(k: int) -> Tuple[Decimal, Decimal]:
    """Cosine and sine of `k·π/4`."""
    r = Decimal(2).sqrt() / 2
    values = (Decimal(1), r, Decimal(0), -r, Decimal(-1), -r, Decimal(0), r)
    return values[k % 8], values[(k - 2) % 8]

def _quarter_turns(value: Real) -> int:
    q = int(value)
    if q != value:
        raise UsageError(f'Turns must be whole quarter turns, got {value}')
    return q

def translation(d: Real) -> npt.NDArray:
    """Translation by `d` along the frame direction (SL(2, R))."""
    e = (Decimal(d) / 2).exp()
    return _matrix([[e, 0], [0, 1 / e]])

def rotation(q: int) -> npt.NDArray:
    """Rotation by `q` quarter turns to the left about the frame base."""
    c, s = _eighth_turn(q)
    return _matrix([[c, s], [-s, c]])

def boost(d: Real) -> npt.NDArray:
    """Translation by `d` in the hyperboloid model."""
    d = Decimal(d)
    ch, sh = _cosh(d), _sinh(d)
    return _matrix([[ch, 0, sh], [0, 1, 0], [sh, 0, ch]])

def spin(q: int) -> npt.NDArray:
    """Rotation by `q` quarter turns in the hyperboloid model."""
    c, s = _eighth_turn(2 * q)
    return _matrix([[c, -s, 0], [s, c, 0], [0, 0, 1]])

@lru_cache(maxsize=8192)
def _factor(kind: str, value: Real, model: str, digits: int) -> npt.NDArray:
    with localcontext() as ctx:
        ctx.prec = digits
        if kind == 'move':
            return translation(value) if model == 'sl2' else boost(value)
        q = _quarter_turns(value)
        return rotation(q) if model == 'sl2' else spin(q)

def walk_digits(moves: Iterable[Move]) -> int:
    """Working precision of a walk from the distance it travels."""
    span = sum(abs(float(value)) for kind, value in moves if kind == 'move')
    return GUARD_DIGITS + math.ceil(span / LOG10)

def walk_product(moves: Iterable[Move],
                 model: str = 'sl2',
                 digits: Optional[int] = None,
                 det_tol: float = DET_TOL) -> npt.NDArray:
    """Product of the elementary isometries of a walk, as decimals.

    Args:
      moves: sequence of `('move', d)` and `('turn', q)` steps, `q` whole.
      model: optional; `sl2` or `so21`.
      digits: optional; working precision, from `walk_digits` by default.
      det_tol: optional; largest determinant defect of an SL(2, R) product
        before renormalization.
    """
    if model not in MODELS:
        raise UsageError(f'Unknown model: {model}')
    moves = list(moves)
    if digits is None:
        digits = walk_digits(moves)
    with localcontext() as ctx:
        ctx.prec = digits
        result = _matrix(np.identity(2 if model == 'sl2' else 3))
        for kind, value in moves:
            if kind == 'move' and value == 0:
                continue
            result = result @ _factor(kind, value, model, digits)
        if model == 'sl2':
            (a, b), (c, d) = result
            defect = abs(a * d - b * c - 1)
            if defect > Decimal(det_tol):
                raise NumericError(
                    f'Holonomy product lost precision: determinant defect '
                    f'{float(defect):.3g}')
            result = _renormalize(result)

    return result

def evaluate_walk(moves: Iterable[Move], model: str = 'sl2') -> npt.NDArray:
    """Product of the elementary isometries of a walk, as floats."""
    result = walk_product(moves, model=model).astype(float)
    if not np.all(np.isfinite(result)):
        raise NumericError('Non-finite holonomy product')

    return result

def invert_walk(moves: Sequence[Move]) -> List[Move]:
    return [(kind, -value) for kind, value in reversed(moves)]

def trace_length(M: Isometry2, tol: float = PARABOLIC_TOL) -> float:
    """Translation length `2 acosh(|tr|/2)` of a hyperbolic element."""
    trace = abs(M.exact_trace)
    if trace <= 2 + Decimal(tol):
        raise NonHyperbolicError(
            f'|trace| = {float(trace)!r} is not hyperbolic')
    with localcontext() as ctx:
        ctx.prec = GUARD_DIGITS + max(0, trace.adjusted())
        return float(2 * _acosh(trace / 2))

def hyperboloid_trace_length(matrix: npt.NDArray,
                             tol: float = PARABOLIC_TOL) -> float:
    """Translation length from an SO(2, 1) trace `1 + 2cosh L`."""
    trace = exact_sum(np.diagonal(matrix))
    with localcontext() as ctx:
        ctx.prec = GUARD_DIGITS + max(0, trace.adjusted())
        half = (trace - 1) / 2
        if half <= 1 + Decimal(tol):
            raise NonHyperbolicError(
                f'trace {float(trace)!r} is not hyperbolic')
        return float(_acosh(half))

def collar_width(length: float) -> float:
    """Half-width of the embedded collar of a geodesic.

    sinh w = 1/sinh(length/2).
    """
    if not length > 0:
        raise DomainError(f'Collar width needs a positive length: {length}')
    half = length / 2
    if half > 700:
        return 2 * math.exp(-half)
    return math.asinh(1 / math.sinh(half))

def collar_width_from_log(log_length: float) -> float:
    """Collar width of the geodesic of length `exp(log_length)`.

    Below `exp(-30)` the asymptotic form `log 4 - log_length` is exact to
    double precision, and it keeps working after `exp` underflows.
    """
    if log_length < -30:
        return math.log(4) - log_length
    return collar_width(math.exp(log_length))

def seam_length(a1: float, a2: float, a3: float) -> float:
    """Seam between the legs of half-lengths `a1`, `a2` (opposite `a3`).

    Uses `sinh²(d/2) = (cosh a3 + cosh(a1 - a2)) / (2 sinh a1 sinh a2)`.
    """
    ratio = (math.cosh(a3) + math.cosh(a1 - a2)) / \
        (2 * math.sinh(a1) * math.sinh(a2))
    return 2 * math.asinh(math.sqrt(ratio))

def seam_length_classical(a1: float, a2: float, a3: float) -> float:
    """Seam from the right-angled hexagon cosine rule."""
    ratio = (math.cosh(a3) + math.cosh(a1) * math.cosh(a2)) / \
        (math.sinh(a1) * math.sinh(a2))
    return math.acosh(ratio)

@lru_cache(maxsize=8192)
def exact_seam(a1: float, a2: float, a3: float, classical: bool = False,
               digits: int = GUARD_DIGITS) -> Decimal:
    """Seam length to `digits` places, with either formula.

    Short legs cost the digits lost in `sinh`, long legs those lost near
    `acosh(1)`.
    """
    halves = (a1, a2, a3)
    extra = 10 + math.ceil(2 * max(halves) / LOG10 +
                           max(0.0, -math.log10(min(halves))))
    try:
        with localcontext() as ctx:
            ctx.prec = digits + extra
            a1, a2, a3 = (Decimal(x) for x in halves)
            if classical:
                ratio = (_cosh(a3) + _cosh(a1) * _cosh(a2)) / \
                    (_sinh(a1) * _sinh(a2))
                return _acosh(ratio)
            ratio = (_cosh(a3) + _cosh(a1 - a2)) / \
                (2 * _sinh(a1) * _sinh(a2))
            return 2 * _asinh(ratio.sqrt())
    except DecimalException as exc:
        raise NumericError(f'Degenerate hexagon with half-lengths '
                           f'{halves}') from exc

@dataclass(frozen=True)
class HolonomyChart:
    """Developed hyperbolic structure of a window."""
    window: Window
    """Window of the chart."""
    surface: FNMap
    """Coordinates of the structure."""
    model: str = 'sl2'
    """Matrix model, `sl2` (primary) or `so21` (oracle)."""
    reverse: bool = False
    """Walk curves backwards from a shifted starting strand."""
    det_tol: float = DET_TOL
    """Largest determinant defect of a walk product."""
    parabolic_tol: float = PARABOLIC_TOL
    """Margin of the hyperbolic trace test."""
    cuffs: Mapping[PantsCurveId, float] = field(default_factory=dict,
                                                compare=False, repr=False)
    """Lengths of the window curves."""
    shears: Mapping[PantsCurveId, float] = field(default_factory=dict,
                                                 compare=False, repr=False)
    """Arclength twists of the interior curves."""
    seams: Mapping[Tuple[PantsId, int, int], float] = field(
        default_factory=dict, compare=False, repr=False)
    """Double precision seam lengths per pants and leg pair."""
    generators: Mapping[str, npt.NDArray] = field(
        default_factory=dict, compare=False, repr=False)
    """Boundary loops of every pants, named `p{pants}.c{leg}`."""

    def pants(self, pid: PantsId) -> Pants:
        return self.window.template.pants(pid)

    def seam(self, pid: PantsId, a: int, b: int,
             digits: Optional[int] = None) -> Real:
        """Seam between legs `a` and `b`, exact to `digits` if given."""
        a, b = min(a, b), max(a, b)
        if digits is None:
            return self.seams[(pid, a, b)]
        halves = [self.cuffs[leg.curve] / 2 for leg in self.pants(pid).legs]
        return exact_seam(halves[a], halves[b], halves[3 - a - b],
                          classical=self.reverse, digits=digits)

    def leg_length(self, pid: PantsId, leg: int) -> float:
        return self.cuffs[self.pants(pid).legs[leg].curve]

    def _half_foot(self, pid: PantsId, leg: int, other: int) -> bool:
        """Is the foot of seam (leg, other) half a turn from the marker?"""
        return other != self.pants(pid).partner(leg)

    def _strand(self, pid: PantsId, entry: int, exit_: int, sign: int,
                digits: Optional[int]) -> List[Move]:
        if entry != exit_:
            return [('move', self.seam(pid, entry, exit_, digits))]
        around = self.pants(pid).partner(entry)
        seam = self.seam(pid, entry, around, digits)
        return [('move', seam), ('turn', sign),
                ('move', self.leg_length(pid, around)), ('turn', sign),
                ('move', seam)]

    def _feet(self, strand) -> Tuple[bool, bool]:
        """Half-turn flags of the entry and exit feet of a strand."""
        pid, entry, exit_ = strand.pants, strand.entry, strand.exit
        if entry == exit_:
            return False, False
        return (self._half_foot(pid, entry, exit_),
                self._half_foot(pid, exit_, entry))

    def _glide(self, curve: PantsCurveId, winding: int,
               half: bool) -> Tuple[float, ...]:
        """Signed steps along `curve` from one foot to the next."""
        length = self.cuffs[curve]
        return (self.shears[curve], -length / 2 if half else 0.0,
                -winding * length)

    def moves(self, curve: 'Curve',
              digits: Optional[int] = None) -> List[Move]:
        """Closed walk along a family curve.

        Args:
          curve: curve supported in the window.
          digits: optional; precision of the seams, double by default.
        """
        if curve.family == 'pants-curve':
            return [('move', self.cuffs[curve.index])]
        strands = list(curve.strands)
        crossings = list(curve.crossings)
        sign = 1
        if self.reverse:
            n = len(strands)
            strands = [strands[k].reversed() for k in reversed(range(n))]
            crossings = [crossings[k - 1] for k in reversed(range(n))]
            shift = n // 2
            strands = strands[shift:] + strands[:shift]
            crossings = crossings[shift:] + crossings[:shift]
            sign = -1
        walk = []
        for k, (strand, crossing) in enumerate(zip(strands, crossings)):
            following = strands[(k + 1) % len(strands)]
            walk.extend(self._strand(strand.pants, strand.entry, strand.exit,
                                     sign, digits))
            half = self._feet(strand)[1] != self._feet(following)[0]
            steps = self._glide(crossing.curve, crossing.winding, half)
            walk.append(('turn', 1))
            if self.reverse:
                walk.extend(('move', step) for step in steps)
            else:
                walk.append(('move', exact_sum(steps)))
            walk.append(('turn', -1))

        return walk

    def product(self,
                build: Callable[[Optional[int]], List[Move]]) -> npt.NDArray:
        """Walk product at the precision the walk needs.

        Args:
          build: walk with double precision seams for `None`, exact seams
            for a number of digits.
        """
        digits = walk_digits(build(None))
        return walk_product(build(digits), model=self.model, digits=digits,
                            det_tol=self.det_tol)

    def check_support(self, curve: 'Curve') -> None:
        """Raise if `curve` leaves the window."""
        if curve.family == 'pants-curve':
            if curve.index not in self.cuffs:
                raise UsageError(
                    f'Curve {curve.index} outside the window; increase the '
                    'window radius')
            return
        for strand in curve.strands:
            if strand.pants not in self.window.pants:
                raise UsageError(
                    f'Curve enters pants {strand.pants} outside the window; '
                    'increase the window radius')
        for crossing in curve.crossings:
            if crossing.curve not in self.window.interior:
                raise UsageError(
                    f'Curve crosses {crossing.curve}, not interior to the '
                    'window; increase the window radius')

    def word(self, curve: 'Curve') -> npt.NDArray:
        """Holonomy matrix of the walk along `curve`, as decimals."""
        self.check_support(curve)
        return self.product(lambda digits: self.moves(curve, digits))

    def length(self, curve: 'Curve') -> float:
        """Geodesic length of `curve`.

        Pants curves are diagonal words and are read off exactly.
        """
        self.check_support(curve)
        if curve.family == 'pants-curve':
            return self.cuffs[curve.index]
        matrix = self.word(curve)
        try:
            if self.model == 'so21':
                return hyperboloid_trace_length(matrix, self.parabolic_tol)
            return trace_length(Isometry2(matrix), self.parabolic_tol)
        except NonHyperbolicError as exc:
            raise NonHyperbolicError(f'{curve.key()}: {exc}') from exc

    def lengths(self, curves: Sequence['Curve'],
                jobs: int = 1) -> List[float]:
        """Lengths of many curves, in order."""
        if jobs <= 1:
            return [self.length(curve) for curve in curves]
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(self.length, curves))

    def dump_json(self) -> Dict:
        """Generator matrices as row-major arrays."""
        if self.model == 'sl2':
            gens = {name: Isometry2(matrix).to_list()
                    for name, matrix in sorted(self.generators.items())}
        else:
            gens = {name: [[float(f'{x:.16g}') for x in row]
                           for row in matrix]
                    for name, matrix in sorted(self.generators.items())}
        return {'window': self.window.to_json(), 'model': self.model,
                'generators': gens}

def _pants_seams(pants: Pants, cuffs: Mapping[PantsCurveId, float],
                 formula: Callable) -> Dict[Tuple[int, int], float]:
    halves = [cuffs[leg.curve] / 2 for leg in pants.legs]
    seams = {}
    try:
        for a, b in ((0, 1), (1, 2), (0, 2)):
            seams[(a, b)] = formula(halves[a], halves[b], halves[3 - a - b])
    except (OverflowError, ValueError, ZeroDivisionError) as exc:
        raise NumericError(f'Degenerate hexagon in pants {pants.id}') from exc
    if not all(math.isfinite(x) for x in seams.values()):
        raise NumericError(f'Degenerate hexagon in pants {pants.id}')
    return seams

def _conjugators(chart: HolonomyChart, pid: PantsId,
                 digits: Optional[int] = None) -> List[List[Move]]:
    """Paths from the marker of leg 0 to the feet of the other legs.

    Leg 2 is reached backwards along the seam (0, 2), which closes the
    hexagon with one seam instead of two.
    """
    lengths = [chart.leg_length(pid, j) for j in range(3)]
    first = [('move', lengths[0] / 2), ('turn', 1),
             ('move', chart.seam(pid, 0, 1, digits)), ('turn', 1)]
    second = [('turn', -1), ('move', -chart.seam(pid, 0, 2, digits)),
              ('turn', -1), ('move', -lengths[2] / 2)]
    return [[], first, second]

def _boundary_walk(chart: HolonomyChart, pid: PantsId, legs: Sequence[int],
                   digits: Optional[int] = None) -> List[Move]:
    """Boundary loops of a pants based at the marker of leg 0, in order."""
    paths = _conjugators(chart, pid, digits)
    walk = []
    for j in legs:
        walk.extend(paths[j] + [('move', chart.leg_length(pid, j))] +
                    invert_walk(paths[j]))
    return walk

def _boundary_loops(chart: HolonomyChart,
                    pid: PantsId) -> List[npt.NDArray]:
    return [chart.product(
        lambda digits, j=j: _boundary_walk(chart, pid, (j,), digits))
        for j in range(3)]

def _check_contract(chart: HolonomyChart,
                    loops: Mapping[PantsId, Sequence[npt.NDArray]],
                    tol: float) -> None:
    """Boundary traces and pants relation of every pants."""
    for pid in sorted(chart.window.pants):
        for j, matrix in enumerate(loops[pid]):
            length = chart.leg_length(pid, j)
            trace = exact_sum(np.diagonal(matrix))
            if chart.model == 'sl2':
                expected = 2 * math.cosh(length / 2)
                trace = abs(trace)
            else:
                expected = 1 + 2 * math.cosh(length)
            if abs(float(trace) - expected) > tol * max(1.0, expected):
                raise InvariantViolation(
                    f'Pants {pid} leg {j}: trace {float(trace)!r} instead '
                    f'of {expected!r}')
        relation = chart.product(
            lambda digits: _boundary_walk(chart, pid, (1, 0, 2), digits))
        relation = relation.astype(float)
        identity = np.identity(relation.shape[0])
        error = np.max(np.abs(relation - identity))
        if chart.model == 'sl2':
            error = min(error, np.max(np.abs(relation + identity)))
        if error > tol:
            raise InvariantViolation(
                f'Pants {pid}: boundary relation off by {error!r}')

def _build(window: Window, H: FNMap, model: str, reverse: bool,
           trace_tol: float, det_tol: float,
           parabolic_tol: float) -> HolonomyChart:
    template = window.template
    if H.template != template:
        raise UsageError('Surface and window templates differ')
    cuffs = {curve: H.length(curve) for curve in window.curves}
    shears = {curve: H.arclength_twist(curve)
              for curve in sorted(window.interior)}
    formula = seam_length_classical if reverse else seam_length
    seams = {}
    for pid in sorted(window.pants):
        for (a, b), value in _pants_seams(template.pants(pid), cuffs,
                                          formula).items():
            seams[(pid, a, b)] = value
    chart = HolonomyChart(window, H, model, reverse, det_tol, parabolic_tol,
                          cuffs, shears, seams)
    loops = {pid: _boundary_loops(chart, pid) for pid in sorted(window.pants)}
    generators = {f'p{pid}.c{j}': matrix.astype(float)
                  for pid, matrices in loops.items()
                  for j, matrix in enumerate(matrices)}
    object.__setattr__(chart, 'generators', generators)
    _check_contract(chart, loops, trace_tol)

    return chart

@lru_cache(maxsize=256)
def build_holonomy(window: Window, H: FNMap,
                   trace_tol: float = TRACE_TOL,
                   det_tol: float = DET_TOL,
                   parabolic_tol: float = PARABOLIC_TOL) -> HolonomyChart:
    """Primary SL(2, R) chart of a window.

    Args:
      window: window of the template of `H`.
      H: coordinates; frontier twists are ignored.
      trace_tol: optional; tolerance of the boundary contract.
      det_tol: optional; largest determinant defect of a walk product.
      parabolic_tol: optional; margin of the hyperbolic trace test.
    """
    return _build(window, H, 'sl2', False, trace_tol, det_tol, parabolic_tol)

@lru_cache(maxsize=256)
def holonomy_oracle(window: Window, H: FNMap,
                    trace_tol: float = TRACE_TOL,
                    det_tol: float = DET_TOL,
                    parabolic_tol: float = PARABOLIC_TOL) -> HolonomyChart:
    """Independent SO(2, 1) chart walking curves backwards."""
    return _build(window, H, 'so21', True, trace_tol, det_tol,
                  parabolic_tol)

def curve_length(window: Window, H: FNMap, curve: 'Curve') -> float:
    """Geodesic length of a family curve supported in `window`."""
    return build_holonomy(window, H).length(curve)
