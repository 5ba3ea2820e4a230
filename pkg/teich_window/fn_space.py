"""Fenchel-Nielsen coordinate space.

Coordinates are stored per pants curve as a length and a twist angle in
radians; one full positive Dehn twist adds 2π to the twist. Integer Dehn
twist orders are kept apart from the real twists, so that twisting and
untwisting restores a map exactly.

The module implements:

    - `FNMap`: coordinate maps given by closed-form generators plus finitely
      many overrides.
    - `fn_distance` and the isometric `embed_linf` embedding.
    - Dehn and arclength twist deformations.
    - `shiga_check` for the uniform length bound over a scanned range.
    - `cauchy_limit` for limit extraction of coordinate sequences.
"""
from dataclasses import dataclass, field, replace
from typing import (Callable, Dict, Iterable, List, Mapping, Optional,
                    Sequence, Tuple)
import math

from .common_types import PantsCurveId
from .exceptions import (CurveLookupError, NonCauchyError, NumericError,
                         UsageError)
from .pants_graph import DecompositionTemplate

TWO_PI = 2 * math.pi

def _const(c: float) -> Callable[[int], float]:
    return lambda i: c

def _exp_neg_square(c: float) -> Callable[[int], float]:
    return lambda i: math.exp(-c * i * i)

def _exp_neg(c: float) -> Callable[[int], float]:
    return lambda i: math.exp(-c * i)

def _exp(c: float) -> Callable[[int], float]:
    return lambda i: math.exp(c * i)

def _inv_shift(c: float) -> Callable[[int], float]:
    return lambda i: c + 1 / (i + 1)

GENERATORS = {
    'const': (_const, None),
    'exp-neg-square': (_exp_neg_square, 1.0),
    'exp-neg': (_exp_neg, 1.0),
    'exp': (_exp, 1.0),
    'inv-shift': (_inv_shift, 1.0),
}
"""Named generators and their default parameter."""

@dataclass(frozen=True)
class Profile:
    """Closed-form coordinate generator `i -> value`.

    Parsed profiles compare by expression, so maps parsed twice from the
    same document are equal. Named profiles also compare by the identity
    of their callable.
    """
    expr: str
    """Generator expression, e.g. `exp-neg:2`."""
    func: Callable[[int], float] = field(compare=False, repr=False)
    """Evaluation function."""
    ident: Optional[int] = field(default=None, repr=False)
    """Identity of a wrapped callable, `None` for parsed expressions."""

    def __call__(self, i: int) -> float:
        return self.func(i)

    @classmethod
    def parse(cls, expr) -> 'Profile':
        """Profile from a named generator expression or a number."""
        if isinstance(expr, (int, float)) and not isinstance(expr, bool):
            return cls(f'const:{float(expr)!r}', _const(float(expr)))
        name, _, value = str(expr).partition(':')
        if name not in GENERATORS:
            raise UsageError(f'Unknown generator: {expr}')
        factory, default = GENERATORS[name]
        if value:
            try:
                param = float(value)
            except ValueError as exc:
                raise UsageError(f'Invalid generator parameter: {expr}') \
                    from exc
        elif default is None:
            raise UsageError(f'Generator {name} needs a parameter')
        else:
            param = default
        return cls(f'{name}:{param!r}', factory(param))

    @classmethod
    def named(cls, name: str, func: Callable[[int], float]) -> 'Profile':
        """Profile wrapping an in-process callable."""
        return cls(f'callable:{name}', func, id(func))

@dataclass(frozen=True)
class LengthTwist:
    """Length and twist of one pants curve."""
    length: float
    """Hyperbolic length, finite and positive."""
    twist: Optional[float] = None
    """Twist in radians, `None` for boundary curves."""

    def __post_init__(self):
        if not (math.isfinite(self.length) and self.length > 0):
            raise NumericError(f'Invalid curve length: {self.length}')
        if self.twist is not None and not math.isfinite(self.twist):
            raise NumericError(f'Invalid twist: {self.twist}')

    @property
    def arclength_twist(self) -> float:
        """Twist measured as signed length along the curve."""
        return 0.0 if self.twist is None else \
            self.length * self.twist / TWO_PI

@dataclass(frozen=True)
class FNMap:
    """Fenchel-Nielsen coordinates of a hyperbolic structure."""
    template: DecompositionTemplate
    """Pants decomposition."""
    length_profile: Profile = Profile.parse('const:1')
    """Default lengths."""
    twist_profile: Profile = Profile.parse('const:0')
    """Default twists."""
    overrides: Tuple[Tuple[PantsCurveId, LengthTwist], ...] = ()
    """Curves departing from the profiles."""
    dehn: Tuple[Tuple[PantsCurveId, int], ...] = ()
    """Integer Dehn twist orders added on top of the twists."""
    _overrides: Dict[PantsCurveId, LengthTwist] = field(
        init=False, repr=False, compare=False)
    _dehn: Dict[PantsCurveId, int] = field(init=False, repr=False,
                                           compare=False)

    def __post_init__(self):
        overrides = dict(self.overrides)
        dehn = {i: k for i, k in dict(self.dehn).items() if k != 0}
        for i, value in overrides.items():
            if value.twist is not None and self.template.is_boundary(i):
                raise UsageError(f'Twist on boundary curve {i}')
        for i in dehn:
            if self.template.is_boundary(i):
                raise UsageError(f'Dehn twist on boundary curve {i}')
        object.__setattr__(self, 'overrides', tuple(sorted(overrides.items())))
        object.__setattr__(self, 'dehn', tuple(sorted(dehn.items())))
        object.__setattr__(self, '_overrides', overrides)
        object.__setattr__(self, '_dehn', dehn)

    def __getitem__(self, i: PantsCurveId) -> LengthTwist:
        boundary = self.template.is_boundary(i)
        override = self._overrides.get(i)
        try:
            if override is not None:
                length = override.length
            else:
                length = float(self.length_profile(i))
            twist = None
            if not boundary:
                twist = self.base_twist(i)
                k = self._dehn.get(i, 0)
                if k != 0:
                    twist = twist + TWO_PI * k
            return LengthTwist(length, twist)
        except (OverflowError, ZeroDivisionError) as exc:
            raise NumericError(f'Coordinates of curve {i} overflow') from exc
        except NumericError as exc:
            raise NumericError(f'Curve {i}: {exc}') from exc

    def length(self, i: PantsCurveId) -> float:
        return self[i].length

    def twist(self, i: PantsCurveId) -> Optional[float]:
        return self[i].twist

    def arclength_twist(self, i: PantsCurveId) -> float:
        return self[i].arclength_twist

    def base_twist(self, i: PantsCurveId) -> float:
        """Twist of `i` without the integer Dehn twist orders."""
        override = self._overrides.get(i)
        if override is not None and override.twist is not None:
            return override.twist
        return float(self.twist_profile(i))

    def dehn_order(self, i: PantsCurveId) -> int:
        return self._dehn.get(i, 0)

    def with_overrides(self,
                       values: Mapping[PantsCurveId, LengthTwist]) -> 'FNMap':
        """Replace the coordinates of the given curves.

        Dehn twist orders on the replaced curves are dropped, since the new
        twist is absolute.
        """
        overrides = dict(self._overrides)
        overrides.update(values)
        dehn = {i: k for i, k in self._dehn.items() if i not in values}
        return replace(self, overrides=tuple(overrides.items()),
                       dehn=tuple(dehn.items()))

    @classmethod
    def tabulated(cls, template: DecompositionTemplate,
                  table: Mapping[PantsCurveId, Tuple[float, float]],
                  default_length: float = 1.0,
                  default_twist: float = 0.0) -> 'FNMap':
        """Map equal to constant defaults except on `table`."""
        overrides = {}
        for i, (length, twist) in table.items():
            if template.is_boundary(i):
                overrides[i] = LengthTwist(length)
            else:
                overrides[i] = LengthTwist(length, twist)
        return cls(template, Profile.parse(default_length),
                   Profile.parse(default_twist), tuple(overrides.items()))

    def to_json(self) -> Dict:
        data = {'default': {'l': self.length_profile.expr,
                            'theta': self.twist_profile.expr},
                'overrides': {str(i): ({'l': v.length} if v.twist is None
                                       else {'l': v.length, 'theta': v.twist})
                              for i, v in self.overrides}}
        if self.dehn:
            data['dehn'] = {str(i): k for i, k in self.dehn}
        return data

    @classmethod
    def from_json(cls, data: Mapping,
                  template: DecompositionTemplate) -> 'FNMap':
        """Map from its JSON document.

        The format is `{"default": {"l": expr, "theta": expr}, "overrides":
        {"i": {"l": x, "theta": y}}, "dehn": {"i": k}}`; all keys optional.
        """
        default = data.get('default', {})
        overrides = {}
        for key, value in data.get('overrides', {}).items():
            i = int(key)
            if not template.has_curve(i):
                raise CurveLookupError(f'Override for unknown curve {i}')
            try:
                length = float(value['l'])
            except (KeyError, TypeError, ValueError) as exc:
                raise UsageError(f'Override {key} needs a length "l"') from exc
            twist = value.get('theta')
            if twist is not None and template.is_boundary(i):
                raise UsageError(f'Twist on boundary curve {i}')
            overrides[i] = LengthTwist(
                length, None if twist is None else float(twist))
        dehn = {int(i): int(k) for i, k in data.get('dehn', {}).items()}

        return cls(template, Profile.parse(default.get('l', 'const:1')),
                   Profile.parse(default.get('theta', 'const:0')),
                   tuple(overrides.items()), tuple(dehn.items()))

@dataclass(frozen=True)
class FNDistanceEstimate:
    """Fenchel-Nielsen distance restricted to a scanned index range."""
    value: float
    """Supremum over the scanned indices."""
    scanned: range
    """Scanned curve indices."""
    exact: bool
    """The coordinate differences are supported inside the range."""

    def to_json(self) -> Dict:
        return {'value': self.value,
                'scanned': [self.scanned.start, self.scanned.stop],
                'exact': self.exact}

@dataclass(frozen=True)
class ShigaReport:
    """Two-sided length bound over a scanned range."""
    holds_up_to: int
    """End of the scanned index range."""
    witness_min: float
    """Shortest scanned length."""
    witness_max: float
    """Longest scanned length."""
    m_estimate: float
    """max(witness_max, 1/witness_min)."""
    truncated: bool = False
    """The scan stopped at a length outside floating point range."""

    def to_json(self) -> Dict:
        return {'holds_up_to': self.holds_up_to,
                'witness_min': self.witness_min,
                'witness_max': self.witness_max,
                'm_estimate': (self.m_estimate
                               if math.isfinite(self.m_estimate) else 'inf'),
                'truncated': self.truncated}

@dataclass(frozen=True)
class CauchyLimit:
    """Extracted limit of a coordinate sequence."""
    limit: FNMap
    """Limit map on the scanned indices."""
    non_converged: Tuple[PantsCurveId, ...]
    """Indices whose last differences exceed the tolerance."""
    differences: Tuple[Tuple[PantsCurveId, float], ...]
    """Last successive difference per index."""

def _check_shared(maps: Sequence[FNMap]) -> None:
    template = maps[0].template
    for other in maps[1:]:
        if other.template != template:
            raise UsageError(
                f'Template mismatch: {template.kind} vs {other.template.kind}')

def _as_range(indices: Iterable[int]) -> range:
    if isinstance(indices, range):
        return indices
    indices = sorted(indices)
    return range(indices[0], indices[-1] + 1)

def embed_linf(H: FNMap,
               indices: Iterable[PantsCurveId]) -> List[Tuple[float, ...]]:
    """Isometric embedding into a sup-normed sequence space.

    Each curve maps to `(log l, l·θ)`; boundary curves contribute only the
    first component. Indices not generated by the template are skipped.
    """
    pairs = []
    for i in indices:
        if not H.template.has_curve(i):
            continue
        value = H[i]
        if value.twist is None:
            pairs.append((math.log(value.length),))
        else:
            pairs.append((math.log(value.length), value.length * value.twist))
    return pairs

def _difference_support(A: FNMap, B: FNMap) -> Optional[set]:
    """Curves where A and B differ, `None` if unknown."""
    if A.length_profile != B.length_profile or \
            A.twist_profile != B.twist_profile:
        return None
    keys = set(A._overrides) | set(B._overrides) | set(A._dehn) | \
        set(B._dehn)
    return {i for i in keys if A[i] != B[i]}

def fn_distance(A: FNMap, B: FNMap,
                indices: Iterable[PantsCurveId]) -> FNDistanceEstimate:
    """Fenchel-Nielsen distance over the scanned indices.

    Args:
      A, B: coordinate maps on the same template.
      indices: curve indices to scan.
    """
    _check_shared([A, B])
    indices = list(indices)
    if not indices:
        raise UsageError('Empty index range')
    value = 0.0
    for pair_a, pair_b in zip(embed_linf(A, indices), embed_linf(B, indices)):
        for x, y in zip(pair_a, pair_b):
            value = max(value, abs(x - y))
    support = _difference_support(A, B)
    scanned = set(indices)
    exact = support is not None and support <= scanned

    return FNDistanceEstimate(value, _as_range(indices), exact)

def apply_dehn_twists(H: FNMap,
                      orders: Mapping[PantsCurveId, int]) -> FNMap:
    """Compose integer Dehn twists along interior curves.

    Args:
      H: coordinate map.
      orders: twist order per curve; negative orders twist backwards.
    """
    dehn = dict(H.dehn)
    for i, k in orders.items():
        if H.template.is_boundary(i):
            raise UsageError(f'Dehn twist on boundary curve {i}')
        dehn[i] = dehn.get(i, 0) + int(k)
    dehn = {i: k for i, k in dehn.items() if k != 0}
    if dehn == H._dehn:
        return H

    return replace(H, dehn=tuple(dehn.items()))

def apply_arclength_twist(H: FNMap, i: PantsCurveId, s: float) -> FNMap:
    """Shear along curve `i` by the signed length `s`."""
    if H.template.is_boundary(i):
        raise UsageError(f'Twist on boundary curve {i}')
    if s == 0:
        return H
    length = H.length(i)
    twist = H.base_twist(i) + TWO_PI * s / length
    overrides = dict(H._overrides)
    overrides[i] = LengthTwist(length, twist)

    return replace(H, overrides=tuple(overrides.items()))

def shiga_check(H: FNMap, N: int) -> ShigaReport:
    """Scan the lengths of curves with index below `N`.

    The report only covers the scanned range.
    """
    if N < 1:
        raise UsageError(f'Shiga scan needs N >= 1, got {N}')
    wmin, wmax = math.inf, 0.0
    for i in H.template.curve_ids(N):
        try:
            length = H.length(i)
        except NumericError:
            return ShigaReport(i, wmin, wmax, math.inf, truncated=True)
        wmin = min(wmin, length)
        wmax = max(wmax, length)

    return ShigaReport(N, wmin, wmax, max(wmax, 1 / wmin))

def shiga_diverging(H: FNMap, N: int, growth: float = 10.0) -> bool:
    """Does the Shiga constant grow by more than `growth` from N/2 to N?"""
    full = shiga_check(H, N)
    half = shiga_check(H, max(1, N // 2))
    return full.truncated or full.m_estimate > growth * half.m_estimate

def _extrapolate(values: Sequence[float]) -> Tuple[float, bool]:
    """Aitken extrapolation of geometrically contracting tails."""
    a, b, c = values[-3:]
    d1, d2 = b - a, c - b
    if d1 != 0 and 0 < d2 / d1 < 1:
        return c - d2 * d2 / (d2 - d1), True
    return c, False

def _growing(values: Sequence[float], tol: float) -> bool:
    tail = values[-4:]
    diffs = [abs(y - x) for x, y in zip(tail, tail[1:])]
    return diffs[-1] >= tol and all(x < y for x, y in zip(diffs, diffs[1:]))

def cauchy_limit(sequence: Sequence[FNMap],
                 indices: Iterable[PantsCurveId],
                 tol: float = 1e-5,
                 log: Callable = print) -> CauchyLimit:
    """Extract the coordinate-wise limit of a sequence of maps.

    Convergence of `l` and `l·θ` is judged on the successive differences of
    the last three entries. Indices whose differences keep growing stop the
    extraction.

    Args:
      sequence: at least three maps on a shared template.
      indices: curve indices to scan.
      tol: optional; convergence tolerance.
      log: optional; logging function.
    """
    if len(sequence) < 3:
        raise UsageError('Cauchy limit needs at least 3 maps')
    _check_shared(sequence)
    last = sequence[-1]
    template = last.template
    values, non_converged, differences, growing = {}, [], [], []
    for i in indices:
        if not template.has_curve(i):
            continue
        lengths = [H.length(i) for H in sequence]
        series = [lengths]
        if not template.is_boundary(i):
            series.append([H.length(i) * H.twist(i) for H in sequence])
        if any(_growing(x, tol) for x in series):
            growing.append(i)
            continue
        diff = max(abs(x[-1] - x[-2]) for x in series)
        differences.append((i, diff))
        if any(abs(y - x) >= tol for s in series
               for x, y in zip(s[-3:], s[-2:])):
            non_converged.append(i)
        extrapolated = [_extrapolate(s) for s in series]
        if not any(flag for _, flag in extrapolated):
            continue
        length = extrapolated[0][0]
        if len(extrapolated) == 1:
            values[i] = LengthTwist(length)
        else:
            values[i] = LengthTwist(length, extrapolated[1][0] / length)
    if growing:
        raise NonCauchyError(growing)
    if non_converged:
        log(f'Indices not converged within {tol}: {non_converged}')
    limit = last.with_overrides(values) if values else last

    return CauchyLimit(limit, tuple(non_converged), tuple(differences))
