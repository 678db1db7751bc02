"""Quantifier shapes.

A quantifier's truth is a function f_Q of the conditional probability of
its body given its restriction.  Precise quantifiers (some, every, no,
most) are step functions valued in {0, 1}; vague quantifiers (many, few,
generic) take intermediate values.  Drawing a single uniform threshold in
(0, 1] and testing ``f_Q(ratio) >= theta`` turns a vague value into a
distribution over precise quantifier functions whose marginal is f_Q
itself; ``threshold_partition`` provides the exact integration over that
threshold.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .errors import ShapeDomainError


class QuantifierKind(enum.Enum):
    SOME = "some"
    EVERY = "every"
    NO = "no"
    MOST = "most"
    MANY = "many"
    FEW = "few"
    GENERIC = "generic"


PRECISE_KINDS = frozenset(
    {QuantifierKind.SOME, QuantifierKind.EVERY, QuantifierKind.NO, QuantifierKind.MOST}
)
VAGUE_KINDS = frozenset(
    {QuantifierKind.MANY, QuantifierKind.FEW, QuantifierKind.GENERIC}
)


@dataclass(frozen=True)
class ShapeSpec:
    """Piecewise shape on [0, 1]: exact point values at breakpoints plus
    linear interpolation on the open intervals between them.

    ``points`` maps each breakpoint (including 0 and 1) to its exact
    value; ``segments`` gives (lo, hi, value_at_lo+, value_at_hi-) for
    each open interval (lo, hi).  This is enough to express every
    built-in shape, with open/closed endpoint behaviour explicit.
    """

    points: tuple[tuple[float, float], ...]
    segments: tuple[tuple[float, float, float, float], ...]
    empty_restriction_value: float = 0.0

    def value(self, ratio: float) -> float:
        if not 0.0 <= ratio <= 1.0:
            raise ShapeDomainError(f"ratio {ratio!r} outside [0, 1]")
        for x, v in self.points:
            if ratio == x:
                return v
        for lo, hi, vlo, vhi in self.segments:
            if lo < ratio < hi:
                if vlo == vhi:
                    return vlo
                return vlo + (vhi - vlo) * (ratio - lo) / (hi - lo)
        raise ShapeDomainError(f"shape does not cover ratio {ratio!r}")


def _step(points, segments, empty):
    return ShapeSpec(tuple(points), tuple(segments), empty)


# Built-in shapes.  Endpoint conventions: some is 0 at ratio exactly 0,
# every is 1 only at ratio exactly 1, most is strict at 1/2.
BUILTIN_SHAPES: dict[QuantifierKind, ShapeSpec] = {
    QuantifierKind.SOME: _step([(0.0, 0.0), (1.0, 1.0)], [(0.0, 1.0, 1.0, 1.0)], 0.0),
    QuantifierKind.EVERY: _step([(0.0, 0.0), (1.0, 1.0)], [(0.0, 1.0, 0.0, 0.0)], 1.0),
    QuantifierKind.NO: _step([(0.0, 1.0), (1.0, 0.0)], [(0.0, 1.0, 0.0, 0.0)], 1.0),
    QuantifierKind.MOST: _step(
        [(0.0, 0.0), (0.5, 0.0), (1.0, 1.0)],
        [(0.0, 0.5, 0.0, 0.0), (0.5, 1.0, 1.0, 1.0)],
        0.0,
    ),
    QuantifierKind.MANY: _step([(0.0, 0.0), (1.0, 1.0)], [(0.0, 1.0, 0.0, 1.0)], 0.0),
    QuantifierKind.FEW: _step([(0.0, 1.0), (1.0, 0.0)], [(0.0, 1.0, 1.0, 0.0)], 1.0),
    QuantifierKind.GENERIC: _step(
        [(0.0, 0.0), (1.0, 1.0)], [(0.0, 1.0, 0.0, 1.0)], 1.0
    ),
}


def is_precise(kind) -> bool:
    """True for kinds whose shape is valued in {0, 1}."""
    if isinstance(kind, ShapeSpec):
        vals = {v for _, v in kind.points} | {
            v for seg in kind.segments for v in seg[2:]
        }
        return vals <= {0.0, 1.0}
    return kind in PRECISE_KINDS


def shape_value(kind, ratio: float) -> float:
    """Evaluate f_Q at a ratio in [0, 1].

    ``kind`` is a QuantifierKind or a custom ShapeSpec.
    """
    spec = kind if isinstance(kind, ShapeSpec) else BUILTIN_SHAPES[kind]
    return spec.value(ratio)


def empty_restriction_value(kind, generic_default: float = 1.0) -> float:
    """Value used when the restriction has zero mass.

    The precise-kind values are forced by the classical cardinality
    conditions at |R| = 0 (every and no are vacuously true, some and
    most false).  Few mirrors many; generic is configurable.
    """
    if isinstance(kind, ShapeSpec):
        return kind.empty_restriction_value
    if kind is QuantifierKind.GENERIC:
        return generic_default
    return BUILTIN_SHAPES[kind].empty_restriction_value


@dataclass(frozen=True)
class ThresholdRegion:
    """Half-open threshold interval (lo, hi] with its Lebesgue measure.

    For every input value v, the predicate ``v >= theta`` is constant on
    the interval and equals ``v >= hi``.
    """

    lo: float
    hi: float
    measure: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "measure", self.hi - self.lo)


def threshold_partition(values) -> list[ThresholdRegion]:
    """Partition (0, 1] at the given cut values.

    Values at 0 or 1 add no interior cuts.  Within each returned region,
    ``[value >= theta]`` is constant for every value in ``values``.
    """
    cuts = sorted({v for v in values if 0.0 < v < 1.0})
    bounds = [0.0] + cuts + [1.0]
    return [ThresholdRegion(a, b) for a, b in zip(bounds, bounds[1:])]
