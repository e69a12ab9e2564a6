"""Rigidity of divergence-free measures concentrated in a cone of directions.

A measure is given as a finite weighted list of planar polylines. The three
hypotheses are checked for it:

(i)   no mass on the closed lower half-plane ``y <= 0``;
(ii)  zero divergence, i.e. open curve endpoints cancel out;
(iii) every segment direction ``u`` satisfies ``u_y >= c |u|``.

Any nonzero input must fail one of them. All comparisons are exact: floats
are read as the binary fractions they denote.
"""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from . import scalar
from .coarea import verify_decomposition
from .errors import PreconditionFailed
from .grid import CurveSuperposition, EdgeFlux

Point = tuple[float, float]


def _exact(x) -> Fraction:
    return Fraction(x) if not isinstance(x, Fraction) else x


@dataclass(frozen=True)
class PolyCurve:
    points: tuple[Point, ...]
    closed: bool = False

    def __post_init__(self):
        pts = tuple((p[0], p[1]) for p in self.points)
        object.__setattr__(self, "points", pts)
        if len(pts) < 2:
            raise ValueError("a polyline needs at least two points")
        for a, b in zip(pts, pts[1:]):
            if _exact(a[0]) == _exact(b[0]) and _exact(a[1]) == _exact(b[1]):
                raise ValueError(f"repeated consecutive point {a}")
        if self.closed and (_exact(pts[0][0]), _exact(pts[0][1])) != (_exact(pts[-1][0]), _exact(pts[-1][1])):
            raise ValueError("closed polyline must end at its first point")

    def segments(self) -> list[tuple[Point, Point]]:
        return list(zip(self.points, self.points[1:]))

    def length(self) -> float:
        return sum(math.dist(a, b) for a, b in self.segments())


@dataclass(frozen=True)
class RigidityInput:
    items: tuple[tuple[object, PolyCurve], ...]
    c: object

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))
        if not self.c > 0:
            raise ValueError(f"cone constant must be positive, got {self.c}")
        for w, _ in self.items:
            if not w > 0:
                raise ValueError(f"weights must be positive, got {w}")

    def mass(self) -> float:
        return sum(float(w) * g.length() for w, g in self.items)


@dataclass(frozen=True)
class ConeRegion:
    r: object
    h: object
    c: object

    def __post_init__(self):
        if not (self.r > 0 and self.h > 0 and self.c > 0):
            raise ValueError("cone region parameters must be positive")


@dataclass(frozen=True)
class LowerHalfMass:
    item: int
    segment: int
    points: tuple[Point, Point]


@dataclass(frozen=True)
class NonzeroDivergence:
    point: Point
    net: object


@dataclass(frozen=True)
class ConeCondition:
    item: int
    segment: int
    points: tuple[Point, Point]
    ratio: float  # u_y / |u|


Violation = Union[LowerHalfMass, NonzeroDivergence, ConeCondition]


@dataclass(frozen=True)
class RigidityVerdict:
    verdict: str  # "Zero" or "HypothesisFails"
    violation: Violation | None = None

    @property
    def is_zero(self) -> bool:
        return self.verdict == "Zero"


ZERO = RigidityVerdict("Zero")


def charges_lower_half(a: Point, b: Point) -> bool:
    """Whether the segment has positive length inside ``y <= 0``."""
    ya, yb = _exact(a[1]), _exact(b[1])
    return ya < 0 or yb < 0 or (ya == 0 and yb == 0)


def cone_compliant(a: Point, b: Point, c) -> bool:
    """``u_y >= c |u|`` for ``u = b - a``, decided exactly by squaring."""
    ux = _exact(b[0]) - _exact(a[0])
    uy = _exact(b[1]) - _exact(a[1])
    c = _exact(c)
    return uy >= 0 and uy * uy >= c * c * (ux * ux + uy * uy)


def endpoint_charges(items: Sequence[tuple[object, PolyCurve]]) -> list[tuple[Point, Fraction]]:
    """Net divergence of the superposition at each open-curve endpoint, in first-seen order."""
    net: dict[tuple[Fraction, Fraction], Fraction] = defaultdict(Fraction)
    seen: dict[tuple[Fraction, Fraction], Point] = {}
    for w, g in items:
        if g.closed:
            continue
        for p, q in ((g.points[0], _exact(w)), (g.points[-1], -_exact(w))):
            key = (_exact(p[0]), _exact(p[1]))
            seen.setdefault(key, p)
            net[key] += q
    return [(seen[k], net[k]) for k in seen]


def check_hypotheses(inp: RigidityInput) -> RigidityVerdict:
    """First violated hypothesis, scanning (i), then (ii), then (iii).

    Within a hypothesis the scan runs by item index, then segment index.
    """
    for k, (_, g) in enumerate(inp.items):
        for s, (a, b) in enumerate(g.segments()):
            if charges_lower_half(a, b):
                return RigidityVerdict("HypothesisFails", LowerHalfMass(k, s, (a, b)))
    for p, q in endpoint_charges(inp.items):
        if q != 0:
            return RigidityVerdict("HypothesisFails", NonzeroDivergence(p, q))
    for k, (_, g) in enumerate(inp.items):
        for s, (a, b) in enumerate(g.segments()):
            if not cone_compliant(a, b, inp.c):
                ratio = (b[1] - a[1]) / math.dist(a, b)
                return RigidityVerdict("HypothesisFails", ConeCondition(k, s, (a, b), float(ratio)))
    return ZERO


def rigidity_theorem_check(inp: RigidityInput) -> RigidityVerdict:
    """Forward any violated hypothesis; otherwise the measure must vanish.

    A nonempty input that passes all three hypotheses would contradict the
    theorem. The lowest curve start is then reported as the point where mass
    enters from nowhere.
    """
    verdict = check_hypotheses(inp)
    if not verdict.is_zero:
        return verdict
    if inp.mass() == 0:
        return ZERO
    lowest = min((g.points[0] for _, g in inp.items), key=lambda p: (p[1], p[0]))
    return RigidityVerdict("HypothesisFails", NonzeroDivergence(lowest, 0))


def telescoped_cone_gap(g: PolyCurve, c) -> Fraction:
    """``Δy / c - |Δx|`` between the ends of ``g``; non-negative when every segment is cone compliant."""
    a, b = g.points[0], g.points[-1]
    dx = _exact(b[0]) - _exact(a[0])
    dy = _exact(b[1]) - _exact(a[1])
    return dy / _exact(c) - abs(dx)


def cone_region_contains(T: ConeRegion, p: Point) -> bool:
    x, y = p
    return 0 < y < T.h and abs(x) < T.r + (T.h - y) / T.c


def orientation_check(mu: EdgeFlux, eta: CurveSuperposition) -> bool:
    """Whether every curve crosses every edge it uses in the direction of the flux there."""
    report = verify_decomposition(mu, eta)
    exact = [scalar.is_zero(x, report.mode, report.scale)
             for x in (report.reconstruction_residual, report.tv_defect)]
    if not all(exact):
        raise PreconditionFailed("decomposition must reconstruct the flux with no cancellation")
    tol = scalar.tolerance(mu.mode, mu.max_abs())
    for _, gamma in eta.items:
        for e, s in gamma.steps():
            if not mu[e] * s > tol:
                return False
    return True
