"""Splitting a cell potential into monotone pieces with additive variation.

The loop in :func:`decompose_monotone` repeatedly peels off a constant-sign
piece whose superlevel sets are simple, taken from the positive part of the
remainder when there is one and from the negative part otherwise. Each peel
is built in two stages: follow one chain of nested 4-components down from a
top plateau (:func:`extract_indecomposable`), then fill the holes of every
level (:func:`extract_simple`).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import scalar
from .errors import IdenticallyZero, NonTermination, NotNested, NotNonNegative
from .grid import CellField
from .pixel_sets import (PixelSet, complement_is_connected, count_components, label,
                         saturate, variation, Connectivity)


@dataclass(frozen=True)
class MonotoneComponent:
    field: CellField
    sign: int

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")


def _bounded_part(f: CellField, t) -> np.ndarray:
    # The level-set half that does not contain the exterior (where f = 0).
    return f.f > t if t >= 0 else f.f <= t


def is_monotone(f: CellField) -> bool:
    """Whether every level set splits the plane into two connected halves.

    For each threshold strictly between consecutive values of ``f`` (0
    included), the half not containing the exterior must be 4-connected and
    the half containing it 8-connected.
    """
    vals = f.values()
    for lo in vals[:-1]:
        part = _bounded_part(f, lo)
        if count_components(part) > 1 or not complement_is_connected(part):
            return False
    return True


def build_from_superlevels(levels: Sequence[tuple[object, PixelSet]], grid=None,
                           mode: str | None = None) -> CellField:
    """Field taking, at each pixel, the largest level whose set contains it (0 if none)."""
    if not levels:
        if grid is None:
            raise ValueError("an empty level list needs an explicit grid")
        return CellField.zeros(grid, mode)
    grid = levels[0][1].grid
    mode = scalar.resolve_mode(mode)
    out = scalar.zeros(grid.cell_shape, mode, object)
    for k in range(1, len(levels)):
        (s, A), (t, B) = levels[k - 1], levels[k]
        if not s < t:
            raise ValueError(f"levels must increase strictly, got {s} then {t}")
        if not B <= A:
            raise NotNested((k - 1, k))
    for t, A in levels:
        out[A.mask] = scalar.to_scalar(t, mode)
    return CellField(grid, scalar.freeze(scalar.compact(out)))


def _check_nonnegative(f: CellField) -> None:
    if np.any(f.f < 0):
        raise NotNonNegative("extraction needs a non-negative field")
    if f.is_zero():
        raise IdenticallyZero("extraction needs a field that is not identically zero")


def _pick_anchor(top: np.ndarray) -> np.ndarray:
    labels, n = label(top, Connectivity.FOUR)
    # labels follow raster order, so the first maximum is the lexicographic tie-break
    areas = np.bincount(labels.ravel(), minlength=n + 1)[1:]
    return labels == int(np.argmax(areas)) + 1


def _indecomposable_chain(f: CellField) -> list[tuple[object, PixelSet]]:
    vals = [v for v in f.values() if v > 0]
    anchor = _pick_anchor(f.f >= vals[-1])
    seed = tuple(int(k[0]) for k in np.nonzero(anchor))
    chain = []
    for v in reversed(vals):
        labels, _ = label(f.f >= v, Connectivity.FOUR)
        chain.append((v, PixelSet(f.grid, labels == labels[seed])))
    chain.reverse()
    return chain


def extract_indecomposable(f: CellField) -> CellField:
    """A piece ``0 <= g <= f`` with 4-connected superlevel sets and ``V(f) = V(f-g) + V(g)``.

    The anchor is the top plateau ``{f = max f}``: its largest 4-component
    ``R`` (ties broken by smallest pixel) is followed down through every
    lower level, taking the component of ``{f >= v}`` that contains ``R``.
    """
    _check_nonnegative(f)
    return build_from_superlevels(_indecomposable_chain(f), mode=f.mode)


def extract_simple(f: CellField) -> CellField:
    """Like :func:`extract_indecomposable`, with every level set saturated.

    The result may exceed ``f`` inside filled holes; ``V(f) = V(f-h) + V(h)``
    still holds exactly.
    """
    _check_nonnegative(f)
    chain = [(v, saturate(A)) for v, A in _indecomposable_chain(f)]
    return build_from_superlevels(chain, mode=f.mode)


def iteration_bound(f: CellField) -> int:
    """(number of distinct values) x (most components of any level half) x 2."""
    vals = f.values()
    most = 1
    for lo in vals[:-1]:
        most = max(most, count_components(f.f > lo), count_components(f.f <= lo))
    return len(vals) * most * 2


def _additive(f: CellField, piece: CellField) -> bool:
    lhs = variation(f)
    rhs = variation(f - piece) + variation(piece)
    return scalar.is_zero(lhs - rhs, f.mode, lhs)


def decompose_monotone(f: CellField, check: bool | None = None) -> list[MonotoneComponent]:
    """Monotone constant-sign pieces summing to ``f`` with additive variation.

    ``check`` re-verifies the variation identity after every extraction; it
    defaults to on in rational mode.
    """
    if check is None:
        check = f.mode == scalar.RATIONAL
    cap = iteration_bound(f)
    rest = f
    out: list[MonotoneComponent] = []
    while not rest.is_zero():
        if len(out) >= cap:
            raise NonTermination(cap)
        pos = rest.positive_part()
        if not pos.is_zero():
            piece, sign = extract_simple(pos), 1
        else:
            piece, sign = -extract_simple(rest.negative_part()), -1
        if check and not _additive(rest, piece):
            raise AssertionError(f"variation not additive at extraction {len(out)}")
        out.append(MonotoneComponent(piece, sign))
        rest = rest - piece
        if rest.mode == scalar.FLOAT:
            rest = _clean(rest, f)
    return out


def _clean(rest: CellField, f: CellField) -> CellField:
    # float residue below tolerance would otherwise spawn spurious micro-levels
    tol = scalar.tolerance(scalar.FLOAT, scalar.max_abs(f.f))
    arr = np.where(np.abs(rest.f) <= tol, 0.0, rest.f)
    return CellField(rest.grid, scalar.freeze(arr))
