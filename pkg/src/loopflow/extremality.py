"""Extreme points of the FV and BV unit balls on the pixel model.

A field that is not extreme comes with a concrete convex split
``f = lam * phi + (1 - lam) * psi`` with both witnesses on the unit sphere.
Splits are tried in a fixed order: sign, level, component, hole.

Holes here are 4-components of the complement. A set whose complement is
8-connected but not 4-connected touches itself at a corner, and its indicator
splits just like a set with a hole (see :func:`certify_extreme_fv`).
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import scalar
from .errors import NotNormalized
from .grid import CellField, LatticeCurve
from .pixel_sets import Connectivity, PixelSet, label, perimeter, trace_boundary, variation


class Verdict(Enum):
    EXTREME = "Extreme"
    NOT_EXTREME = "NotExtreme"


@dataclass(frozen=True)
class ExtremeCertificate:
    verdict: Verdict
    witness: tuple[CellField, CellField] | None = None
    lam: object = None
    split: str | None = None  # "sign", "level", "component" or "hole"

    def __bool__(self) -> bool:
        return self.verdict is Verdict.EXTREME


def fv_norm(f: CellField):
    return variation(f)


def bv_norm(f: CellField):
    return scalar.abs_total(f.f) + variation(f)


def _check_unit(f: CellField, norm) -> None:
    n = norm(f)
    if not scalar.is_zero(n - 1, f.mode):
        raise NotNormalized(f"norm is {scalar.format_scalar(n)}, expected 1")


def _split(f: CellField, a: CellField, b: CellField, norm, kind: str) -> ExtremeCertificate:
    # f = a + b with norm(f) = norm(a) + norm(b) = 1 and both parts nonzero
    lam = norm(a)
    return ExtremeCertificate(Verdict.NOT_EXTREME, (a / lam, b / (1 - lam)),
                              scalar.as_python(lam), kind)


def _sign_level_component(f: CellField, norm) -> ExtremeCertificate | None:
    pos, neg = f.positive_part(), f.negative_part()
    if not pos.is_zero() and not neg.is_zero():
        return _split(f, pos, -neg, norm, "sign")
    sign = 1 if neg.is_zero() else -1
    u = pos if sign > 0 else neg
    vals = [v for v in u.values() if v > 0]
    if len(vals) > 1:
        c = vals[(len(vals) - 1) // 2]
        low = CellField(u.grid, scalar.freeze(np.minimum(u.f, c)))
        high = u - low
        return _split(f, low * sign, high * sign, norm, "level")
    support = u.f > 0
    labels, n = label(support, Connectivity.FOUR)
    if n > 1:
        first = CellField(u.grid, scalar.freeze(np.where(labels == 1, f.f, f.f * 0)))
        return _split(f, first, f - first, norm, "component")
    return None


def _holes4(mask: np.ndarray) -> np.ndarray:
    """Pixels of the complement not 4-connected to the exterior."""
    padded = np.pad(~mask, 1, constant_values=True)
    labels, _ = label(padded, Connectivity.FOUR)
    return (~mask) & (labels[1:-1, 1:-1] != labels[0, 0])


def certify_extreme_fv(f: CellField) -> ExtremeCertificate:
    """Extreme iff ``f = ±1_E / P(E)`` for a 4-connected ``E`` with 4-connected complement.

    The hole split writes ``1_E = 1_S - 1_D`` where ``S`` is ``E`` plus every
    complement pixel cut off from the exterior under 4-adjacency and ``D = S - E``.
    This covers both genuine holes and the corner pinches that the 8-connected
    complement convention of :func:`~loopflow.pixel_sets.is_simple` lets through.
    """
    _check_unit(f, fv_norm)
    cert = _sign_level_component(f, fv_norm)
    if cert is not None:
        return cert
    mask = f.f != 0
    inner = _holes4(mask)
    if inner.any():
        value = f.f[mask][0]
        filled = CellField.indicator(f.grid, mask | inner, 1, f.mode) * value
        holes = CellField.indicator(f.grid, inner, 1, f.mode) * value
        return _split(f, filled, -holes, fv_norm, "hole")
    return ExtremeCertificate(Verdict.EXTREME)


def certify_extreme_bv(f: CellField) -> ExtremeCertificate:
    """Extreme iff ``f = ±1_E / (|E| + P(E))`` with ``E`` 4-connected."""
    _check_unit(f, bv_norm)
    cert = _sign_level_component(f, bv_norm)
    return cert if cert is not None else ExtremeCertificate(Verdict.EXTREME)


def extreme_loop(E: PixelSet) -> tuple[LatticeCurve, object]:
    """Boundary circuit of a simple set and the weight ``1 / P(E)`` making it a unit atom."""
    curve = trace_boundary(E)
    return curve, scalar.to_scalar(1, scalar.RATIONAL) / perimeter(E)


def validate_certificate(f: CellField, cert: ExtremeCertificate, norm) -> bool:
    """Re-check a NotExtreme certificate: convex identity, unit norms, distinct witnesses."""
    if cert.verdict is Verdict.EXTREME:
        return True
    phi, psi = cert.witness
    lam = cert.lam
    mode = f.mode
    if not (0 < lam < 1):
        return False
    back = phi * lam + psi * (1 - lam)
    scale = max(scalar.as_python(scalar.max_abs(f.f)), 1)
    if not scalar.is_zero(scalar.max_abs((back - f).f), mode, scale):
        return False
    for w in (phi, psi):
        if not scalar.is_zero(norm(w) - 1, mode):
            return False
        if scalar.is_zero(scalar.max_abs((w - f).f), mode, scale):
            return False
    return True

