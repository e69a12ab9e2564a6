"""Divergence-free fluxes as superpositions of simple closed loops.

Pipeline: potential -> monotone pieces -> plateau slicing -> boundary loops.
"""
from __future__ import annotations

import operator
from collections import Counter
from dataclasses import dataclass

import numpy as np

from . import scalar
from .errors import GridMismatch, NotMonotone
from .grid import (CurveSuperposition, EdgeFlux, LatticeCurve, curve_length, divergence,
                   integrate_potential, superpose, total_variation)
from .monotone import MonotoneComponent, decompose_monotone, is_monotone
from .pixel_sets import PixelSet, split_pinches, trace_boundary


def loops_of_monotone(m: MonotoneComponent) -> CurveSuperposition:
    """Slice a monotone piece into weighted boundary loops, one plateau at a time.

    For the distinct values ``0 = t0 < t1 < ... < tk`` of ``sign * field`` the
    plateau ``(t_{j-1}, t_j]`` contributes the boundary of ``{sign * field > t_{j-1}}``
    with weight ``t_j - t_{j-1}``. A boundary that pinches at a corner is cut into
    its node-simple loops. Negative pieces get reversed loops.
    """
    f = m.field
    u = f if m.sign > 0 else -f
    if np.any(u.f < 0) or not is_monotone(f):
        raise NotMonotone("component must be monotone with constant sign")
    items = []
    vals = _distinct_levels(u)
    for lo, hi in zip(vals, vals[1:]):
        circuit = trace_boundary(PixelSet(f.grid, u.f > lo))
        for loop in split_pinches(circuit):
            items.append((hi - lo, loop if m.sign > 0 else loop.reversed()))
    return CurveSuperposition(f.grid, tuple(items))


def _distinct_levels(u) -> list:
    vals = u.values()
    if u.mode != scalar.FLOAT:
        return vals
    # merge float levels closer than the tolerance so rounding residue never becomes a loop
    tol = scalar.tolerance(scalar.FLOAT, vals[-1])
    kept = [vals[0]]
    for v in vals[1:]:
        if v - kept[-1] > tol:
            kept.append(v)
        else:
            kept[-1] = v
    return kept


def decompose_divfree(mu: EdgeFlux) -> CurveSuperposition:
    """Weighted simple closed loops whose superposition is exactly ``mu``."""
    potential = integrate_potential(mu)
    items: list = []
    for m in decompose_monotone(potential):
        items.extend(loops_of_monotone(m).items)
    return CurveSuperposition(mu.grid, tuple(items))


def normalized_atoms(eta: CurveSuperposition) -> list[tuple[object, LatticeCurve]]:
    """Re-express ``eta`` with unit-mass atoms: pairs ``(weight * length, curve)``.

    Each curve then stands for ``curve_measure / length``, which has total
    variation one for a simple curve.
    """
    return [(w * curve_length(c), c) for w, c in eta.items]


@dataclass(frozen=True)
class VerificationReport:
    reconstruction_residual: object
    tv_defect: object
    edge_defect: object
    node_defect: object
    closed: tuple[bool, ...]
    simple: tuple[bool, ...]
    mode: str = scalar.RATIONAL
    scale: object = 1

    def defects(self) -> dict[str, object]:
        return {
            "reconstruction_residual": self.reconstruction_residual,
            "tv_defect": self.tv_defect,
            "edge_defect": self.edge_defect,
            "node_defect": self.node_defect,
        }

    @property
    def clean(self) -> bool:
        """All residuals vanish and every curve is simple."""
        numbers_ok = all(scalar.is_zero(v, self.mode, self.scale) for v in self.defects().values())
        return numbers_ok and all(self.simple)

    def __bool__(self) -> bool:
        return self.clean

    def summary(self) -> str:
        lines = [f"{k}: {scalar.format_scalar(v)}" for k, v in self.defects().items()]
        lines.append(f"curves: {len(self.simple)} ({sum(self.closed)} closed, "
                     f"{len(self.simple) - sum(self.simple)} not simple)")
        lines.append("verdict: " + ("clean" if self.clean else "DEFECT"))
        return "\n".join(lines)


def _abs_step_counts(gamma: LatticeCurve) -> Counter:
    net: Counter = Counter()
    for e, s in gamma.steps():
        net[e] += s
    return net


def verify_decomposition(mu: EdgeFlux, eta: CurveSuperposition) -> VerificationReport:
    """Check ``eta`` against the three superposition identities for ``mu``.

    * reconstruction: max over edges of ``|superpose(eta) - mu|``
    * total variation: ``|‖mu‖ - sum of weight * length|``
    * edgewise mass: max over edges of ``|sum w |mu_gamma(e)| - |mu(e)||``
    * nodewise divergence: max over nodes of ``|sum w |div mu_gamma|(n) - |div mu|(n)|``
    """
    if mu.grid != eta.grid:
        raise GridMismatch(f"flux grid {mu.grid} vs decomposition grid {eta.grid}")
    mode = mu.mode
    grid = mu.grid

    rebuilt = superpose(eta, mode)
    diff = rebuilt - mu
    residual = max(scalar.max_abs(diff.h), scalar.max_abs(diff.v))

    conv = [(scalar.to_scalar(w, mode), c) for w, c in eta.items]
    mass = scalar.to_scalar(0, mode)
    for w, c in conv:
        mass += w * curve_length(c)
    tv = total_variation(mu)
    tv_defect = abs(tv - mass)

    h = scalar.zeros(grid.h_shape, mode, object)
    v = scalar.zeros(grid.v_shape, mode, object)
    node_mass = scalar.zeros(grid.node_shape, mode, object)
    for w, c in conv:
        for (kind, i, j), k in _abs_step_counts(c).items():
            if k:
                (h if kind == "H" else v)[i, j] += w * abs(k)
        if c.start != c.end:
            node_mass[c.start] += w
            node_mass[c.end] += w
    edge_defect = max(
        scalar.max_abs(scalar.combine(h, np.abs(mu.h), operator.sub)),
        scalar.max_abs(scalar.combine(v, np.abs(mu.v), operator.sub)),
    )
    node_defect = scalar.max_abs(scalar.combine(node_mass, np.abs(divergence(mu).d), operator.sub))

    return VerificationReport(
        reconstruction_residual=scalar.as_python(residual),
        tv_defect=scalar.as_python(tv_defect),
        edge_defect=scalar.as_python(edge_defect),
        node_defect=scalar.as_python(node_defect),
        closed=tuple(c.closed for _, c in eta.items),
        simple=tuple(c.is_simple for _, c in eta.items),
        mode=mode,
        scale=max(scalar.as_python(mu.max_abs()), scalar.as_python(tv), 1),
    )
