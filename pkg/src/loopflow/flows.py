"""General fluxes: cycle/acyclic splitting and decomposition into open paths.

A flux is read as a directed graph on lattice nodes: every edge with nonzero
flux becomes an arc pointing along the flux. On a finite grid the flux is
acyclic (its only divergence-free subcurrent is zero) exactly when this
support graph has no directed cycle.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import scalar
from .coarea import decompose_divfree
from .errors import GridMismatch, NotAcyclic
from .grid import (CurveSuperposition, Edge, EdgeFlux, LatticeCurve, Node, divergence,
                   total_variation)


def _endpoints(edge: Edge) -> tuple[Node, Node]:
    kind, i, j = edge
    return ((i, j), (i + 1, j)) if kind == "H" else ((i, j), (i, j + 1))


class _Support:
    """Residual magnitudes and sign-directed out-arcs of a flux."""

    def __init__(self, mu: EdgeFlux):
        self.mode = mu.mode
        self.tol = scalar.tolerance(self.mode, mu.max_abs())
        self.residual: dict[Edge, object] = {}
        self.sign: dict[Edge, int] = {}
        self.out: dict[Node, list[tuple[Edge, Node]]] = {}
        for kind, arr in (("H", mu.h), ("V", mu.v)):
            for i, j in zip(*np.nonzero(np.abs(arr) > self.tol)):
                e = (kind, int(i), int(j))
                x = scalar.as_python(arr[i, j])
                a, b = _endpoints(e)
                if x < 0:
                    a, b = b, a
                self.residual[e] = abs(x)
                self.sign[e] = 1 if x > 0 else -1
                self.out.setdefault(a, []).append((e, b))
        for arcs in self.out.values():
            arcs.sort()

    def live(self, e: Edge) -> bool:
        return self.residual[e] > self.tol

    def to_flux(self, grid) -> EdgeFlux:
        h = scalar.zeros(grid.h_shape, self.mode, object)
        v = scalar.zeros(grid.v_shape, self.mode, object)
        for (kind, i, j), r in self.residual.items():
            if self.live((kind, i, j)):
                (h if kind == "H" else v)[i, j] = self.sign[(kind, i, j)] * r
        return EdgeFlux(grid, scalar.freeze(scalar.compact(h)), scalar.freeze(scalar.compact(v)))


def find_directed_cycle(mu: EdgeFlux) -> list[Node] | None:
    """A directed cycle of the support graph as a closed node list, or ``None``."""
    sup = _Support(mu)
    state: dict[Node, int] = {}  # 1 = on the stack, 2 = finished
    for root in sorted(sup.out):
        if root in state:
            continue
        stack = [(root, iter(sup.out.get(root, ())))]
        path = [root]
        state[root] = 1
        while stack:
            node, arcs = stack[-1]
            for _, nxt in arcs:
                if state.get(nxt) == 1:
                    k = path.index(nxt)
                    return path[k:] + [nxt]
                if nxt not in state:
                    state[nxt] = 1
                    path.append(nxt)
                    stack.append((nxt, iter(sup.out.get(nxt, ()))))
                    break
            else:
                state[node] = 2
                stack.pop()
                path.pop()
    return None


def _cancel_cycles(mu: EdgeFlux) -> tuple[_Support, list[tuple[object, list[Node]]]]:
    """Walk the support graph, cancelling every directed cycle met on the way.

    Each cancellation removes the bottleneck magnitude along the cycle, so at
    least one arc dies per cycle. Nodes whose out-arcs are all dead (or lead
    to dead nodes) are retired for good.
    """
    sup = _Support(mu)
    ptr: dict[Node, int] = {}
    dead: set[Node] = set()
    cycles: list[tuple[object, list[Node]]] = []
    for root in sorted(sup.out):
        if root in dead:
            continue
        path: list[Node] = [root]
        arcs_on_path: list[Edge] = []
        pos = {root: 0}
        while path:
            u = path[-1]
            arcs = sup.out.get(u, [])
            k = ptr.get(u, 0)
            while k < len(arcs) and (not sup.live(arcs[k][0]) or arcs[k][1] in dead):
                k += 1
            ptr[u] = k
            if k == len(arcs):
                dead.add(u)
                path.pop()
                del pos[u]
                if arcs_on_path:
                    arcs_on_path.pop()
                continue
            e, w = arcs[k]
            if w in pos:
                i = pos[w]
                cyc_arcs = arcs_on_path[i:] + [e]
                b = min(sup.residual[a] for a in cyc_arcs)
                for a in cyc_arcs:
                    sup.residual[a] -= b
                cycles.append((b, path[i:] + [w]))
                for n in path[i + 1:]:
                    del pos[n]
                del path[i + 1:]
                del arcs_on_path[i:]
            else:
                pos[w] = len(path)
                path.append(w)
                arcs_on_path.append(e)
    return sup, cycles


def cycle_acyclic_split(mu: EdgeFlux) -> tuple[EdgeFlux, EdgeFlux]:
    """``(cycle, acyclic)`` with ``cycle + acyclic == mu``.

    The cycle part is divergence-free and a subcurrent of ``mu``; the support
    graph of the acyclic part has no directed cycle. Maximality of the cycle
    part is not attempted.
    """
    sup, _ = _cancel_cycles(mu)
    acyclic = sup.to_flux(mu.grid)
    return mu - acyclic, acyclic


def extract_cycles(mu: EdgeFlux) -> CurveSuperposition:
    """The cancelled cycles themselves, as weighted simple closed loops.

    On a divergence-free flux they superpose to ``mu`` exactly, which gives an
    independent route to the loop decomposition of :func:`decompose_divfree`.
    """
    _, cycles = _cancel_cycles(mu)
    return CurveSuperposition(mu.grid, tuple((scalar.as_python(w), LatticeCurve(tuple(c), closed=True))
                                             for w, c in cycles))


def acyclic_to_paths(mu: EdgeFlux) -> CurveSuperposition:
    """Strip an acyclic flux into simple open paths from sources to sinks.

    Each round starts at the node with the largest remaining divergence
    (ties: smallest node), follows the live out-arc with the largest remaining
    magnitude (ties: horizontal before vertical, then by index) until it meets
    a node with negative remaining divergence, and removes the bottleneck.
    """
    cyc = find_directed_cycle(mu)
    if cyc is not None:
        raise NotAcyclic(cyc)
    sup = _Support(mu)
    tol = sup.tol
    div = {}
    d = divergence(mu).d
    for x, y in zip(*np.nonzero(np.abs(d) > tol)):
        div[(int(x), int(y))] = scalar.as_python(d[x, y])
    paths = []
    while True:
        sources = [n for n, r in div.items() if r > tol]
        if not sources:
            break
        start = min(sources, key=lambda n: (-div[n], n))
        nodes, arcs = [start], []
        node = start
        while not div.get(node, 0) < -tol:
            live = [(e, b) for e, b in sup.out.get(node, ()) if sup.live(e)]
            if not live:
                raise AssertionError(f"path stripping stalled at {node}")
            e, node = min(live, key=lambda eb: (-sup.residual[eb[0]], eb[0]))
            nodes.append(node)
            arcs.append(e)
        b = min([div[start], -div[node]] + [sup.residual[a] for a in arcs])
        for a in arcs:
            sup.residual[a] -= b
        div[start] -= b
        div[node] += b
        paths.append((b, LatticeCurve(tuple(nodes))))
    return CurveSuperposition(mu.grid, tuple(paths))


def decompose_general(mu: EdgeFlux, route: str = "coarea") -> CurveSuperposition:
    """Loops for the cycle part followed by paths for the acyclic part.

    ``route`` selects how the cycle part is split into loops: ``"coarea"``
    (potential slicing) or ``"cycles"`` (the cancelled cycles themselves).
    """
    if route not in ("coarea", "cycles"):
        raise ValueError(f"unknown route {route!r}")
    sup, cycles = _cancel_cycles(mu)
    acyclic = sup.to_flux(mu.grid)
    if route == "coarea":
        loops = decompose_divfree(mu - acyclic)
    else:
        loops = CurveSuperposition(mu.grid, tuple((scalar.as_python(w), LatticeCurve(tuple(c), closed=True))
                                                  for w, c in cycles))
    return loops + acyclic_to_paths(acyclic)


def is_subcurrent(sigma: EdgeFlux, mu: EdgeFlux) -> bool:
    """``‖mu‖ == ‖mu - sigma‖ + ‖sigma‖``."""
    if sigma.grid != mu.grid:
        raise GridMismatch(f"{sigma.grid} vs {mu.grid}")
    lhs = total_variation(mu)
    rhs = total_variation(mu - sigma) + total_variation(sigma)
    return scalar.is_zero(lhs - rhs, mu.mode, lhs)


def subcurrent_factors(sigma: EdgeFlux, mu: EdgeFlux) -> dict[Edge, object] | None:
    """Per-edge ratios ``g`` with ``sigma = g * mu`` and ``0 <= g <= 1``, or ``None``."""
    if sigma.grid != mu.grid:
        raise GridMismatch(f"{sigma.grid} vs {mu.grid}")
    tol = scalar.tolerance(mu.mode, mu.max_abs())
    g = {}
    for e, m in mu.items():
        s = sigma[e]
        if abs(m) <= tol:
            if abs(s) > tol:
                return None
            continue
        r = s / m
        if r < -tol or r > 1 + tol:
            return None
        g[e] = scalar.as_python(r)
    return g


@dataclass(frozen=True)
class AcyclicityCheck:
    acyclic: bool
    branch: str | None  # "corollary", "general" or None

    def __bool__(self) -> bool:
        return self.acyclic


def is_acyclic_fast(mu: EdgeFlux) -> AcyclicityCheck:
    """Cheap sufficient test first (all flux horizontal and rightward), then the cycle search."""
    tol = scalar.tolerance(mu.mode, mu.max_abs())
    if not np.any(np.abs(mu.v) > tol) and not np.any(mu.h < -tol):
        return AcyclicityCheck(True, "corollary")
    if find_directed_cycle(mu) is None:
        return AcyclicityCheck(True, "general")
    return AcyclicityCheck(False, None)
