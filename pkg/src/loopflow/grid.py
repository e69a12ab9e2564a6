"""Lattice model: potentials on cells, fluxes on edges, divergence on nodes.

Coordinates follow the usual mathematical orientation: ``x`` grows to the
right, ``y`` grows upward. Cell ``(i, j)`` is the unit square with lower-left
node ``(i, j)``. Arrays are indexed ``[i, j]``:

* ``CellField.f``        shape ``(W, H)``
* ``EdgeFlux.h``          shape ``(W, H + 1)``; ``h[i, j]`` runs from node ``(i, j)`` to ``(i + 1, j)``
* ``EdgeFlux.v``          shape ``(W + 1, H)``; ``v[i, j]`` runs from node ``(i, j)`` to ``(i, j + 1)``
* ``NodeDivergence.d``   shape ``(W + 1, H + 1)``

Everything outside the grid is zero.
"""
from __future__ import annotations

import operator
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from . import scalar
from .errors import GridMismatch, InconsistentCirculation, NotDivergenceFree

Node = tuple[int, int]
Edge = tuple[str, int, int]  # ("H" | "V", i, j)


@dataclass(frozen=True)
class GridSpec:
    width: int
    height: int

    def __post_init__(self):
        if int(self.width) < 1 or int(self.height) < 1:
            raise ValueError(f"grid must be at least 1x1, got {self.width}x{self.height}")

    @property
    def cell_shape(self) -> tuple[int, int]:
        return (self.width, self.height)

    @property
    def h_shape(self) -> tuple[int, int]:
        return (self.width, self.height + 1)

    @property
    def v_shape(self) -> tuple[int, int]:
        return (self.width + 1, self.height)

    @property
    def node_shape(self) -> tuple[int, int]:
        return (self.width + 1, self.height + 1)

    def has_node(self, node: Node) -> bool:
        x, y = node
        return 0 <= x <= self.width and 0 <= y <= self.height

    def edges(self) -> Iterator[Edge]:
        """All edges in canonical order: horizontal before vertical, then by index."""
        for i in range(self.width):
            for j in range(self.height + 1):
                yield ("H", i, j)
        for i in range(self.width + 1):
            for j in range(self.height):
                yield ("V", i, j)

    def nodes(self) -> Iterator[Node]:
        for x in range(self.width + 1):
            for y in range(self.height + 1):
                yield (x, y)


def _check_shape(arr: np.ndarray, shape, what: str) -> None:
    if arr.shape != tuple(shape):
        raise ValueError(f"{what} has shape {arr.shape}, expected {tuple(shape)}")


def _same_grid(a, b) -> None:
    if a.grid != b.grid:
        raise GridMismatch(f"{a.grid} vs {b.grid}")


@dataclass(frozen=True, eq=False)
class CellField:
    """A real value per pixel; zero outside the grid."""

    grid: GridSpec
    f: np.ndarray

    def __post_init__(self):
        _check_shape(self.f, self.grid.cell_shape, "cell field")
        self.f.flags.writeable = False

    @classmethod
    def from_values(cls, values, mode: str | None = None) -> "CellField":
        """Build from a nested sequence indexed ``[i][j]``."""
        arr = scalar.as_array(values, scalar.resolve_mode(mode))
        if arr.ndim != 2:
            raise ValueError("cell values must be two-dimensional")
        return cls(GridSpec(*arr.shape), arr)

    @classmethod
    def zeros(cls, grid: GridSpec, mode: str | None = None) -> "CellField":
        return cls(grid, scalar.freeze(scalar.zeros(grid.cell_shape, scalar.resolve_mode(mode))))

    @classmethod
    def indicator(cls, grid: GridSpec, mask, value=1, mode: str | None = None) -> "CellField":
        mode = scalar.resolve_mode(mode)
        value = scalar.to_scalar(value, mode)
        out = scalar.zeros(grid.cell_shape, mode, object)
        out[np.asarray(mask, dtype=bool)] = value
        return cls(grid, scalar.freeze(scalar.compact(out)))

    @property
    def mode(self) -> str:
        return scalar.mode_of(self.f)

    def _wrap(self, arr) -> "CellField":
        return CellField(self.grid, scalar.freeze(np.array(arr)))

    def __add__(self, other: "CellField") -> "CellField":
        _same_grid(self, other)
        return self._wrap(scalar.combine(self.f, other.f, operator.add))

    def __sub__(self, other: "CellField") -> "CellField":
        _same_grid(self, other)
        return self._wrap(scalar.combine(self.f, other.f, operator.sub))

    def __neg__(self) -> "CellField":
        return self._wrap(-self.f)

    def __mul__(self, c) -> "CellField":
        return self._wrap(scalar.combine(self.f, c, operator.mul))

    __rmul__ = __mul__

    def __truediv__(self, c) -> "CellField":
        return self._wrap(scalar.combine(self.f, c, operator.truediv))

    def __eq__(self, other) -> bool:
        if not isinstance(other, CellField):
            return NotImplemented
        return self.grid == other.grid and bool(np.all(self.f == other.f))

    __hash__ = None

    def positive_part(self) -> "CellField":
        return self._wrap(np.where(self.f > 0, self.f, self.f * 0))

    def negative_part(self) -> "CellField":
        return self._wrap(np.where(self.f < 0, -self.f, self.f * 0))

    def is_zero(self) -> bool:
        return not np.any(self.f != 0)

    def values(self) -> list:
        """Sorted distinct values, with 0 always included (the exterior value)."""
        if self.f.dtype == object:
            vals = set(self.f.flat)
        else:
            vals = {scalar.as_python(x) for x in np.unique(self.f)}
        vals.add(scalar.to_scalar(0, self.mode))
        return sorted(vals)


@dataclass(frozen=True, eq=False)
class EdgeFlux:
    """Signed flux on every lattice edge, oriented along +x (``h``) and +y (``v``)."""

    grid: GridSpec
    h: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        _check_shape(self.h, self.grid.h_shape, "horizontal flux")
        _check_shape(self.v, self.grid.v_shape, "vertical flux")
        if scalar.mode_of(self.h) != scalar.mode_of(self.v):
            raise ValueError("h and v must share a scalar mode")
        if self.h.dtype != self.v.dtype:
            object.__setattr__(self, "h", scalar.to_object(self.h))
            object.__setattr__(self, "v", scalar.to_object(self.v))
        self.h.flags.writeable = False
        self.v.flags.writeable = False

    @classmethod
    def zeros(cls, grid: GridSpec, mode: str | None = None) -> "EdgeFlux":
        mode = scalar.resolve_mode(mode)
        return cls(grid, scalar.freeze(scalar.zeros(grid.h_shape, mode)),
                   scalar.freeze(scalar.zeros(grid.v_shape, mode)))

    @classmethod
    def from_values(cls, grid: GridSpec, h, v, mode: str | None = None) -> "EdgeFlux":
        mode = scalar.resolve_mode(mode)
        return cls(grid, scalar.as_array(h, mode), scalar.as_array(v, mode))

    @property
    def mode(self) -> str:
        return scalar.mode_of(self.h)

    def _wrap(self, h, v) -> "EdgeFlux":
        h, v = np.array(h), np.array(v)
        if h.dtype != v.dtype:
            h, v = scalar.to_object(h), scalar.to_object(v)
        return EdgeFlux(self.grid, scalar.freeze(h), scalar.freeze(v))

    def __add__(self, other: "EdgeFlux") -> "EdgeFlux":
        _same_grid(self, other)
        return self._wrap(scalar.combine(self.h, other.h, operator.add),
                          scalar.combine(self.v, other.v, operator.add))

    def __sub__(self, other: "EdgeFlux") -> "EdgeFlux":
        _same_grid(self, other)
        return self._wrap(scalar.combine(self.h, other.h, operator.sub),
                          scalar.combine(self.v, other.v, operator.sub))

    def __neg__(self) -> "EdgeFlux":
        return self._wrap(-self.h, -self.v)

    def __mul__(self, c) -> "EdgeFlux":
        return self._wrap(scalar.combine(self.h, c, operator.mul), scalar.combine(self.v, c, operator.mul))

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, EdgeFlux):
            return NotImplemented
        return (self.grid == other.grid and bool(np.all(self.h == other.h))
                and bool(np.all(self.v == other.v)))

    __hash__ = None

    def __getitem__(self, edge: Edge):
        kind, i, j = edge
        return self.h[i, j] if kind == "H" else self.v[i, j]

    def items(self) -> Iterator[tuple[Edge, object]]:
        for e in self.grid.edges():
            yield e, self[e]

    def is_zero(self) -> bool:
        return not (np.any(self.h != 0) or np.any(self.v != 0))

    def max_abs(self):
        return max(scalar.max_abs(self.h), scalar.max_abs(self.v))

    def abs(self) -> "EdgeFlux":
        return self._wrap(np.abs(self.h), np.abs(self.v))


@dataclass(frozen=True, eq=False)
class NodeDivergence:
    grid: GridSpec
    d: np.ndarray

    def __post_init__(self):
        _check_shape(self.d, self.grid.node_shape, "divergence")
        self.d.flags.writeable = False

    def __getitem__(self, node: Node):
        return self.d[node]

    def __eq__(self, other) -> bool:
        if not isinstance(other, NodeDivergence):
            return NotImplemented
        return self.grid == other.grid and bool(np.all(self.d == other.d))

    __hash__ = None

    def is_zero(self) -> bool:
        return not np.any(self.d != 0)


def step_edge(a: Node, b: Node) -> tuple[Edge, int]:
    """Edge joining adjacent nodes ``a -> b`` and the sign of the traversal."""
    dx, dy = b[0] - a[0], b[1] - a[1]
    if (dx, dy) == (1, 0):
        return ("H", a[0], a[1]), 1
    if (dx, dy) == (-1, 0):
        return ("H", b[0], b[1]), -1
    if (dx, dy) == (0, 1):
        return ("V", a[0], a[1]), 1
    if (dx, dy) == (0, -1):
        return ("V", b[0], b[1]), -1
    raise ValueError(f"nodes {a} and {b} are not lattice neighbours")


@dataclass(frozen=True)
class LatticeCurve:
    """A lattice path given by its node sequence; closed curves repeat the first node at the end."""

    nodes: tuple[Node, ...]
    closed: bool = False

    def __post_init__(self):
        nodes = tuple((int(x), int(y)) for x, y in self.nodes)
        object.__setattr__(self, "nodes", nodes)
        if len(nodes) < 2:
            raise ValueError("a curve needs at least one step")
        for a, b in zip(nodes, nodes[1:]):
            step_edge(a, b)
        if self.closed and nodes[0] != nodes[-1]:
            raise ValueError("closed curve must end at its first node")

    def steps(self) -> Iterator[tuple[Edge, int]]:
        for a, b in zip(self.nodes, self.nodes[1:]):
            yield step_edge(a, b)

    @property
    def start(self) -> Node:
        return self.nodes[0]

    @property
    def end(self) -> Node:
        return self.nodes[-1]

    @property
    def is_simple(self) -> bool:
        body = self.nodes[:-1] if self.closed else self.nodes
        return len(set(body)) == len(body)

    def reversed(self) -> "LatticeCurve":
        return LatticeCurve(self.nodes[::-1], self.closed)


@dataclass(frozen=True)
class CurveSuperposition:
    """Finite non-negative combination of lattice curves on a fixed grid."""

    grid: GridSpec
    items: tuple[tuple[object, LatticeCurve], ...] = field(default_factory=tuple)

    def __post_init__(self):
        items = tuple((w, c) for w, c in self.items)
        object.__setattr__(self, "items", items)
        for w, c in items:
            if not w > 0:
                raise ValueError(f"weights must be positive, got {w}")
            for node in c.nodes:
                if not self.grid.has_node(node):
                    raise ValueError(f"node {node} lies outside the {self.grid.width}x{self.grid.height} grid")

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    def __add__(self, other: "CurveSuperposition") -> "CurveSuperposition":
        _same_grid(self, other)
        return CurveSuperposition(self.grid, self.items + other.items)

    @property
    def curves(self) -> list[LatticeCurve]:
        return [c for _, c in self.items]

    @property
    def weights(self) -> list:
        return [w for w, _ in self.items]


def divergence(mu: EdgeFlux) -> NodeDivergence:
    """Net outflow at every node: leaving flux minus entering flux."""
    W, H = mu.grid.width, mu.grid.height
    d = scalar.zeros(mu.grid.node_shape, mu.mode, mu.h.dtype)
    d[:W, :] += mu.h
    d[1:, :] -= mu.h
    d[:, :H] += mu.v
    d[:, 1:] -= mu.v
    return NodeDivergence(mu.grid, scalar.freeze(scalar.compact(d)))


def total_variation(mu: EdgeFlux):
    """Sum of absolute fluxes; every edge has unit length."""
    return scalar.abs_total(mu.h) + scalar.abs_total(mu.v)


def perp_gradient(f: CellField) -> EdgeFlux:
    """Rotated gradient ``(-d/dy, d/dx)`` of a cell potential.

    ``h[i, j] = f(i, j-1) - f(i, j)`` and ``v[i, j] = f(i, j) - f(i-1, j)``,
    reading cells outside the grid as zero. The indicator of a pixel maps to its
    clockwise boundary loop.
    """
    zero = f.f.flat[0] * 0
    padded_y = np.pad(f.f, ((0, 0), (1, 1)), constant_values=zero)
    padded_x = np.pad(f.f, ((1, 1), (0, 0)), constant_values=zero)
    h = padded_y[:, :-1] - padded_y[:, 1:]
    v = padded_x[1:, :] - padded_x[:-1, :]
    return EdgeFlux(f.grid, scalar.freeze(h), scalar.freeze(v))


def integrate_potential(mu: EdgeFlux) -> CellField:
    """Recover the compactly supported potential ``f`` with ``perp_gradient(f) == mu``.

    Values are propagated from the exterior (value 0) into each row across
    vertical edges; every remaining adjacency is then re-checked.
    """
    mode = mu.mode
    scale = mu.max_abs()
    d = divergence(mu).d
    for node in zip(*np.nonzero(d != 0)):
        if not scalar.is_zero(d[node], mode, scale):
            raise NotDivergenceFree(tuple(int(k) for k in node), d[node])

    f = np.cumsum(mu.v[:-1, :], axis=0)
    pot = CellField(mu.grid, scalar.freeze(scalar.compact(np.array(f, dtype=mu.v.dtype))))

    back = perp_gradient(pot)
    tol = scalar.tolerance(mode, scale)
    W, H = mu.grid.width, mu.grid.height
    for kind, got, want in (("H", back.h, mu.h), ("V", back.v, mu.v)):
        diff = np.abs(scalar.combine(got, want, operator.sub))
        bad = np.nonzero(diff > tol)
        if len(bad[0]):
            i, j = int(bad[0][0]), int(bad[1][0])
            if kind == "H":
                pair = ((i, j - 1), (i, j))
            else:
                pair = ((i - 1, j), (i, j))
            pair = tuple(c if 0 <= c[0] < W and 0 <= c[1] < H else "exterior" for c in pair)
            raise InconsistentCirculation(pair, diff[i, j])
    return pot


def curve_measure(gamma: LatticeCurve, grid: GridSpec, mode: str | None = None) -> EdgeFlux:
    """Unit flux along every step of ``gamma``; repeated traversals accumulate."""
    mode = scalar.resolve_mode(mode)
    h = scalar.zeros(grid.h_shape, mode)
    v = scalar.zeros(grid.v_shape, mode)
    for node in gamma.nodes:
        if not grid.has_node(node):
            raise ValueError(f"node {node} lies outside the grid")
    for (kind, i, j), s in gamma.steps():
        if kind == "H":
            h[i, j] += s
        else:
            v[i, j] += s
    return EdgeFlux(grid, scalar.freeze(h), scalar.freeze(v))


def curve_length(gamma: LatticeCurve) -> int:
    return len(gamma.nodes) - 1


def superposition_mode(eta: CurveSuperposition) -> str:
    if any(isinstance(w, float) for w in eta.weights):
        return scalar.FLOAT
    if eta.items:
        return scalar.RATIONAL
    return scalar.default_mode()


def superpose(eta: CurveSuperposition, mode: str | None = None) -> EdgeFlux:
    """Weighted sum of the curve measures in ``eta``."""
    mode = mode or superposition_mode(eta)
    h = scalar.zeros(eta.grid.h_shape, mode, object)
    v = scalar.zeros(eta.grid.v_shape, mode, object)
    for w, gamma in eta.items:
        w = scalar.to_scalar(w, mode)
        for (kind, i, j), s in gamma.steps():
            if kind == "H":
                h[i, j] += s * w
            else:
                v[i, j] += s * w
    return EdgeFlux(eta.grid, scalar.freeze(scalar.compact(h)), scalar.freeze(scalar.compact(v)))
