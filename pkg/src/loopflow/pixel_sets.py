"""Digital finite-perimeter sets on the pixel grid.

Sets use 4-connectivity; complements (which always contain the unbounded
exterior of the grid) use 8-connectivity. Under this pairing a simple set may
still touch its own boundary at a corner ("pinch node") where two member
pixels meet diagonally; :func:`trace_boundary` returns the single boundary
circuit in that case and :func:`split_pinches` cuts it into node-simple loops.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

import numpy as np
from scipy import ndimage

from . import scalar
from .errors import NotIndecomposable, NotSimple
from .grid import CellField, GridSpec, LatticeCurve, Node, perp_gradient


class Connectivity(Enum):
    FOUR = 4
    EIGHT = 8


_STRUCTURE = {
    Connectivity.FOUR: ndimage.generate_binary_structure(2, 1),
    Connectivity.EIGHT: ndimage.generate_binary_structure(2, 2),
}


@dataclass(frozen=True, eq=False)
class PixelSet:
    grid: GridSpec
    mask: np.ndarray

    def __post_init__(self):
        mask = np.array(self.mask, dtype=bool)
        if mask.shape != self.grid.cell_shape:
            raise ValueError(f"mask has shape {mask.shape}, expected {self.grid.cell_shape}")
        mask.flags.writeable = False
        object.__setattr__(self, "mask", mask)

    @classmethod
    def from_cells(cls, grid: GridSpec, cells) -> "PixelSet":
        mask = np.zeros(grid.cell_shape, dtype=bool)
        for i, j in cells:
            mask[i, j] = True
        return cls(grid, mask)

    @classmethod
    def empty(cls, grid: GridSpec) -> "PixelSet":
        return cls(grid, np.zeros(grid.cell_shape, dtype=bool))

    def __eq__(self, other) -> bool:
        if not isinstance(other, PixelSet):
            return NotImplemented
        return self.grid == other.grid and bool(np.array_equal(self.mask, other.mask))

    def __hash__(self):
        return hash((self.grid, self.mask.tobytes()))

    def __or__(self, other: "PixelSet") -> "PixelSet":
        return PixelSet(self.grid, self.mask | other.mask)

    def __and__(self, other: "PixelSet") -> "PixelSet":
        return PixelSet(self.grid, self.mask & other.mask)

    def __sub__(self, other: "PixelSet") -> "PixelSet":
        return PixelSet(self.grid, self.mask & ~other.mask)

    def __le__(self, other: "PixelSet") -> bool:
        return not np.any(self.mask & ~other.mask)

    def __len__(self) -> int:
        return int(self.mask.sum())

    def __bool__(self) -> bool:
        return bool(self.mask.any())

    def cells(self) -> list[tuple[int, int]]:
        return [(int(i), int(j)) for i, j in zip(*np.nonzero(self.mask))]

    def indicator(self, value=1, mode: str | None = None) -> CellField:
        return CellField.indicator(self.grid, self.mask, value, mode)


@dataclass(frozen=True)
class ComponentDecomposition:
    components: tuple[PixelSet, ...]

    def __len__(self) -> int:
        return len(self.components)

    def __iter__(self):
        return iter(self.components)

    def __getitem__(self, k) -> PixelSet:
        return self.components[k]


def boundary_count(mask: np.ndarray, exterior_member: bool = False) -> int:
    """Number of unit edges between member and non-member cells.

    The region outside the grid counts as a member when ``exterior_member``.
    """
    padded = np.pad(mask, 1, constant_values=exterior_member)
    return int(np.count_nonzero(padded[1:, :] != padded[:-1, :])
               + np.count_nonzero(padded[:, 1:] != padded[:, :-1]))


def perimeter(E: PixelSet) -> int:
    return boundary_count(E.mask)


def variation(f: CellField):
    """Sum of absolute differences over adjacent cell pairs, exterior included."""
    arr, den = f.f, 1
    if arr.dtype == object:
        scaled = scalar.scaled_integers(arr)
        if scaled is not None:
            arr, den = scaled
    padded = np.pad(arr, 1, constant_values=arr.flat[0] * 0)
    out = (scalar.abs_total(padded[1:, :] - padded[:-1, :])
           + scalar.abs_total(padded[:, 1:] - padded[:, :-1]))
    return out if den == 1 else Fraction(out, den)


def superlevel_perimeter(f: CellField, t) -> int:
    """Perimeter of ``{f > t}``, where the exterior (value 0) joins the set when ``t < 0``."""
    return boundary_count(f.f > t, exterior_member=bool(t < 0))


def coarea_variation(f: CellField):
    """``sum_k (t_{k+1} - t_k) * P({f > t_k})`` over consecutive distinct values of ``f`` and 0."""
    vals = f.values()
    total = scalar.to_scalar(0, f.mode)
    for lo, hi in zip(vals, vals[1:]):
        total += (hi - lo) * superlevel_perimeter(f, lo)
    return total


def label(mask: np.ndarray, connectivity: Connectivity) -> tuple[np.ndarray, int]:
    labels, n = ndimage.label(mask, structure=_STRUCTURE[connectivity])
    return labels, int(n)


def components(E: PixelSet, connectivity: Connectivity = Connectivity.FOUR) -> ComponentDecomposition:
    """Connected components, ordered by their lexicographically smallest pixel."""
    labels, n = label(E.mask, connectivity)
    return ComponentDecomposition(tuple(PixelSet(E.grid, labels == k) for k in range(1, n + 1)))


def count_components(mask: np.ndarray, connectivity: Connectivity = Connectivity.FOUR) -> int:
    return label(mask, connectivity)[1]


def is_indecomposable(E: PixelSet) -> bool:
    return count_components(E.mask) <= 1


def _complement_labels(mask: np.ndarray) -> tuple[np.ndarray, int, int]:
    """8-labels of the complement on a grid padded by one exterior ring.

    Returns the padded labels, the label count and the exterior label.
    """
    padded = np.pad(~mask, 1, constant_values=True)
    labels, n = label(padded, Connectivity.EIGHT)
    return labels, n, int(labels[0, 0])


def complement_is_connected(mask: np.ndarray) -> bool:
    return _complement_labels(mask)[1] == 1


def holes(E: PixelSet) -> list[PixelSet]:
    """Bounded 8-components of the complement of an indecomposable set."""
    if not is_indecomposable(E):
        raise NotIndecomposable("holes are defined for indecomposable sets only")
    labels, n, outside = _complement_labels(E.mask)
    inner = labels[1:-1, 1:-1]
    return [PixelSet(E.grid, inner == k) for k in range(1, n + 1) if k != outside]


def saturate(E: PixelSet) -> PixelSet:
    if not is_indecomposable(E):
        raise NotIndecomposable("saturation is defined for indecomposable sets only")
    labels, _, outside = _complement_labels(E.mask)
    return PixelSet(E.grid, labels[1:-1, 1:-1] != outside)


def is_simple(E: PixelSet) -> bool:
    """Nonempty, 4-connected, with 8-connected complement (exterior included)."""
    return bool(E) and count_components(E.mask) == 1 and complement_is_connected(E.mask)


def pinch_nodes(E: PixelSet) -> list[Node]:
    """Nodes where the four surrounding cells form a diagonal (checkerboard) pattern."""
    p = np.pad(E.mask, 1, constant_values=False)
    sw, se, nw, ne = p[:-1, :-1], p[1:, :-1], p[:-1, 1:], p[1:, 1:]
    hit = (sw == ne) & (se == nw) & (sw != se)
    return [(int(x), int(y)) for x, y in zip(*np.nonzero(hit))]


# Direction vectors in clockwise order starting north; turning right = +1.
_DIRS = ((0, 1), (1, 0), (0, -1), (-1, 0))


def _boundary_arcs(E: PixelSet) -> dict[Node, list[Node]]:
    mu = perp_gradient(E.indicator(mode=scalar.FLOAT))
    out: dict[Node, list[Node]] = {}
    for i, j in zip(*np.nonzero(mu.h)):
        i, j = int(i), int(j)
        a, b = ((i, j), (i + 1, j)) if mu.h[i, j] > 0 else ((i + 1, j), (i, j))
        out.setdefault(a, []).append(b)
    for i, j in zip(*np.nonzero(mu.v)):
        i, j = int(i), int(j)
        a, b = ((i, j), (i, j + 1)) if mu.v[i, j] > 0 else ((i, j + 1), (i, j))
        out.setdefault(a, []).append(b)
    return out


def trace_boundary(E: PixelSet) -> LatticeCurve:
    """Closed boundary circuit of a simple set, with the set on its right.

    The curve measure of the result equals ``perp_gradient`` of the indicator and
    its length equals the perimeter. The walk starts at the lower-left node of
    the lexicographically smallest member pixel and, at a pinch node, turns
    toward the member pixel it is following, so the circuit visits such a node
    twice.
    """
    if not is_simple(E):
        raise NotSimple("boundary tracing requires a simple set")
    arcs = _boundary_arcs(E)
    start = E.cells()[0]
    nodes = [start]
    heading = 0
    node = start
    used = 0
    while True:
        choices = arcs[node]
        if len(choices) == 1:
            nxt = choices[0]
        else:
            by_dir = {_DIRS.index((b[0] - node[0], b[1] - node[1])): b for b in choices}
            for turn in (1, 0, 3):
                d = (heading + turn) % 4
                if d in by_dir:
                    nxt = by_dir[d]
                    break
        heading = _DIRS.index((nxt[0] - node[0], nxt[1] - node[1]))
        choices.remove(nxt)
        nodes.append(nxt)
        used += 1
        node = nxt
        if node == start:
            break
    if used != perimeter(E):
        raise NotSimple("boundary does not form a single circuit")
    return LatticeCurve(tuple(nodes), closed=True)


def split_pinches(gamma: LatticeCurve) -> list[LatticeCurve]:
    """Cut a closed circuit at repeated nodes into node-simple closed loops."""
    if not gamma.closed:
        raise ValueError("only closed curves can be split into loops")
    if gamma.is_simple:
        return [gamma]
    loops = []
    stack: list[Node] = []
    where: dict[Node, int] = {}
    for node in gamma.nodes:
        if node in where:
            k = where[node]
            loop = stack[k:] + [node]
            for n in stack[k + 1:]:
                del where[n]
            del stack[k + 1:]
            loops.append(LatticeCurve(tuple(loop), closed=True))
        else:
            where[node] = len(stack)
            stack.append(node)
    return loops


def fill_interior(gamma: LatticeCurve, grid: GridSpec) -> PixelSet:
    """Pixels enclosed by a closed lattice curve, by clockwise winding number."""
    if not gamma.closed:
        raise ValueError("interior is defined for closed curves only")
    # winding about cell centres: accumulate crossings of upward/downward vertical edges
    wind = np.zeros(grid.cell_shape, dtype=np.int64)
    for (kind, i, j), s in gamma.steps():
        if kind == "V":
            # a vertical step at x = i contributes to every cell right of it in row j
            wind[i:, j] += s
    return PixelSet(grid, wind != 0)
