import time
from collections import deque

import numpy as np
import pytest

from loopflow.grid import CellField, GridSpec, LatticeCurve, curve_measure, perp_gradient

N4 = ((1, 0), (-1, 0), (0, 1), (0, -1))
N8 = N4 + ((1, 1), (1, -1), (-1, 1), (-1, -1))


def flood_components(cells, steps):
    """Connected components of a set of (i, j) cells by breadth-first search."""
    cells = set(cells)
    seen, out = set(), []
    for start in sorted(cells):
        if start in seen:
            continue
        comp, queue = {start}, deque([start])
        seen.add(start)
        while queue:
            x, y = queue.popleft()
            for dx, dy in steps:
                n = (x + dx, y + dy)
                if n in cells and n not in seen:
                    seen.add(n)
                    comp.add(n)
                    queue.append(n)
        out.append(comp)
    return out


def complement_cells(mask):
    """Non-member cells of the grid plus a one-cell exterior ring around it."""
    W, H = mask.shape
    return {(i, j) for i in range(-1, W + 1) for j in range(-1, H + 1)
            if not (0 <= i < W and 0 <= j < H and mask[i, j])}


def count_edges(mask):
    """Perimeter by direct enumeration of member/non-member neighbour pairs."""
    W, H = mask.shape
    member = lambda i, j: 0 <= i < W and 0 <= j < H and bool(mask[i, j])
    n = 0
    for i in range(-1, W + 1):
        for j in range(-1, H + 1):
            if member(i, j) != member(i + 1, j):
                n += 1
            if member(i, j) != member(i, j + 1):
                n += 1
    return n


def blob_field(rng, W, H, signed=True, max_blobs=6):
    """Sum of a few random rectangles with small integer heights."""
    f = np.zeros((W, H), dtype=np.int64)
    for _ in range(rng.integers(1, max_blobs + 1)):
        x0, x1 = sorted(rng.integers(0, W + 1, size=2))
        y0, y1 = sorted(rng.integers(0, H + 1, size=2))
        h = int(rng.integers(1, 4)) * (int(rng.choice([-1, 1])) if signed else 1)
        f[x0:x1 + 1, y0:y1 + 1] += h
    return f


def noise_field(rng, W, H, signed=True, density=0.6):
    lo = -3 if signed else 0
    return rng.integers(lo, 4, size=(W, H)) * (rng.random((W, H)) < density)


def random_field(rng, max_size=32, signed=True, mode="rational"):
    """Random potential: blobs on any grid up to ``max_size``, pixel noise on small grids."""
    W, H = (int(x) for x in rng.integers(1, max_size + 1, size=2))
    if W * H <= 144 and rng.random() < 0.5:
        a = noise_field(rng, W, H, signed)
    else:
        a = blob_field(rng, W, H, signed)
    if mode == "float":
        a = a * rng.uniform(0.1, 3.0) + (a != 0) * rng.normal(scale=1e-3, size=a.shape)
    return CellField.from_values(a.tolist(), mode)


def random_walk(rng, grid, max_steps=12):
    """Self-avoiding lattice walk of at least one step, or None."""
    node = (int(rng.integers(0, grid.width + 1)), int(rng.integers(0, grid.height + 1)))
    nodes = [node]
    for _ in range(int(rng.integers(1, max_steps + 1))):
        dx, dy = N4[int(rng.integers(4))]
        n = (nodes[-1][0] + dx, nodes[-1][1] + dy)
        if grid.has_node(n) and n not in nodes:
            nodes.append(n)
    return LatticeCurve(tuple(nodes)) if len(nodes) > 1 else None


def random_mixed_flux(rng, max_size=32, paths=4):
    """Random divergence-free flux plus a few weighted open paths."""
    f = random_field(rng, max_size)
    mu = perp_gradient(f)
    for _ in range(paths):
        walk = random_walk(rng, f.grid)
        if walk is not None:
            mu = mu + curve_measure(walk, f.grid) * int(rng.integers(1, 4))
    return mu


def rng_for(seed):
    return np.random.default_rng(seed)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def grid(w, h):
    return GridSpec(w, h)


class Stopwatch:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t0


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
