"""``loopflow`` command line interface.

Exit codes: 0 success, 1 verification defect or failed hypothesis, 2 parse
error, 3 flux not divergence-free, 4 grid mismatch, 5 bad parameters.
"""
from __future__ import annotations

import argparse
import sys
import xml.etree.ElementTree as ET
from fractions import Fraction

import numpy as np

from . import io, scalar
from .coarea import decompose_divfree, verify_decomposition
from .errors import GridMismatch, NotDivergenceFree
from .flows import decompose_general
from .grid import (CellField, CurveSuperposition, EdgeFlux, GridSpec, LatticeCurve, perp_gradient,
                   superpose)
from .rigidity import ConeCondition, LowerHalfMass, NonzeroDivergence, rigidity_theorem_check

MAX_SIZE = 512
GEN_KINDS = ("pixel", "vortex", "random-potential", "dipole", "shear")

EXIT_OK, EXIT_DEFECT, EXIT_PARSE, EXIT_DIVERGENCE, EXIT_GRID, EXIT_PARAMS = range(6)


def _write(text: str, path: str | None) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _load_flux(path: str, mode: str) -> EdgeFlux:
    doc = io.read_document(path)
    if isinstance(doc, dict) and doc.get("schema") == "cellfield/1":
        return perp_gradient(io.field_from_json(doc, mode))
    return io.flux_from_json(doc, mode)


def cmd_decompose(args) -> int:
    mu = _load_flux(args.input, args.scalar)
    if args.mode == "divfree":
        try:
            eta = decompose_divfree(mu)
        except NotDivergenceFree as exc:
            print(f"error: flux is not divergence-free: {exc}", file=sys.stderr)
            return EXIT_DIVERGENCE
    else:
        eta = decompose_general(mu)
    _write(io.dumps(io.curves_to_json(eta)), args.out)
    report = verify_decomposition(mu, eta)
    print(report.summary(), file=sys.stderr if args.out in (None, "-") else sys.stdout)
    return EXIT_OK if report.clean else EXIT_DEFECT


def cmd_verify(args) -> int:
    mu = _load_flux(args.flux, args.scalar)
    eta = io.curves_from_json(io.read_document(args.decomposition), args.scalar)
    try:
        report = verify_decomposition(mu, eta)
    except GridMismatch as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GRID
    print(report.summary())
    return EXIT_OK if report.clean else EXIT_DEFECT


def _describe(v) -> str:
    if isinstance(v, LowerHalfMass):
        return f"LowerHalfMass: curve {v.item} segment {v.segment} {v.points}"
    if isinstance(v, NonzeroDivergence):
        x, y = v.point
        return f"NonzeroDivergence: point ({float(x)}, {float(y)}) net {io.encode(v.net)}"
    if isinstance(v, ConeCondition):
        return f"ConeCondition: curve {v.item} segment {v.segment} ratio {v.ratio:.6g}"
    return str(v)


def cmd_rigidity(args) -> int:
    doc = io.read_document(args.input)
    if args.c is not None:
        c = args.c
    elif isinstance(doc, dict) and "c" in doc:
        c = io._number(doc["c"], "c", scalar.RATIONAL)
    else:
        raise io.ParseError("missing key 'c' (or pass --c)", "document")
    if not c > 0:
        print(f"error: cone constant must be positive, got {c}", file=sys.stderr)
        return EXIT_PARAMS
    verdict = rigidity_theorem_check(io.polycurves_from_json(doc, c))
    print(f"verdict: {verdict.verdict}")
    if verdict.violation is not None:
        print(_describe(verdict.violation))
    return EXIT_OK if verdict.is_zero else EXIT_DEFECT


def _vortex(n: int, mode: str) -> EdgeFlux:
    i, j = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    pyramid = np.minimum(np.minimum(i + 1, j + 1), np.minimum(n - i, n - j))
    return perp_gradient(CellField.from_values(pyramid.tolist(), mode))


def _dipole(n: int, mode: str) -> EdgeFlux:
    """Unit charge from ``(0, m)`` to ``(n, m)``, split evenly over a straight and a detour route."""
    grid = GridSpec(n, n)
    m = n // 2
    straight = LatticeCurve(tuple((x, m) for x in range(n + 1)))
    detour = LatticeCurve(((0, m),) + tuple((x, m + 1) for x in range(n + 1)) + ((n, m),))
    half = Fraction(1, 2) if mode == scalar.RATIONAL else 0.5
    return superpose(CurveSuperposition(grid, ((half, straight), (half, detour))), mode)


def generate(kind: str, seed: int, size: int, mode: str) -> dict:
    rng = np.random.default_rng(seed)
    if kind == "pixel":
        return io.flux_to_json(perp_gradient(CellField.from_values([[1]], mode)))
    if kind == "vortex":
        return io.flux_to_json(_vortex(size, mode))
    if kind == "random-potential":
        vals = rng.integers(-3, 4, size=(size, size))
        return io.flux_to_json(perp_gradient(CellField.from_values(vals.tolist(), mode)))
    if kind == "dipole":
        return io.flux_to_json(_dipole(size, mode))
    rates = rng.integers(1, 4, size=size + 1)
    h = np.repeat(rates[None, :], size, axis=0)
    v = np.zeros((size + 1, size), dtype=np.int64)
    return io.flux_to_json(EdgeFlux.from_values(GridSpec(size, size), h.tolist(), v.tolist(), mode))


def cmd_gen(args) -> int:
    if not 1 <= args.size <= MAX_SIZE:
        print(f"error: --size must lie in 1..{MAX_SIZE}", file=sys.stderr)
        return EXIT_PARAMS
    if args.seed < 0:
        print("error: --seed must be non-negative", file=sys.stderr)
        return EXIT_PARAMS
    _write(io.dumps(generate(args.kind, args.seed, args.size, args.scalar or scalar.default_mode())), args.out)
    return EXIT_OK


SCALE = 24
MARGIN = 16
MAX_STROKE = 6


def render_svg(eta: CurveSuperposition) -> str:
    """One polyline per curve, drawn in order, with stroke width proportional to weight."""
    W, H = eta.grid.width, eta.grid.height
    svg = ET.Element("svg", {
        "xmlns": "http://www.w3.org/2000/svg",
        "width": str(W * SCALE + 2 * MARGIN),
        "height": str(H * SCALE + 2 * MARGIN),
        "viewBox": f"0 0 {W * SCALE + 2 * MARGIN} {H * SCALE + 2 * MARGIN}",
    })
    defs = ET.SubElement(svg, "defs")
    marker = ET.SubElement(defs, "marker", {
        "id": "arrow", "viewBox": "0 0 10 10", "refX": "9", "refY": "5",
        "markerWidth": "5", "markerHeight": "5", "orient": "auto-start-reverse",
    })
    ET.SubElement(marker, "path", {"d": "M 0 0 L 10 5 L 0 10 z", "fill": "context-stroke"})
    ET.SubElement(svg, "rect", {
        "x": str(MARGIN), "y": str(MARGIN), "width": str(W * SCALE), "height": str(H * SCALE),
        "fill": "none", "stroke": "#cccccc", "stroke-width": "1",
    })
    wmax = max((float(w) for w in eta.weights), default=1.0)
    for k, (w, c) in enumerate(eta.items):
        pts = " ".join(f"{MARGIN + x * SCALE},{MARGIN + (H - y) * SCALE}" for x, y in c.nodes)
        ET.SubElement(svg, "polyline", {
            "id": f"curve-{k}",
            "points": pts,
            "fill": "none",
            "stroke": "#1f4e9c" if c.closed else "#b0302a",
            "stroke-width": f"{MAX_STROKE * float(w) / wmax:.4g}",
            "stroke-linejoin": "round",
            "marker-mid": "url(#arrow)",
            "marker-end": "url(#arrow)",
        })
    ET.indent(svg)
    return ET.tostring(svg, encoding="unicode") + "\n"


def cmd_render(args) -> int:
    eta = io.curves_from_json(io.read_document(args.input), args.scalar)
    _write(render_svg(eta), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scalar", choices=scalar.MODES, default=None,
                        help="arithmetic mode (default: $LOOPFLOW_SCALAR or rational)")
    common.add_argument("--out", default=None, help="output file (default: stdout)")

    p = argparse.ArgumentParser(prog="loopflow", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("decompose", parents=[common], help="decompose a flux into loops and paths")
    d.add_argument("input")
    d.add_argument("--mode", choices=("divfree", "general"), default="divfree")
    d.set_defaults(run=cmd_decompose)

    v = sub.add_parser("verify", parents=[common], help="check a decomposition against a flux")
    v.add_argument("flux")
    v.add_argument("decomposition")
    v.set_defaults(run=cmd_verify)

    r = sub.add_parser("rigidity", parents=[common], help="check the rigidity hypotheses")
    r.add_argument("input")
    r.add_argument("--c", type=Fraction, default=None, help="cone constant (overrides the file)")
    r.set_defaults(run=cmd_rigidity)

    g = sub.add_parser("gen", parents=[common], help="generate an example flux")
    g.add_argument("kind", choices=GEN_KINDS)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--size", type=int, default=8)
    g.set_defaults(run=cmd_gen)

    s = sub.add_parser("render", parents=[common], help="draw a decomposition as SVG")
    s.add_argument("input")
    s.set_defaults(run=cmd_render)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.run(args)
    except io.ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
