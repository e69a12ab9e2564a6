"""JSON file formats.

Rows are listed bottom to top, so ``rows[j][i]`` is the entry at ``[i, j]``:

* ``edgeflux/1``   ``h``: H+1 rows of W values, ``v``: H rows of W+1 values
* ``cellfield/1``  ``cells``: H rows of W values
* ``curves/1``     ``grid`` plus weighted lattice node lists
* ``polycurves/1`` cone constant ``c`` plus weighted real-coordinate polylines

Exact non-integers are written as ``"p/q"`` strings; integers as JSON
integers; float-mode values as round-tripping JSON floats.
"""
from __future__ import annotations

import json
from fractions import Fraction

import numpy as np

from . import scalar
from .grid import CellField, CurveSuperposition, EdgeFlux, GridSpec, LatticeCurve
from .rigidity import PolyCurve, RigidityInput


class ParseError(ValueError):
    def __init__(self, message: str, where: str = ""):
        self.where = where
        super().__init__(f"{where}: {message}" if where else message)


def encode(x):
    x = scalar.as_python(x)
    if isinstance(x, float):
        return x
    x = Fraction(x)
    return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _number(x, where: str, mode: str):
    if isinstance(x, bool) or not isinstance(x, (int, float, str)):
        raise ParseError(f"expected a number or 'p/q' string, got {json.dumps(x)}", where)
    try:
        return scalar.to_scalar(x, mode)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(str(exc), where) from None


def _get(doc: dict, key: str, where: str = ""):
    if not isinstance(doc, dict) or key not in doc:
        raise ParseError(f"missing key {key!r}", where or "document")
    return doc[key]


def _dim(doc: dict, key: str, where: str = "") -> int:
    n = _get(doc, key, where)
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise ParseError(f"{key} must be a positive integer", f"{where}{key}")
    return n


def _rows(doc: dict, key: str, width: int, height: int, mode: str) -> np.ndarray:
    rows = _get(doc, key)
    if not isinstance(rows, list) or len(rows) != height:
        raise ParseError(f"expected {height} rows", key)
    out = np.empty((width, height), dtype=object)
    for j, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != width:
            raise ParseError(f"expected {width} values", f"{key}[{j}]")
        for i, x in enumerate(row):
            out[i, j] = _number(x, f"{key}[{j}][{i}]", mode)
    if mode == scalar.FLOAT:
        return scalar.freeze(out.astype(np.float64))
    return scalar.freeze(scalar.compact(out))


def _schema(doc, expected: str) -> None:
    got = _get(doc, "schema")
    if got != expected:
        raise ParseError(f"expected schema {expected!r}, got {got!r}", "schema")


def loads(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, f"line {exc.lineno} column {exc.colno}") from None


def read_document(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(exc.strerror or str(exc), path) from None
    return loads(text)


def flux_from_json(doc, mode: str | None = None) -> EdgeFlux:
    mode = scalar.resolve_mode(mode)
    _schema(doc, "edgeflux/1")
    W, H = _dim(doc, "width"), _dim(doc, "height")
    grid = GridSpec(W, H)
    return EdgeFlux(grid, _rows(doc, "h", W, H + 1, mode), _rows(doc, "v", W + 1, H, mode))


def flux_to_json(mu: EdgeFlux) -> dict:
    return {
        "schema": "edgeflux/1",
        "width": mu.grid.width,
        "height": mu.grid.height,
        "h": [[encode(x) for x in mu.h[:, j]] for j in range(mu.h.shape[1])],
        "v": [[encode(x) for x in mu.v[:, j]] for j in range(mu.v.shape[1])],
    }


def field_from_json(doc, mode: str | None = None) -> CellField:
    mode = scalar.resolve_mode(mode)
    _schema(doc, "cellfield/1")
    W, H = _dim(doc, "width"), _dim(doc, "height")
    return CellField(GridSpec(W, H), _rows(doc, "cells", W, H, mode))


def field_to_json(f: CellField) -> dict:
    return {
        "schema": "cellfield/1",
        "width": f.grid.width,
        "height": f.grid.height,
        "cells": [[encode(x) for x in f.f[:, j]] for j in range(f.grid.height)],
    }


def _curve_list(doc) -> list:
    curves = _get(doc, "curves")
    if not isinstance(curves, list):
        raise ParseError("expected a list", "curves")
    return curves


def _bool(x, where: str) -> bool:
    if not isinstance(x, bool):
        raise ParseError("expected true or false", where)
    return x


def curves_from_json(doc, mode: str | None = None) -> CurveSuperposition:
    mode = scalar.resolve_mode(mode)
    _schema(doc, "curves/1")
    g = _get(doc, "grid")
    grid = GridSpec(_dim(g, "width", "grid."), _dim(g, "height", "grid."))
    items = []
    for k, c in enumerate(_curve_list(doc)):
        where = f"curves[{k}]"
        w = _number(_get(c, "weight", where), f"{where}.weight", mode)
        closed = _bool(_get(c, "closed", where), f"{where}.closed")
        nodes = _get(c, "nodes", where)
        try:
            pts = [(int(x), int(y)) for x, y in nodes]
            if any(not isinstance(v, int) or isinstance(v, bool) for p in nodes for v in p):
                raise ValueError("node coordinates must be integers")
            items.append((scalar.as_python(w), LatticeCurve(tuple(pts), closed)))
        except (TypeError, ValueError) as exc:
            raise ParseError(str(exc), f"{where}.nodes") from None
    try:
        return CurveSuperposition(grid, tuple(items))
    except ValueError as exc:
        raise ParseError(str(exc), "curves") from None


def curves_to_json(eta: CurveSuperposition) -> dict:
    return {
        "schema": "curves/1",
        "grid": {"width": eta.grid.width, "height": eta.grid.height},
        "curves": [
            {"weight": encode(w), "closed": c.closed, "nodes": [list(n) for n in c.nodes]}
            for w, c in eta.items
        ],
    }


def polycurves_from_json(doc, c=None) -> RigidityInput:
    """Read a rigidity input; ``c`` overrides the file's cone constant."""
    _schema(doc, "polycurves/1")
    if c is None:
        c = _number(_get(doc, "c"), "c", scalar.RATIONAL)
    items = []
    for k, cv in enumerate(_curve_list(doc)):
        where = f"curves[{k}]"
        w = _number(_get(cv, "weight", where), f"{where}.weight", scalar.RATIONAL)
        closed = _bool(_get(cv, "closed", where), f"{where}.closed")
        pts = _get(cv, "points", where)
        try:
            pts = [(_number(x, f"{where}.points", scalar.RATIONAL), _number(y, f"{where}.points", scalar.RATIONAL))
                   for x, y in pts]
            items.append((w, PolyCurve(tuple(pts), closed)))
        except (TypeError, ValueError) as exc:
            raise ParseError(str(exc), f"{where}.points") from None
    try:
        return RigidityInput(tuple(items), c)
    except ValueError as exc:
        raise ParseError(str(exc), "curves") from None


def dumps(doc) -> str:
    return json.dumps(doc, indent=None, separators=(",", ":")) + "\n"
