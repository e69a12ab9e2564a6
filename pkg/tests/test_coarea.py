from fractions import Fraction

import pytest

from conftest import noise_field, random_field
from loopflow.coarea import (VerificationReport, decompose_divfree, loops_of_monotone, normalized_atoms,
                             verify_decomposition)
from loopflow.errors import GridMismatch, NotDivergenceFree, NotMonotone
from loopflow.grid import (CellField, CurveSuperposition, EdgeFlux, GridSpec, LatticeCurve, curve_length,
                           curve_measure, perp_gradient, superpose, total_variation)
from loopflow.monotone import MonotoneComponent
from test_monotone import field
from test_pixel_sets import PINCHED, RING, pset

SQUARE = LatticeCurve(((0, 0), (0, 1), (1, 1), (1, 0), (0, 0)), closed=True)


def test_loops_of_monotone_pixel():
    (item,) = loops_of_monotone(MonotoneComponent(pset(["#"]).indicator(), 1)).items
    assert item == (1, SQUARE)


def test_loops_of_monotone_two_levels():
    eta = loops_of_monotone(MonotoneComponent(field([[1, 1, 1], [1, 2, 1], [1, 1, 1]]), 1))
    assert [w for w in eta.weights] == [1, 1]
    assert [curve_length(c) for c in eta.curves] == [12, 4]


def test_loops_of_monotone_negative_reverses():
    (item,) = loops_of_monotone(MonotoneComponent(-pset(["#"]).indicator(), -1)).items
    assert item == (1, SQUARE.reversed())


def test_loops_of_monotone_rejects():
    with pytest.raises(NotMonotone):
        loops_of_monotone(MonotoneComponent(RING.indicator(), 1))
    with pytest.raises(NotMonotone):
        loops_of_monotone(MonotoneComponent(pset(["#"]).indicator(), -1))


def test_loops_of_monotone_splits_pinch():
    eta = loops_of_monotone(MonotoneComponent(PINCHED.indicator(), 1))
    assert len(eta) == 2 and all(c.is_simple for c in eta.curves)
    assert superpose(eta) == perp_gradient(PINCHED.indicator())


def test_decompose_divfree_examples():
    g = GridSpec(3, 3)
    assert len(decompose_divfree(EdgeFlux.zeros(g))) == 0
    eta = decompose_divfree(perp_gradient(pset(["#"]).indicator()))
    assert eta.items == ((1, SQUARE),)


def test_decompose_divfree_rejects_sources():
    mu = curve_measure(LatticeCurve(((0, 0), (1, 0))), GridSpec(1, 1))
    with pytest.raises(NotDivergenceFree):
        decompose_divfree(mu)


def test_decompose_divfree_random_16(rng):
    for _ in range(10):
        mu = perp_gradient(CellField.from_values(noise_field(rng, 16, 16).tolist()))
        eta = decompose_divfree(mu)
        report = verify_decomposition(mu, eta)
        assert report.clean, report.summary()
        assert all(c.closed and c.is_simple for c in eta.curves)
        assert superpose(eta) == mu


def test_decompose_divfree_float(rng):
    for _ in range(10):
        mu = perp_gradient(random_field(rng, 12, mode="float"))
        assert verify_decomposition(mu, decompose_divfree(mu)).clean


def test_verify_detects_doubled_weight():
    mu = perp_gradient(field([[1, 1, 1], [1, 2, 1], [1, 1, 1]]))
    eta = decompose_divfree(mu)
    (w, c), rest = eta.items[0], eta.items[1:]
    bad = verify_decomposition(mu, CurveSuperposition(mu.grid, ((2 * w, c),) + rest))
    assert bad.reconstruction_residual == 1
    assert not bad.clean and not bad
    assert "DEFECT" in bad.summary()


def test_verify_non_unique_decomposition():
    mu = curve_measure(SQUARE, GridSpec(1, 1))
    eta = CurveSuperposition(mu.grid, ((Fraction(1, 2), SQUARE), (Fraction(1, 2), SQUARE)))
    report = verify_decomposition(mu, eta)
    assert report.clean and all(v == 0 for v in report.defects().values())


def test_verify_detects_cancellation():
    mu = curve_measure(SQUARE, GridSpec(1, 1))
    eta = CurveSuperposition(mu.grid, ((2, SQUARE), (1, SQUARE.reversed())))
    report = verify_decomposition(mu, eta)
    assert report.reconstruction_residual == 0
    assert report.tv_defect == 8 and not report.clean


def test_verify_grid_mismatch():
    with pytest.raises(GridMismatch):
        verify_decomposition(EdgeFlux.zeros(GridSpec(2, 2)), CurveSuperposition(GridSpec(1, 1)))


def test_verify_flags_non_simple_curves():
    mu = curve_measure(SQUARE, GridSpec(2, 1)) * 0
    back = LatticeCurve(((0, 0), (1, 0), (0, 0)))
    report = verify_decomposition(mu, CurveSuperposition(mu.grid, ((1, back),)))
    assert report.simple == (False,) and not report.clean


def test_normalized_atoms():
    mu = perp_gradient(field([[1, 1, 1], [1, 2, 1], [1, 1, 1]]))
    atoms = normalized_atoms(decompose_divfree(mu))
    assert [m for m, _ in atoms] == [12, 4]
    assert sum(m for m, _ in atoms) == total_variation(mu)


def test_report_summary_lists_every_defect():
    report = VerificationReport(0, 0, 0, 0, (True,), (True,))
    text = report.summary()
    for key in ("reconstruction_residual", "tv_defect", "edge_defect", "node_defect", "verdict: clean"):
        assert key in text
