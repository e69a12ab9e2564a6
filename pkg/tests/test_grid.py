from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_field, random_walk
from loopflow import scalar
from loopflow.errors import GridMismatch, InconsistentCirculation, NotDivergenceFree
from loopflow.grid import (CellField, CurveSuperposition, EdgeFlux, GridSpec, LatticeCurve, curve_length,
                           curve_measure, divergence, integrate_potential, perp_gradient, step_edge,
                           superpose, total_variation)

SQUARE = LatticeCurve(((0, 0), (0, 1), (1, 1), (1, 0), (0, 0)), closed=True)


def pixel(mode="rational"):
    return CellField.from_values([[1]], mode)


def test_grid_spec_shapes():
    g = GridSpec(3, 2)
    assert g.cell_shape == (3, 2)
    assert g.h_shape == (3, 3)
    assert g.v_shape == (4, 2)
    assert g.node_shape == (4, 3)
    assert len(list(g.edges())) == 9 + 8
    assert len(list(g.nodes())) == 12
    assert g.has_node((3, 2)) and not g.has_node((4, 0))


@pytest.mark.parametrize("w,h", [(0, 1), (1, 0), (-2, 3)])
def test_grid_spec_rejects_empty(w, h):
    with pytest.raises(ValueError):
        GridSpec(w, h)


def test_divergence_zero_flux():
    assert divergence(EdgeFlux.zeros(GridSpec(3, 3))).is_zero()


def test_divergence_single_edge():
    g = GridSpec(2, 2)
    h = np.zeros(g.h_shape, dtype=np.int64)
    h[0, 0] = 1
    d = divergence(EdgeFlux(g, h, np.zeros(g.v_shape, dtype=np.int64)))
    assert d[(0, 0)] == 1 and d[(1, 0)] == -1
    assert int(np.abs(d.d).sum()) == 2


def test_divergence_of_perp_gradient_vanishes(rng):
    for _ in range(50):
        f = CellField.from_values(rng.integers(-5, 6, size=(8, 8)).tolist())
        assert divergence(perp_gradient(f)).is_zero()


def test_divergence_sums_to_zero(rng):
    g = GridSpec(5, 4)
    mu = EdgeFlux.from_values(g, rng.integers(-3, 4, size=g.h_shape).tolist(),
                              rng.integers(-3, 4, size=g.v_shape).tolist())
    assert int(divergence(mu).d.sum()) == 0


def test_total_variation_examples():
    assert total_variation(EdgeFlux.zeros(GridSpec(2, 2))) == 0
    assert total_variation(curve_measure(SQUARE, GridSpec(1, 1))) == 4


def test_perp_gradient_pixel_is_clockwise_loop():
    mu = perp_gradient(pixel())
    assert mu[("V", 0, 0)] == 1   # left edge up
    assert mu[("H", 0, 1)] == 1   # top edge right
    assert mu[("V", 1, 0)] == -1  # right edge down
    assert mu[("H", 0, 0)] == -1  # bottom edge left
    assert total_variation(mu) == 4
    assert mu == curve_measure(SQUARE, GridSpec(1, 1))


def test_perp_gradient_block():
    mu = perp_gradient(CellField.from_values([[1], [1]]))
    assert total_variation(mu) == 6
    assert mu[("V", 1, 0)] == 0


def test_perp_gradient_zero():
    assert perp_gradient(CellField.zeros(GridSpec(3, 2))).is_zero()


def test_integrate_potential_examples():
    assert integrate_potential(EdgeFlux.zeros(GridSpec(2, 3))).is_zero()
    assert integrate_potential(curve_measure(SQUARE, GridSpec(1, 1))) == pixel()


def test_integrate_round_trip_16(rng):
    f = CellField.from_values(rng.integers(-9, 10, size=(16, 16)).tolist())
    assert integrate_potential(perp_gradient(f)) == f


def test_integrate_rejects_divergence():
    g = GridSpec(2, 2)
    mu = curve_measure(LatticeCurve(((0, 0), (1, 0))), g)
    with pytest.raises(NotDivergenceFree) as err:
        integrate_potential(mu)
    assert err.value.node == (0, 0) and err.value.residual == 1


def test_integrate_detects_float_drift():
    # every node is within tolerance but the drift accumulates along the row
    s = 0.5e-9
    g = GridSpec(7, 1)
    h = np.zeros(g.h_shape)
    h[:, 0] = s * np.array([1, 2, 3, 4, 3, 2, 1])
    mu = EdgeFlux(g, h, np.zeros(g.v_shape))
    with pytest.raises(InconsistentCirculation):
        integrate_potential(mu)


def test_curve_measure_examples():
    g = GridSpec(2, 2)
    step = curve_measure(LatticeCurve(((0, 0), (1, 0))), g)
    assert step[("H", 0, 0)] == 1 and total_variation(step) == 1
    d = divergence(step)
    assert d[(0, 0)] == 1 and d[(1, 0)] == -1
    assert curve_measure(LatticeCurve(((0, 0), (1, 0), (0, 0))), g).is_zero()


def test_curve_length_examples():
    assert curve_length(LatticeCurve(((0, 0), (0, 1)))) == 1
    assert curve_length(SQUARE) == 4


def test_lattice_curve_validation():
    with pytest.raises(ValueError):
        LatticeCurve(((0, 0),))
    with pytest.raises(ValueError):
        LatticeCurve(((0, 0), (1, 1)))
    with pytest.raises(ValueError):
        LatticeCurve(((0, 0), (0, 1)), closed=True)
    assert SQUARE.is_simple
    assert not LatticeCurve(((0, 0), (1, 0), (0, 0))).is_simple
    assert SQUARE.reversed().nodes == SQUARE.nodes[::-1]


def test_step_edge():
    assert step_edge((2, 3), (1, 3)) == (("H", 1, 3), -1)
    assert step_edge((2, 3), (2, 4)) == (("V", 2, 3), 1)


def test_superposition_validation():
    g = GridSpec(1, 1)
    with pytest.raises(ValueError):
        CurveSuperposition(g, ((0, SQUARE),))
    with pytest.raises(ValueError):
        CurveSuperposition(g, ((1, LatticeCurve(((1, 1), (2, 1)))),))
    with pytest.raises(GridMismatch):
        CurveSuperposition(g) + CurveSuperposition(GridSpec(2, 1))


def test_superpose_examples():
    g = GridSpec(1, 1)
    assert superpose(CurveSuperposition(g)).is_zero()
    assert superpose(CurveSuperposition(g, ((2, SQUARE),))) == curve_measure(SQUARE, g) * 2
    half = superpose(CurveSuperposition(g, ((Fraction(1, 2), SQUARE), (Fraction(1, 2), SQUARE))))
    assert half == curve_measure(SQUARE, g)


def test_tv_of_curve_measure_bounded_by_length(rng):
    g = GridSpec(5, 5)
    for _ in range(100):
        walk = random_walk(rng, g)
        if walk is None:
            continue
        back = LatticeCurve(walk.nodes + walk.nodes[-2::-1])
        assert total_variation(curve_measure(walk, g)) == curve_length(walk)
        assert total_variation(curve_measure(back, g)) < curve_length(back)


def test_edge_flux_arithmetic_and_grid_checks():
    a = curve_measure(SQUARE, GridSpec(1, 1))
    assert (a + a) == a * 2
    assert (a - a).is_zero()
    assert -a == a * -1
    assert (a * Fraction(1, 3)).h.dtype == object
    with pytest.raises(GridMismatch):
        a + EdgeFlux.zeros(GridSpec(2, 1))


def test_cell_field_parts():
    f = CellField.from_values([[2, -1], [0, 3]])
    assert f.positive_part() - f.negative_part() == f
    assert f.values() == [-1, 0, 2, 3]


def test_from_values_accepts_fraction_strings():
    f = CellField.from_values([["1/3", 2]])
    assert f.f[0, 0] == Fraction(1, 3)


def test_scalar_mode_env(monkeypatch):
    monkeypatch.setenv(scalar.ENV_VAR, "float")
    assert pixel(None).mode == scalar.FLOAT
    monkeypatch.setenv(scalar.ENV_VAR, "bogus")
    with pytest.raises(ValueError):
        scalar.default_mode()


def test_float_mode_identities(rng):
    for _ in range(20):
        f = random_field(rng, 12, mode="float")
        mu = perp_gradient(f)
        g = integrate_potential(mu)
        assert np.allclose(g.f, f.f, rtol=0, atol=1e-9 * max(1, np.abs(f.f).max()))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 6), st.integers(1, 6), st.data())
def test_round_trip_property(w, h, data):
    vals = data.draw(st.lists(st.lists(st.fractions(-5, 5, max_denominator=7), min_size=h, max_size=h),
                              min_size=w, max_size=w))
    f = CellField.from_values(vals)
    mu = perp_gradient(f)
    assert divergence(mu).is_zero()
    assert integrate_potential(mu) == f
