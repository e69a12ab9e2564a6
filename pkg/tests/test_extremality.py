import itertools
from fractions import Fraction

import numpy as np
import pytest

from loopflow.errors import NotNormalized, NotSimple
from loopflow.extremality import (Verdict, bv_norm, certify_extreme_bv, certify_extreme_fv, extreme_loop,
                                  fv_norm, validate_certificate)
from loopflow.grid import CellField, GridSpec, curve_measure, perp_gradient
from loopflow.pixel_sets import PixelSet, is_indecomposable, is_simple, perimeter, pinch_nodes
from test_pixel_sets import BLOCK, PINCHED, RING, pset


def test_norm_examples():
    px = pset(["#"]).indicator()
    assert fv_norm(px) == 4 and bv_norm(px) == 5
    z = CellField.zeros(GridSpec(2, 2))
    assert fv_norm(z) == 0 and bv_norm(z) == 0
    f = RING.indicator() * 3 - pset(["...", ".#.", "..."]).indicator()
    for c in (2, -3, Fraction(1, 7)):
        assert fv_norm(f * c) == abs(c) * fv_norm(f)
        assert bv_norm(f * c) == abs(c) * bv_norm(f)


def test_fv_pixel_extreme():
    assert certify_extreme_fv(pset(["#"]).indicator() / 4).verdict is Verdict.EXTREME
    assert certify_extreme_fv(-pset(["#"]).indicator() / 4)


def test_fv_two_pixels_component_split():
    f = pset(["#.#"]).indicator() / 8
    cert = certify_extreme_fv(f)
    assert cert.verdict is Verdict.NOT_EXTREME and cert.split == "component"
    assert cert.lam == Fraction(1, 2)
    assert validate_certificate(f, cert, fv_norm)


def test_fv_ring_hole_split():
    f = RING.indicator() / 16
    cert = certify_extreme_fv(f)
    assert cert.split == "hole" and cert.lam == Fraction(3, 4)
    phi, psi = cert.witness
    assert phi == BLOCK.indicator() / 12
    assert psi == -pset(["...", ".#.", "..."]).indicator() / 4
    assert validate_certificate(f, cert, fv_norm)


def test_fv_pinched_set_is_not_extreme():
    # simple under 4/8, but the corner pinch still splits off the cut-off pixel
    assert is_simple(PINCHED) and pinch_nodes(PINCHED)
    f = PINCHED.indicator() / perimeter(PINCHED)
    cert = certify_extreme_fv(f)
    assert cert.split == "hole"
    assert validate_certificate(f, cert, fv_norm)


def test_bv_examples():
    assert certify_extreme_bv(pset(["#"]).indicator() / 5)
    ring = RING.indicator()
    assert certify_extreme_bv(ring / bv_norm(ring))
    assert not certify_extreme_fv(ring / fv_norm(ring))


def test_level_split():
    f = pset(["###"]).indicator() + pset(["#.."]).indicator() * 2
    for norm, certify in ((fv_norm, certify_extreme_fv), (bv_norm, certify_extreme_bv)):
        g = f / norm(f)
        cert = certify(g)
        assert cert.split == "level"
        assert validate_certificate(g, cert, norm)


def test_sign_split():
    f = pset(["#.."]).indicator() - pset(["..#"]).indicator()
    for norm, certify in ((fv_norm, certify_extreme_fv), (bv_norm, certify_extreme_bv)):
        g = f / norm(f)
        cert = certify(g)
        assert cert.split == "sign" and cert.lam == Fraction(1, 2)
        assert validate_certificate(g, cert, norm)


def test_negative_multilevel_split():
    f = -(pset(["##"]).indicator() + pset(["#."]).indicator())
    cert = certify_extreme_fv(f / fv_norm(f))
    assert cert.split == "level"
    assert validate_certificate(f / fv_norm(f), cert, fv_norm)


def test_not_normalized():
    with pytest.raises(NotNormalized):
        certify_extreme_fv(pset(["#"]).indicator())
    with pytest.raises(NotNormalized):
        certify_extreme_bv(CellField.zeros(GridSpec(1, 1)))


def test_extreme_loop_examples():
    curve, w = extreme_loop(pset(["#"]))
    assert len(curve.nodes) == 5 and w == Fraction(1, 4)
    curve, w = extreme_loop(pset(["##", "##"]))
    assert len(curve.nodes) == 9 and w == Fraction(1, 8)
    with pytest.raises(NotSimple):
        extreme_loop(RING)


def test_extreme_loop_exhaustive_4x4():
    g = GridSpec(4, 4)
    count = 0
    for bits in itertools.product((False, True), repeat=16):
        E = PixelSet(g, np.array(bits).reshape(4, 4))
        if not is_simple(E):
            continue
        curve, w = extreme_loop(E)
        assert curve_measure(curve, g) * w == perp_gradient(E.indicator()) * Fraction(1, perimeter(E))
        count += 1
    assert count > 1000


def test_fv_extreme_implies_bv_extreme_on_indicators():
    g = GridSpec(3, 3)
    for bits in itertools.product((0, 1), repeat=9):
        if not any(bits):
            continue
        ind = CellField.from_values(np.array(bits).reshape(3, 3).tolist())
        fv = certify_extreme_fv(ind / fv_norm(ind))
        bv = certify_extreme_bv(ind / bv_norm(ind))
        if fv:
            assert bv
        assert bool(bv) == is_indecomposable(PixelSet(g, ind.f != 0))


def test_certifiers_disagree_on_indecomposable_sets_with_holes():
    g = GridSpec(3, 3)
    disagree = []
    for bits in itertools.product((0, 1), repeat=9):
        if not any(bits):
            continue
        ind = CellField.from_values(np.array(bits).reshape(3, 3).tolist())
        fv = bool(certify_extreme_fv(ind / fv_norm(ind)))
        bv = bool(certify_extreme_bv(ind / bv_norm(ind)))
        if fv != bv:
            disagree.append(PixelSet(g, ind.f != 0))
    assert disagree
    for E in disagree:
        assert is_indecomposable(E) and (not is_simple(E) or pinch_nodes(E))
