"""Spectrahedra, shadows, membership, strict feasibility, and dual cones."""

import numpy as np
import pytest

from shadowlab.sdp import SymMatrix
from shadowlab.spectra import (NotStrictlyFeasible, Pencil, Shadow,
                               cone_witness_direction, convex_hull_union,
                               dual_cone_member, dual_cone_point,
                               homogenize_shadow, intersect, linear_image,
                               membership_margin, shadow_contains,
                               strict_point)


def psd2_point(rng):
    g = rng.standard_normal((2, 2))
    w = g.T @ g
    return (w[0, 0], w[0, 1], w[1, 1])


def test_pencil_eval_constant():
    p = Pencil(SymMatrix.identity(2), [SymMatrix.zeros(2)])
    assert np.allclose(p.eval([3.7]).mat, np.eye(2))


def test_pencil_eval_psd2(psd2_pencil):
    assert np.allclose(psd2_pencil.eval([1, 0, 1]).mat, np.eye(2))


def test_pencil_eval_linearity():
    rng = np.random.default_rng(0)
    mats = []
    for _ in range(3):
        g = rng.standard_normal((3, 3))
        mats.append(SymMatrix(g + g.T))
    p = Pencil(mats[0], mats[1:])
    xi = rng.standard_normal(2)
    xi2 = rng.standard_normal(2)
    lhs = p.eval(xi + xi2).mat
    rhs = p.eval(xi).mat + p.eval(xi2).mat - p.a.mat
    assert np.allclose(lhs, rhs)


def test_pencil_eval_dimension_mismatch(psd2_pencil):
    with pytest.raises(ValueError):
        psd2_pencil.eval([1, 0])


def test_disk_membership(disk_pencil):
    s = Shadow(disk_pencil)
    assert shadow_contains(s, [0.0, 0.0]) == "In"
    assert shadow_contains(s, [2.0, 0.0]) == "Out"
    assert shadow_contains(s, [0.6, 0.6]) == "In"
    assert shadow_contains(s, [0.8, 0.8]) == "Out"


def test_projection_membership(disk_pencil):
    # project the disk onto xi1: xi2 becomes a lifted variable
    proj = Pencil(disk_pencil.a, disk_pencil.b_list[:1],
                  disk_pencil.b_list[1:])
    s = Shadow(proj)
    assert shadow_contains(s, [0.9]) == "In"
    assert shadow_contains(s, [-0.99]) == "In"
    assert shadow_contains(s, [1.01]) == "Out"


def test_strict_point_examples(psd2_pencil):
    s = Shadow(Pencil(SymMatrix.zeros(1), [SymMatrix([[1.0]])]), is_cone=True)
    xi, eta, margin = strict_point(s)
    assert margin > 1e-6 and xi[0] > 0
    xi, eta, margin = strict_point(Shadow(psd2_pencil, is_cone=True))
    assert margin > 1e-6
    assert np.linalg.eigvalsh(psd2_pencil.eval(xi).mat)[0] > 1e-6


def test_strict_point_failure():
    p = Pencil(SymMatrix.zeros(2), [SymMatrix.diag([1, -1])])
    with pytest.raises(NotStrictlyFeasible):
        strict_point(Shadow(p, is_cone=True))


def test_dual_cone_point_examples(rplus_pencil, psd2_pencil):
    assert dual_cone_point(rplus_pencil, SymMatrix([[2.0]])) == pytest.approx([2.0])
    a = dual_cone_point(psd2_pencil, SymMatrix.identity(2))
    assert a == pytest.approx([1.0, 0.0, 1.0])


def test_dual_cone_point_rejects_non_psd(rplus_pencil):
    with pytest.raises(ValueError):
        dual_cone_point(rplus_pencil, SymMatrix([[-1.0]]))


def test_dual_pairing_sampled(psd2_pencil):
    rng = np.random.default_rng(3)
    for _ in range(200):
        g = rng.standard_normal((2, 2))
        a = dual_cone_point(psd2_pencil, SymMatrix(g.T @ g))
        xi = psd2_point(rng)
        assert float(np.dot(a, xi)) >= -1e-8


def test_dual_cone_member_examples(rplus_pencil, psd2_pencil):
    b = dual_cone_member(rplus_pencil, [3.0])
    assert b is not None and b.mat[0, 0] == pytest.approx(3.0, abs=1e-6)
    b = dual_cone_member(psd2_pencil, [1.0, 0.0, 1.0])
    assert b is not None
    assert b.min_eig() >= -1e-8
    assert b.mat[0, 0] == pytest.approx(1.0, abs=1e-6)
    # (1,2,1) pairs with [[1,1],[1,1]] which is PSD, so it IS in the dual
    assert dual_cone_member(psd2_pencil, [1.0, 2.0, 1.0]) is not None
    # (1,3,1) would need b12 = 3/2 against b11 = b22 = 1: not PSD
    assert dual_cone_member(psd2_pencil, [1.0, 3.0, 1.0]) is None


def test_cone_witness_direction(psd2_pencil):
    a = [1.0, 3.0, 1.0]
    xi = cone_witness_direction(psd2_pencil, a)
    assert xi is not None
    # the witness is a cone member pairing negatively with a
    assert np.linalg.eigvalsh(psd2_pencil.eval(xi).mat)[0] >= -1e-7
    assert float(np.dot(a, xi)) < -1e-7


def test_dual_round_trip(psd2_pencil):
    rng = np.random.default_rng(5)
    for _ in range(25):
        g = rng.standard_normal((2, 2))
        a = dual_cone_point(psd2_pencil, SymMatrix(g.T @ g))
        assert dual_cone_member(psd2_pencil, a) is not None


def test_homogenize_shadow(disk_pencil):
    s = Shadow(disk_pencil)
    cone = homogenize_shadow(s)
    assert cone.is_cone
    assert shadow_contains(cone, [1.0, 0.5, 0.0]) == "In"
    assert shadow_contains(cone, [2.0, 1.0, 0.0]) == "In"
    assert shadow_contains(cone, [1.0, 1.5, 0.0]) == "Out"


def test_homogenize_agrees_with_membership(disk_pencil):
    s = Shadow(disk_pencil)
    cone = homogenize_shadow(s)
    rng = np.random.default_rng(9)
    for _ in range(50):
        xi = rng.uniform(-1.4, 1.4, size=2)
        got = shadow_contains(cone, [1.0, *xi])
        want = shadow_contains(s, list(xi))
        if "Borderline" in (got, want):
            continue
        assert got == want


def test_linear_image_interval(disk_pencil):
    s = Shadow(disk_pencil)
    interval = linear_image(s, [[1.0, 0.0]])
    assert shadow_contains(interval, [0.99]) == "In"
    assert shadow_contains(interval, [-0.99]) == "In"
    assert shadow_contains(interval, [1.01]) == "Out"
    assert shadow_contains(interval, [-1.01]) == "Out"


def test_intersect(disk_pencil):
    half = Pencil(SymMatrix.zeros(1), [SymMatrix([[1.0]]), SymMatrix([[0.0]])])
    # xi1 >= 0 as a 1x1 LMI in (xi1, xi2)
    both = intersect(Shadow(disk_pencil), Shadow(half))
    assert shadow_contains(both, [0.5, 0.5]) == "In"
    assert shadow_contains(both, [-0.5, 0.0]) == "Out"
    rng = np.random.default_rng(13)
    for _ in range(30):
        xi = rng.uniform(-1.2, 1.2, size=2)
        got = shadow_contains(both, list(xi))
        a = shadow_contains(Shadow(disk_pencil), list(xi))
        b = shadow_contains(Shadow(half), list(xi))
        want = "In" if (a == "In" and b == "In") else \
            ("Out" if "Out" in (a, b) else "Borderline")
        if "Borderline" in (got, want):
            continue
        assert got == want


def test_convex_hull_union(disk_pencil):
    # hull of the disk and a far translate contains midpoints of both
    shifted = Pencil(SymMatrix(disk_pencil.a.mat + 3.0 * disk_pencil.b_list[0].mat),
                     disk_pencil.b_list)
    # shifted: [[1 + (xi1+3), xi2], ...] wait: membership at xi1 = -3 center
    hull = convex_hull_union(Shadow(disk_pencil), Shadow(shifted))
    assert shadow_contains(hull, [0.0, 0.0]) == "In"
    assert shadow_contains(hull, [-3.0, 0.0]) == "In"
    assert shadow_contains(hull, [-1.5, 0.0]) == "In"
    assert shadow_contains(hull, [0.0, 1.5]) == "Out"


def test_membership_margin_sign(disk_pencil):
    assert membership_margin(disk_pencil, [0.0, 0.0]).value > 0
    assert membership_margin(disk_pencil, [2.0, 0.0]).value < 0


def test_pencil_json_round_trip(psd2_pencil):
    back = Pencil.from_json(psd2_pencil.to_json())
    assert np.array_equal(back.a.mat, psd2_pencil.a.mat)
    assert len(back.b_list) == 3
    s = Shadow(psd2_pencil, is_cone=True)
    s2 = Shadow.from_json(s.to_json())
    assert s2.is_cone
