"""Moment relaxations, pullback-kernel shadows, probes, and hull checks."""

import numpy as np
import pytest

from shadowlab.polys import Polynomial, Subspace, monomial_subspace
from shadowlab.relax import (BasicClosedSet, RelaxationSpec, build_K_prime,
                             evaluation_functional, exactness_probe,
                             grid_points, hull_certificate_check,
                             k_prime_member, umker_shadow)

X = ("x",)
XY = ("x1", "x2")


def mono(variables, exp, coeff=1):
    return Polynomial.monomial(variables, exp, coeff)


@pytest.fixture(scope="module")
def interval_set():
    # S = [-1, 1] as {1 - x^2 >= 0}
    return BasicClosedSet(X, [mono(X, (0,)) - mono(X, (2,))])


@pytest.fixture(scope="module")
def interval_spec():
    L = monomial_subspace(1, 1, variables=X)
    W0 = monomial_subspace(1, 1, include_constant=True, variables=X)
    W1 = Subspace([mono(X, (0,))])
    return RelaxationSpec(L, [W0, W1])


@pytest.fixture(scope="module")
def interval_shadow(interval_set, interval_spec):
    return build_K_prime(interval_set, interval_spec)


@pytest.fixture(scope="module")
def disk_set():
    # S = unit disk as {1 - x1^2 - x2^2 >= 0}
    g = mono(XY, (0, 0)) - mono(XY, (2, 0)) - mono(XY, (0, 2))
    return BasicClosedSet(XY, [g])


@pytest.fixture(scope="module")
def disk_spec():
    L = monomial_subspace(2, 1, variables=XY)
    W0 = monomial_subspace(2, 1, include_constant=True, variables=XY)
    W1 = Subspace([mono(XY, (0, 0))])
    return RelaxationSpec(L, [W0, W1])


def test_basic_set_contains(interval_set, disk_set):
    assert interval_set.contains([0.5])
    assert not interval_set.contains([1.5])
    assert disk_set.contains([0.8, 0.8]) is False
    assert disk_set.contains([0.5, 0.5])


def test_basic_set_sampling(interval_set):
    pts = interval_set.sample(100, seed=3)
    assert len(pts) == 100
    assert all(interval_set.contains(p) for p in pts)


def test_spec_rejects_constants_in_l(interval_set):
    with pytest.raises(ValueError):
        RelaxationSpec(
            monomial_subspace(1, 1, include_constant=True, variables=X),
            [monomial_subspace(1, 1, include_constant=True, variables=X)])


def test_build_requires_matching_weights(interval_set, interval_spec):
    with pytest.raises(ValueError):
        build_K_prime(BasicClosedSet(X, []), interval_spec)


def test_interval_membership(interval_shadow):
    assert interval_shadow.member([0.5]) == "In"
    assert interval_shadow.member([-1.0]) == "In"
    assert interval_shadow.member([1.3]) == "Out"
    assert interval_shadow.member([-1.3]) == "Out"


def test_interval_support(interval_shadow):
    res = interval_shadow.support([1.0])
    assert res is not None
    val, lam = res
    assert val == pytest.approx(1.0, abs=1e-6)
    res = interval_shadow.support([-1.0])
    assert res[0] == pytest.approx(1.0, abs=1e-6)


def test_k_prime_member_helper(interval_shadow):
    assert k_prime_member(interval_shadow, [0.0]) == "In"


def test_evaluation_functional(interval_spec):
    lam = evaluation_functional(interval_spec.L, [0.25])
    assert lam == [pytest.approx(0.25)]


def test_relaxation_soundness(interval_set, interval_spec, interval_shadow):
    for p in interval_set.sample(50, seed=5):
        lam = evaluation_functional(interval_spec.L, p)
        assert interval_shadow.member([float(v) for v in lam]) != "Out"


def test_disk_membership(disk_set, disk_spec):
    shadow = build_K_prime(disk_set, disk_spec)
    assert shadow.member([0.0, 0.0]) == "In"
    assert shadow.member([0.7, 0.0]) == "In"
    assert shadow.member([0.9, 0.9]) == "Out"
    # boundary support values match the disk support function
    for theta in (0.0, 1.0, 2.5):
        c = [float(np.cos(theta)), float(np.sin(theta))]
        val, _ = shadow.support(c)
        assert val == pytest.approx(1.0, abs=1e-6)


def test_monomial_coverage_checked(interval_set):
    L = monomial_subspace(1, 4, variables=X)
    W0 = monomial_subspace(1, 1, include_constant=True, variables=X)
    W1 = Subspace([mono(X, (0,))])
    with pytest.raises(ValueError):
        build_K_prime(interval_set, RelaxationSpec(L, [W0, W1]))


def test_exactness_probe_interval(interval_set, interval_spec):
    rep = exactness_probe(interval_set, interval_spec, budget=8, seed=0,
                          sample_count=128, box=1.0, grid_per_dim=501)
    assert rep.directions_tried == 8
    assert rep.solver_failures == 0
    assert rep.max_gap <= 1e-6


def test_grid_points(interval_set):
    pts = grid_points(interval_set, 11, box=2.0)
    assert all(interval_set.contains(p) for p in pts)
    assert min(pts)[0] == pytest.approx(-0.8)
    assert max(pts)[0] == pytest.approx(0.8)


def test_umker_matches_moment_relaxation(interval_set, interval_shadow):
    # pullback through the identity map with squares up to degree 1:
    # functionals dual to { f : f = sigma0 + sigma1 (1 - x^2) } style cones
    one = mono(X, (0,))
    x = mono(X, (1,))
    l1 = Subspace([one, x])
    u = Subspace([one, x])
    shadow = umker_shadow(l1, [([x], u)])
    # lam ranges over L = span{x} with lam(1) = 1 sliced implicitly
    for t in (-0.5, 0.0, 0.9):
        assert shadow.member([t]) == "In"


def test_umker_duplicate_map_idempotent():
    one = mono(X, (0,))
    x = mono(X, (1,))
    l1 = Subspace([one, x])
    u = Subspace([one, x])
    single = umker_shadow(l1, [([x], u)])
    double = umker_shadow(l1, [([x], u), ([x], u)])
    for t in (-0.7, 0.0, 0.4, 2.0, -3.0):
        assert single.member([t]) == double.member([t])


def test_umker_requires_leading_one():
    x = mono(X, (1,))
    with pytest.raises(ValueError):
        umker_shadow(Subspace([x]), [([x], Subspace([x]))])


def test_hull_certificate_interval(interval_set):
    L = monomial_subspace(1, 1, variables=X)
    # lam = evaluation at 2, outside conv(S) = [-1, 1]
    rep = hull_certificate_check([2.0], interval_set, L, seed=0, box=1.0)
    assert rep.found
    assert rep.lam_value < -1e-6
    assert rep.min_on_samples >= -1e-9
    assert rep.confidence in ("certified", "sampled-only")


def test_hull_certificate_inside_point(interval_set):
    L = monomial_subspace(1, 1, variables=X)
    rep = hull_certificate_check([0.3], interval_set, L, seed=0, box=1.0)
    assert not rep.found


def test_hull_certificate_certified_confidence(interval_set):
    L = monomial_subspace(1, 2, variables=X)
    rep = hull_certificate_check([2.0, 4.0], interval_set, L, seed=0, box=1.0)
    assert rep.found
    assert rep.confidence == "certified"
