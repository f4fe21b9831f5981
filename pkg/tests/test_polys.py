"""Sparse polynomial arithmetic and structural operations."""

import math
import random
from fractions import Fraction

import pytest

from shadowlab.polys import (Polynomial, Subspace, divide_eps_power,
                             homogeneous_monomial_subspace, monomial_exponents,
                             monomial_subspace, residue_poly, shift_support)
from shadowlab.puiseux import PuiseuxScalar

X = ("x",)
XY = ("x", "y")


def mono(variables, exp, coeff=1):
    return Polynomial.monomial(variables, exp, coeff)


def rand_poly(rng, variables, d_max=3, n_terms=4):
    p = Polynomial.zero(variables)
    for _ in range(n_terms):
        exp = tuple(rng.randint(0, d_max) for _ in variables)
        p = p + mono(variables, exp, Fraction(rng.randint(-5, 5), rng.randint(1, 3)))
    return p


def test_difference_of_squares():
    x = Polynomial.variable(X, "x")
    one = Polynomial.constant(X, 1)
    assert (x + one) * (x - one) == x * x - one


def test_add_zero_identity():
    rng = random.Random(0)
    f = rand_poly(rng, XY)
    assert f + Polynomial.zero(XY) == f


def test_motzkin_dehomogenized(motzkin):
    # x0 := 1 gives x1^6 + x2^2 + x2^4 - 3 x1^2 x2^2
    f = motzkin.dehomogenize("x0")
    g = (mono(("x1", "x2"), (6, 0)) + mono(("x1", "x2"), (0, 2))
         + mono(("x1", "x2"), (0, 4)) + mono(("x1", "x2"), (2, 2), -3))
    assert f == g
    # x1 := 1 gives the constant-term variant 1 + x0^4 x2^2 + x0^2 x2^4 - 3 x0^2 x2^2
    h = motzkin.dehomogenize("x1")
    k = (mono(("x0", "x2"), (0, 0)) + mono(("x0", "x2"), (4, 2))
         + mono(("x0", "x2"), (2, 4)) + mono(("x0", "x2"), (2, 2), -3))
    assert h == k


def test_substitute_monomial():
    x = Polynomial.variable(X, "x", domain="puiseux")
    eps = PuiseuxScalar.eps()
    f = x * x
    g = f.substitute({"x": x * eps})
    c = g.coefficient((2,))
    assert c.valuation() == 2 and c.coefficient(2) == 1


def test_substitute_cancellation():
    x = Polynomial.variable(XY, "x")
    y = Polynomial.variable(XY, "y")
    f = x + y
    g = f.substitute({"x": x + 1, "y": y - 1})
    assert g == f


def test_substitute_ring_homomorphism_random():
    rng = random.Random(3)
    for _ in range(30):
        f = rand_poly(rng, XY, 2, 3)
        g = rand_poly(rng, XY, 2, 3)
        imgs = {"x": rand_poly(rng, XY, 1, 2), "y": rand_poly(rng, XY, 1, 2)}
        assert (f * g).substitute(imgs) == f.substitute(imgs) * g.substitute(imgs)
        assert (f + g).substitute(imgs) == f.substitute(imgs) + g.substitute(imgs)


def test_shift_examples():
    x = Polynomial.variable(X, "x")
    assert (x * x).shift([1]) == x * x + 2 * x + 1
    rng = random.Random(5)
    f = rand_poly(rng, XY)
    assert f.shift([0, 0]) == f
    xi = [Fraction(1, 2), Fraction(-2, 3)]
    assert f.shift(xi).shift([-v for v in xi]) == f


def test_homogenize_dehomogenize():
    x = Polynomial.variable(X, "x")
    f = 1 + x * x
    F = f.homogenize("x0")
    assert F.is_homogeneous() and F.degree() == 2
    assert F.dehomogenize("x0") == f
    rng = random.Random(9)
    for _ in range(20):
        g = rand_poly(rng, XY)
        if g.is_zero():
            continue
        assert g.homogenize("t").dehomogenize("t") == g


def test_lowest_form():
    x = Polynomial.variable(X, "x")
    assert (1 + x * x).lowest_form() == Polynomial.constant(X, 1)
    assert (x ** 2 + x ** 3).lowest_form() == x ** 2
    with pytest.raises(ValueError):
        Polynomial.zero(X).lowest_form()


def test_lowest_form_of_shifted_form_is_the_form(motzkin):
    # expanding a form p about a point and re-centering recovers p as the
    # top component; equivalently p(y) is its own lowest form in y
    p = motzkin
    assert p.lowest_form() == p


def test_lowest_form_multiplicative():
    rng = random.Random(21)
    for _ in range(30):
        f = rand_poly(rng, XY, 2, 3)
        g = rand_poly(rng, XY, 2, 3)
        if f.is_zero() or g.is_zero():
            continue
        assert (f * g).lowest_form() == f.lowest_form() * g.lowest_form()


def test_shift_support_simple():
    # (t+a0)^2 + (x+a1)^2 - const = 2 a0 t + 2 a1 x + (t^2 + x^2)
    tx = ("t", "x")
    p = mono(tx, (2, 0)) + mono(tx, (0, 2))
    sub = shift_support(p)
    assert sub.dim == 3
    assert sub.contains(mono(tx, (1, 0)))
    assert sub.contains(mono(tx, (0, 1)))
    assert sub.contains(p)


def test_shift_support_counts(motzkin, choi_lam):
    assert shift_support(motzkin).dim == 27
    assert shift_support(choi_lam.homogenize("t")).dim == 19


def test_shift_support_soundness(motzkin):
    sub = shift_support(motzkin)
    rng = random.Random(33)
    for _ in range(100):
        a = [Fraction(rng.randint(-3, 3), rng.randint(1, 3)) for _ in range(3)]
        shifted = motzkin.shift(a)
        centered = shifted - shifted.constant_term()
        assert sub.contains(centered)


def test_monomial_subspace_dims():
    assert monomial_subspace(3, 6).dim == 83
    assert monomial_subspace(4, 4).dim == 69
    assert monomial_subspace(2, 6).dim == 27


def test_monomial_subspace_dimension_formula():
    for n in range(1, 7):
        for d in range(1, 7):
            assert monomial_subspace(n, d).dim == math.comb(n + d, n) - 1


def test_homogeneous_monomial_subspace():
    assert homogeneous_monomial_subspace(2, 3).dim == 4
    for b in homogeneous_monomial_subspace(3, 4).basis:
        assert b.is_homogeneous() and b.degree() == 4


def test_monomial_exponents_ordering_deterministic():
    exps = monomial_exponents(2, 0, 2)
    assert exps == sorted(exps, key=lambda e: (sum(e), tuple(-v for v in e)))


def test_divide_eps_power_and_residue():
    eps = PuiseuxScalar.eps()
    x = Polynomial.variable(X, "x", domain="puiseux")
    f = (x * x) * (eps * eps)
    g = divide_eps_power(f, 2)
    cg = g.coefficient((2,))
    assert cg.valuation() == 0 and cg.residue() == 1
    h = divide_eps_power(x * (eps ** 3 + eps ** 4), 3)
    ch = h.coefficient((1,))
    assert ch.coefficient(0) == 1 and ch.coefficient(1) == 1
    with pytest.raises(ValueError):
        divide_eps_power(x * eps, 2)
    r = residue_poly(g)
    assert r == Polynomial.monomial(X, (2,))


def test_divide_eps_power_random_forms():
    rng = random.Random(41)
    eps = PuiseuxScalar.eps()
    for _ in range(20):
        d = rng.choice([2, 4])
        terms = {}
        for e in monomial_exponents(2, d, d):
            terms[e] = Fraction(rng.randint(-4, 4))
        F = Polynomial.zero(XY)
        for e, c in terms.items():
            F = F + mono(XY, e, c)
        if F.is_zero():
            continue
        Fp = F.to_puiseux()
        xv = Polynomial.variable(XY, "x", domain="puiseux")
        yv = Polynomial.variable(XY, "y", domain="puiseux")
        sub = Fp.substitute({"x": xv * eps, "y": yv * eps})
        g = divide_eps_power(sub, d)
        assert residue_poly(g) == F


def test_domain_mismatch_rejected():
    x = Polynomial.variable(X, "x")
    xp = Polynomial.variable(X, "x", domain="puiseux")
    with pytest.raises(TypeError):
        x + xp
    with pytest.raises(ValueError):
        x + Polynomial.variable(XY, "x")


def test_subspace_independence_checked():
    x = Polynomial.variable(X, "x")
    with pytest.raises(ValueError):
        Subspace([x, 2 * x])


def test_subspace_coordinates_and_contains():
    x = Polynomial.variable(X, "x")
    sub = Subspace([x, x * x])
    f = 3 * x + 2 * x * x
    assert sub.contains(f)
    coords = sub.coordinates(f)
    assert coords == [Fraction(3), Fraction(2)]
    assert not sub.contains(Polynomial.constant(X, 1))


def test_json_round_trip():
    rng = random.Random(55)
    f = rand_poly(rng, XY)
    assert Polynomial.from_json(f.to_json()) == f
    sub = monomial_subspace(2, 2)
    got = Subspace.from_json(sub.to_json())
    assert got.dim == sub.dim
    assert all(a == b for a, b in zip(got.basis, sub.basis))


def test_degree_of_zero_sentinel():
    z = Polynomial.zero(X)
    assert z.is_zero()
    assert z.degree() < 0
