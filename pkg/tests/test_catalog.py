"""Named forms, Veronese data, the 14-dimensional subspace, and demos."""

from fractions import Fraction

import pytest

from shadowlab.catalog import (HILBERT_EQUALITY_CASES, L14, catalog,
                               catalog_names, counterexample_pipeline,
                               l14_shift_membership, psd_vs_sos_demo,
                               veronese, veronese_spec)
from shadowlab.polys import Polynomial
from shadowlab.relax import BasicClosedSet


def mono(variables, exp, coeff=1):
    return Polynomial.monomial(variables, exp, coeff)


def test_catalog_motzkin(motzkin):
    entry = catalog("motzkin")
    assert entry.degree == 6
    assert entry.variables == ("x0", "x1", "x2")
    # x1^6 + x0^4 x2^2 + x0^2 x2^4 - 3 x0^2 x1^2 x2^2
    want = (mono(entry.variables, (0, 6, 0)) + mono(entry.variables, (4, 0, 2))
            + mono(entry.variables, (2, 0, 4))
            + mono(entry.variables, (2, 2, 2), -3))
    assert motzkin == want


def test_catalog_choi_lam(choi_lam):
    entry = catalog("choi-lam")
    assert entry.degree == 4
    v = entry.variables
    want = (mono(v, (2, 2, 0, 0)) + mono(v, (0, 2, 2, 0))
            + mono(v, (2, 0, 2, 0)) + mono(v, (0, 0, 0, 4))
            + mono(v, (1, 1, 1, 1), -4))
    assert choi_lam == want


def test_catalog_unknown_name():
    with pytest.raises(KeyError):
        catalog("nope")
    assert catalog_names() == sorted(catalog_names())


def test_forms_vanish_at_known_zeros(motzkin, choi_lam):
    assert motzkin.evaluate([1, 1, 1]) == 0
    assert motzkin.evaluate([1, -1, 1]) == 0
    assert choi_lam.evaluate([1, 1, 1, 1]) == 0


def test_veronese_spec_counts():
    assert veronese_spec(2, 2).N == 5
    assert veronese_spec(3, 6).N == 83
    assert veronese_spec(4, 4).N == 69
    assert veronese_spec(2, 6).N == 27
    assert veronese_spec(3, 2, "homogeneous").N == 6


def test_veronese_values():
    vals = veronese(2, 2, [Fraction(1), Fraction(2)])
    assert vals == [1, 2, 1, 2, 4]
    hom = veronese(2, 2, [Fraction(1), Fraction(2)], "homogeneous")
    assert hom == [1, 2, 4]


def test_veronese_bad_mode():
    with pytest.raises(ValueError):
        veronese_spec(2, 2, "projective")


def test_l14_dimension_and_membership():
    sub = L14()
    assert sub.dim == 14
    assert sub.contains(mono(("x", "y"), (1, 0)))
    assert not sub.contains(mono(("x", "y"), (0, 0)))


def test_l14_shift_membership():
    assert l14_shift_membership([Fraction(1, 2), Fraction(-1, 3)])
    assert l14_shift_membership([Fraction(0), Fraction(0)])


def test_hilbert_equality_cases_documented():
    assert "n <= 2" in HILBERT_EQUALITY_CASES


def test_demo_motzkin_separation():
    rep = psd_vs_sos_demo(3, 6)
    assert rep.separation_expected
    assert rep.form_name == "motzkin"
    assert rep.witness is not None
    assert rep.witness.value_on_f <= -1e-6


def test_demo_choi_lam_separation():
    rep = psd_vs_sos_demo(4, 4)
    assert rep.separation_expected
    assert rep.form_name == "choi-lam"
    assert rep.witness is not None


def test_demo_hilbert_case_no_separation():
    rep = psd_vs_sos_demo(2, 4)
    assert not rep.separation_expected
    assert rep.witness is None


def test_demo_unsupported_case():
    with pytest.raises(ValueError):
        psd_vs_sos_demo(5, 8)


@pytest.fixture(scope="module")
def plane_set():
    # shift points for the infinitesimal mode: all but the first variable
    return BasicClosedSet(("x1", "x2"), [])


@pytest.fixture(scope="module")
def space_set():
    # shift points for the local mode: the form's full ambient space
    return BasicClosedSet(("x0", "x1", "x2"), [])


def test_pipeline_local(space_set):
    rep = counterexample_pipeline("motzkin", space_set, "local",
                                  samples=3, seed=0)
    assert rep.obstructed
    assert rep.inconclusive == 0
    assert all(e.in_subspace for e in rep.entries)
    assert all(e.verdict == "Obstructed" for e in rep.entries)
    assert "sampled" in rep.note


def test_pipeline_infinitesimal(plane_set):
    rep = counterexample_pipeline("motzkin", plane_set, "infinitesimal",
                                  subspace="L14", samples=3, seed=0)
    assert rep.obstructed
    assert rep.subspace_kind == "L14"
    assert rep.subspace_dim == 14
    assert all(e.in_subspace for e in rep.entries)


def test_pipeline_motzkin_shift_support(space_set):
    rep = counterexample_pipeline("motzkin", space_set, "local",
                                  subspace="shift-support", samples=2, seed=0)
    assert rep.obstructed
    assert rep.subspace_dim == 27


def test_pipeline_choi_lam_infinitesimal():
    s = BasicClosedSet(("x2", "x3", "x4"), [])
    rep = counterexample_pipeline("choi-lam", s, "infinitesimal",
                                  samples=2, seed=0)
    assert rep.obstructed
    assert all(e.in_subspace for e in rep.entries)


def test_pipeline_note_is_honest(space_set):
    rep = counterexample_pipeline("motzkin", space_set, "local",
                                  samples=2, seed=0)
    lowered = rep.note.lower()
    assert "not" in lowered
    assert "universal" in lowered or "theorem" in lowered or \
        "finitely many" in lowered
