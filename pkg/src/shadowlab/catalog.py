"""Named forms, Veronese data, and the end-to-end obstruction workflows.

The catalog holds the two classical PSD-but-not-SOS forms and the explicit
low-dimensional subspaces built around them.  The pipelines at the bottom
orchestrate sampling, subspace membership, and the obstruction tests; their
reports state what was verified at which sampled points and leave the
universal conclusion to the theorems the construction follows.
"""

from __future__ import annotations

import dataclasses
import math
from fractions import Fraction
from typing import Sequence

from .polys import (PUISEUX, Polynomial, Subspace, monomial_exponents,
                    monomial_subspace, shift_support)
from .puiseux import DEFAULT_TRUNC, PuiseuxScalar
from .relax import BasicClosedSet
from .soscert import (NotSosWitness, ObstructionReport, infinitesimal_obstruction,
                      local_obstruction, sos_decide)

MOTZKIN_VARS = ("x0", "x1", "x2")
CHOI_LAM_VARS = ("x1", "x2", "x3", "x4")


@dataclasses.dataclass
class NamedForm:
    name: str
    polynomial: Polynomial
    variables: tuple[str, ...]
    degree: int
    note: str


def _motzkin() -> Polynomial:
    x0, x1, x2 = (Polynomial.variable(MOTZKIN_VARS, v) for v in MOTZKIN_VARS)
    return (x1 ** 6 + x0 ** 4 * x2 ** 2 + x0 ** 2 * x2 ** 4
            - x0 ** 2 * x1 ** 2 * x2 ** 2 * 3)


def _choi_lam() -> Polynomial:
    x1, x2, x3, x4 = (Polynomial.variable(CHOI_LAM_VARS, v)
                      for v in CHOI_LAM_VARS)
    return (x1 ** 2 * x2 ** 2 + x2 ** 2 * x3 ** 2 + x3 ** 2 * x1 ** 2
            + x4 ** 4 - x1 * x2 * x3 * x4 * 4)


_CATALOG = {
    "motzkin": lambda: NamedForm(
        "motzkin", _motzkin(), MOTZKIN_VARS, 6,
        "ternary sextic, PSD but not a sum of squares"),
    "choi-lam": lambda: NamedForm(
        "choi-lam", _choi_lam(), CHOI_LAM_VARS, 4,
        "quaternary quartic, PSD but not a sum of squares"),
}


def catalog(name: str) -> NamedForm:
    try:
        return _CATALOG[name]()
    except KeyError:
        raise KeyError("unknown form %r; available: %s"
                       % (name, ", ".join(sorted(_CATALOG)))) from None


def catalog_names() -> list[str]:
    return sorted(_CATALOG)


# -- Veronese data --------------------------------------------------------


@dataclasses.dataclass
class VeroneseSpec:
    n: int
    d: int
    mode: str  # affine | homogeneous
    variables: tuple[str, ...]
    monomials: list[tuple[int, ...]]

    @property
    def N(self) -> int:
        return len(self.monomials)


def veronese_spec(n: int, d: int, mode: str = "affine") -> VeroneseSpec:
    """Monomial data of the Veronese map, in graded lexicographic order.

    Affine mode lists the nonconstant monomials of degree at most d, so
    N = C(n+d, n) - 1.  Homogeneous mode lists the monomials of degree
    exactly d, so N = C(n+d-1, n-1).
    """
    if n < 1 or d < 1:
        raise ValueError("need n >= 1 and d >= 1")
    variables = tuple("x%d" % (i + 1) for i in range(n))
    if mode == "affine":
        monos = monomial_exponents(n, 1, d)
        expected = math.comb(n + d, n) - 1
    elif mode == "homogeneous":
        monos = monomial_exponents(n, d, d)
        expected = math.comb(n + d - 1, n - 1)
    else:
        raise ValueError("mode must be 'affine' or 'homogeneous'")
    assert len(monos) == expected
    return VeroneseSpec(n=n, d=d, mode=mode, variables=variables,
                        monomials=monos)


def veronese(n: int, d: int, point: Sequence, mode: str = "affine") -> list:
    spec = veronese_spec(n, d, mode)
    if len(point) != n:
        raise ValueError("point dimension mismatch")
    out = []
    for e in spec.monomials:
        val = 1
        for p, k in zip(point, e):
            val = val * p ** k
        out.append(val)
    return out


# -- the 14-monomial subspace ---------------------------------------------


def L14() -> Subspace:
    """Span of x^i (1<=i<=6), y^i (1<=i<=4), x^i y^j (i,j in {1,2})."""
    variables = ("x", "y")
    exps = ([(i, 0) for i in range(1, 7)] + [(0, i) for i in range(1, 5)]
            + [(i, j) for i in (1, 2) for j in (1, 2)])
    return Subspace([Polynomial.monomial(variables, e) for e in exps],
                    check=False)


def l14_shift_membership(xi, eps=None, trunc=DEFAULT_TRUNC) -> bool:
    """Check that Motzkin(eps, x - xi1, y - xi2) lies in B-span(L14) + B.

    ``xi`` are two valuation ring scalars (rationals promote); ``eps``
    defaults to the order-1 infinitesimal.
    """
    if eps is None:
        eps = PuiseuxScalar.eps(1, trunc=trunc)
    sub = L14()
    variables = sub.vars
    xp = Polynomial.variable(variables, "x", domain=PUISEUX)
    yp = Polynomial.variable(variables, "y", domain=PUISEUX)
    coords = []
    for v in xi:
        if not isinstance(v, PuiseuxScalar):
            v = PuiseuxScalar.from_rational(Fraction(v))
        if not v.in_valuation_ring():
            raise ValueError("shift coordinates must lie in the valuation ring")
        coords.append(v)
    f = _motzkin().to_puiseux().substitute(
        {"x0": eps, "x1": xp - coords[0], "x2": yp - coords[1]})
    return sub.contains_with_scalar_coeffs(f, allow_constant=True)


# -- PSD vs SOS demonstration ---------------------------------------------

HILBERT_EQUALITY_CASES = "2d = 2, or n <= 2, or (n, 2d) = (3, 4)"


@dataclasses.dataclass
class DemoReport:
    n: int
    two_d: int
    separation_expected: bool
    form_name: str | None
    witness: NotSosWitness | None
    witness_value: float | None
    message: str


def psd_vs_sos_demo(n: int, two_d: int) -> DemoReport:
    """Exhibit a PSD form separated from the SOS cone by a moment functional.

    In the classical equality cases the report explains that every PSD form
    of that signature is a sum of squares, so no separation exists.
    """
    if two_d % 2 or two_d < 2 or n < 1:
        raise ValueError("need an even degree >= 2 and n >= 1")
    if two_d == 2 or n <= 2 or (n, two_d) == (3, 4):
        return DemoReport(
            n=n, two_d=two_d, separation_expected=False, form_name=None,
            witness=None, witness_value=None,
            message="no separation expected: PSD forms equal SOS forms "
                    "exactly when %s" % HILBERT_EQUALITY_CASES)
    if (n, two_d) == (3, 6):
        form = catalog("motzkin")
    elif (n, two_d) == (4, 4):
        form = catalog("choi-lam")
    else:
        raise ValueError(
            "unsupported (n, 2d) = (%d, %d): catalog covers (3, 6) and "
            "(4, 4)" % (n, two_d))
    result = sos_decide(form.polynomial)
    if not isinstance(result, NotSosWitness):
        raise RuntimeError("expected a separating functional for %s"
                           % form.name)
    return DemoReport(
        n=n, two_d=two_d, separation_expected=True, form_name=form.name,
        witness=result, witness_value=result.value_on_f,
        message="moment functional with PSD moment matrix takes value "
                "%.3e on the %s form; the dual membership system is the "
                "moment matrix LMI over the degree-%d monomials"
                % (result.value_on_f, form.name, two_d // 2))


# -- the consolidated pipeline --------------------------------------------


@dataclasses.dataclass
class PipelineEntry:
    point: tuple
    in_subspace: bool
    verdict: str
    reason: str


@dataclasses.dataclass
class PipelineReport:
    form_name: str
    mode: str
    subspace_kind: str
    subspace_dim: int
    entries: list[PipelineEntry]
    obstructed: int
    inconclusive: int
    note: str


_PIPELINE_NOTE = (
    "This report verifies, at the sampled points, the hypotheses of the "
    "non-representability construction: the shifted form stays in the "
    "chosen subspace (up to constants) and carries the stated obstruction. "
    "The step from finitely many verified points to 'the hull is not a "
    "spectrahedral shadow' is a theorem about all points, not a computation.")


def _choose_subspace(form: NamedForm, mode: str, kind: str):
    n = len(form.variables)
    if kind == "auto":
        kind = "L14" if (mode == "infinitesimal"
                         and form.name == "motzkin") else "monomial"
    if kind == "monomial":
        if mode == "infinitesimal":
            sub = monomial_subspace(n - 1, form.degree, variables=("x", "y")
                                    if n - 1 == 2 else None)
        else:
            sub = monomial_subspace(n, form.degree,
                                    variables=form.variables)
        return kind, sub
    if kind == "L14":
        if form.name != "motzkin" or mode != "infinitesimal":
            raise ValueError("the 14-monomial subspace applies to the "
                             "Motzkin form in infinitesimal mode")
        return kind, L14()
    if kind == "shift-support":
        if mode != "local":
            raise ValueError("shift-support subspaces apply in local mode")
        return kind, shift_support(form.polynomial)
    raise ValueError("unknown subspace kind %r" % kind)


def counterexample_pipeline(form_name: str, s: BasicClosedSet, mode: str,
                            subspace: str = "auto", samples: int = 5,
                            seed: int = 0,
                            trunc=DEFAULT_TRUNC) -> PipelineReport:
    """Verify the pointwise hypotheses of the obstruction constructions.

    mode='local' samples points of S in the form's own ambient space and
    runs the lowest-form obstruction on the shifted form.  The form is PSD
    and vanishes at the shift point, so every obstruction reduces to the
    form itself not being a sum of squares.

    mode='infinitesimal' treats the form's first variable as an
    infinitesimal, samples shift points in the remaining variables, checks
    B-linear membership of the shifted polynomial in the subspace, and runs
    the rescaling obstruction.
    """
    form = catalog(form_name)
    if mode not in ("local", "infinitesimal"):
        raise ValueError("mode must be 'local' or 'infinitesimal'")
    expected_ambient = (len(form.variables) if mode == "local"
                        else len(form.variables) - 1)
    if len(s.variables) != expected_ambient:
        raise ValueError(
            "S lives in %d variables but mode %r needs %d"
            % (len(s.variables), mode, expected_ambient))
    if samples < 1:
        raise ValueError("need at least one sample")
    kind, sub = _choose_subspace(form, mode, subspace)
    points = s.sample(samples, seed=seed)
    rational_points = [
        tuple(Fraction(v).limit_denominator(1000) for v in p) for p in points]

    entries = []
    base_obstruction: ObstructionReport | None = None
    for pt in rational_points:
        if mode == "local":
            shifted = form.polynomial.shift([-v for v in pt])
            member = sub.contains(shifted - shifted.constant_term())
            report = local_obstruction(shifted, pt)
        else:
            if base_obstruction is None:
                base_obstruction = infinitesimal_obstruction(
                    form.polynomial, trunc=trunc)
            eps = PuiseuxScalar.eps(1, trunc=trunc)
            rest = sub.vars
            imgs = {form.variables[0]: eps}
            for i, (v, c) in enumerate(zip(form.variables[1:], pt)):
                imgs[v] = (Polynomial.variable(rest, rest[i],
                                               domain=PUISEUX)
                           - PuiseuxScalar.from_rational(c))
            shifted_b = form.polynomial.to_puiseux().substitute(imgs)
            member = sub.contains_with_scalar_coeffs(shifted_b,
                                                     allow_constant=True)
            report = base_obstruction
        entries.append(PipelineEntry(
            point=pt, in_subspace=member,
            verdict=report.verdict, reason=report.reason))
    obstructed = sum(1 for e in entries if e.verdict == "Obstructed")
    inconclusive = sum(1 for e in entries if e.verdict == "Inconclusive")
    return PipelineReport(
        form_name=form.name, mode=mode, subspace_kind=kind,
        subspace_dim=sub.dim, entries=entries, obstructed=obstructed,
        inconclusive=inconclusive, note=_PIPELINE_NOTE)
