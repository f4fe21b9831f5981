"""Sum-of-squares certification and non-SOS obstruction pipelines.

``sos_decide`` settles membership of a polynomial in the cone of sums of
squares from a given subspace.  Positive answers carry a Gram matrix and an
explicit square decomposition, rationalized to an exactly verified
certificate whenever rounding succeeds.  Negative answers always carry a
dual separating functional (a moment vector with PSD moment matrix taking a
negative value on the input); solver infeasibility alone never produces a
"not SOS" verdict.

On top of that sit the two obstruction pipelines: the local lowest-form test
at a rational point, and the infinitesimal rescaling test that pushes a form
through truncated Puiseux arithmetic and reduces it back to the rationals.
"""

from __future__ import annotations

import dataclasses
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.optimize import linprog

from . import exactla
from .polys import (PUISEUX, RATIONAL, Polynomial, Subspace, divide_eps_power,
                    grlex_key, monomial_exponents, residue_poly)
from .puiseux import DEFAULT_TRUNC, PuiseuxScalar
from .sdp import SdpProblem, SymMatrix, lmi_maximize, solve_sdp
from .spectra import _ball_block, _block_diag

TOL_SEP = 1e-6
TOL_PSD_WITNESS = 1e-9
TOL_FLOAT_CERT = 1e-7
DENOM_BOUND = 10 ** 6
DENOM_BOUND_RETRY = 10 ** 9


class NotInSpanError(ValueError):
    """f has no Gram representation even ignoring PSD-ness."""


class InconclusiveError(RuntimeError):
    """Numerical failure; no verdict."""


class RoundingFailed(Exception):
    pass


@dataclasses.dataclass
class SosCertificate:
    basis: Subspace
    gram: SymMatrix
    #: weighted squares: f = sum w_k * q_k^2 with w_k > 0
    squares: list[tuple[object, Polynomial]]
    exact: bool
    gram_exact: list[list[Fraction]] | None = None

    def verify(self, f: Polynomial) -> bool:
        if self.exact:
            acc = Polynomial.zero(f.vars, f.domain)
            for w, q in self.squares:
                acc = acc + q * q * w
            return acc == f
        acc = Polynomial.zero(f.vars, RATIONAL)
        diff_max = 0.0
        monos = set(f.terms)
        total = {}
        for w, q in self.squares:
            sq = q * q
            for e, c in sq.terms.items():
                total[e] = total.get(e, 0.0) + float(w) * float(c)
        scale = 1.0 + max((abs(float(c)) for c in f.terms.values()), default=0.0)
        for e in set(total) | monos:
            diff = abs(total.get(e, 0.0) - float(f.terms.get(e, 0)))
            diff_max = max(diff_max, diff)
        return diff_max <= TOL_FLOAT_CERT * scale


@dataclasses.dataclass
class NotSosWitness:
    monomials: list[tuple[int, ...]]
    values: list[float]
    moment_matrix: SymMatrix
    value_on_f: float

    def pairing(self, f: Polynomial) -> float:
        lookup = dict(zip(self.monomials, self.values))
        total = 0.0
        for e, c in f.terms.items():
            if e not in lookup:
                raise ValueError("monomial %r outside witness support" % (e,))
            total += float(c) * lookup[e]
        return total

    def verify(self, f: Polynomial, tol_psd: float = TOL_PSD_WITNESS,
               tol_sep: float = TOL_SEP) -> bool:
        return (self.moment_matrix.min_eig() >= -tol_psd
                and self.pairing(f) <= -tol_sep)


@dataclasses.dataclass
class ObstructionReport:
    verdict: str  # Obstructed | NotObstructed | Inconclusive
    site: object  # point tuple or "infinitesimal"
    ring: str
    evidence: object = None  # NotSosWitness | SosCertificate | None
    reason: str = ""


# -- Gram system ----------------------------------------------------------


class GramSystem:
    """Exact linear data of the map G -> u^T G u on a basis of U."""

    def __init__(self, u_basis: Sequence[Polynomial]):
        self.u_basis = list(u_basis)
        k = len(self.u_basis)
        if k == 0:
            raise ValueError("empty square basis")
        self.vars = self.u_basis[0].vars
        prods: dict[tuple[int, int], Polynomial] = {}
        monos: set[tuple[int, ...]] = set()
        for i in range(k):
            for j in range(i, k):
                p = self.u_basis[i] * self.u_basis[j]
                prods[(i, j)] = p
                monos.update(p.terms)
        self.monomials = sorted(monos, key=grlex_key)
        self.mono_index = {e: t for t, e in enumerate(self.monomials)}
        self.k = k
        # A_mu[i][j] = coefficient of monomial mu in u_i * u_j
        self.a_mats: list[list[list[Fraction]]] = [
            [[Fraction(0)] * k for _ in range(k)] for _ in self.monomials]
        for (i, j), p in prods.items():
            for e, c in p.terms.items():
                t = self.mono_index[e]
                self.a_mats[t][i][j] = Fraction(c)
                self.a_mats[t][j][i] = Fraction(c)
        # svec index pairs
        self.pairs = [(i, j) for i in range(k) for j in range(i, k)]

    def constraint_rows(self) -> list[list[Fraction]]:
        rows = []
        for a in self.a_mats:
            row = []
            for i, j in self.pairs:
                row.append(a[i][j] if i == j else 2 * a[i][j])
            rows.append(row)
        return rows

    def target(self, f: Polynomial) -> list[Fraction] | None:
        """Coefficient vector of f on the product monomials; None if outside."""
        for e in f.terms:
            if e not in self.mono_index:
                return None
        c = [Fraction(0)] * len(self.monomials)
        for e, coeff in f.terms.items():
            c[self.mono_index[e]] = Fraction(coeff)
        return c

    def mat_from_svec(self, vec, dtype=float) -> np.ndarray:
        g = np.zeros((self.k, self.k))
        for (i, j), v in zip(self.pairs, vec):
            g[i, j] = g[j, i] = float(v)
        return g

    def a_mat_float(self, t: int) -> np.ndarray:
        return np.array([[float(x) for x in row] for row in self.a_mats[t]])


def newton_half_exponents(f: Polynomial,
                          degree_cap: int | None = None) -> list[tuple[int, ...]]:
    """Exponents a with 2a in the convex hull of the support of f.

    Candidates are all monomials of degree <= deg(f)/2 (or ``degree_cap``).
    This is the standard support restriction for square bases: any sum of
    squares representation of f only uses these monomials.
    """
    if f.is_zero():
        return []
    support = [np.array(e, dtype=float) for e in f.terms]
    d = int(f.degree())
    cap = d // 2 if degree_cap is None else degree_cap
    n = len(f.vars)
    out = []
    for e in monomial_exponents(n, 0, cap):
        q = 2 * np.array(e, dtype=float)
        # feasibility: q = sum lam_i s_i, sum lam = 1, lam >= 0
        a_eq = np.vstack([np.array(support).T, np.ones(len(support))])
        b_eq = np.concatenate([q, [1.0]])
        res = linprog(np.zeros(len(support)), A_eq=a_eq, b_eq=b_eq,
                      bounds=[(0, None)] * len(support), method="highs")
        if res.status == 0:
            out.append(e)
    return out


def default_square_basis(f: Polynomial) -> Subspace:
    exps = newton_half_exponents(f)
    if not exps:
        raise NotInSpanError("polynomial has empty square support")
    return Subspace([Polynomial.monomial(f.vars, e) for e in exps],
                    check=False)


# -- rationalization ------------------------------------------------------


def _project_exact(g_svec: list[Fraction], rows: list[list[Fraction]],
                   c: list[Fraction], pairs) -> list[Fraction] | None:
    """Project onto {M u = c} minimizing the Frobenius distance exactly."""
    if not rows:
        return list(g_svec)
    _, pivots = exactla.rref([row + [ci] for row, ci in zip(rows, c)])
    if len(rows[0]) in pivots:
        return None
    # keep an independent subset of the original rows
    keep_rows: list[list[Fraction]] = []
    keep_c: list[Fraction] = []
    rank_needed = exactla.rank(rows)
    cur: list[list[Fraction]] = []
    for row, ci in zip(rows, c):
        test = cur + [list(row)]
        if exactla.rank(test) > len(cur):
            cur = test
            keep_rows.append(list(row))
            keep_c.append(ci)
            if len(cur) == rank_needed:
                break
    weights = [Fraction(1) if i == j else Fraction(2) for i, j in pairs]
    # u = g - W^-1 M^T (M W^-1 M^T)^-1 (M g - c)
    m = keep_rows
    mg = [sum((mi * gi for mi, gi in zip(row, g_svec)), Fraction(0)) - ci
          for row, ci in zip(m, keep_c)]
    winv_mt = [[row[l] / weights[l] for row in m] for l in range(len(weights))]
    gram = [[sum((m[r1][l] * m[r2][l] / weights[l]
                  for l in range(len(weights))), Fraction(0))
             for r2 in range(len(m))] for r1 in range(len(m))]
    try:
        gram_inv = exactla.invert(gram)
    except ValueError:
        return None
    corr = exactla.mat_vec(gram_inv, mg)
    u = [g_svec[l] - sum((winv_mt[l][r] * corr[r] for r in range(len(m))),
                         Fraction(0))
         for l in range(len(weights))]
    return u


def _exact_cert_from_svec(system: GramSystem, svec: list[Fraction],
                          basis: Subspace) -> SosCertificate | None:
    k = system.k
    g = [[Fraction(0)] * k for _ in range(k)]
    for (i, j), v in zip(system.pairs, svec):
        g[i][j] = v
        g[j][i] = v
    ldl = exactla.ldl_psd(g)
    if ldl is None:
        return None
    perm, lmat, diag = ldl
    squares = []
    for t in range(k):
        if diag[t] == 0:
            continue
        q = Polynomial.zero(system.vars)
        for i in range(k):
            if lmat[i][t] != 0:
                q = q + system.u_basis[perm[i]] * lmat[i][t]
        squares.append((diag[t], q))
    return SosCertificate(
        basis=basis,
        gram=SymMatrix(system.mat_from_svec(svec)),
        squares=squares,
        exact=True,
        gram_exact=g)


def rationalize_gram(system: GramSystem, g_float: np.ndarray,
                     c: list[Fraction], basis: Subspace,
                     kernel_vectors: Sequence[Sequence[Fraction]] = ()
                     ) -> SosCertificate | None:
    """Round a float Gram matrix to an exactly verified certificate.

    Rounds with a bounded denominator, projects exactly back onto the affine
    Gram constraints (plus optional known kernel constraints G v = 0 for
    rational zeros of f), and checks PSD by exact pivoted LDL^T.
    """
    rows = system.constraint_rows()
    cc = list(c)
    for v in kernel_vectors:
        v = [Fraction(x) for x in v]
        for r in range(system.k):
            row = []
            for i, j in system.pairs:
                coef = Fraction(0)
                if i == r:
                    coef += v[j]
                if j == r:
                    coef += v[i]
                row.append(coef)
            rows.append(row)
            cc.append(Fraction(0))
    for bound in (DENOM_BOUND, DENOM_BOUND_RETRY):
        svec_f = [Fraction(g_float[i, j]).limit_denominator(bound)
                  for i, j in system.pairs]
        proj = _project_exact(svec_f, rows, cc, system.pairs)
        if proj is None:
            return None
        cert = _exact_cert_from_svec(system, proj, basis)
        if cert is not None:
            return cert
    return None


# -- the decision procedure ----------------------------------------------


def _separation(system: GramSystem, c: list[Fraction],
                tol_sep: float = TOL_SEP) -> tuple[float, NotSosWitness | None]:
    """min lambda(f) over trace-normalized PSD moment functionals."""
    t_count = len(system.monomials)
    d = system.k
    f_list = [SymMatrix(system.a_mat_float(t)) for t in range(t_count)]
    objective = [-float(ci) for ci in c]
    traces = [float(np.trace(f.mat)) for f in f_list]
    f0 = SymMatrix.zeros(d)
    res = lmi_maximize(f0, f_list, objective,
                       eq_a=np.array([traces]), eq_b=np.array([1.0]))
    if res.status != "optimal":
        raise InconclusiveError("separation SDP failed: %s" % res.status)
    sep_val = -res.value  # = min lambda(f)
    lam = res.u
    moment = np.zeros((d, d))
    for v, f in zip(lam, f_list):
        moment += v * f.mat
    witness = NotSosWitness(
        monomials=list(system.monomials),
        values=[float(v) for v in lam],
        moment_matrix=SymMatrix(moment),
        value_on_f=float(sum(float(ci) * vi for ci, vi in zip(c, lam))))
    return sep_val, witness


def _find_gram(system: GramSystem, c: list[Fraction]
               ) -> tuple[float, np.ndarray] | None:
    """max t over Gram matrices G(w) - tI >= 0 on the exact affine slice."""
    rows = system.constraint_rows()
    g0 = exactla.solve(rows, c)
    if g0 is None:
        return None
    null = exactla.nullspace(rows)
    f0_g = system.mat_from_svec(g0)
    f_null = [system.mat_from_svec(nv) for nv in null]
    k = system.k
    nw = len(null)
    radius = 10.0 * (1.0 + float(np.abs(f0_g).max(initial=0.0))) * k
    if nw:
        # over-large ball radii destabilize the solver; walk down on failure
        res = None
        for r in dict.fromkeys([radius, 100.0, 20.0]):
            ball0, ball_fs = _ball_block(nw, r)
            f0 = SymMatrix(_block_diag([f0_g, ball0.mat]))
            f_list = [SymMatrix(_block_diag([fn, bf.mat]))
                      for fn, bf in zip(f_null, ball_fs)]
            f_list.append(SymMatrix(_block_diag(
                [-np.eye(k), np.zeros_like(ball0.mat)])))
            res = lmi_maximize(f0, f_list, [0.0] * nw + [1.0])
            if res.status == "optimal":
                break
    else:
        res = lmi_maximize(SymMatrix(f0_g), [SymMatrix(-np.eye(k))], [1.0])
    if res is None or res.status != "optimal":
        return _find_gram_primal(system, c)
    g = f0_g.copy()
    for wv, fn in zip(res.u[:nw], f_null):
        g = g + wv * fn
    if float(res.value) < 0:
        # the ball may have cut off every PSD Gram; retry in primal form
        fallback = _find_gram_primal(system, c)
        if fallback is not None and fallback[0] > float(res.value):
            return fallback
    return float(res.value), g


def _find_gram_primal(system: GramSystem, c: list[Fraction]
                      ) -> tuple[float, np.ndarray] | None:
    """Minimum-trace PSD Gram on the affine slice, in standard primal form."""
    k = system.k
    cons = []
    for t in range(len(system.monomials)):
        cons.append((SymMatrix(system.a_mat_float(t)), float(c[t])))
    sol = solve_sdp(SdpProblem(SymMatrix.identity(k), cons))
    if sol.status != "Optimal" or sol.X is None:
        return None
    g = sol.X.mat
    return float(np.linalg.eigvalsh(g)[0]), g


def sos_decide(f: Polynomial, basis: Subspace | None = None,
               kernel_vectors: Sequence[Sequence[Fraction]] = (),
               tol_sep: float = TOL_SEP):
    """Decide membership of f in the sums of squares from span(basis).

    Returns a :class:`SosCertificate` or a :class:`NotSosWitness`.  Raises
    :class:`NotInSpanError` when f has no Gram representation at all, and
    :class:`InconclusiveError` on numerical failure.
    """
    if f.domain != RATIONAL:
        raise ValueError("sos_decide expects exact rational input")
    defaulted = basis is None
    if defaulted:
        basis = default_square_basis(f)
    system = GramSystem(basis.basis)
    c = system.target(f)
    if c is None or exactla.solve(system.constraint_rows(), c) is None:
        if not defaulted:
            raise NotInSpanError("polynomial lies outside span(U*U)")
        # the Newton filter can cut f itself out of span(U*U); that already
        # proves f is not SOS, but a moment witness needs the full basis
        d = int(f.degree())
        if d % 2:
            raise NotInSpanError("odd degree polynomial is never SOS")
        lo = d // 2 if f.is_homogeneous() else 0
        basis = Subspace(
            [Polynomial.monomial(f.vars, e)
             for e in monomial_exponents(len(f.vars), lo, d // 2)],
            check=False)
        system = GramSystem(basis.basis)
        c = system.target(f)
        if c is None or exactla.solve(system.constraint_rows(), c) is None:
            raise NotInSpanError("polynomial lies outside span(U*U)")

    sep_val, witness = _separation(system, c, tol_sep)
    if sep_val <= -tol_sep and witness.verify(f, tol_sep=tol_sep):
        return witness

    found = _find_gram(system, c)
    if found is None:
        raise InconclusiveError("no Gram matrix found despite weak separation")
    margin, g = found
    if margin < 0:
        # clip the tiny negative part before rounding
        w, v = np.linalg.eigh(g)
        g = v @ np.diag(np.clip(w, 0.0, None)) @ v.T
    cert = rationalize_gram(system, g, c, basis, kernel_vectors)
    if cert is not None and cert.verify(f):
        return cert
    # fall back to a float certificate when the matrix is numerically PSD
    if margin >= -TOL_FLOAT_CERT:
        w, v = np.linalg.eigh(0.5 * (g + g.T))
        w = np.clip(w, 0.0, None)
        squares = []
        for t in range(system.k):
            if w[t] <= 1e-14:
                continue
            q = Polynomial.zero(system.vars)
            for i in range(system.k):
                coef = Fraction(v[i, t]).limit_denominator(10 ** 12)
                if coef:
                    q = q + system.u_basis[i] * coef
            squares.append((Fraction(w[t]).limit_denominator(10 ** 12), q))
        cert = SosCertificate(basis=basis, gram=SymMatrix(0.5 * (g + g.T)),
                              squares=squares, exact=False)
        if cert.verify(f):
            return cert
    raise InconclusiveError(
        "borderline instance: separation %.3e, Gram margin %.3e"
        % (sep_val, margin))


def rationalize(cert: SosCertificate, f: Polynomial, basis: Subspace,
                kernel_vectors: Sequence[Sequence[Fraction]] = ()
                ) -> SosCertificate:
    """Upgrade a float certificate to an exact one, or raise RoundingFailed."""
    system = GramSystem(basis.basis)
    c = system.target(f)
    if c is None:
        raise NotInSpanError("polynomial has monomials outside span(U*U)")
    out = rationalize_gram(system, cert.gram.mat, c, basis, kernel_vectors)
    if out is None or not out.verify(f):
        raise RoundingFailed(
            "projected Gram matrix is not PSD (boundary certificate)")
    return out


def psd_via_multiplier(f: Polynomial, k: int,
                       kernel_points: Sequence[Sequence] = ()
                       ) -> SosCertificate | None:
    """Certify f PSD through an SOS certificate for (sum x_i^2)^k * f.

    Returns None when no certificate exists at this multiplier level.
    ``kernel_points`` may list known rational zeros of f, used to steer the
    exact rounding of boundary certificates.
    """
    if not f.is_homogeneous():
        raise ValueError("psd_via_multiplier expects a form")
    sigma = Polynomial.zero(f.vars)
    for v in f.vars:
        x = Polynomial.variable(f.vars, v)
        sigma = sigma + x * x
    g = (sigma ** k) * f
    basis = default_square_basis(g)
    if kernel_points:
        # facial reduction: every square must vanish at a zero of g, so the
        # usable squares live in the kernel of the evaluation vectors
        eval_rows = []
        for pt in kernel_points:
            pt = [Fraction(x) for x in pt]
            eval_rows.append([Fraction(p.evaluate(pt)) for p in basis.basis])
        reduced = []
        for coeffs in exactla.nullspace(eval_rows):
            q = Polynomial.zero(f.vars)
            for coef, p in zip(coeffs, basis.basis):
                if coef:
                    q = q + p * coef
            reduced.append(q)
        if reduced:
            try:
                result = sos_decide(g, Subspace(reduced, check=False))
                if isinstance(result, SosCertificate):
                    return result
            except (NotInSpanError, InconclusiveError):
                pass
    try:
        result = sos_decide(g, basis)
    except InconclusiveError:
        return None
    if isinstance(result, NotSosWitness):
        return None
    return result


# -- obstruction pipelines ------------------------------------------------


def local_obstruction(f: Polynomial, point: Sequence) -> ObstructionReport:
    """Lowest-form test for sums of squares in the completed local ring at a
    rational point of affine space."""
    point = [Fraction(p) for p in point]
    if len(point) != len(f.vars):
        raise ValueError("point dimension mismatch")
    ring = "R[[%s]]" % ", ".join(
        "%s-%s" % (v, p) if p else v for v, p in zip(f.vars, point))
    value = f.evaluate(point)
    if value > 0:
        return ObstructionReport(
            verdict="NotObstructed", site=tuple(point), ring=ring,
            reason="positive value at the point; lowest form is a positive constant")
    expanded = f.shift(point)
    if expanded.is_zero():
        return ObstructionReport(
            verdict="NotObstructed", site=tuple(point), ring=ring,
            reason="zero polynomial")
    w = expanded.lowest_form()
    deg = int(w.degree())
    if value < 0:
        return ObstructionReport(
            verdict="Obstructed", site=tuple(point), ring=ring,
            reason="negative constant lowest form; no sum of squares can "
                   "take a negative value")
    if deg % 2 == 1:
        return ObstructionReport(
            verdict="Obstructed", site=tuple(point), ring=ring,
            reason="odd lowest form")
    try:
        basis = default_square_basis(w)
        result = sos_decide(w, basis)
    except NotInSpanError:
        return ObstructionReport(
            verdict="Obstructed", site=tuple(point), ring=ring,
            reason="lowest form outside the span of products of half-degree "
                   "monomials")
    except InconclusiveError as exc:
        return ObstructionReport(
            verdict="Inconclusive", site=tuple(point), ring=ring,
            reason=str(exc))
    if isinstance(result, NotSosWitness):
        return ObstructionReport(
            verdict="Obstructed", site=tuple(point), ring=ring,
            evidence=result, reason="lowest form is not a sum of squares")
    return ObstructionReport(
        verdict="NotObstructed", site=tuple(point), ring=ring,
        evidence=result, reason="lowest form is a sum of squares")


def infinitesimal_obstruction(form: Polynomial,
                              trunc=DEFAULT_TRUNC) -> ObstructionReport:
    """Infinitesimal rescaling test for a form in (x0, x1, ..., xn).

    Substitutes an infinitesimal for the first variable, rescales the rest
    by it, divides out the resulting power, reduces coefficient-wise to the
    rationals, and tests the reduced dehomogenization for SOS membership.
    """
    if not form.is_homogeneous():
        raise ValueError("expected a homogeneous input")
    d = int(form.degree())
    if d % 2 == 1:
        raise ValueError("expected an even degree")
    x0 = form.vars[0]
    rest = form.vars[1:]
    ring = "B[%s]/<%s>^%d" % (", ".join(rest), ", ".join(rest), d + 1)
    eps = PuiseuxScalar.eps(1, trunc=trunc)
    fp = form.to_puiseux()
    rest_polys = {v: Polynomial.variable(rest, v, PUISEUX) for v in rest}
    f_eps = fp.substitute({x0: eps, **rest_polys})
    scaled = f_eps.substitute(
        {v: rest_polys[v] * eps for v in rest})
    divided = divide_eps_power(scaled, d)
    reduced = residue_poly(divided)
    expected = form.substitute(
        {x0: Fraction(1),
         **{v: Polynomial.variable(rest, v) for v in rest}})
    if reduced != expected:
        raise AssertionError(
            "reduction pipeline mismatch: residue(eps^-d f(eps, eps x)) "
            "differs from f(1, x)")
    try:
        result = sos_decide(reduced)
    except NotInSpanError:
        return ObstructionReport(
            verdict="Obstructed", site="infinitesimal", ring=ring,
            reason="reduced polynomial outside the span of products of its "
                   "square support")
    except InconclusiveError as exc:
        return ObstructionReport(
            verdict="Inconclusive", site="infinitesimal", ring=ring,
            reason=str(exc))
    if isinstance(result, NotSosWitness):
        return ObstructionReport(
            verdict="Obstructed", site="infinitesimal", ring=ring,
            evidence=result,
            reason="reduction is not a sum of squares over the rationals")
    return ObstructionReport(
        verdict="NotObstructed", site="infinitesimal", ring=ring,
        evidence=result, reason="reduction is a sum of squares")


def pullback_sos_check(f: Polynomial, coordinate_map: Sequence[Polynomial],
                       basis: Subspace):
    """Compose f with a polynomial map and decide SOS in the source ring."""
    if len(coordinate_map) != len(f.vars):
        raise ValueError("coordinate map must cover every target variable")
    assignment = dict(zip(f.vars, coordinate_map))
    pulled = f.substitute(assignment)
    return sos_decide(pulled, basis)
