"""Moment relaxations of convex hulls of basic closed sets.

Two builders produce the same kind of object.  ``build_K_prime`` assembles
the classical moment relaxation: localizing matrices over chosen weight
spaces, with extension variables for monomials the functional does not
determine.  ``umker_shadow`` goes through pullback cones: each polynomial
map contributes the cone of functionals that are non-negative on every f
whose pullback is a sum of squares, realized by the trace-pairing dual of
an exactly parametrized Gram shadow.  Membership in either object is one
small LMI solve.

The probes at the bottom are deliberately empirical: they compare SDP
optima against sampled points of S and attempt weighted SOS certificates
for separators, reporting the confidence level instead of overclaiming.
"""

from __future__ import annotations

import dataclasses
import random
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import linprog

from . import exactla
from .polys import Polynomial, Subspace, grlex_key, monomial_subspace
from .sdp import SymMatrix, lmi_maximize
from .soscert import GramSystem, _exact_cert_from_svec, _project_exact
from .spectra import _ball_block, _block_diag

TOL_IN = 1e-7
TOL_OUT = 1e-6
IN = "In"
OUT = "Out"
BORDERLINE = "Borderline"


@dataclasses.dataclass
class BasicClosedSet:
    """S = {xi : h_i(xi) >= 0} with h_0 = 1 implicit."""

    variables: tuple[str, ...]
    generators: list[Polynomial]

    def __post_init__(self):
        self.variables = tuple(self.variables)
        for h in self.generators:
            if h.vars != self.variables:
                raise ValueError("generator variables do not match ambient")

    def contains(self, point: Sequence[float], tol: float = 1e-9) -> bool:
        return all(h.evaluate_float(point) >= -tol for h in self.generators)

    def sample(self, count: int, seed: int = 0, box: float = 2.0,
               max_tries: int = 200000) -> list[tuple[float, ...]]:
        rng = random.Random(seed)
        n = len(self.variables)
        out = []
        tries = 0
        while len(out) < count and tries < max_tries:
            tries += 1
            pt = tuple(rng.uniform(-box, box) for _ in range(n))
            if self.contains(pt):
                out.append(pt)
        if len(out) < count:
            raise ValueError(
                "could not sample %d points of S in a box of radius %g; "
                "is the interior nonempty?" % (count, box))
        return out


@dataclasses.dataclass
class RelaxationSpec:
    L: Subspace
    W_list: list[Subspace]  # W_0 .. W_r, one per generator plus the SOS part

    def __post_init__(self):
        if self.L.contains_one:
            raise ValueError("L must not contain the constants")


@dataclasses.dataclass
class MomentShadow:
    """A spectrahedral shadow of functionals on L, queried per membership.

    ``margin(lam)`` returns the maximal t with all PSD blocks >= t I over
    the extension variables; ``member`` thresholds it, and ``support``
    maximizes a linear functional of lam over the shadow.
    """

    l_basis: Subspace
    kind: str
    _margin: Callable[[Sequence[float]], float | None]
    _support: Callable[[Sequence[float]], tuple[float, list[float]] | None]

    def margin(self, lam: Sequence[float]) -> float | None:
        if len(lam) != len(self.l_basis.basis):
            raise ValueError("functional length does not match the L basis")
        return self._margin([float(v) for v in lam])

    def member(self, lam: Sequence[float]) -> str:
        m = self.margin(lam)
        if m is None:
            return BORDERLINE
        if m >= -TOL_IN:
            return IN
        if m <= -TOL_OUT:
            return OUT
        return BORDERLINE

    def support(self, direction: Sequence[float]
                ) -> tuple[float, list[float]] | None:
        """(max direction.lam over the shadow, the maximizing lam)."""
        if len(direction) != len(self.l_basis.basis):
            raise ValueError("direction length does not match the L basis")
        return self._support([float(v) for v in direction])


def evaluation_functional(L: Subspace, point: Sequence) -> list:
    return [b.evaluate_float(point) for b in L.basis]


# -- classical moment relaxation ------------------------------------------


def _localizing_data(w_basis: Sequence[Polynomial], h: Polynomial):
    """Per-monomial coefficient matrices of (w_p * w_q * h)."""
    k = len(w_basis)
    mats: dict[tuple[int, ...], np.ndarray] = {}
    for p in range(k):
        for q in range(p, k):
            prod = w_basis[p] * w_basis[q] * h
            for e, c in prod.terms.items():
                m = mats.setdefault(e, np.zeros((k, k)))
                m[p, q] += float(c)
                if p != q:
                    m[q, p] += float(c)
    return k, mats


def build_K_prime(s: BasicClosedSet, spec: RelaxationSpec,
                  ball_radius: float = 100.0) -> MomentShadow:
    """The moment relaxation shadow K' of conv(phi_L(S))."""
    if len(spec.W_list) != len(s.generators) + 1:
        raise ValueError("need one weight space per generator plus W_0")
    one = Polynomial.constant(s.variables, 1)
    weights = [one] + list(s.generators)
    blocks = []
    monos: set[tuple[int, ...]] = set()
    for w, h in zip(spec.W_list, weights):
        for b in w.basis:
            if b.vars != s.variables:
                raise ValueError("weight space variables do not match ambient")
        dim, mats = _localizing_data(w.basis, h)
        blocks.append((dim, mats))
        monos.update(mats)
    for b in spec.L.basis:
        for e in b.terms:
            if e not in monos:
                raise ValueError(
                    "L monomial %r is not covered by the localizing span" % (e,))
    const = (0,) * len(s.variables)
    if const not in monos:
        raise ValueError("the constant monomial is not covered; W_0 too small")
    monomials = sorted(monos, key=grlex_key)
    index = {e: t for t, e in enumerate(monomials)}
    dims = [d for d, _ in blocks]
    total = sum(dims)
    nm = len(monomials)

    # LMI variables: y (moment vector) then t
    # over-large ball radii destabilize the solver; keep smaller fallbacks
    pencils = []
    for r in dict.fromkeys([ball_radius, 20.0, 5.0]):
        b0, bfs = _ball_block(nm, r)
        bd = b0.mat.shape[0]
        g0 = SymMatrix(_block_diag([np.zeros((total, total)), b0.mat]))
        g_list = []
        for tindex in range(nm):
            parts = []
            for (d, mats), _ in zip(blocks, dims):
                m = np.zeros((d, d))
                e = monomials[tindex]
                if e in mats:
                    m = mats[e]
                parts.append(m)
            g_list.append(SymMatrix(_block_diag(
                [_block_diag(parts), bfs[tindex].mat])))
        g_list.append(SymMatrix(_block_diag(
            [-np.eye(total), np.zeros((bd, bd))])))
        pencils.append((g0, g_list))

    l_rows = []
    for b in spec.L.basis:
        row = np.zeros(nm + 1)
        for e, c in b.terms.items():
            row[index[e]] = float(c)
        l_rows.append(row)
    const_row = np.zeros(nm + 1)
    const_row[index[const]] = 1.0

    def margin(lam):
        eq_a = np.vstack([const_row] + l_rows)
        eq_b = np.array([1.0] + list(lam))
        for g0, g_list in pencils:
            res = lmi_maximize(g0, g_list, [0.0] * nm + [1.0],
                               eq_a=eq_a, eq_b=eq_b)
            if res.status == "optimal":
                return res.value
            if res.status == "infeasible":
                return -np.inf
        return None

    t_row = np.zeros(nm + 1)
    t_row[nm] = 1.0

    def support(direction):
        obj = np.zeros(nm + 1)
        for c, row in zip(direction, l_rows):
            obj += c * row
        # pin the margin variable so the blocks stay PSD
        for g0, g_list in pencils:
            res = lmi_maximize(g0, g_list, list(obj),
                               eq_a=np.vstack([const_row, t_row]),
                               eq_b=np.array([1.0, 0.0]))
            if res.status == "optimal":
                lam = [float(np.dot(row, res.u)) for row in l_rows]
                return res.value, lam
        return None

    return MomentShadow(l_basis=spec.L, kind="moment",
                        _margin=margin, _support=support)


def k_prime_member(shadow: MomentShadow, lam: Sequence[float]) -> str:
    return shadow.member(lam)


# -- pullback cone construction -------------------------------------------


def umker_shadow(l1: Subspace,
                 maps: Sequence[tuple[Sequence[Polynomial], Subspace]],
                 ball_radius: float = 100.0) -> MomentShadow:
    """Shadow of functionals dual to the pullback SOS cones.

    ``l1`` must list the constant polynomial 1 as its first basis element.
    Each map is (coordinate images over the source variables, square basis
    U in the source ring).  The cone C_i of f in span(l1) with pullback in
    Sigma U_i^2 is parametrized exactly as a Gram shadow; its trace-pairing
    dual asks for a PSD multiplier matching the functional, and the
    returned shadow intersects all duals and slices lam(1) = 1.
    """
    if not l1.basis or not (l1.basis[0] - 1).is_zero():
        raise ValueError("the first basis element of L1 must be the constant 1")
    nb = len(l1.basis)
    duals = []
    for coords, u_basis in maps:
        assignment = dict(zip(l1.basis[0].vars, coords))
        pulled = [f.substitute(assignment) for f in l1.basis]
        system = GramSystem(u_basis.basis)
        rows = system.constraint_rows()
        b_mats = []
        for f, fsrc in zip(pulled, l1.basis):
            c = system.target(f)
            if c is None or exactla.solve(rows, c) is None:
                raise ValueError(
                    "pullback of basis element %r leaves span(U*U)"
                    % dict(fsrc.terms))
            sol = exactla.solve(rows, c)
            b_mats.append(system.mat_from_svec(sol))
        c_mats = [system.mat_from_svec(nv) for nv in exactla.nullspace(rows)]
        duals.append((system.k, b_mats, c_mats))

    # variables: svec entries of one PSD multiplier per map, then t
    svec_pairs = []
    offset = 0
    for d, _, _ in duals:
        svec_pairs.append([(offset, i, j) for i in range(d)
                           for j in range(i, d)])
        offset += 1
    counts = [len(p) for p in svec_pairs]
    nvar = sum(counts)
    dims = [d for d, _, _ in duals]
    total = sum(dims)
    ball0, ball_fs = _ball_block(nvar, ball_radius)
    bdim = ball0.mat.shape[0]

    f0 = SymMatrix(_block_diag([np.zeros((total, total)), ball0.mat]))
    f_list = []
    var = 0
    for bi, (d, _, _) in enumerate(duals):
        base = sum(dims[:bi])
        for i in range(d):
            for j in range(i, d):
                m = np.zeros((total, total))
                m[base + i, base + j] = m[base + j, base + i] = 1.0
                f_list.append(SymMatrix(_block_diag(
                    [m, ball_fs[var].mat])))
                var += 1
    f_list.append(SymMatrix(_block_diag(
        [-np.eye(total), np.zeros((bdim, bdim))])))

    # equality rows: <B_k, Z_i> = lam_k and <C_l, Z_i> = 0 for every map
    eq_rows = []
    rhs_kind = []  # index into lam (or None for the kernel rows)
    var_base = np.cumsum([0] + counts)
    for bi, (d, b_mats, c_mats) in enumerate(duals):
        pairs = [(i, j) for i in range(d) for j in range(i, d)]
        for k, bm in enumerate(b_mats):
            row = np.zeros(nvar + 1)
            for t, (i, j) in enumerate(pairs):
                row[var_base[bi] + t] = bm[i, j] if i == j else 2.0 * bm[i, j]
            eq_rows.append(row)
            rhs_kind.append(k)
        for cm in c_mats:
            row = np.zeros(nvar + 1)
            for t, (i, j) in enumerate(pairs):
                row[var_base[bi] + t] = cm[i, j] if i == j else 2.0 * cm[i, j]
            eq_rows.append(row)
            rhs_kind.append(None)

    if nb < 2:
        raise ValueError("L1 must contain at least one non-constant element")
    lam_basis = Subspace(l1.basis[1:], check=False)

    def full_lam(lam):
        return [1.0] + list(lam)

    def margin(lam):
        lam1 = full_lam(lam)
        eq_a = np.vstack(eq_rows)
        eq_b = np.array([lam1[k] if k is not None else 0.0 for k in rhs_kind])
        res = lmi_maximize(f0, f_list, [0.0] * nvar + [1.0],
                           eq_a=eq_a, eq_b=eq_b)
        if res.status == "optimal":
            return res.value
        if res.status == "infeasible":
            return -np.inf
        return None

    def support(direction):
        # maximize sum_k direction_k lam_k with lam_k tied to the first map
        d0, b_mats, c_mats = duals[0]
        obj = np.zeros(nvar + 1)
        pairs = [(i, j) for i in range(d0) for j in range(i, d0)]
        for k, c in enumerate(direction):
            bm = b_mats[k + 1]
            for t, (i, j) in enumerate(pairs):
                obj[var_base[0] + t] += c * (
                    bm[i, j] if i == j else 2.0 * bm[i, j])
        # keep kernel rows, pin lam(1) = 1, and tie later maps' lam rows to
        # the first map's values so the objective stays well-defined
        extra = []
        grouped: dict[int, list[np.ndarray]] = {}
        for r, k in zip(eq_rows, rhs_kind):
            if k is not None:
                grouped.setdefault(k, []).append(r)
        for k, rows_k in grouped.items():
            if k == 0:
                for r in rows_k:
                    extra.append((r, 1.0))
            else:
                first = rows_k[0]
                for r in rows_k[1:]:
                    extra.append((r - first, 0.0))
        t_row = np.zeros(nvar + 1)
        t_row[nvar] = 1.0
        all_rows = ([r for r, k in zip(eq_rows, rhs_kind) if k is None]
                    + [r for r, _ in extra] + [t_row])
        all_b = ([0.0 for k in rhs_kind if k is None]
                 + [b for _, b in extra] + [0.0])
        eq_a = np.vstack(all_rows) if all_rows else None
        eq_b = np.array(all_b) if all_rows else None
        res = lmi_maximize(f0, f_list, list(obj), eq_a=eq_a, eq_b=eq_b)
        if res.status != "optimal":
            return None
        lam = []
        for k in range(1, nb):
            row = grouped[k][0]
            lam.append(float(np.dot(row, res.u)))
        return res.value, lam

    return MomentShadow(l_basis=lam_basis, kind="umker",
                        _margin=margin, _support=support)


# -- probes ---------------------------------------------------------------


@dataclasses.dataclass
class ProbeReport:
    directions_tried: int
    max_gap: float
    worst_direction: list[float] | None
    worst_lam: list[float] | None
    gaps: list[float]
    solver_failures: int


def grid_points(s: BasicClosedSet, per_dim: int,
                box: float = 2.0) -> list[tuple[float, ...]]:
    """Axis-aligned grid over the box, filtered to S (endpoints included)."""
    import itertools
    axes = [np.linspace(-box, box, per_dim)] * len(s.variables)
    return [pt for pt in itertools.product(*axes) if s.contains(pt)]


def exactness_probe(s: BasicClosedSet, spec: RelaxationSpec, budget: int,
                    seed: int = 0, sample_count: int = 512,
                    box: float = 2.0,
                    grid_per_dim: int | None = None) -> ProbeReport:
    """Largest observed gap between sup over K' and sup over sampled S."""
    if budget <= 0:
        return ProbeReport(0, 0.0, None, None, [], 0)
    shadow = build_K_prime(s, spec)
    points = s.sample(sample_count, seed=seed, box=box)
    if grid_per_dim:
        points = points + grid_points(s, grid_per_dim, box)
    images = [evaluation_functional(spec.L, p) for p in points]
    rng = random.Random(seed + 1)
    nb = len(spec.L.basis)
    gaps = []
    failures = 0
    worst = (-np.inf, None, None)
    for _ in range(budget):
        c = [rng.gauss(0.0, 1.0) for _ in range(nb)]
        norm = max(float(np.linalg.norm(c)), 1e-12)
        c = [ci / norm for ci in c]
        res = shadow.support(c)
        if res is None:
            failures += 1
            continue
        sdp_val, lam = res
        emp = max(sum(ci * vi for ci, vi in zip(c, img)) for img in images)
        gap = sdp_val - emp
        gaps.append(gap)
        if gap > worst[0]:
            worst = (gap, c, lam)
    return ProbeReport(
        directions_tried=budget,
        max_gap=worst[0] if gaps else 0.0,
        worst_direction=worst[1],
        worst_lam=worst[2],
        gaps=gaps,
        solver_failures=failures)


@dataclasses.dataclass
class HullReport:
    found: bool
    separator: Polynomial | None
    lam_value: float | None
    min_on_samples: float | None
    confidence: str  # certified | sampled-only | none
    samples: int


def _weighted_sos_certify(g: Polynomial, s: BasicClosedSet) -> bool:
    """Try g = sigma_0 + sum sigma_i h_i with exact SOS sigma's."""
    target_deg = int(max([g.degree()] +
                         [h.degree() for h in s.generators] or [0]))
    target_deg += target_deg % 2
    weights = [Polynomial.constant(s.variables, 1)] + list(s.generators)
    systems = []
    for h in weights:
        cap = (target_deg - int(h.degree())) // 2
        if cap < 0:
            systems.append(None)
            continue
        if cap == 0:
            basis = Subspace([Polynomial.constant(s.variables, 1)],
                             check=False)
        else:
            basis = monomial_subspace(len(s.variables), cap,
                                      include_constant=True,
                                      variables=s.variables)
        systems.append(GramSystem(basis.basis))
    live = [(sys_, h) for sys_, h in zip(systems, weights) if sys_ is not None]
    monos: set[tuple[int, ...]] = set(g.terms)
    per_block = []
    for system, h in live:
        mats: dict[tuple[int, ...], list[list[Fraction]]] = {}
        for t, e_base in enumerate(system.monomials):
            for eh, ch in h.terms.items():
                e = tuple(a + b for a, b in zip(e_base, eh))
                acc = mats.setdefault(
                    e, [[Fraction(0)] * system.k for _ in range(system.k)])
                for i in range(system.k):
                    for j in range(system.k):
                        acc[i][j] += Fraction(ch) * system.a_mats[t][i][j]
        per_block.append((system, mats))
        monos.update(mats)
    monomials = sorted(monos, key=grlex_key)
    # exact constraint rows over concatenated svec variables
    all_pairs = []
    rows = []
    c_vec = []
    for e in monomials:
        row: list[Fraction] = []
        for system, mats in per_block:
            m = mats.get(e)
            for i, j in system.pairs:
                if m is None:
                    row.append(Fraction(0))
                else:
                    row.append(m[i][j] if i == j else 2 * m[i][j])
        rows.append(row)
        c_vec.append(Fraction(g.terms.get(e, 0)))
    for system, _ in per_block:
        all_pairs.extend(system.pairs)
    g0 = exactla.solve(rows, c_vec)
    if g0 is None:
        return False
    null = exactla.nullspace(rows)
    sizes = [len(system.pairs) for system, _ in per_block]
    dims = [system.k for system, _ in per_block]
    total = sum(dims)

    def to_mats(vec):
        out = []
        pos = 0
        for (system, _), sz in zip(per_block, sizes):
            out.append(system.mat_from_svec(vec[pos:pos + sz]))
            pos += sz
        return out

    f0_parts = to_mats(g0)
    nw = len(null)
    radius = 10.0 * (1.0 + max(float(np.abs(m).max(initial=0.0))
                               for m in f0_parts)) * total
    if nw:
        ball0, ball_fs = _ball_block(nw, radius)
        f0 = SymMatrix(_block_diag([_block_diag(f0_parts), ball0.mat]))
        f_list = [SymMatrix(_block_diag([_block_diag(to_mats(nv)), bf.mat]))
                  for nv, bf in zip(null, ball_fs)]
        f_list.append(SymMatrix(_block_diag(
            [-np.eye(total), np.zeros_like(ball0.mat)])))
        res = lmi_maximize(f0, f_list, [0.0] * nw + [1.0])
    else:
        res = lmi_maximize(SymMatrix(_block_diag(f0_parts)),
                           [SymMatrix(-np.eye(total))], [1.0])
    if res.status != "optimal":
        return False
    svec = list(g0)
    for wv, nv in zip(res.u[:nw], null):
        svec = [a + Fraction(wv).limit_denominator(10 ** 9) * b
                for a, b in zip(svec, nv)]
    rounded = [Fraction(float(v)).limit_denominator(10 ** 6) for v in svec]
    proj = _project_exact(rounded, rows, c_vec, all_pairs)
    if proj is None:
        return False
    pos = 0
    for (system, _), sz in zip(per_block, sizes):
        cert = _exact_cert_from_svec(
            system, proj[pos:pos + sz],
            Subspace(system.u_basis, check=False))
        if cert is None:
            return False
        pos += sz
    return True


def hull_certificate_check(lam: Sequence[float], s: BasicClosedSet,
                           l_sub: Subspace, budget: int = 200,
                           seed: int = 0, box: float = 2.0,
                           dense_samples: int = 2000) -> HullReport:
    """Search for g in R + span(L) non-negative on S with lam'(g) < 0."""
    points = s.sample(max(budget, 50), seed=seed, box=box)
    nb = len(l_sub.basis)
    # variables: c_0 (constant) and c_1..c_nb; maximize -lam'(g)
    obj = np.array([1.0] + [float(v) for v in lam])
    a_ub = []
    for p in points:
        a_ub.append([-1.0] + [-b.evaluate_float(p) for b in l_sub.basis])
    res = linprog(obj, A_ub=np.array(a_ub), b_ub=np.zeros(len(points)),
                  bounds=[(-1.0, 1.0)] * (nb + 1), method="highs")
    if res.status != 0 or res.fun >= -TOL_OUT:
        return HullReport(False, None, None, None, "none", len(points))
    coeffs = [Fraction(v).limit_denominator(10 ** 4) for v in res.x]
    g = Polynomial.constant(s.variables, coeffs[0])
    for cv, b in zip(coeffs[1:], l_sub.basis):
        g = g + b * cv
    # the LP constant is tuned to the coarse samples; lift it by the worst
    # deficit seen on a dense sample so g stays non-negative there
    per_dim = max(11, int(round(dense_samples ** (1.0 / len(s.variables)))))
    dense = (s.sample(dense_samples, seed=seed + 17, box=box)
             + grid_points(s, per_dim, box))
    deficit = min(g.evaluate_float(p) for p in dense)
    if deficit < 0:
        bump = Fraction(-deficit * (1.0 + 1e-6)).limit_denominator(10 ** 9)
        g = g + bump
        coeffs[0] += bump
    lam_value = float(coeffs[0]) + sum(
        float(cv) * float(v) for cv, v in zip(coeffs[1:], lam))
    if lam_value >= -TOL_OUT:
        return HullReport(False, None, None, None, "none", len(dense))
    min_val = min(g.evaluate_float(p) for p in dense)
    if min_val < -1e-9:
        return HullReport(False, None, None, None, "none", len(dense))
    confidence = "sampled-only"
    # a slightly lifted separator is often certifiable while still separating
    for delta in (Fraction(0), Fraction(1, 10 ** 6), Fraction(1, 10 ** 4),
                  Fraction(1, 100)):
        if lam_value + float(delta) >= -TOL_OUT:
            break
        if _weighted_sos_certify(g + delta, s):
            g = g + delta
            lam_value += float(delta)
            confidence = "certified"
            break
    return HullReport(True, g, lam_value, min_val, confidence, len(dense))
