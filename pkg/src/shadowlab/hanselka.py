"""Square-root lifts of strictly feasible spectrahedral cone representations.

Given a homogeneous pencil M(x) + N(y), the lift adjoins a symbolic
symmetric matrix Z subject to the relation Z^2 = M(x) + N(y) and works in
the subspace U spanned by the entries z_uv.  Every linear functional
f = sum a_i x_i that is non-negative on the projected cone then equals the
fixed sum of squares sum_uv ((ZV)_uv)^2 on the lifted variety, where
B = V^2 is a PSD matrix pairing to (a, 0) against the pencil coefficients.

Certificates are verified on two levels: the polynomial identity
<ZV, ZV> = <V^2, Z^2> is expanded exactly in the z-variables, and the
numeric identity sum a_i xi_i = ||AV||_F^2 (A the PSD square root of a
sampled pencil value) is checked on random cone points.
"""

from __future__ import annotations

import dataclasses
import random
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import exactla
from .polys import Polynomial, Subspace
from .sdp import SymMatrix
from .spectra import (NotStrictlyFeasible, Pencil, Shadow, cone_witness_direction,
                      dual_cone_member, strict_point)

TOL_WITNESS = 1e-7
RATIONALIZE_DENOM = 10 ** 6


def z_variable_names(d: int) -> list[str]:
    return ["z_%d_%d" % (mu + 1, nu + 1)
            for mu in range(d) for nu in range(mu, d)]


def _symbolic_z(d: int) -> tuple[tuple[str, ...], list[list[Polynomial]]]:
    """The symmetric matrix of z-variables as rational polynomials."""
    names = tuple(z_variable_names(d))
    z = [[None] * d for _ in range(d)]
    for mu in range(d):
        for nu in range(mu, d):
            p = Polynomial.variable(names, "z_%d_%d" % (mu + 1, nu + 1))
            z[mu][nu] = p
            z[nu][mu] = p
    return names, z


@dataclasses.dataclass
class LiftData:
    m_list: list[SymMatrix]
    n_list: list[SymMatrix]
    d: int
    x_names: tuple[str, ...]
    y_names: tuple[str, ...]
    z_names: tuple[str, ...]
    U: Subspace
    strict_witness: tuple[list[float], list[float], float]

    @property
    def pencil(self) -> Pencil:
        return Pencil(SymMatrix.zeros(self.d), self.m_list, self.n_list)


@dataclasses.dataclass
class NotNonnegative:
    """a takes a negative value on the cone at the given point."""
    direction: list[float]
    value: float


@dataclasses.dataclass
class LiftCertificate:
    a: list[float]
    b_matrix: SymMatrix
    v_matrix: SymMatrix
    squares: list[Polynomial]  # the d^2 linear forms (ZV)_uv in the z-vars
    exact: bool
    b_exact: list[list[Fraction]] | None = None
    symbolic_checked: bool = False


def build_lift(m_list: Sequence[SymMatrix],
               n_list: Sequence[SymMatrix] = ()) -> LiftData:
    """Assemble the lift data for the cone {exists y: M(x) + N(y) >= 0}.

    Refuses pencils without a strictly feasible point; such inputs need the
    usual preprocessing first (restrict to the linear hull of the cone so
    the representation becomes strictly feasible), which is not automated
    here.
    """
    m_list = list(m_list)
    n_list = list(n_list)
    if not m_list:
        raise ValueError("need at least one M coefficient")
    d = m_list[0].dim
    pencil = Pencil(SymMatrix.zeros(d), m_list, n_list)
    xi, eta, margin = strict_point(Shadow(pencil, is_cone=True))
    if margin <= TOL_WITNESS:
        raise NotStrictlyFeasible(
            "pencil admits no strictly feasible point at margin > %g"
            % TOL_WITNESS)
    z_names, z = _symbolic_z(d)
    u_basis = [z[mu][nu] for mu in range(d) for nu in range(mu, d)]
    return LiftData(
        m_list=m_list, n_list=n_list, d=d,
        x_names=tuple("x%d" % (i + 1) for i in range(len(m_list))),
        y_names=tuple("y%d" % (j + 1) for j in range(len(n_list))),
        z_names=z_names,
        U=Subspace(u_basis, check=False),
        strict_witness=(xi, eta, margin))


def _rationalize_b(b_mat: np.ndarray, m_list: Sequence[SymMatrix],
                   n_list: Sequence[SymMatrix], a: Sequence[float]
                   ) -> list[list[Fraction]] | None:
    """Exact PSD B matching the trace constraints, when a is rational-friendly."""
    a_frac = [Fraction(v).limit_denominator(RATIONALIZE_DENOM) for v in a]
    if any(abs(float(af) - float(v)) > 1e-9 for af, v in zip(a_frac, a)):
        return None
    d = b_mat.shape[0]
    pairs = [(i, j) for i in range(d) for j in range(i, d)]
    rows = []
    rhs = []
    for m, target in list(zip(m_list, a_frac)) + [(n, Fraction(0))
                                                  for n in n_list]:
        row = []
        for i, j in pairs:
            c = Fraction(m.mat[i, j]).limit_denominator(RATIONALIZE_DENOM)
            row.append(c if i == j else 2 * c)
        rows.append(row)
        rhs.append(target)
    for bound in (RATIONALIZE_DENOM, 10 ** 9):
        guess = [Fraction(b_mat[i, j]).limit_denominator(bound)
                 for i, j in pairs]
        # project exactly onto the trace constraints
        from .soscert import _project_exact
        proj = _project_exact(guess, rows, rhs, pairs)
        if proj is None:
            return None
        b = [[Fraction(0)] * d for _ in range(d)]
        for (i, j), v in zip(pairs, proj):
            b[i][j] = b[j][i] = v
        if exactla.ldl_psd(b) is not None:
            return b
    return None


def symbolic_identity_holds(v_exact: list[list[Fraction]], d: int) -> bool:
    """Expand <ZV, ZV> and <V^2, Z^2> in the z-variables and compare exactly.

    The identity holds for every symmetric V, so checking it on a rational
    surrogate of the certificate's V verifies the algebraic mechanism the
    certificate relies on.
    """
    names, z = _symbolic_z(d)
    zero = Polynomial.zero(names)
    # ZV entries
    zv = [[zero] * d for _ in range(d)]
    for mu in range(d):
        for nu in range(d):
            acc = zero
            for k in range(d):
                if v_exact[k][nu]:
                    acc = acc + z[mu][k] * v_exact[k][nu]
            zv[mu][nu] = acc
    lhs = zero
    for mu in range(d):
        for nu in range(d):
            lhs = lhs + zv[mu][nu] * zv[mu][nu]
    # V^2 and Z^2
    v2 = [[sum((v_exact[i][k] * v_exact[k][j] for k in range(d)), Fraction(0))
           for j in range(d)] for i in range(d)]
    rhs = zero
    for i in range(d):
        for j in range(d):
            if v2[i][j] == 0:
                continue
            z2ij = zero
            for k in range(d):
                z2ij = z2ij + z[i][k] * z[k][j]
            rhs = rhs + z2ij * v2[i][j]
    return lhs == rhs


def lift_certificate(lift: LiftData, a: Sequence[float]
                     ) -> LiftCertificate | NotNonnegative:
    """Uniform SOS certificate for f = sum a_i x_i on the lifted cone."""
    a = [float(v) for v in a]
    if len(a) != len(lift.m_list):
        raise ValueError("functional length does not match the pencil")
    extended = Pencil(SymMatrix.zeros(lift.d),
                      lift.m_list + lift.n_list)
    target = a + [0.0] * len(lift.n_list)
    b = dual_cone_member(extended, target, verify_strict=False)
    if b is None:
        direction = cone_witness_direction(lift.pencil, a)
        if direction is None:
            raise RuntimeError(
                "no PSD pairing matrix found and no negative direction "
                "either; numerical failure")
        xi = direction[:len(lift.m_list)]
        value = float(np.dot(a, xi))
        return NotNonnegative(direction=xi, value=value)
    b_exact = _rationalize_b(b.mat, lift.m_list, lift.n_list, a)
    exact = b_exact is not None
    if exact:
        b = SymMatrix(np.array([[float(x) for x in row] for row in b_exact]))
    v = b.psd_sqrt()
    d = lift.d
    names, z = _symbolic_z(d)
    zero = Polynomial.zero(names)
    squares = []
    for mu in range(d):
        for nu in range(d):
            acc = zero
            for k in range(d):
                coef = Fraction(v.mat[k, nu]).limit_denominator(10 ** 12)
                if coef:
                    acc = acc + z[mu][k] * coef
            squares.append(acc)
    v_surrogate = [[Fraction(v.mat[i, j]).limit_denominator(RATIONALIZE_DENOM)
                    for j in range(d)] for i in range(d)]
    for i in range(d):
        for j in range(d):
            v_surrogate[j][i] = v_surrogate[i][j]
    if not symbolic_identity_holds(v_surrogate, d):
        raise RuntimeError("symbolic identity check failed; refusing to "
                           "issue the certificate")
    return LiftCertificate(
        a=a, b_matrix=b, v_matrix=v, squares=squares, exact=exact,
        b_exact=b_exact, symbolic_checked=True)


def verify_lift_numeric(lift: LiftData, cert: LiftCertificate,
                        samples: int = 1000, seed: int = 0,
                        max_tries: int = 500000) -> float:
    """Max residual of the certificate identity on random cone points.

    Rejection-samples (xi, eta) with W = M(xi) + N(eta) PSD, takes the PSD
    square root A of W, and compares sum a_i xi_i against the sum of the
    evaluated squares ((AV)_uv)^2.
    """
    rng = random.Random(seed)
    n, m, d = len(lift.m_list), len(lift.n_list), lift.d
    v = cert.v_matrix.mat
    worst = 0.0
    found = 0
    tries = 0
    while found < samples and tries < max_tries:
        tries += 1
        xi = [rng.uniform(-1.0, 1.0) for _ in range(n)]
        eta = [rng.uniform(-1.0, 1.0) for _ in range(m)]
        w = lift.pencil.eval(xi, eta)
        if w.min_eig() < 0.0:
            continue
        found += 1
        a_mat = w.psd_sqrt().mat
        av = a_mat @ v
        residual = abs(float(np.dot(cert.a, xi)) - float(np.sum(av * av)))
        worst = max(worst, residual)
    if found < samples:
        raise ValueError(
            "could not rejection-sample %d PSD pencil values" % samples)
    return worst
