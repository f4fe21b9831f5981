"""Spectrahedra, spectrahedral shadows, and explicit cone duality.

A :class:`Pencil` is the data A + sum_i xi_i B_i + sum_j eta_j C_j of
symmetric matrices; a :class:`Shadow` is the projection of its feasible set
onto the xi coordinates.  Membership, strict feasibility, and the explicit
trace-pairing representation of the dual cone are all answered through the
interior-point solver in :mod:`shadowlab.sdp`.

Membership verdicts are three-valued: points within tolerance of the
boundary come back ``Borderline`` rather than being coerced to a side.
"""

from __future__ import annotations

import dataclasses
from typing import Sequence

import numpy as np

from .sdp import LmiResult, SymMatrix, lmi_maximize

IN = "In"
OUT = "Out"
BORDERLINE = "Borderline"

#: membership margin: strictly inside above, certified outside below
TOL_IN = 1e-7
TOL_OUT = 1e-6

BALL_RADIUS = 1e3


class NotStrictlyFeasible(Exception):
    pass


class Pencil:
    """Symmetric pencil A + sum xi_i B_i + sum eta_j C_j."""

    def __init__(self, a: SymMatrix, b_list: Sequence[SymMatrix],
                 c_list: Sequence[SymMatrix] = ()):
        self.a = a
        self.b_list = list(b_list)
        self.c_list = list(c_list)
        if not self.b_list:
            raise ValueError("need at least one ambient coefficient matrix")
        d = a.dim
        for m in self.b_list + self.c_list:
            if m.dim != d:
                raise ValueError("pencil matrices must share one dimension")

    @property
    def dim(self) -> int:
        return self.a.dim

    @property
    def n(self) -> int:
        return len(self.b_list)

    @property
    def m(self) -> int:
        return len(self.c_list)

    def eval(self, xi: Sequence[float], eta: Sequence[float] = ()
             ) -> SymMatrix:
        xi = list(xi)
        eta = list(eta)
        if len(xi) != self.n or len(eta) != self.m:
            raise ValueError(
                "expected %d ambient and %d lifted coordinates, got %d and %d"
                % (self.n, self.m, len(xi), len(eta)))
        acc = self.a.mat.copy()
        for v, b in zip(xi, self.b_list):
            acc = acc + float(v) * b.mat
        for v, c in zip(eta, self.c_list):
            acc = acc + float(v) * c.mat
        return SymMatrix(acc)

    def is_homogeneous(self) -> bool:
        return not self.a.mat.any()

    def to_json(self) -> dict:
        return {
            "d": self.dim,
            "A": self.a.to_json(),
            "B": [b.to_json() for b in self.b_list],
            "C": [c.to_json() for c in self.c_list],
        }

    @staticmethod
    def from_json(data: dict) -> "Pencil":
        return Pencil(
            SymMatrix.from_json(data["A"]),
            [SymMatrix.from_json(b) for b in data["B"]],
            [SymMatrix.from_json(c) for c in data.get("C", [])])


@dataclasses.dataclass
class Shadow:
    pencil: Pencil
    is_cone: bool = False

    def __post_init__(self):
        if self.is_cone and self.pencil.a.mat.any():
            raise ValueError("a cone shadow requires a homogeneous pencil (A = 0)")

    @property
    def ambient_dim(self) -> int:
        return self.pencil.n

    def to_json(self) -> dict:
        return {"pencil": self.pencil.to_json(), "is_cone": self.is_cone}

    @staticmethod
    def from_json(data: dict) -> "Shadow":
        return Shadow(Pencil.from_json(data["pencil"]),
                      bool(data.get("is_cone", False)))


def _ball_block(k: int, radius: float) -> tuple[SymMatrix, list[SymMatrix]]:
    """LMI block [[r, u^T], [u, r I]] bounding ||u|| <= r."""
    f0 = np.zeros((k + 1, k + 1))
    f0[0, 0] = radius
    f0[1:, 1:] = radius * np.eye(k)
    fs = []
    for j in range(k):
        m = np.zeros((k + 1, k + 1))
        m[0, 1 + j] = m[1 + j, 0] = 1.0
        fs.append(SymMatrix(m))
    return SymMatrix(f0), fs


def _block_diag(mats: Sequence[np.ndarray]) -> np.ndarray:
    total = sum(m.shape[0] for m in mats)
    out = np.zeros((total, total))
    pos = 0
    for m in mats:
        k = m.shape[0]
        out[pos:pos + k, pos:pos + k] = m
        pos += k
    return out


def membership_margin(pencil: Pencil, xi: Sequence[float],
                      ball_radius: float = BALL_RADIUS) -> LmiResult:
    """max t with pencil(xi, eta) - t*I >= 0 over eta (norm-bounded)."""
    d = pencil.dim
    m = pencil.m
    base = pencil.eval(xi, [0.0] * m).mat
    if m == 0:
        f0 = SymMatrix(base)
        return lmi_maximize(f0, [SymMatrix(-np.eye(d))], [1.0])
    ball0, ball_fs = _ball_block(m, ball_radius)
    f0 = SymMatrix(_block_diag([base, ball0.mat]))
    f_list = []
    zero_ball = np.zeros_like(ball0.mat)
    for j in range(m):
        f_list.append(SymMatrix(_block_diag(
            [pencil.c_list[j].mat, ball_fs[j].mat])))
    f_list.append(SymMatrix(_block_diag([-np.eye(d), zero_ball])))
    objective = [0.0] * m + [1.0]
    return lmi_maximize(f0, f_list, objective)


def shadow_contains(shadow: Shadow, xi: Sequence[float],
                    tol_in: float = TOL_IN, tol_out: float = TOL_OUT) -> str:
    if len(xi) != shadow.ambient_dim:
        raise ValueError("point dimension mismatch")
    res = membership_margin(shadow.pencil, xi)
    if res.status == "unbounded":
        return IN
    if res.status != "optimal":
        return BORDERLINE
    if res.value > tol_in:
        return IN
    if res.value < -tol_out:
        return OUT
    return BORDERLINE


def strict_point(shadow: Shadow, ball_radius: float = 10.0,
                 tol: float = TOL_IN) -> tuple[list[float], list[float], float]:
    """A strictly feasible (xi, eta) maximizing the smallest eigenvalue.

    Raises NotStrictlyFeasible when no norm-bounded point achieves a
    positive margin.
    """
    pencil = shadow.pencil
    d, n, m = pencil.dim, pencil.n, pencil.m
    k = n + m
    ball0, ball_fs = _ball_block(k, ball_radius)
    f0 = SymMatrix(_block_diag([pencil.a.mat, ball0.mat]))
    f_list = []
    for j, mat in enumerate(pencil.b_list + pencil.c_list):
        f_list.append(SymMatrix(_block_diag([mat.mat, ball_fs[j].mat])))
    f_list.append(SymMatrix(_block_diag(
        [-np.eye(d), np.zeros_like(ball0.mat)])))
    res = lmi_maximize(f0, f_list, [0.0] * k + [1.0])
    if res.status != "optimal" or res.value <= tol:
        raise NotStrictlyFeasible(
            "pencil admits no strictly feasible point within radius %g "
            "(margin %s); preprocess to a strictly feasible representation "
            "first" % (ball_radius,
                       "%.3e" % res.value if res.status == "optimal" else res.status))
    u = res.u
    return list(u[:n]), list(u[n:n + m]), float(res.value)


def dual_cone_point(pencil: Pencil, b: SymMatrix,
                    tol: float = 1e-9) -> list[float]:
    """The trace pairing (<B,M_1>, ..., <B,M_n>) for PSD B."""
    if pencil.a.mat.any() or pencil.m:
        raise ValueError("dual_cone_point needs a homogeneous pencil in xi only")
    if b.min_eig() < -tol * (1.0 + np.abs(b.mat).max()):
        raise ValueError("B is not PSD")
    return [b.inner(mi) for mi in pencil.b_list]


def dual_cone_member(pencil: Pencil, a: Sequence[float],
                     verify_strict: bool = True,
                     tol: float = TOL_IN) -> SymMatrix | None:
    """A PSD matrix B with <B, M_i> = a_i, or None when a is not in the dual.

    Requires the cone pencil to be strictly feasible (the hypothesis of the
    explicit duality representation); set ``verify_strict=False`` only when
    that has already been established for this pencil.
    """
    if pencil.a.mat.any() or pencil.m:
        raise ValueError("dual_cone_member needs a homogeneous pencil in xi only")
    if verify_strict:
        strict_point(Shadow(pencil, is_cone=True))
    a = np.asarray(a, dtype=float)
    d = pencil.dim
    sym_basis = []
    for i in range(d):
        for j in range(i, d):
            e = np.zeros((d, d))
            e[i, j] = e[j, i] = 1.0
            sym_basis.append(e)
    k = len(sym_basis)
    radius = BALL_RADIUS * (1.0 + np.linalg.norm(a))
    ball0, ball_fs = _ball_block(k, radius)
    f0 = SymMatrix(_block_diag([np.zeros((d, d)), ball0.mat]))
    f_list = [SymMatrix(_block_diag([e, bf.mat]))
              for e, bf in zip(sym_basis, ball_fs)]
    f_list.append(SymMatrix(_block_diag(
        [-np.eye(d), np.zeros_like(ball0.mat)])))
    eq_rows = []
    for mi in pencil.b_list:
        eq_rows.append([float(np.tensordot(e, mi.mat)) for e in sym_basis]
                       + [0.0])
    res = lmi_maximize(f0, f_list, [0.0] * k + [1.0],
                       eq_a=np.array(eq_rows), eq_b=a)
    if res.status == "infeasible":
        return None
    if res.status != "optimal":
        return None
    if res.value < -tol:
        return None
    b_mat = np.zeros((d, d))
    for coef, e in zip(res.u[:k], sym_basis):
        b_mat += coef * e
    return SymMatrix(b_mat)


def cone_witness_direction(pencil: Pencil, a: Sequence[float],
                           tol: float = TOL_IN) -> list[float] | None:
    """A cone point xi with a.xi < 0, certifying a outside the dual cone."""
    a = np.asarray(a, dtype=float)
    n, m = pencil.n, pencil.m
    ball0, ball_fs = _ball_block(n + m, 1.0)
    f0 = SymMatrix(_block_diag([np.zeros((pencil.dim, pencil.dim)), ball0.mat]))
    f_list = [SymMatrix(_block_diag([b.mat, bf.mat]))
              for b, bf in zip(pencil.b_list + pencil.c_list, ball_fs)]
    res = lmi_maximize(f0, f_list, list(-a) + [0.0] * m)
    if res.status != "optimal" or res.value <= tol:
        return None
    return list(res.u[:n])


def homogenize_shadow(shadow: Shadow) -> Shadow:
    """Cone over {1} x K: the constant matrix becomes the new coordinate's."""
    p = shadow.pencil
    d = p.dim
    new_pencil = Pencil(SymMatrix.zeros(d), [p.a] + p.b_list, p.c_list)
    return Shadow(new_pencil, is_cone=True)


def linear_image(shadow: Shadow, t_matrix) -> Shadow:
    """Image of the shadow under xi -> T xi.

    Parametrizes the fiber T xi = xi' as xi = T^+ xi' + N w and moves the
    old ambient directions into the lifted variables.
    """
    t = np.atleast_2d(np.asarray(t_matrix, dtype=float))
    p = shadow.pencil
    if t.shape[1] != p.n:
        raise ValueError("map expects %d columns" % p.n)
    pinv = np.linalg.pinv(t)
    _, sv, vt = np.linalg.svd(t)
    ntol = max(t.shape) * (sv[0] if sv.size else 0.0) * 1e-12
    null = vt[(sv > ntol).sum():].T  # n x (n - rank)
    b_new = []
    for col in range(t.shape[0]):
        acc = np.zeros((p.dim, p.dim))
        for i in range(p.n):
            acc += pinv[i, col] * p.b_list[i].mat
        b_new.append(SymMatrix(acc))
    c_new = []
    for j in range(null.shape[1]):
        acc = np.zeros((p.dim, p.dim))
        for i in range(p.n):
            acc += null[i, j] * p.b_list[i].mat
        c_new.append(SymMatrix(acc))
    c_new.extend(p.c_list)
    return Shadow(Pencil(p.a, b_new, c_new), is_cone=False)


def intersect(s1: Shadow, s2: Shadow) -> Shadow:
    if s1.ambient_dim != s2.ambient_dim:
        raise ValueError("ambient dimensions differ")
    p1, p2 = s1.pencil, s2.pencil
    a = SymMatrix(_block_diag([p1.a.mat, p2.a.mat]))
    b_list = [SymMatrix(_block_diag([b1.mat, b2.mat]))
              for b1, b2 in zip(p1.b_list, p2.b_list)]
    zero1 = np.zeros((p1.dim, p1.dim))
    zero2 = np.zeros((p2.dim, p2.dim))
    c_list = [SymMatrix(_block_diag([c.mat, zero2])) for c in p1.c_list]
    c_list += [SymMatrix(_block_diag([zero1, c.mat])) for c in p2.c_list]
    return Shadow(Pencil(a, b_list, c_list),
                  is_cone=s1.is_cone and s2.is_cone)


def convex_hull_union(s1: Shadow, s2: Shadow) -> Shadow:
    """Best-effort perspective construction for conv(K1 union K2).

    Exact when both shadows have nonempty interior; the lifted variables are
    (x1, eta1, eta2, lambda) with x = x1 + x2 and lambda in [0, 1].
    """
    if s1.ambient_dim != s2.ambient_dim:
        raise ValueError("ambient dimensions differ")
    p1, p2 = s1.pencil, s2.pencil
    n = p1.n
    d1, d2 = p1.dim, p2.dim

    def build(block1, block2, lam1, lam2):
        return SymMatrix(_block_diag(
            [block1, block2, np.array([[lam1]]), np.array([[lam2]])]))

    z1 = np.zeros((d1, d1))
    z2 = np.zeros((d2, d2))
    # constant part: block2 carries A2 (at lambda = 0 the second set is active)
    f_a = build(z1, p2.a.mat, 0.0, 1.0)
    # ambient x enters only the second block (x2 = x - x1)
    b_list = [build(z1, p2.b_list[i].mat, 0.0, 0.0) for i in range(n)]
    c_list = []
    # x1: adds B1 to block one, subtracts B2 from block two
    for i in range(n):
        c_list.append(build(p1.b_list[i].mat, -p2.b_list[i].mat, 0.0, 0.0))
    for c in p1.c_list:
        c_list.append(build(c.mat, z2, 0.0, 0.0))
    for c in p2.c_list:
        c_list.append(build(z1, c.mat, 0.0, 0.0))
    # lambda: interpolates the constant parts, bounded to [0, 1]
    c_list.append(build(p1.a.mat, -p2.a.mat, 1.0, -1.0))
    return Shadow(Pencil(f_a, b_list, c_list), is_cone=False)
