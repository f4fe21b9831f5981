"""Dense symmetric matrices and a small primal-dual interior-point SDP solver.

Standard form handled by :func:`solve_sdp`::

    minimize    <C, X>
    subject to  <A_i, X> = b_i   (i = 1..m)
                X >= 0  (PSD)

The solver runs a homogeneous self-dual embedding with HKM search
directions, dense Cholesky factorizations, and a Mehrotra-style adaptive
centering parameter.  Infeasibility is detected through the tau/kappa ratio
of the embedding and reported with a Farkas-type certificate.  Everything is
plain numpy with a fixed iteration schedule, so repeated runs on identical
input produce bit-identical output.

:func:`lmi_maximize` is the LMI-form front end used throughout the package:
maximize a linear objective over {u : F0 + sum_l u_l F_l >= 0}, with optional
affine equality constraints on u eliminated through a nullspace
parametrization.
"""

from __future__ import annotations

import dataclasses
from typing import Sequence

import numpy as np

TOL_PSD = 1e-9
TOL_FEAS = 1e-8
TOL_GAP = 1e-8
TOL_INFEAS = 1e-8
MAX_ITER = 200


class SdpError(Exception):
    pass


class NumericalFailure(SdpError):
    pass


class SymMatrix:
    """Dense symmetric matrix; thin wrapper enforcing symmetry."""

    __slots__ = ("mat",)

    def __init__(self, entries):
        a = np.asarray(entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("expected a square matrix")
        if not np.allclose(a, a.T, atol=1e-12 * (1.0 + np.abs(a).max(initial=0.0))):
            raise ValueError("matrix is not symmetric")
        self.mat = 0.5 * (a + a.T)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    @staticmethod
    def zeros(d: int) -> "SymMatrix":
        return SymMatrix(np.zeros((d, d)))

    @staticmethod
    def identity(d: int) -> "SymMatrix":
        return SymMatrix(np.eye(d))

    @staticmethod
    def diag(values) -> "SymMatrix":
        return SymMatrix(np.diag(np.asarray(values, dtype=float)))

    def inner(self, other: "SymMatrix") -> float:
        """Trace inner product <A, B> = tr(AB)."""
        if self.dim != other.dim:
            raise ValueError("dimension mismatch: %d vs %d"
                             % (self.dim, other.dim))
        return float(np.tensordot(self.mat, other.mat))

    def min_eig(self) -> float:
        return float(np.linalg.eigvalsh(self.mat)[0])

    def psd_sqrt(self, tol: float = TOL_PSD) -> "SymMatrix":
        """Symmetric PSD square root; small negative eigenvalues clipped."""
        w, v = np.linalg.eigh(self.mat)
        if w[0] < -tol * (1.0 + abs(w[-1])):
            raise ValueError("matrix is not PSD (min eig %.3e)" % w[0])
        w = np.clip(w, 0.0, None)
        return SymMatrix(v @ np.diag(np.sqrt(w)) @ v.T)

    def to_json(self) -> list[list[float]]:
        return self.mat.tolist()

    @staticmethod
    def from_json(rows) -> "SymMatrix":
        return SymMatrix(rows)

    def __repr__(self):
        return "SymMatrix(%r)" % self.mat.tolist()


def inner(a: SymMatrix, b: SymMatrix) -> float:
    return a.inner(b)


@dataclasses.dataclass
class SdpProblem:
    objective: SymMatrix
    constraints: list[tuple[SymMatrix, float]]
    sense: str = "minimize"  # or "feasibility"

    def __post_init__(self):
        d = self.objective.dim
        for a, _ in self.constraints:
            if a.dim != d:
                raise ValueError("constraint dimension mismatch")

    def to_json(self) -> dict:
        return {
            "d": self.objective.dim,
            "C": self.objective.to_json(),
            "constraints": [{"A": a.to_json(), "b": b}
                            for a, b in self.constraints],
            "sense": self.sense,
        }

    @staticmethod
    def from_json(data: dict) -> "SdpProblem":
        return SdpProblem(
            SymMatrix.from_json(data["C"]),
            [(SymMatrix.from_json(c["A"]), float(c["b"]))
             for c in data["constraints"]],
            data.get("sense", "minimize"))


@dataclasses.dataclass
class SdpSolution:
    status: str  # Optimal | Infeasible | Unbounded | NumericalFailure
    X: SymMatrix | None = None
    y: np.ndarray | None = None
    S: SymMatrix | None = None
    gap: float = float("nan")
    ray_y: np.ndarray | None = None
    ray_X: SymMatrix | None = None
    iterations: int = 0


def _step_to_boundary(m: np.ndarray, dm: np.ndarray) -> float:
    """Largest alpha with m + alpha*dm still PSD (m assumed PD)."""
    try:
        l = np.linalg.cholesky(m)
    except np.linalg.LinAlgError:
        return 0.0
    w = np.linalg.solve(l, np.linalg.solve(l, dm).T)
    lam = np.linalg.eigvalsh(0.5 * (w + w.T))[0]
    if lam >= 0:
        return np.inf
    return -1.0 / lam


def _rank_filter(mats: list[np.ndarray], b: np.ndarray
                 ) -> tuple[list[int], np.ndarray | None]:
    """Indices of a maximal independent subset; Farkas ray if b inconsistent."""
    if not mats:
        return [], None
    vecs = np.array([m.ravel() for m in mats])
    keep: list[int] = []
    basis = np.zeros((0, vecs.shape[1]))
    for i, v in enumerate(vecs):
        if basis.shape[0]:
            coef, *_ = np.linalg.lstsq(basis.T, v, rcond=None)
            resid = v - basis.T @ coef
        else:
            coef = np.zeros(0)
            resid = v
        scale = 1.0 + np.linalg.norm(v)
        if np.linalg.norm(resid) > 1e-10 * scale:
            keep.append(i)
            basis = np.vstack([basis, v])
        else:
            # dependent row: b must agree, else the combination is a
            # Farkas certificate of infeasibility
            if abs(b[i] - coef @ b[keep]) > 1e-8 * (1.0 + abs(b[i])):
                ray = np.zeros(len(mats))
                ray[i] = 1.0
                for j, c in zip(keep, coef):
                    ray[j] = -c
                if ray @ b < 0:
                    ray = -ray
                return keep, ray
    return keep, None


def solve_sdp(problem: SdpProblem, tol_gap: float | None = None,
              tol_feas: float | None = None, max_iter: int | None = None
              ) -> SdpSolution:
    # None picks up the module-level defaults at call time, so global
    # overrides (CLI flags) take effect everywhere
    tol_gap = TOL_GAP if tol_gap is None else tol_gap
    tol_feas = TOL_FEAS if tol_feas is None else tol_feas
    max_iter = MAX_ITER if max_iter is None else max_iter
    d = problem.objective.dim
    c_mat = problem.objective.mat if problem.sense == "minimize" \
        else np.zeros((d, d))
    a_all = [a.mat for a, _ in problem.constraints]
    b_all = np.array([bv for _, bv in problem.constraints], dtype=float)

    keep, bad_ray = _rank_filter(a_all, b_all)
    if bad_ray is not None:
        return SdpSolution(status="Infeasible", ray_y=bad_ray)
    a_mats = [a_all[i] for i in keep]
    b = b_all[keep]
    m = len(a_mats)

    x = np.eye(d)
    s = np.eye(d)
    y = np.zeros(m)
    tau = 1.0
    kappa = 1.0

    norm_b = 1.0 + np.linalg.norm(b)
    norm_c = 1.0 + np.linalg.norm(c_mat)

    def a_op(mat):
        return np.array([float(np.tensordot(ai, mat)) for ai in a_mats])

    def a_star(vec):
        out = np.zeros((d, d))
        for ai, vi in zip(a_mats, vec):
            out += vi * ai
        return out

    status = "NumericalFailure"
    it = 0
    for it in range(1, max_iter + 1):
        mu = (np.tensordot(x, s) + tau * kappa) / (d + 1)
        r_p = tau * b - a_op(x)
        r_d = tau * c_mat - a_star(y) - s
        r_g = b @ y - float(np.tensordot(c_mat, x)) - kappa

        # convergence at the de-homogenized point
        if tau > 1e-10:
            pres = np.linalg.norm(r_p) / tau / norm_b
            dres = np.linalg.norm(r_d) / tau / norm_c
            gap = float(np.tensordot(x, s)) / tau ** 2
            obj = float(np.tensordot(c_mat, x)) / tau
            if pres <= tol_feas and dres <= tol_feas \
                    and gap <= tol_gap * (1.0 + abs(obj)):
                status = "Optimal"
                break
        if tau <= TOL_INFEAS * max(1.0, kappa) and mu <= 1e-10:
            by = b @ y
            cx = float(np.tensordot(c_mat, x))
            if by > 1e-10:
                full_ray = np.zeros(len(a_all))
                for j, i in enumerate(keep):
                    full_ray[i] = y[j] / by
                return SdpSolution(status="Infeasible", ray_y=full_ray,
                                   iterations=it)
            if cx < -1e-10:
                return SdpSolution(status="Unbounded",
                                   ray_X=SymMatrix(x / max(-cx, 1e-300)),
                                   iterations=it)
            return SdpSolution(status="NumericalFailure", iterations=it)

        try:
            s_chol = np.linalg.cholesky(s)
        except np.linalg.LinAlgError:
            return SdpSolution(status="NumericalFailure", iterations=it)

        s_inv = np.linalg.solve(s_chol.T, np.linalg.solve(s_chol, np.eye(d)))
        t_mats = [x @ ai @ s_inv for ai in a_mats]
        t_c = x @ c_mat @ s_inv

        big = np.zeros((m + 1, m + 1))
        for i, ai in enumerate(a_mats):
            for j in range(m):
                big[i, j] = float(np.tensordot(ai, t_mats[j]))
            big[i, m] = -(b[i] + float(np.tensordot(ai, t_c)))
        for j in range(m):
            big[m, j] = float(np.tensordot(c_mat, t_mats[j])) - b[j]
        big[m, m] = -(float(np.tensordot(c_mat, t_c)) + kappa / tau)

        def direction(sigma):
            r0 = sigma * mu * s_inv - x - x @ r_d @ s_inv
            rhs = np.zeros(m + 1)
            for i, ai in enumerate(a_mats):
                rhs[i] = r_p[i] - float(np.tensordot(ai, r0))
            rhs[m] = r_g - float(np.tensordot(c_mat, r0)) \
                - (sigma * mu - tau * kappa) / tau
            try:
                sol = np.linalg.solve(big, rhs)
            except np.linalg.LinAlgError:
                sol, *_ = np.linalg.lstsq(big, rhs, rcond=None)
            dy = sol[:m]
            dtau = sol[m]
            ds = r_d + dtau * c_mat - a_star(dy)
            dx = r0 - dtau * t_c
            for j in range(m):
                dx = dx + dy[j] * t_mats[j]
            dx = 0.5 * (dx + dx.T)
            ds = 0.5 * (ds + ds.T)
            dkappa = (sigma * mu - tau * kappa - kappa * dtau) / tau
            return dx, dy, ds, dtau, dkappa

        def max_step(dx, ds, dtau, dkappa):
            alpha = min(_step_to_boundary(x, dx), _step_to_boundary(s, ds))
            if dtau < 0:
                alpha = min(alpha, -tau / dtau)
            if dkappa < 0:
                alpha = min(alpha, -kappa / dkappa)
            return alpha

        dx_a, dy_a, ds_a, dtau_a, dk_a = direction(0.0)
        alpha_aff = min(1.0, 0.98 * max_step(dx_a, ds_a, dtau_a, dk_a))
        sigma = min(0.9, max(1e-3, (1.0 - alpha_aff) ** 3))

        dx, dy, ds, dtau, dkappa = direction(sigma)
        alpha = min(1.0, 0.98 * max_step(dx, ds, dtau, dkappa))
        if alpha <= 1e-14:
            return SdpSolution(status="NumericalFailure", iterations=it)

        x = x + alpha * dx
        s = s + alpha * ds
        y = y + alpha * dy
        tau = tau + alpha * dtau
        kappa = kappa + alpha * dkappa
        x = 0.5 * (x + x.T)
        s = 0.5 * (s + s.T)

    if status != "Optimal":
        return SdpSolution(status="NumericalFailure", iterations=it)

    y_full = np.zeros(len(a_all))
    for j, i in enumerate(keep):
        y_full[i] = y[j] / tau
    return SdpSolution(
        status="Optimal",
        X=SymMatrix(x / tau),
        y=y_full,
        S=SymMatrix(s / tau),
        gap=float(np.tensordot(x, s)) / tau ** 2,
        iterations=it)


@dataclasses.dataclass
class LmiResult:
    status: str  # optimal | infeasible | unbounded | numerical_failure
    u: np.ndarray | None = None
    value: float = float("nan")
    slack: SymMatrix | None = None
    dual_matrix: SymMatrix | None = None
    ray: np.ndarray | None = None


def lmi_maximize(f0: SymMatrix, f_list: Sequence[SymMatrix],
                 objective: Sequence[float],
                 eq_a: np.ndarray | None = None,
                 eq_b: np.ndarray | None = None,
                 tol_gap: float | None = None,
                 max_iter: int | None = None) -> LmiResult:
    """Maximize objective.u subject to F0 + sum u_l F_l >= 0 (and eq_a u = eq_b).

    The dual matrix returned on success is the PSD multiplier Z of the LMI
    block, satisfying <F_l, Z> = objective_l and value = -<F0, Z> at optimum.
    """
    tol_gap = TOL_GAP if tol_gap is None else tol_gap
    max_iter = MAX_ITER if max_iter is None else max_iter
    objective = np.asarray(objective, dtype=float)
    k = len(f_list)
    if eq_a is not None:
        eq_a = np.atleast_2d(np.asarray(eq_a, dtype=float))
        eq_b = np.atleast_1d(np.asarray(eq_b, dtype=float))
        u0, *_ = np.linalg.lstsq(eq_a, eq_b, rcond=None)
        if np.linalg.norm(eq_a @ u0 - eq_b) > 1e-8 * (1.0 + np.linalg.norm(eq_b)):
            return LmiResult(status="infeasible")
        _, sv, vt = np.linalg.svd(eq_a)
        tol = max(eq_a.shape) * (sv[0] if sv.size else 0.0) * 1e-12
        null = vt[(sv > tol).sum():].T  # k x (k - rank)
        f0_red = SymMatrix(
            f0.mat + sum(u0[l] * f_list[l].mat for l in range(k)))
        f_red = [SymMatrix(sum(null[l, j] * f_list[l].mat for l in range(k)))
                 for j in range(null.shape[1])]
        obj_red = null.T @ objective
        res = lmi_maximize(f0_red, f_red, obj_red, tol_gap=tol_gap,
                           max_iter=max_iter)
        if res.u is not None:
            full_u = u0 + null @ res.u
            res = dataclasses.replace(
                res, u=full_u, value=float(objective @ full_u))
        return res

    problem = SdpProblem(
        objective=f0,
        constraints=[(SymMatrix(-f.mat), float(o))
                     for f, o in zip(f_list, objective)],
        sense="minimize")
    sol = solve_sdp(problem, tol_gap=tol_gap, max_iter=max_iter)
    if sol.status == "Optimal":
        u = sol.y
        slack = SymMatrix(
            f0.mat + sum(u[l] * f_list[l].mat for l in range(k)))
        return LmiResult(status="optimal", u=u,
                         value=float(objective @ u), slack=slack,
                         dual_matrix=sol.X)
    if sol.status == "Infeasible":
        # auxiliary primal infeasible <=> LMI objective unbounded above
        return LmiResult(status="unbounded", ray=sol.ray_y)
    if sol.status == "Unbounded":
        # auxiliary primal unbounded <=> the LMI has no solution;
        # the ray is a PSD matrix Z with <F_l,Z>=0 and <F0,Z> < 0
        return LmiResult(status="infeasible", dual_matrix=sol.ray_X)
    return LmiResult(status="numerical_failure")
