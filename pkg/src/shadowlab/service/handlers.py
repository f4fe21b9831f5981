"""JSON-level operation handlers shared by the HTTP service and the CLI.

Every handler takes a plain dict and returns a plain dict; exact scalars
are carried as fraction strings, floats stay floats.  Domain errors raise
OperationError with a message suitable for the caller.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from ..catalog import (catalog, catalog_names, counterexample_pipeline,
                       psd_vs_sos_demo, veronese, veronese_spec)
from ..hanselka import (LiftCertificate, NotNonnegative, build_lift,
                        lift_certificate, verify_lift_numeric)
from ..polys import Polynomial, Subspace
from ..puiseux import DEFAULT_TRUNC
from ..relax import (BasicClosedSet, RelaxationSpec, build_K_prime,
                     exactness_probe, hull_certificate_check)
from ..sdp import SymMatrix
from ..soscert import (InconclusiveError, NotInSpanError, NotSosWitness,
                       SosCertificate, infinitesimal_obstruction,
                       local_obstruction, sos_decide)
from ..spectra import (NotStrictlyFeasible, Pencil, Shadow,
                       cone_witness_direction, dual_cone_member,
                       dual_cone_point, shadow_contains)


class OperationError(ValueError):
    pass


def _cert_json(cert: SosCertificate) -> dict:
    return {
        "verdict": "SOS",
        "exact": cert.exact,
        "gram": cert.gram.to_json(),
        "squares": [{"weight": str(w), "poly": q.to_json()}
                    for w, q in cert.squares],
    }


def _witness_json(w: NotSosWitness) -> dict:
    return {
        "verdict": "NotSOS",
        "witness": {
            "monomials": [list(e) for e in w.monomials],
            "values": w.values,
            "moment_matrix": w.moment_matrix.to_json(),
            "value_on_form": w.value_on_f,
        },
    }


def handle_sos_check(payload: dict) -> dict:
    try:
        f = Polynomial.from_json(payload["polynomial"])
    except KeyError:
        raise OperationError("missing 'polynomial'")
    basis = None
    if payload.get("basis"):
        basis = Subspace.from_json(payload["basis"])
    try:
        result = sos_decide(f, basis)
    except NotInSpanError as exc:
        raise OperationError(str(exc))
    except InconclusiveError as exc:
        return {"verdict": "Inconclusive", "reason": str(exc)}
    if isinstance(result, SosCertificate):
        out = _cert_json(result)
        out["verified"] = result.verify(f)
        return out
    out = _witness_json(result)
    out["verified"] = result.verify(f)
    return out


def handle_obstruct(payload: dict) -> dict:
    try:
        f = Polynomial.from_json(payload["form"])
        mode = payload["mode"]
    except KeyError as exc:
        raise OperationError("missing %s" % exc)
    if mode == "local":
        point = payload.get("point")
        if point is None:
            raise OperationError("local mode needs 'point'")
        report = local_obstruction(f, [Fraction(str(v)) for v in point])
    elif mode == "infinitesimal":
        trunc = payload.get("trunc_order")
        trunc = DEFAULT_TRUNC if trunc is None else Fraction(str(trunc))
        try:
            report = infinitesimal_obstruction(f, trunc=trunc)
        except ValueError as exc:
            raise OperationError(str(exc))
    else:
        raise OperationError("mode must be 'local' or 'infinitesimal'")
    out = {
        "verdict": report.verdict,
        "site": (list(map(str, report.site))
                 if isinstance(report.site, tuple) else report.site),
        "ring": report.ring,
        "reason": report.reason,
    }
    if isinstance(report.evidence, NotSosWitness):
        out["evidence"] = _witness_json(report.evidence)
    elif isinstance(report.evidence, SosCertificate):
        out["evidence"] = _cert_json(report.evidence)
    return out


def _parse_set(data: dict) -> BasicClosedSet:
    try:
        variables = tuple(data["variables"])
    except KeyError:
        raise OperationError("set needs 'variables'")
    gens = [Polynomial.from_json(g) for g in data.get("generators", [])]
    return BasicClosedSet(variables, gens)


def handle_relax(payload: dict) -> dict:
    s = _parse_set(payload.get("set", {}))
    try:
        l_sub = Subspace.from_json(payload["L"])
        w_list = [Subspace.from_json(w) for w in payload["W"]]
    except KeyError as exc:
        raise OperationError("missing %s" % exc)
    try:
        spec = RelaxationSpec(l_sub, w_list)
        shadow = build_K_prime(s, spec)
    except ValueError as exc:
        raise OperationError(str(exc))
    out: dict = {"L_dim": l_sub.dim,
                 "W_dims": [w.dim for w in w_list]}
    functional = payload.get("functional")
    if functional is not None:
        margin = shadow.margin([float(v) for v in functional])
        out["membership"] = {
            "verdict": shadow.member([float(v) for v in functional]),
            "margin": None if margin is None else float(margin),
        }
    probe = int(payload.get("probe", 0))
    if probe > 0:
        rep = exactness_probe(
            s, spec, probe, seed=int(payload.get("seed", 0)),
            sample_count=int(payload.get("samples", 512)),
            box=float(payload.get("box", 2.0)),
            grid_per_dim=payload.get("grid_per_dim"))
        out["probe"] = {
            "directions_tried": rep.directions_tried,
            "max_gap": rep.max_gap,
            "worst_direction": rep.worst_direction,
            "worst_functional": rep.worst_lam,
            "solver_failures": rep.solver_failures,
        }
    hull = payload.get("hull_check")
    if hull is not None:
        rep = hull_certificate_check(
            [float(v) for v in hull], s, l_sub,
            seed=int(payload.get("seed", 0)),
            box=float(payload.get("box", 2.0)))
        out["hull_check"] = {
            "separator_found": rep.found,
            "separator": None if rep.separator is None
            else rep.separator.to_json(),
            "value_on_functional": rep.lam_value,
            "confidence": rep.confidence,
            "samples": rep.samples,
        }
    return out


def handle_dual(payload: dict) -> dict:
    try:
        pencil = Pencil.from_json(payload["pencil"])
    except KeyError:
        raise OperationError("missing 'pencil'")
    if "matrix" in payload:
        try:
            a = dual_cone_point(pencil, SymMatrix.from_json(payload["matrix"]))
        except ValueError as exc:
            raise OperationError(str(exc))
        return {"dual_point": a}
    if "functional" in payload:
        a = [float(v) for v in payload["functional"]]
        try:
            b = dual_cone_member(pencil, a)
        except (ValueError, NotStrictlyFeasible) as exc:
            raise OperationError(str(exc))
        if b is not None:
            return {"member": True, "B": b.to_json()}
        direction = cone_witness_direction(pencil, a)
        return {"member": False,
                "witness_direction": direction,
                "witness_value": (None if direction is None
                                  else float(np.dot(a, direction)))}
    raise OperationError("provide 'matrix' (primal to dual point) or "
                         "'functional' (dual membership)")


def handle_member(payload: dict) -> dict:
    try:
        pencil = Pencil.from_json(payload["pencil"])
        point = [float(v) for v in payload["point"]]
    except KeyError as exc:
        raise OperationError("missing %s" % exc)
    shadow = Shadow(pencil, is_cone=bool(payload.get("is_cone", False)))
    try:
        verdict = shadow_contains(shadow, point)
    except ValueError as exc:
        raise OperationError(str(exc))
    return {"verdict": verdict}


def handle_lift(payload: dict) -> dict:
    try:
        pencil = Pencil.from_json(payload["pencil"])
    except KeyError:
        raise OperationError("missing 'pencil'")
    if pencil.a.mat.any():
        raise OperationError("the lift needs a homogeneous pencil (A = 0)")
    try:
        lift = build_lift(pencil.b_list, pencil.c_list)
    except NotStrictlyFeasible as exc:
        raise OperationError(
            "%s; restrict the representation to the linear hull of the cone "
            "so it becomes strictly feasible, then retry" % exc)
    out: dict = {
        "d": lift.d,
        "u_dim": lift.U.dim,
        "z_names": list(lift.z_names),
        "strict_witness": {
            "xi": lift.strict_witness[0],
            "eta": lift.strict_witness[1],
            "margin": lift.strict_witness[2],
        },
    }
    functional = payload.get("functional")
    if functional is not None:
        a = [float(v) for v in functional]
        result = lift_certificate(lift, a)
        if isinstance(result, NotNonnegative):
            out["certificate"] = None
            out["nonnegative"] = False
            out["negative_direction"] = result.direction
            out["negative_value"] = result.value
            return out
        cert: LiftCertificate = result
        out["nonnegative"] = True
        out["certificate"] = {
            "B": cert.b_matrix.to_json(),
            "V": cert.v_matrix.to_json(),
            "B_exact": (None if cert.b_exact is None else
                        [[str(x) for x in row] for row in cert.b_exact]),
            "squares": [q.to_json() for q in cert.squares],
            "exact": cert.exact,
            "symbolic_identity_checked": cert.symbolic_checked,
        }
        verify = int(payload.get("verify", 0))
        if verify > 0:
            out["certificate"]["max_residual"] = verify_lift_numeric(
                lift, cert, samples=verify,
                seed=int(payload.get("seed", 0)))
    return out


def handle_veronese(payload: dict) -> dict:
    try:
        n = int(payload["n"])
        d = int(payload["d"])
    except KeyError as exc:
        raise OperationError("missing %s" % exc)
    mode = payload.get("mode", "affine")
    try:
        spec = veronese_spec(n, d, mode)
    except ValueError as exc:
        raise OperationError(str(exc))
    out = {
        "n": n, "d": d, "mode": mode, "N": spec.N,
        "variables": list(spec.variables),
        "monomials": [list(e) for e in spec.monomials],
    }
    point = payload.get("point")
    if point is not None:
        values = veronese(n, d, [Fraction(str(v)) for v in point], mode)
        out["values"] = [str(v) for v in values]
    return out


def handle_demo(payload: dict) -> dict:
    kind = payload.get("kind", "psd-vs-sos")
    if kind == "psd-vs-sos":
        try:
            rep = psd_vs_sos_demo(int(payload["n"]), int(payload["two_d"]))
        except KeyError as exc:
            raise OperationError("missing %s" % exc)
        except ValueError as exc:
            raise OperationError(str(exc))
        out = {
            "kind": kind,
            "n": rep.n, "two_d": rep.two_d,
            "separation_expected": rep.separation_expected,
            "form": rep.form_name,
            "message": rep.message,
        }
        if rep.witness is not None:
            out["witness"] = _witness_json(rep.witness)["witness"]
        return out
    if kind == "pipeline":
        try:
            form_name = payload["form"]
            mode = payload["mode"]
        except KeyError as exc:
            raise OperationError("missing %s" % exc)
        s = _parse_set(payload.get("set", {}))
        try:
            rep = counterexample_pipeline(
                form_name, s, mode,
                subspace=payload.get("subspace", "auto"),
                samples=int(payload.get("samples", 5)),
                seed=int(payload.get("seed", 0)))
        except (KeyError, ValueError) as exc:
            raise OperationError(str(exc))
        return {
            "kind": kind,
            "form": rep.form_name,
            "mode": rep.mode,
            "subspace": {"kind": rep.subspace_kind, "dim": rep.subspace_dim},
            "entries": [{
                "point": [str(v) for v in e.point],
                "in_subspace": e.in_subspace,
                "verdict": e.verdict,
                "reason": e.reason,
            } for e in rep.entries],
            "obstructed": rep.obstructed,
            "inconclusive": rep.inconclusive,
            "note": rep.note,
        }
    raise OperationError("kind must be 'psd-vs-sos' or 'pipeline'")


def handle_catalog(name: str) -> dict:
    try:
        form = catalog(name)
    except KeyError as exc:
        raise OperationError(str(exc.args[0]))
    return {
        "name": form.name,
        "variables": list(form.variables),
        "degree": form.degree,
        "note": form.note,
        "polynomial": form.polynomial.to_json(),
        "available": catalog_names(),
    }
