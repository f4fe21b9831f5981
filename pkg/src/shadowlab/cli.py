"""Command line interface.

Each subcommand builds a JSON payload and dispatches it either to the
in-process handlers (default) or to a running HTTP service (--server).
Output is JSON by default; --pretty renders a human-readable summary.
Exit codes: 0 completed, 2 completed with Inconclusive entries, 1 error.
"""

from __future__ import annotations

import json
import sys

import click

from . import sdp
from .service import handlers

ENDPOINTS = {
    "sos-check": handlers.handle_sos_check,
    "obstruct": handlers.handle_obstruct,
    "relax": handlers.handle_relax,
    "dual": handlers.handle_dual,
    "member": handlers.handle_member,
    "lift": handlers.handle_lift,
    "veronese": handlers.handle_veronese,
    "demo": handlers.handle_demo,
}


def _load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise click.ClickException(str(exc))
    except json.JSONDecodeError as exc:
        raise click.ClickException("%s: %s" % (path, exc))


def _dispatch(ctx: click.Context, endpoint: str, payload: dict) -> dict:
    server = ctx.obj.get("server")
    if server:
        import httpx
        resp = httpx.post("%s/%s" % (server.rstrip("/"), endpoint),
                          json=payload, timeout=600.0)
        if resp.status_code >= 400:
            raise click.ClickException(resp.json().get("detail", resp.text))
        return resp.json()
    try:
        return ENDPOINTS[endpoint](payload)
    except handlers.OperationError as exc:
        raise click.ClickException(str(exc))


def _render(value, indent: int = 0) -> None:
    pad = "  " * indent
    if isinstance(value, dict):
        for k, v in value.items():
            if isinstance(v, (dict, list)) and v:
                click.echo("%s%s:" % (pad, k))
                _render(v, indent + 1)
            else:
                click.echo("%s%s: %s" % (pad, k, v))
    elif isinstance(value, list):
        for item in value:
            if isinstance(item, (dict, list)):
                _render(item, indent)
                click.echo("")
            else:
                click.echo("%s- %s" % (pad, item))
    else:
        click.echo("%s%s" % (pad, value))


def _emit(ctx: click.Context, result: dict) -> None:
    if ctx.obj.get("pretty"):
        _render(result)
    else:
        click.echo(json.dumps(result, indent=2, sort_keys=True))
    inconclusive = result.get("inconclusive", 0)
    if result.get("verdict") == "Inconclusive" or (
            isinstance(inconclusive, int) and inconclusive > 0):
        sys.exit(2)


@click.group()
@click.option("--json", "json_out", is_flag=True, default=True,
              help="JSON output (default).")
@click.option("--pretty", is_flag=True, help="Human-readable output.")
@click.option("--seed", type=int, default=0, show_default=True,
              help="Seed for sampled workflows.")
@click.option("--tol-gap", type=float, default=None,
              help="Override the solver duality gap tolerance.")
@click.option("--max-iter", type=int, default=None,
              help="Override the solver iteration cap.")
@click.option("--trunc-order", type=str, default=None,
              help="Override the default truncation order for infinitesimal "
                   "arithmetic.")
@click.option("--server", type=str, default=None,
              help="Base URL of a running service; run remotely instead of "
                   "in-process.")
@click.pass_context
def main(ctx, json_out, pretty, seed, tol_gap, max_iter, trunc_order, server):
    """Spectrahedral shadows: SOS certificates, obstructions, relaxations,
    duals, and square-root lifts."""
    ctx.ensure_object(dict)
    ctx.obj.update(pretty=pretty, seed=seed, server=server,
                   trunc_order=trunc_order)
    if tol_gap is not None:
        sdp.TOL_GAP = tol_gap
    if max_iter is not None:
        sdp.MAX_ITER = max_iter


@main.command("sos-check")
@click.option("--poly", required=True, type=click.Path(),
              help="Polynomial JSON file.")
@click.option("--basis", type=click.Path(), default=None,
              help="Square basis subspace JSON file.")
@click.pass_context
def sos_check(ctx, poly, basis):
    """Decide SOS membership; emit a certificate or a moment witness."""
    payload = {"polynomial": _load_json(poly)}
    if basis:
        payload["basis"] = _load_json(basis)
    _emit(ctx, _dispatch(ctx, "sos-check", payload))


@main.command("obstruct")
@click.option("--form", required=True, type=click.Path(),
              help="Polynomial JSON file.")
@click.option("--mode", required=True,
              type=click.Choice(["local", "infinitesimal"]))
@click.option("--point", type=str, default=None,
              help="Comma-separated rational coordinates (local mode).")
@click.pass_context
def obstruct(ctx, form, mode, point):
    """Run the local or infinitesimal non-SOS obstruction pipeline."""
    payload = {"form": _load_json(form), "mode": mode}
    if point is not None:
        payload["point"] = point.split(",")
    if ctx.obj.get("trunc_order"):
        payload["trunc_order"] = ctx.obj["trunc_order"]
    _emit(ctx, _dispatch(ctx, "obstruct", payload))


@main.command("relax")
@click.option("--set", "set_path", required=True,
              type=click.Path(),
              help="Basic closed set JSON: {variables, generators}.")
@click.option("--l", "--L", "l_path", required=True,
              type=click.Path(), help="Subspace L JSON file.")
@click.option("--w", "--W", "w_path", required=True,
              type=click.Path(),
              help="JSON list of weight subspaces W_0..W_r.")
@click.option("--probe", type=int, default=0, show_default=True,
              help="Number of exactness probe directions.")
@click.option("--functional", type=str, default=None,
              help="Comma-separated functional to test for membership.")
@click.option("--hull-check", type=str, default=None,
              help="Comma-separated functional to test against the hull.")
@click.pass_context
def relax(ctx, set_path, l_path, w_path, probe, functional, hull_check):
    """Build the moment relaxation K' and query it."""
    payload = {
        "set": _load_json(set_path),
        "L": _load_json(l_path),
        "W": _load_json(w_path),
        "probe": probe,
        "seed": ctx.obj["seed"],
    }
    if functional:
        payload["functional"] = [float(v) for v in functional.split(",")]
    if hull_check:
        payload["hull_check"] = [float(v) for v in hull_check.split(",")]
    _emit(ctx, _dispatch(ctx, "relax", payload))


@main.command("dual")
@click.option("--pencil", required=True, type=click.Path(),
              help="Pencil JSON file.")
@click.option("--matrix", type=click.Path(), default=None,
              help="PSD matrix JSON; map it to its dual cone point.")
@click.option("--functional", type=str, default=None,
              help="Comma-separated functional; test dual cone membership.")
@click.pass_context
def dual(ctx, pencil, matrix, functional):
    """Dual cone of a spectrahedral cone: pairing and membership."""
    payload = {"pencil": _load_json(pencil)}
    if matrix:
        payload["matrix"] = _load_json(matrix)
    if functional:
        payload["functional"] = [float(v) for v in functional.split(",")]
    _emit(ctx, _dispatch(ctx, "dual", payload))


@main.command("member")
@click.option("--pencil", required=True, type=click.Path(),
              help="Pencil JSON file.")
@click.option("--point", required=True, type=str,
              help="Comma-separated coordinates.")
@click.option("--cone", is_flag=True, help="Treat the pencil as a cone.")
@click.pass_context
def member(ctx, pencil, point, cone):
    """Membership of a point in a spectrahedral shadow."""
    payload = {
        "pencil": _load_json(pencil),
        "point": [float(v) for v in point.split(",")],
        "is_cone": cone,
    }
    _emit(ctx, _dispatch(ctx, "member", payload))


@main.command("lift")
@click.option("--pencil", required=True, type=click.Path(),
              help="Homogeneous pencil JSON file (A = 0).")
@click.option("--functional", type=str, default=None,
              help="Comma-separated functional a; build its certificate.")
@click.option("--verify", type=int, default=0, show_default=True,
              help="Number of random cone points for numeric verification.")
@click.pass_context
def lift(ctx, pencil, functional, verify):
    """Square-root lift of a strictly feasible cone representation."""
    payload = {"pencil": _load_json(pencil), "verify": verify,
               "seed": ctx.obj["seed"]}
    if functional:
        payload["functional"] = [float(v) for v in functional.split(",")]
    _emit(ctx, _dispatch(ctx, "lift", payload))


@main.command("veronese")
@click.option("--n", required=True, type=int)
@click.option("--d", required=True, type=int)
@click.option("--mode", type=click.Choice(["affine", "homogeneous"]),
              default="affine", show_default=True)
@click.option("--point", type=str, default=None,
              help="Comma-separated rational coordinates to evaluate.")
@click.pass_context
def veronese(ctx, n, d, mode, point):
    """Veronese monomial data and evaluation."""
    payload = {"n": n, "d": d, "mode": mode}
    if point is not None:
        payload["point"] = point.split(",")
    _emit(ctx, _dispatch(ctx, "veronese", payload))


@main.command("demo")
@click.option("--kind", type=click.Choice(["psd-vs-sos", "pipeline"]),
              default="psd-vs-sos", show_default=True)
@click.option("--n", type=int, default=None)
@click.option("--two-d", type=int, default=None)
@click.option("--form", type=str, default=None,
              help="Catalog form name (pipeline mode).")
@click.option("--mode", type=click.Choice(["local", "infinitesimal"]),
              default=None, help="Obstruction mode (pipeline mode).")
@click.option("--set", "set_path", type=click.Path(), default=None,
              help="Basic closed set JSON (pipeline mode).")
@click.option("--subspace", type=str, default="auto", show_default=True,
              help="Subspace kind: auto, monomial, L14, shift-support.")
@click.option("--samples", type=int, default=5, show_default=True)
@click.pass_context
def demo(ctx, kind, n, two_d, form, mode, set_path, subspace, samples):
    """PSD vs SOS separation demos and the obstruction pipeline."""
    if kind == "psd-vs-sos":
        if n is None or two_d is None:
            raise click.ClickException("psd-vs-sos needs --n and --two-d")
        payload = {"kind": kind, "n": n, "two_d": two_d}
    else:
        if not (form and mode and set_path):
            raise click.ClickException(
                "pipeline needs --form, --mode, and --set")
        payload = {"kind": kind, "form": form, "mode": mode,
                   "set": _load_json(set_path), "subspace": subspace,
                   "samples": samples, "seed": ctx.obj["seed"]}
    _emit(ctx, _dispatch(ctx, "demo", payload))


@main.command("serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn

    from .service.app import app
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
