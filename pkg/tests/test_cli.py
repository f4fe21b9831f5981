"""Command line interface: subcommands, output modes, and exit codes."""

import json

import pytest
from click.testing import CliRunner

from shadowlab.cli import main
from shadowlab.polys import Polynomial, Subspace, monomial_subspace
from shadowlab.sdp import SymMatrix
from shadowlab.spectra import Pencil


@pytest.fixture()
def runner():
    return CliRunner()


def mono(variables, exp, coeff=1):
    return Polynomial.monomial(variables, exp, coeff)


def write(tmp_path, name, data):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


def test_sos_check_sos(runner, tmp_path):
    f = mono(("x",), (2,)) + mono(("x",), (1,), 2) + mono(("x",), (0,))
    poly = write(tmp_path, "f.json", f.to_json())
    res = runner.invoke(main, ["sos-check", "--poly", poly])
    assert res.exit_code == 0
    body = json.loads(res.output)
    assert body["verdict"] == "SOS" and body["verified"]


def test_sos_check_with_basis(runner, tmp_path):
    f = mono(("x",), (2,), 2) + mono(("x",), (0,), 2)
    poly = write(tmp_path, "f.json", f.to_json())
    basis = write(tmp_path, "U.json", Subspace(
        [mono(("x",), (0,)), mono(("x",), (1,))]).to_json())
    res = runner.invoke(main, ["sos-check", "--poly", poly,
                               "--basis", basis])
    assert res.exit_code == 0
    assert json.loads(res.output)["verdict"] == "SOS"


def test_sos_check_witness(runner, tmp_path, motzkin):
    poly = write(tmp_path, "m.json", motzkin.to_json())
    res = runner.invoke(main, ["sos-check", "--poly", poly])
    assert res.exit_code == 0
    assert json.loads(res.output)["verdict"] == "NotSOS"


def test_missing_file_is_an_error(runner, tmp_path):
    res = runner.invoke(main, ["sos-check", "--poly",
                               str(tmp_path / "absent.json")])
    assert res.exit_code == 1


def test_obstruct_modes(runner, tmp_path, motzkin):
    form = write(tmp_path, "m.json", motzkin.to_json())
    res = runner.invoke(main, ["obstruct", "--form", form,
                               "--mode", "infinitesimal"])
    assert res.exit_code == 0
    body = json.loads(res.output)
    assert body["verdict"] == "Obstructed"
    res = runner.invoke(main, ["obstruct", "--form", form, "--mode", "local",
                               "--point", "0,0,0"])
    assert json.loads(res.output)["verdict"] == "Obstructed"


def test_relax_command(runner, tmp_path):
    x = ("x",)
    g = mono(x, (0,)) - mono(x, (2,))
    set_path = write(tmp_path, "s.json",
                     {"variables": ["x"], "generators": [g.to_json()]})
    l_path = write(tmp_path, "L.json",
                   monomial_subspace(1, 1, variables=x).to_json())
    w_path = write(tmp_path, "W.json", [
        monomial_subspace(1, 1, include_constant=True, variables=x).to_json(),
        Subspace([mono(x, (0,))]).to_json()])
    res = runner.invoke(main, ["relax", "--set", set_path, "--l", l_path,
                               "--w", w_path, "--functional", "0.5"])
    assert res.exit_code == 0
    assert json.loads(res.output)["membership"]["verdict"] == "In"


def test_dual_command(runner, tmp_path, psd2_pencil):
    pencil = write(tmp_path, "p.json", psd2_pencil.to_json())
    res = runner.invoke(main, ["dual", "--pencil", pencil,
                               "--functional", "1,0,1"])
    assert res.exit_code == 0
    assert json.loads(res.output)["member"] is True


def test_member_command(runner, tmp_path, disk_pencil):
    pencil = write(tmp_path, "p.json", disk_pencil.to_json())
    res = runner.invoke(main, ["member", "--pencil", pencil,
                               "--point", "0.5,0.5"])
    assert json.loads(res.output)["verdict"] == "In"
    res = runner.invoke(main, ["member", "--pencil", pencil,
                               "--point", "1.5,0"])
    assert json.loads(res.output)["verdict"] == "Out"


def test_lift_command(runner, tmp_path, psd2_pencil):
    pencil = write(tmp_path, "p.json", psd2_pencil.to_json())
    res = runner.invoke(main, ["lift", "--pencil", pencil,
                               "--functional", "1,0,1", "--verify", "5"])
    assert res.exit_code == 0
    body = json.loads(res.output)
    assert body["nonnegative"] is True
    assert body["certificate"]["exact"]


def test_lift_rejects_inhomogeneous(runner, tmp_path, disk_pencil):
    pencil = write(tmp_path, "p.json", disk_pencil.to_json())
    res = runner.invoke(main, ["lift", "--pencil", pencil])
    assert res.exit_code == 1


def test_veronese_command(runner):
    res = runner.invoke(main, ["veronese", "--n", "2", "--d", "2",
                               "--point", "1,2"])
    assert res.exit_code == 0
    assert json.loads(res.output)["values"] == ["1", "2", "1", "2", "4"]


def test_demo_command(runner):
    res = runner.invoke(main, ["demo", "--n", "3", "--two-d", "6"])
    assert res.exit_code == 0
    assert json.loads(res.output)["form"] == "motzkin"
    res = runner.invoke(main, ["demo", "--kind", "pipeline"])
    assert res.exit_code == 1


def test_pretty_output(runner):
    res = runner.invoke(main, ["--pretty", "veronese", "--n", "2",
                               "--d", "2"])
    assert res.exit_code == 0
    assert "N: 5" in res.output


def test_solver_flag_overrides(runner):
    import shadowlab.sdp as sdp
    before = (sdp.TOL_GAP, sdp.MAX_ITER)
    try:
        res = runner.invoke(main, ["--tol-gap", "1e-6", "--max-iter", "50",
                                   "veronese", "--n", "1", "--d", "1"])
        assert res.exit_code == 0
        assert sdp.TOL_GAP == 1e-6 and sdp.MAX_ITER == 50
    finally:
        sdp.TOL_GAP, sdp.MAX_ITER = before


def test_server_dispatch(runner, monkeypatch):
    # route --server through the FastAPI test client instead of a socket
    from fastapi.testclient import TestClient

    from shadowlab.service.app import app

    client = TestClient(app)

    class FakeResponse:
        def __init__(self, resp):
            self._resp = resp
            self.status_code = resp.status_code
            self.text = resp.text

        def json(self):
            return self._resp.json()

    import httpx

    def fake_post(url, json=None, timeout=None):
        path = url.replace("http://fake", "")
        return FakeResponse(client.post(path, json=json))

    monkeypatch.setattr(httpx, "post", fake_post)
    res = runner.invoke(main, ["--server", "http://fake", "veronese",
                               "--n", "2", "--d", "2"])
    assert res.exit_code == 0
    assert json.loads(res.output)["N"] == 5


def test_seeded_outputs_are_identical(runner, tmp_path):
    x = ("x",)
    g = mono(x, (0,)) - mono(x, (2,))
    set_path = write(tmp_path, "s.json",
                     {"variables": ["x"], "generators": [g.to_json()]})
    args = ["demo", "--kind", "pipeline", "--form", "motzkin",
            "--mode", "infinitesimal", "--set",
            write(tmp_path, "plane.json",
                  {"variables": ["x1", "x2"], "generators": []}),
            "--samples", "2"]
    out1 = runner.invoke(main, ["--seed", "0"] + args).output
    out2 = runner.invoke(main, ["--seed", "0"] + args).output
    assert out1 == out2
