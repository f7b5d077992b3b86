import json

import numpy as np
import pytest

from sobex import cli
from sobex.extension import NonConvergenceError

# direct-summation oracle, see test_counterexamples
CUSP_SUMS = {1000: 3.0050466242335854, 10000: 3.2925870514418207, 100000: 3.515720155864698,
             1000000: 3.6980408863146415}


def run(*argv):
    return cli.main([str(a) for a in argv])


def test_extend_identity_csv(tmp_path):
    out = tmp_path / "f.csv"
    assert run("extend", "--domain", "disk", "--map", "identity", "--method", "harmonic", "--mesh", 6,
               "--out", out) == 0
    data = np.loadtxt(out, delimiter=",", skiprows=1)
    z = data[:, 1] + 1j * data[:, 2]
    w = data[:, 3] + 1j * data[:, 4]
    edge = np.abs(np.abs(z) - 1) < 1e-12
    assert edge.sum() > 100
    assert np.max(np.abs(w[edge] - z[edge])) < 1e-6


def test_energy_douglas_json(tmp_path):
    out = tmp_path / "d.json"
    assert run("energy", "douglas", "--map", "identity", "--out", out) == 0
    d = json.loads(out.read_text())
    assert d["schema_version"] == 1
    assert d["value"] == pytest.approx(4 * np.pi ** 2, rel=1e-3)


def test_cex_cusp_matches_oracle(tmp_path):
    out, js = tmp_path / "c.csv", tmp_path / "c.json"
    assert run("cex", "cusp", "--p", 1.5, "--N", 1000000, "--out", out, "--json", js) == 0
    rows = dict(np.loadtxt(out, delimiter=",", skiprows=1))
    for n, v in CUSP_SUMS.items():
        assert rows[n] == pytest.approx(v, rel=1e-9)
    assert json.loads(js.read_text())["certified"]


def test_svg_circle(tmp_path):
    out = tmp_path / "c.svg"
    assert run("svg", "curve", "--domain", "disk", "--out", out) == 0
    assert out.read_text().count("<path") == 1


def test_exit_codes(capsys):
    assert run("bogus") == 2
    assert run() == 2
    assert run("energy") == 2
    assert run("extend", "--mesh", 11) == 2
    assert run("extend", "--mesh", 0) == 2
    assert run("energy", "pdouglas", "--p", 1.5) == 2
    assert run("cex", "cusp", "--p", 2.5, "--N", 10) == 2
    assert run("domain", "make", "--domain", "cusp:1.5") == 2
    capsys.readouterr()


def test_nonconvergence_exit_code(monkeypatch, capsys):
    def boom(cfg, a):
        raise NonConvergenceError("no", 0.5)
    monkeypatch.setitem(cli.COMMANDS, "extend", boom)
    assert run("extend") == 3
    assert "residual" in capsys.readouterr().err


def test_validation_ranges():
    with pytest.raises(cli.ValidationError):
        cli.RunConfig("energy", "cond32", p=2.0).validate()
    cli.RunConfig("energy", "cond32", p=1.5).validate()


@pytest.mark.parametrize("command", sorted(cli.COMMANDS))
def test_selftests_pass(command, capsys):
    assert run(command, "--selftest") == 0
    capsys.readouterr()


@pytest.mark.parametrize("argv", [
    ["extend", "--map", "random:7", "--mesh", 4],
    ["extend", "--domain", "square", "--map", "random:3", "--method", "composed", "--mesh", 4],
    ["svg", "field", "--map", "random:2", "--mesh", 3],
    ["cex", "spiral", "--N", 5000],
    ["domain", "make", "--domain", "spiral:6"],
    ["map", "make", "--kind", "cusp", "--domain", "cusp:0.5"],
])
def test_byte_identical(tmp_path, argv, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(*argv, "--out", a) == 0
    assert run(*argv, "--out", b) == 0
    assert a.read_bytes() == b.read_bytes() and a.stat().st_size > 0
    capsys.readouterr()


def test_parse_specs():
    assert cli.parse_domain("cusp:0.5").boundary.analytic_tag.startswith("cusp")
    with pytest.raises(ValueError):
        cli.parse_domain("hexagon")
    with pytest.raises(ValueError):
        cli.parse_boundary_map("warp:2")
