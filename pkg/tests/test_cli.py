import csv
import json
import math
import subprocess
import sys
from pathlib import Path

import pytest

from entropy_sandwich import cli
from entropy_sandwich.bounds import BoundCertificate
from entropy_sandwich.cli import fmt, theta_grid

GOLDEN = Path(__file__).parent / "golden"


def run(*args, cwd=None):
    cmd = [sys.executable, "-m", "entropy_sandwich", *map(str, args)]
    return subprocess.run(cmd, capture_output=True, text=True, cwd=cwd)


def write_spec(path, spec):
    path.write_text(json.dumps(spec))
    return path


def read_csv(text):
    return list(csv.DictReader(text.splitlines()))


class TestHelp:
    def test_help(self):
        cp = run("--help")
        assert cp.returncode == 0
        for sub in ("sweep-theta", "certify", "approx-converge", "counterexample", "product"):
            assert sub in cp.stdout

    def test_unknown_subcommand(self):
        assert run("frobnicate").returncode == 2


class TestFormatting:
    @pytest.mark.parametrize("value, text", [
        (0.1, "0.1"), (1 / 3, "0.333333333333"), (1e-20, "1e-20"), (math.inf, "inf"), (3, "3"), (True, "true"),
    ])
    def test_fmt(self, value, text):
        assert fmt(value) == text

    def test_theta_grid_contains_two(self):
        grid = theta_grid(0.3, 5.0, 100)
        assert 2.0 in grid and len(grid) == 101


class TestSweepTheta:
    def test_golden(self, tmp_path):
        out = tmp_path / "sweep.csv"
        cp = run("sweep-theta", "--theta-min", 0.3, "--theta-max", 5, "--points", 100, "--output", out)
        assert cp.returncode == 0, cp.stderr
        assert out.read_bytes() == (GOLDEN / "sweep_theta.csv").read_bytes()

    def test_values(self):
        cp = run("sweep-theta", "--theta-min", 0.3, "--theta-max", 50, "--points", 50)
        rows = read_csv(cp.stdout)
        assert list(rows[0]) == ["theta", "inv_A", "B_r1", "B_r10", "lower_bound"]
        by_theta = {float(r["theta"]): r for r in rows}
        assert float(by_theta[2.0]["inv_A"]) == pytest.approx(1 / (2 * math.pi * math.e), abs=1e-11)
        # mpmath value of 1/A(50); the approach to 1/12 is only O(1/theta)
        assert float(by_theta[50.0]["inv_A"]) == pytest.approx(0.0802180733924433, rel=1e-10)
        for r in rows:
            assert float(r["B_r10"]) / float(r["B_r1"]) == pytest.approx(1.8571, abs=1e-3)

    def test_deterministic(self):
        assert run("sweep-theta").stdout == run("sweep-theta").stdout

    @pytest.mark.parametrize("args", [("--theta-min", 3, "--theta-max", 1), ("--theta-min", 0), ("--points", 1)])
    def test_bad_range(self, args):
        cp = run("sweep-theta", *args)
        assert cp.returncode == 2 and "error" in cp.stderr

    def test_json(self):
        data = json.loads(run("sweep-theta", "--points", 5, "--format", "json").stdout)
        assert data["columns"][0] == "theta" and len(data["rows"]) == 6


class TestCertify:
    def test_gaussian(self, tmp_path):
        spec = write_spec(tmp_path / "g.json", {"family": "gengauss", "m": 0, "theta": 2, "beta": 0.5})
        out = tmp_path / "cert.json"
        cp = run("certify", "--input", spec, "--output", out)
        assert cp.returncode == 0, cp.stderr
        cert = json.loads(out.read_text())
        assert cert["passed"] and cert["theorem_tag"] == "thm1"
        assert cert["slack_upper"] == pytest.approx(0, abs=1e-8)
        assert cert["slack_lower"] == pytest.approx(0, abs=1e-8)

    def test_two_uniforms(self, tmp_path):
        spec = write_spec(tmp_path / "u.json", {"family": "mixture", "components": [
            {"alpha": 0.5, "family": "uniform", "m": 0, "epsilon": 1},
            {"alpha": 0.5, "family": "uniform", "m": 0, "epsilon": 0.5}]})
        cp = run("certify", "--input", spec)
        assert cp.returncode == 0, cp.stderr
        cert = json.loads(cp.stdout)
        assert cert["theorem_tag"] == "cor2" and cert["passed"]

    def test_mismatched_centres(self, tmp_path):
        spec = write_spec(tmp_path / "bad.json", {"family": "mixture", "components": [
            {"alpha": 0.5, "family": "gengauss", "m": 0, "theta": 2, "beta": 0.5},
            {"alpha": 0.5, "family": "gengauss", "m": 1, "theta": 2, "beta": 0.5}]})
        out = tmp_path / "cert.json"
        cp = run("certify", "--input", spec, "--output", out)
        assert cp.returncode == 2
        assert "common mean" in cp.stderr
        report = json.loads(out.read_text())["hypothesis_report"]
        assert report == [["common mean", False]]

    def test_bound_violation_exit_1(self, tmp_path, monkeypatch, capsys):
        # no valid input violates a proven bound, so substitute a failing certificate
        spec = write_spec(tmp_path / "g.json", {"family": "gengauss", "theta": 2, "beta": 0.5})
        monkeypatch.setattr(cli, "certify_spec",
                            lambda *a, **k: BoundCertificate.build(1.0, 1.0, 0.5, "thm1", [("common mean", True)]))
        assert cli.main(["certify", "--input", str(spec)]) == 1
        assert json.loads(capsys.readouterr().out)["passed"] is False

    def test_wrong_theorem_override(self, tmp_path):
        spec = write_spec(tmp_path / "g.json", {"family": "gengauss", "theta": 2, "beta": 0.5})
        cp = run("certify", "--input", spec, "--theorem", "cor2")
        assert cp.returncode == 2

    def test_triangle_and_override(self, tmp_path):
        spec = write_spec(tmp_path / "t.json", {"family": "triangle", "b": 0, "left": 1, "right": 1})
        cert = json.loads(run("certify", "--input", spec).stdout)
        assert cert["theorem_tag"] == "thm2" and cert["passed"]
        cert = json.loads(run("certify", "--input", spec, "--theorem", "thm3").stdout)
        assert cert["theorem_tag"] == "thm3" and cert["passed"]

    def test_asymmetric_infers_thm3(self, tmp_path):
        spec = write_spec(tmp_path / "t.json", {"family": "triangle", "b": 0, "left": 1, "right": 0.5})
        cp = run("certify", "--input", spec, "--format", "csv")
        assert cp.returncode == 0
        fields = {r["field"]: r["value"] for r in read_csv(cp.stdout)}
        assert fields["theorem_tag"] == "thm3" and fields["passed"] == "true"

    def test_understated_lipschitz(self, tmp_path):
        spec = write_spec(tmp_path / "t.json", {"family": "triangle", "left": 1, "right": 1, "lipschitz": 0.5})
        cp = run("certify", "--input", spec)
        assert cp.returncode == 2 and "lipschitz" in cp.stderr

    @pytest.mark.parametrize("spec, field", [
        ({"family": "gengauss", "theta": 2}, "beta"),
        ({"family": "cauchy"}, "family"),
        ({"family": "mixture", "components": [{"family": "uniform", "epsilon": 1}]}, "alpha"),
    ])
    def test_malformed_spec(self, tmp_path, spec, field):
        cp = run("certify", "--input", write_spec(tmp_path / "s.json", spec))
        assert cp.returncode == 2 and f"'{field}'" in cp.stderr

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "s.json"
        path.write_text("{not json")
        cp = run("certify", "--input", path)
        assert cp.returncode == 2 and "invalid JSON" in cp.stderr

    def test_missing_input(self):
        assert run("certify").returncode == 2

    def test_bad_tol(self, tmp_path):
        spec = write_spec(tmp_path / "g.json", {"family": "gengauss", "theta": 2, "beta": 0.5})
        assert run("certify", "--input", spec, "--tol", -1).returncode == 2

    def test_unwritable_output(self, tmp_path):
        spec = write_spec(tmp_path / "g.json", {"family": "gengauss", "theta": 2, "beta": 0.5})
        assert run("certify", "--input", spec, "--output", tmp_path / "nope" / "c.json").returncode == 2


class TestCounterexample:
    def test_golden(self, tmp_path):
        out = tmp_path / "c.csv"
        assert run("counterexample", "--decades", 4, "--output", out).returncode == 0
        assert out.read_bytes() == (GOLDEN / "counterexample.csv").read_bytes()

    def test_increasing(self):
        rows = read_csv(run("counterexample", "--alpha1", 0.5, "--eps1", 1, "--decades", 4).stdout)
        ratios = [float(r["ratio"]) for r in rows]
        assert all(b > a for a, b in zip(ratios, ratios[1:]))
        assert list(rows[0])[:4] == ["eps2", "variance", "entropy_power", "ratio"]

    def test_zero_decades(self):
        rows = read_csv(run("counterexample", "--decades", 0).stdout)
        assert len(rows) == 1 and float(rows[0]["ratio"]) == pytest.approx(1 / 12, rel=1e-11)

    def test_slope_alpha_09(self):
        data = json.loads(run("counterexample", "--alpha1", 0.9, "--decades", 3, "--format", "json").stdout)
        assert data["fitted_slope"] == pytest.approx(-1.8, abs=0.1)

    def test_bad_alpha(self):
        assert run("counterexample", "--alpha1", 1.5).returncode == 2


class TestApproxConverge:
    def test_triangle(self, tmp_path):
        spec = write_spec(tmp_path / "t.json", {"family": "triangle", "left": 1, "right": 1})
        cp = run("approx-converge", "--input", spec, "--n-values", "4,8,16,32")
        assert cp.returncode == 0, cp.stderr
        rows = read_csv(cp.stdout)
        assert list(rows[0]) == ["n", "var_gap", "ep_ratio_gap"]
        for r in rows:
            assert float(r["var_gap"]) == pytest.approx(1 / (6 * int(r["n"]) ** 2), rel=1e-6)

    def test_rejects_unbounded(self, tmp_path):
        spec = write_spec(tmp_path / "g.json", {"family": "gengauss", "theta": 2, "beta": 0.5})
        assert run("approx-converge", "--input", spec).returncode == 2

    def test_bad_n_values(self, tmp_path):
        spec = write_spec(tmp_path / "t.json", {"family": "raised_cosine", "s": 1})
        assert run("approx-converge", "--input", spec, "--n-values", "4,x").returncode == 2


class TestProduct:
    def test_gaussians(self, tmp_path):
        spec = write_spec(tmp_path / "p.json", {"marginals": [
            {"family": "gengauss", "theta": 2, "beta": 0.5},
            {"family": "gengauss", "theta": 1, "beta": 1}]})
        data = json.loads(run("product", "--input", spec, "--format", "json").stdout)
        assert data["det_covariance"] == pytest.approx(2.0, rel=1e-10)
        assert data["slack"] == pytest.approx(0.0, abs=1e-6)

    def test_csv(self, tmp_path):
        spec = write_spec(tmp_path / "p.json", {"marginals": [
            {"family": "triangle", "left": 1, "right": 1},
            {"family": "uniform", "epsilon": 2}]})
        cp = run("product", "--input", spec)
        assert cp.returncode == 0, cp.stderr
        rows = read_csv(cp.stdout)
        assert rows[-1]["marginal"] == "product"
        assert float(rows[-1]["variance"]) <= float(rows[-1]["upper"])

    def test_empty(self, tmp_path):
        assert run("product", "--input", write_spec(tmp_path / "p.json", {"marginals": []})).returncode == 2
