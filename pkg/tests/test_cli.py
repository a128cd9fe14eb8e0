import io
import math

import pytest

from phaselab import cli
from phaselab.errors import ConvergenceError
from phaselab.records import CSV_HEADER, parse
from phaselab.verify import CriterionResult


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def test_aa_decoupled_state_prints_zero():
    code, out, _ = call("aa", "--model", "z", "--gamma", "1", "--h", "0.5", "--omega", "0.3")
    assert code == 0
    header = next(line for line in out.splitlines() if line.strip().startswith("gamma"))
    col = header.split().index("geometric_numeric")
    row = next(line for line in out.splitlines() if " phi1 " in line)
    assert row.split()[col] == "0.000000"
    assert "-0.000000" not in out
    assert out.startswith("# angles in rad, principal values in (-pi, pi]")


def test_holonomy_example():
    code, out, _ = call("holonomy", "--model", "x", "--gamma", "0.5", "--h", "0.5", "--omega", "0.5", "--group", "1")
    assert code == 0
    assert "scalar angle -0.920151" in out
    assert "# geometric factor" in out
    factor = out.split("# geometric factor\n")[1].splitlines()[:2]
    assert len(factor) == 2 and all(len(line.split()) == 2 for line in factor)


def test_sweep_five_omegas_ascending():
    code, out, _ = call("sweep", "--gamma", "0.5", "--h", "0.3", "--omega", "0.5,0.1,1,0.2,0.3",
                        "--state", "phi1", "--format", "csv")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == CSV_HEADER
    recs = parse(out.encode())
    assert len(recs) == 5
    assert [r.omega for r in recs] == [0.1, 0.2, 0.3, 0.5, 1.0]


def test_sweep_is_deterministic():
    argv = ("sweep", "--model", "x", "--gamma", "0,2", "--h", "0.3", "--omega", "0.5,1", "--format", "json")
    assert call(*argv)[1] == call(*argv)[1]


def test_spectrum_and_berry():
    code, out, _ = call("spectrum", "--model", "x", "--gamma", "0.5", "--h", "0.5", "--omega", "0.5")
    assert code == 0 and "each twofold" in out
    code, out, _ = call("berry", "--gamma", "0", "--h", "0", "--omega", "1", "--state", "berry1", "--format", "csv")
    assert code == 0
    (rec,) = parse(out.encode())
    assert rec.geometric_numeric == pytest.approx(math.pi)


@pytest.mark.parametrize("argv", [
    ("aa", "--bogus", "1"),
    ("aa", "--gamma", "0.5", "--h", "0.3"),
    ("aa", "--gamma", "0.5", "--h", "0.3", "--omega", "0"),
    ("aa", "--gamma", "0.5", "--h", "0.3", "--omega", "x"),
    ("holonomy", "--gamma", "0.5", "--h", "0.3", "--omega", "1", "--group", "3"),
    ("aa", "--gamma", "0.5", "--h", "0.3", "--omega", "1", "--state", "9"),
    ("sweep", "--grid", "file=/nonexistent.csv"),
    ("frobnicate",),
])
def test_usage_errors_exit_one(argv):
    code, _, err = call(*argv)
    assert code == 1
    assert err


def test_tolerance_precedence(monkeypatch):
    argv = ("aa", "--gamma", "0.5", "--h", "0.3", "--omega", "0.5", "--method", "oracle")
    monkeypatch.setenv("PHASELAB_TOL", "abc")
    assert call(*argv)[0] == 1
    assert call(*argv, "--tol", "1e-9")[0] == 0
    monkeypatch.setenv("PHASELAB_TOL", "1e-8")
    assert call(*argv)[0] == 0


def test_numerical_failure_exits_two(monkeypatch):
    def boom(*args, **kwargs):
        raise ConvergenceError("no convergence", (1e-3,))

    monkeypatch.setattr(cli, "phase_rows", boom)
    code, _, err = call("aa", "--gamma", "0.5", "--h", "0.3", "--omega", "0.5")
    assert code == 2
    assert "numerical failure" in err


def test_verify_small_grid(tmp_path):
    grid = tmp_path / "grid.csv"
    grid.write_text("gamma,h,omega\n0.5,0.3,0.5\n1,0.3,1\n")
    code, out, _ = call("verify", "--grid", f"file={grid}")
    lines = out.splitlines()
    assert code == 0
    assert len(lines) == 12
    assert all(line.startswith("PASS") for line in lines[:11])


def test_verify_failure_exits_two(monkeypatch):
    monkeypatch.setattr(cli, "run_all", lambda grid, tol: [CriterionResult(1, "x", False, 1.0, 0.1)])
    code, out, _ = call("verify")
    assert code == 2
    assert out.startswith("FAIL")
