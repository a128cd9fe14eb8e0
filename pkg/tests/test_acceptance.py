"""
Acceptance criteria on the default grid, run through ``phaselab verify``.

One PASS/FAIL line per criterion is printed (and repeated in the pytest
terminal summary). Run directly with ``python3 tests/test_acceptance.py``.
"""

import io
import re
import sys

import pytest

from phaselab.cli import run

NAMES = {
    1: "cyclicity",
    2: "non-degenerate A-A reproduction",
    3: "gamma=1 closed case",
    4: "x-model degenerate holonomy",
    5: "triviality of z-model degenerate factors",
    6: "spectrum fixtures",
    7: "Floquet split",
    8: "Berry reproduction",
    9: "adiabatic reduction",
    10: "connection cross-check",
    11: "property suite",
}
TOLERANCES = {1: 1e-8, 2: 1e-6, 3: 1e-9, 4: 1e-6, 5: 1e-6, 6: 1e-10, 7: 1e-8, 8: 1e-9, 9: 0.05, 10: 1e-6}

LINE = re.compile(r"^(PASS|FAIL)\s+(\d+)\s.*?residual=(\S+) tol=(\S+)")

REPORT_LINES: list[str] = []


def run_verify():
    out, err = io.StringIO(), io.StringIO()
    code = run(["verify", "--grid", "default"], out, err)
    parsed = {}
    for line in out.getvalue().splitlines():
        m = LINE.match(line)
        if m:
            parsed[int(m.group(2))] = (m.group(1), float(m.group(3)), float(m.group(4)), line)
    return code, parsed, err.getvalue()


@pytest.fixture(scope="module")
def report():
    code, parsed, err = run_verify()
    REPORT_LINES.clear()
    for n in sorted(NAMES):
        status = parsed[n][0] if n in parsed else "FAIL"
        text = f"{status} criterion {n:>2}: {NAMES[n]}"
        if n in parsed:
            text += f" (residual {parsed[n][1]:.3e}, tol {parsed[n][2]:.0e})"
        REPORT_LINES.append(text)
        print(text)
    return code, parsed, err


@pytest.mark.parametrize("number", sorted(NAMES), ids=lambda n: f"criterion_{n:02d}")
def test_criterion(report, number):
    _, parsed, err = report
    assert number in parsed, f"no report line for criterion {number}; stderr: {err}"
    status, residual, tol, line = parsed[number]
    if number in TOLERANCES:
        assert tol == TOLERANCES[number], line
    assert status == "PASS", line
    assert residual <= tol, line


def test_verify_exit_status(report):
    code, parsed, err = report
    assert code == 0, err
    assert len(parsed) == len(NAMES)


def test_verify_residuals_within_one_micro(report):
    # criterion 9 measures an O(omega) physical gap against its own 0.05 bound
    _, parsed, _ = report
    for n, (_, residual, tol, line) in parsed.items():
        if tol <= 1e-6:
            assert residual <= 1e-6, line


if __name__ == "__main__":
    code, parsed, _ = run_verify()
    for n in sorted(NAMES):
        status = parsed[n][0] if n in parsed else "FAIL"
        print(f"{status} criterion {n:>2}: {NAMES[n]}")
    sys.exit(code)
