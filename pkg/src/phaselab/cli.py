"""
Command-line front end: ``phaselab {spectrum,aa,berry,holonomy,sweep,verify}``.

Exit status is 0 on success, 1 on a usage error and 2 on a numerical or
verification failure.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import Sequence, TextIO

import numpy as np

from . import reference as ref
from .errors import PhaseLabError, ValidationError
from .holonomy import aa_holonomy, cyclic_states, scalar_angle
from .oracle import DEFAULT_TOL
from .records import (
    SweepRecord,
    berry_rows,
    default_grid,
    emit,
    iter_grid,
    phase_rows,
    read_grid,
)
from .spin import ModelParams, rotating_model
from .verify import format_report, run_all

HEADER_NOTE = (
    "# angles in rad, principal values in (-pi, pi]; "
    "H~ omits the constant -(1+gamma)/4, so dynamical and total phases exclude it"
)
TABLE_COLUMNS = ("state", "b_value", "theta", "total", "dynamical", "geometric_closed", "geometric_numeric", "residual")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}\n{self.format_usage()}")


def _floats(text: str) -> list[float]:
    try:
        values = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a real number or comma list, got {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("empty value")
    return values


def _state(text: str):
    return int(text) if text.isdigit() else text


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--model", choices=("z", "x"), default="z", help="drive axis")
    common.add_argument("--gamma", type=_floats, help="anisotropy (comma list allowed for sweep)")
    common.add_argument("--h", type=_floats, help="field (comma list allowed for sweep)")
    common.add_argument("--omega", type=_floats, help="drive frequency > 0 (comma list allowed for sweep)")
    common.add_argument("--format", choices=("table", "csv", "json"), default="table")
    common.add_argument("--tol", type=float, default=None, help="oracle tolerance (default 1e-10 or $PHASELAB_TOL)")

    parser = _Parser(prog="phaselab", description="Geometric phases of rotating-frame LMG models.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("spectrum", parents=[common], help="eigenvalues of B with cyclic groups")
    aa = sub.add_parser("aa", parents=[common], help="non-degenerate A-A phases")
    aa.add_argument("--state", type=_state, help="1-based position in ascending b, or a label such as phi1")
    aa.add_argument("--method", choices=("engine", "oracle"), default="engine")
    berry = sub.add_parser("berry", parents=[common], help="adiabatic Berry phases of H~ levels")
    berry.add_argument("--state", type=_state)
    hol = sub.add_parser("holonomy", parents=[common], help="degenerate-group holonomy")
    hol.add_argument("--group", type=int, choices=(1, 2), required=True)
    sweep = sub.add_parser("sweep", parents=[common], help="phase records over a parameter grid")
    sweep.add_argument("--state", type=_state)
    sweep.add_argument("--method", choices=("engine", "oracle"), default="engine")
    sweep.add_argument("--grid", help="default | file=PATH (overrides --gamma/--h/--omega)")
    sweep.add_argument("--workers", type=int, default=min(8, os.cpu_count() or 1))
    ver = sub.add_parser("verify", parents=[common], help="run the acceptance checks")
    ver.add_argument("--grid", default="default", help="default | file=PATH")
    return parser


def _tolerance(args) -> float:
    if args.tol is not None:
        tol = args.tol
    elif "PHASELAB_TOL" in os.environ:
        try:
            tol = float(os.environ["PHASELAB_TOL"])
        except ValueError:
            raise UsageError(f"PHASELAB_TOL is not a number: {os.environ['PHASELAB_TOL']!r}") from None
    else:
        tol = DEFAULT_TOL
    if not tol > 0:
        raise UsageError("tolerance must be positive")
    return tol


def _single(args, name: str) -> float:
    values = getattr(args, name)
    if values is None:
        raise UsageError(f"--{name} is required")
    if len(values) != 1:
        raise UsageError(f"--{name} takes one value for {args.command}")
    return values[0]


def _params(args) -> ModelParams:
    try:
        return ModelParams(_single(args, "gamma"), _single(args, "h"), _single(args, "omega"), axis=args.model)
    except ValidationError as exc:
        raise UsageError(str(exc)) from None


def _grid(args) -> list[tuple[float, float, float]]:
    grid_spec = getattr(args, "grid", None)
    if grid_spec is None:
        if None in (args.gamma, args.h, args.omega):
            raise UsageError("sweep needs --grid or all of --gamma, --h, --omega")
        return iter_grid(args.gamma, args.h, args.omega)
    if grid_spec == "default":
        return default_grid()
    if grid_spec.startswith("file="):
        try:
            return read_grid(grid_spec[5:])
        except (OSError, ValueError, KeyError) as exc:
            raise UsageError(f"cannot read grid: {exc}") from None
    raise UsageError(f"--grid must be 'default' or 'file=PATH', got {grid_spec!r}")


def _cell(x) -> str:
    if isinstance(x, str):
        return x
    if math.isnan(x):
        return "nan"
    text = f"{x:.6f}"
    return "0.000000" if text == "-0.000000" else text


def _table(records: Sequence[SweepRecord], out: TextIO, lead: Sequence[str] = ()):
    out.write(HEADER_NOTE + "\n")
    for line in lead:
        out.write(line + "\n")
    point_cols = ("gamma", "h", "omega")
    rows = [[_cell(getattr(r, c)) for c in point_cols + TABLE_COLUMNS] for r in records]
    head = list(point_cols + TABLE_COLUMNS)
    widths = [max(len(head[i]), *(len(row[i]) for row in rows)) if rows else len(head[i]) for i in range(len(head))]
    out.write("  ".join(h.rjust(w) for h, w in zip(head, widths)) + "\n")
    for row in rows:
        out.write("  ".join(c.rjust(w) for c, w in zip(row, widths)) + "\n")


def _write(records, args, out: TextIO, lead: Sequence[str] = ()):
    if args.format == "table":
        _table(records, out, lead)
    else:
        out.write(emit(records, args.format).decode())


def _select(rows, state, kind: str):
    """Filter (record, dim) rows by 1-based position or label."""
    if state is None:
        return [r for r, _ in rows]
    if isinstance(state, int):
        if not 1 <= state <= len(rows):
            raise UsageError(f"--state {state} out of range 1..{len(rows)} for this {kind}")
        return [rows[state - 1][0]]
    picked = [r for r, _ in rows if r.state == state]
    if not picked:
        raise UsageError(f"no {kind} labelled {state!r}; available: {', '.join(r.state for r, _ in rows)}")
    return picked


def _cmd_spectrum(args, out):
    params = _params(args)
    model = rotating_model(params)
    groups = cyclic_states(model)
    if args.format != "table":
        recs = [r for r, _ in phase_rows(params)]
        out.write(emit(recs, args.format).decode())
        return 0
    out.write(HEADER_NOTE + "\n")
    out.write(f"# B = H~ - omega S_{params.axis}, period T = {model.period:.6f}\n")
    out.write(f"{'group':>5}  {'b_value':>10}  {'dim':>3}  {'theta':>9}\n")
    for n, g in enumerate(groups, start=1):
        out.write(f"{n:>5}  {_cell(g.b_value):>10}  {g.dimension:>3}  {_cell(g.theta):>9}\n")
    if params.axis == "z":
        s1 = ref.z_spectrum_closed(params.gamma, params.h, params.omega)
        s2 = ref.z_spectrum_closed(params.gamma, -params.h, -params.omega)
        out.write(f"# closed form block 1: p1={_cell(s1.p1)} p2={_cell(s1.p2)} p3=p4={_cell(s1.p34)}\n")
        out.write(f"# closed form block 2: p1'={_cell(s2.p1)} p2'={_cell(s2.p2)} p3'=p4'={_cell(s2.p34)}\n")
    else:
        b1, b2 = ref.x_spectrum_closed(params.gamma, params.h, params.omega)
        out.write(f"# closed form: B1={_cell(b1)} B2={_cell(b2)} (each twofold)\n")
    return 0


def _cmd_aa(args, tol, out):
    params = _params(args)
    rows = [(r, d) for r, d in phase_rows(params, args.method, tol) if d == 1]
    _write(_select(rows, args.state, "cyclic state"), args, out)
    return 0


def _cmd_berry(args, tol, out):
    rows = berry_rows(_params(args))
    lead = ["# adiabatic levels of H~: b_value is the energy, total is undefined (nan)"]
    _write(_select(rows, args.state, "level"), args, out, lead)
    return 0


def _cmd_holonomy(args, tol, out):
    params = _params(args)
    model = rotating_model(params)
    rows = phase_rows(params)
    groups = cyclic_states(model)
    degenerate = [(k, r) for k, (r, d) in enumerate(rows) if d > 1]
    wanted = f"group{args.group}" if params.axis == "x" else f"deg{args.group}"
    match = [(k, r) for k, r in degenerate if r.state == wanted]
    if not match:
        if len(degenerate) < args.group:
            raise UsageError(f"model has only {len(degenerate)} degenerate groups")
        match = [degenerate[args.group - 1]]
    k, rec = match[0]
    hol = aa_holonomy(model, groups[k])
    if args.format != "table":
        out.write(emit([rec], args.format).decode())
        return 0
    angle = scalar_angle(hol.geometric_factor)
    lead = [f"# group {rec.state}: dimension {groups[k].dimension}, scalar angle "
            + ("not scalar" if angle is None else _cell(angle))]
    _table([rec], out, lead)
    for name, mat in (("geometric factor", hol.geometric_factor), ("dynamical factor", hol.dynamical_factor)):
        out.write(f"# {name}\n")
        for row in np.asarray(mat):
            out.write("  ".join(f"{_cell(z.real)}{'+' if z.imag >= 0 else '-'}{_cell(abs(z.imag))}j" for z in row) + "\n")
    return 0


def _cmd_sweep(args, tol, out):
    points = _grid(args)
    try:
        params = [ModelParams(g, h, w, axis=args.model) for g, h, w in points]
    except ValidationError as exc:
        raise UsageError(str(exc)) from None

    def work(p):
        return phase_rows(p, args.method, tol)

    # map keeps grid order regardless of completion order
    with ThreadPoolExecutor(max_workers=max(1, args.workers)) as pool:
        per_point = list(pool.map(work, params))
    records = []
    for rows in per_point:
        if args.state is None:
            records.extend(r for r, _ in rows)
        else:
            records.extend(_select(rows, args.state, "cyclic state"))
    _write(records, args, out)
    return 0


def _cmd_verify(args, tol, out):
    results = run_all(_grid(args), tol)
    out.write(format_report(results))
    return 0 if all(r.passed for r in results) else 2


def run(argv: Sequence[str], out: TextIO | None = None, err: TextIO | None = None) -> int:
    """Execute one command line; returns the exit status."""
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        try:
            args = parser.parse_args(list(argv))
        except SystemExit as exc:  # --help
            return int(exc.code or 0)
        tol = _tolerance(args)
        if args.command == "spectrum":
            return _cmd_spectrum(args, out)
        handler = {
            "aa": _cmd_aa,
            "berry": _cmd_berry,
            "holonomy": _cmd_holonomy,
            "sweep": _cmd_sweep,
            "verify": _cmd_verify,
        }[args.command]
        return handler(args, tol, out)
    except UsageError as exc:
        err.write(f"{exc}\n")
        return 1
    except (PhaseLabError, ArithmeticError) as exc:
        err.write(f"phaselab: numerical failure: {exc}\n")
        return 2


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
