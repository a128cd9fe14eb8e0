"""
Tabulated phase records and their CSV / JSON serialization.

One :class:`SweepRecord` per cyclic state (or degenerate cyclic group) and
parameter point. Floats are written with 12 significant digits; missing
values (no closed form at that point) are ``nan`` in CSV and ``null`` in JSON.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import astuple, dataclass, fields
from typing import Iterable, Sequence

import numpy as np

from . import reference as ref
from .errors import DegenerateFormulaError
from .holonomy import (
    aa_holonomy,
    aa_phase,
    best_overlap,
    cyclic_states,
    scalar_angle,
)
from .oracle import DEFAULT_TOL, oracle_phases
from .phases import angle_distance, principal_angle
from .spin import ModelParams, from_printed_basis, rotating_model

CSV_HEADER = "gamma,h,omega,state,b_value,theta,total,dynamical,geometric_closed,geometric_numeric,residual"

# printed-vector overlap needed to attach a closed-form label to a numeric state
LABEL_OVERLAP = 1 - 1e-6


@dataclass(frozen=True)
class SweepRecord:
    gamma: float
    h: float
    omega: float
    state: str
    b_value: float
    theta: float
    total: float
    dynamical: float
    geometric_closed: float
    geometric_numeric: float
    residual: float


_FLOAT_FIELDS = [f.name for f in fields(SweepRecord) if f.name != "state"]


def _fmt(x: float) -> str:
    return format(x, ".12g")


def emit(records: Sequence[SweepRecord], fmt: str = "csv") -> bytes:
    """Serialize records in input order as CSV (exact header) or a JSON array."""
    if fmt == "csv":
        lines = [CSV_HEADER]
        for r in records:
            lines.append(",".join(r.state if isinstance(v, str) else _fmt(v) for v in astuple(r)))
        return ("\n".join(lines) + "\n").encode()
    if fmt == "json":
        rows = []
        for r in records:
            row = {}
            for name, v in zip(CSV_HEADER.split(","), astuple(r)):
                if isinstance(v, str):
                    row[name] = v
                else:
                    row[name] = None if math.isnan(v) else float(_fmt(v))
            rows.append(row)
        return (json.dumps(rows, indent=1) + "\n").encode()
    raise ValueError(f"unknown format {fmt!r}")


def parse(data: bytes, fmt: str = "csv") -> list[SweepRecord]:
    """Inverse of :func:`emit`."""
    text = data.decode()
    if fmt == "csv":
        reader = csv.DictReader(io.StringIO(text))
        rows = list(reader)
    elif fmt == "json":
        rows = json.loads(text)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    out = []
    for row in rows:
        kwargs = {"state": row["state"]}
        for name in _FLOAT_FIELDS:
            v = row[name]
            kwargs[name] = math.nan if v is None else float(v)
        out.append(SweepRecord(**kwargs))
    return out


def _residual(closed: float, numeric: float) -> float:
    if math.isnan(closed) or math.isnan(numeric):
        return math.nan
    return angle_distance(closed, numeric)


def _z_labels(gamma, h, omega):
    """(label, printed 8-vector in lexicographic order, closed phase) for each available formula."""
    out = []
    for block, suffix in ((1, ""), (2, "'")):
        sgn = 1 if block == 1 else -1
        for index in (1, 2):
            try:
                closed = ref.aa_phase_closed(gamma, h, omega, index, block)
            except DegenerateFormulaError:
                continue
            v = np.zeros(8, dtype=complex)
            offset = 0 if block == 1 else 4
            v[offset:offset + 4] = ref.z_cyclic_vector_closed(gamma, sgn * h, sgn * omega, index)
            out.append((f"phi{index}{suffix}", from_printed_basis(v), closed))
    return out


def phase_records(params: ModelParams, method: str = "engine", tol: float = DEFAULT_TOL) -> list[SweepRecord]:
    """Records for every cyclic group of one model; see :func:`phase_rows`."""
    return [rec for rec, _ in phase_rows(params, method, tol)]


def phase_rows(params: ModelParams, method: str = "engine", tol: float = DEFAULT_TOL) -> list[tuple[SweepRecord, int]]:
    """(record, group dimension) for every cyclic group of one model, in ascending b.

    One-dimensional groups carry A-A phases; degenerate groups carry the angle
    of their geometric factor when that factor is scalar (NaN otherwise).
    ``method="oracle"`` takes total and dynamical phases from direct
    propagation instead of the B-decomposition.
    """
    model = rotating_model(params)
    groups = cyclic_states(model)
    g, h, w = params.gamma, params.h, params.omega

    labels: dict[int, tuple[str, float]] = {}
    if params.axis == "z":
        for label, vec, closed in _z_labels(g, h, w):
            k, weight = best_overlap(groups, vec)
            if weight >= LABEL_OVERLAP and groups[k].dimension == 1:
                labels[k] = (label, closed)
        deg = [k for k, grp in enumerate(groups) if grp.dimension > 1]
        for n, k in enumerate(deg, start=1):
            # the degenerate z-drive factors are the identity
            labels[k] = (f"deg{n}", 0.0)
    else:
        b1, b2 = ref.x_spectrum_closed(g, h, w)
        for group_no in (1, 2):
            span = from_printed_basis(ref.x_cyclic_vectors_closed(h, w, group_no))
            for k, grp in enumerate(groups):
                if grp.dimension == 2 and abs(grp.b_value - (b1, b2)[group_no - 1]) < 1e-9:
                    proj = grp.states.conj().T @ (span / np.linalg.norm(span, axis=0))
                    if np.linalg.norm(proj) ** 2 >= 2 * LABEL_OVERLAP:
                        labels[k] = (f"group{group_no}", ref.x_holonomy_closed(h, w, group_no))

    states = np.hstack([grp.states[:, :1] for grp in groups])
    oracle = oracle_phases(model, states, tol) if method == "oracle" else None

    records = []
    free = 0
    for k, grp in enumerate(groups):
        if k in labels:
            label, closed = labels[k]
        else:
            free += 1
            label, closed = (f"s{free}" if grp.dimension == 1 else f"g{free}"), math.nan
        if oracle is not None:
            pb = oracle.breakdown(k)
            total, dynamical, numeric = pb.total, pb.dynamical, pb.geometric
            if grp.dimension > 1:
                hol_angle = scalar_angle(aa_holonomy(model, grp).geometric_factor)
                numeric = numeric if hol_angle is not None else math.nan
        elif grp.dimension == 1:
            pb = aa_phase(model, grp)
            total, dynamical, numeric = pb.total, pb.dynamical, pb.geometric
        else:
            hol = aa_holonomy(model, grp)
            total = principal_angle(-grp.theta - grp.b_value * model.period)
            dyn = scalar_angle(hol.dynamical_factor)
            geo = scalar_angle(hol.geometric_factor)
            dynamical = math.nan if dyn is None else dyn
            numeric = math.nan if geo is None else geo
        records.append((SweepRecord(
            g, h, w, label, grp.b_value, grp.theta, total, dynamical,
            closed, numeric, _residual(closed, numeric),
        ), grp.dimension))
    return records


def default_grid() -> list[tuple[float, float, float]]:
    """gamma in {0, 0.5, 1, 2}, h in {0, 0.3, 1}, omega in {0.1, 0.5, 1}; omega fastest."""
    return [(g, h, w) for g in (0.0, 0.5, 1.0, 2.0) for h in (0.0, 0.3, 1.0) for w in (0.1, 0.5, 1.0)]


def read_grid(path: str) -> list[tuple[float, float, float]]:
    """Grid points from a CSV file with columns gamma,h,omega (header required)."""
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows or not {"gamma", "h", "omega"} <= set(rows[0]):
        raise ValueError(f"{path}: expected a CSV header with gamma,h,omega")
    return [(float(r["gamma"]), float(r["h"]), float(r["omega"])) for r in rows]


def iter_grid(gammas: Iterable[float], hs: Iterable[float], omegas: Iterable[float]):
    """Cartesian product with each axis ascending and omega varying fastest."""
    return [(g, h, w) for g in sorted(gammas) for h in sorted(hs) for w in sorted(omegas)]


def berry_rows(params: ModelParams) -> list[tuple[SweepRecord, int]]:
    """(record, level dimension) for every energy level of H~, ascending.

    ``b_value`` holds the level energy and ``total`` is left NaN since the
    adiabatic state is not an exact cyclic state. Degenerate levels carry the
    scalar angle of their Wilczek-Zee factor.
    """
    from .adiabatic import berry_phase, energy_groups, match_levels, monodromy_angle, wilczek_zee_holonomy

    model = rotating_model(params)
    levels = energy_groups(model)
    theta = monodromy_angle(model)
    g, h, w = params.gamma, params.h, params.omega
    closed_by_level: dict[int, tuple[str, float]] = {}
    if params.axis == "z":
        for index in (1, 2):
            try:
                closed = ref.berry_phase_closed(g, h, index)
            except DegenerateFormulaError:
                continue
            v = np.zeros(8, dtype=complex)
            v[:4] = ref.berry_vector_closed(g, h, index)
            v = from_printed_basis(v)
            k = match_levels([v], levels)[0]
            if float(np.linalg.norm(levels[k].states.conj().T @ v) ** 2) >= LABEL_OVERLAP * float(np.vdot(v, v).real):
                closed_by_level[k] = (f"berry{index}", closed)
    rows = []
    for k, level in enumerate(levels):
        label, closed = closed_by_level.get(k, (f"e{k + 1}", math.nan))
        if level.dimension == 1:
            numeric = berry_phase(model, k)
        else:
            angle = scalar_angle(wilczek_zee_holonomy(model, k).geometric_factor)
            numeric = math.nan if angle is None else angle
        dyn = principal_angle(-level.energy * model.period)
        rows.append((SweepRecord(
            g, h, w, label, level.energy, theta, math.nan, dyn, closed, numeric, _residual(closed, numeric),
        ), level.dimension))
    return rows
