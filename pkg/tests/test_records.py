import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from phaselab.records import (
    CSV_HEADER,
    SweepRecord,
    emit,
    iter_grid,
    parse,
    phase_records,
    phase_rows,
)
from phaselab.spin import ModelParams

finite = st.floats(-1e3, 1e3, allow_nan=False)
maybe_nan = st.one_of(finite, st.just(math.nan))
records = st.builds(
    SweepRecord,
    finite, finite, finite,
    st.text(alphabet="abcdefghijklmnopqrstuvwxyz0123456789'", min_size=1, max_size=6),
    finite, finite, finite, finite, maybe_nan, maybe_nan, maybe_nan,
)


def _close(a: SweepRecord, b: SweepRecord):
    assert a.state == b.state
    for x, y in zip(a.__dict__.values(), b.__dict__.values()):
        if isinstance(x, str):
            continue
        if math.isnan(x):
            assert math.isnan(y)
        else:
            assert abs(x - y) <= 1e-11 * max(1.0, abs(x))


def test_empty_csv_is_header_only():
    assert emit([], "csv") == (CSV_HEADER + "\n").encode()
    assert emit([], "json").decode().strip() == "[]"


def test_one_record_two_lines():
    rec = SweepRecord(0.5, 0.3, 0.2, "phi1", -1.2, math.pi, 0.1, -0.2, 0.3, 0.3, 0.0)
    data = emit([rec], "csv")
    assert data.count(b"\n") == 2
    assert data.endswith(b"\n")
    _close(parse(data)[0], rec)
    assert b"3.14159265359" in data


@given(st.lists(records, max_size=5), st.sampled_from(["csv", "json"]))
def test_round_trip(recs, fmt):
    back = parse(emit(recs, fmt), fmt)
    assert len(back) == len(recs)
    for a, b in zip(recs, back):
        _close(a, b)


def test_json_writes_null_for_nan():
    rec = SweepRecord(0.5, 0.3, 0.2, "s1", -1.2, math.pi, 0.1, -0.2, math.nan, 0.3, math.nan)
    assert b"null" in emit([rec], "json")
    assert b"nan" in emit([rec], "csv")


def test_unknown_format():
    with pytest.raises(ValueError):
        emit([], "xml")


def test_grid_order():
    pts = iter_grid([1.0, 0.5], [0.3], [0.5, 0.1, 1.0, 0.2, 0.3])
    assert [p[2] for p in pts[:5]] == [0.1, 0.2, 0.3, 0.5, 1.0]
    assert pts[0][0] == 0.5


def test_z_record_labels():
    recs = phase_records(ModelParams(0.5, 0.3, 0.5))
    assert {r.state for r in recs} == {"phi1", "phi2", "phi1'", "phi2'", "deg1", "deg2"}
    for r in recs:
        assert r.residual < 1e-9
        assert r.residual == pytest.approx(
            min(abs(r.geometric_closed - r.geometric_numeric) % (2 * math.pi),
                2 * math.pi - abs(r.geometric_closed - r.geometric_numeric) % (2 * math.pi)), abs=1e-15)


def test_x_record_labels():
    rows = phase_rows(ModelParams(0.5, 0.5, 0.5, axis="x"))
    deg = {r.state: r for r, d in rows if d == 2}
    assert set(deg) == {"group1", "group2"}
    assert deg["group1"].geometric_numeric == pytest.approx(-0.920151, abs=1e-6)


def test_oracle_method_agrees_with_engine():
    p = ModelParams(0.5, 0.3, 0.5)
    for a, b in zip(phase_records(p), phase_records(p, method="oracle")):
        assert a.state == b.state
        assert abs(math.remainder(a.geometric_numeric - b.geometric_numeric, 2 * math.pi)) < 1e-6
