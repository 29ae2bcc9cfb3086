"""Deterministic serialization: number formatting, JSON, CSV, check rows."""

import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from projkit import SpecValidationError
from projkit.report import (
    GAMMA_CSV_HEADER,
    CheckReport,
    check,
    checks_payload,
    emit_json,
    finding,
    format_real,
    gamma_csv,
    has_fail,
    profile_csv,
)


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_format_real_round_trips(v):
    assert float(format_real(v)) == v


def test_format_real_zero_and_regimes():
    assert format_real(0.0) == "0.0"
    assert format_real(-0.0) == "0.0"
    assert format_real(1.0) == "1"
    # %.17g inside the plain range, scientific outside
    assert "e" not in format_real(123456.0)
    assert "e" in format_real(1e-5)
    assert "e" in format_real(1e7)


def test_emit_json_is_canonical():
    text = emit_json({"b": 1, "a": np.float64(0.5), "c": [np.int64(2)]})
    assert text.endswith("\n")
    assert text.index('"a"') < text.index('"b"') < text.index('"c"')
    assert json.loads(text) == {"b": 1, "a": 0.5, "c": [2]}


def test_emit_json_handles_arrays_bools_none():
    text = emit_json(
        {"arr": np.arange(3.0), "flag": np.bool_(True), "none": None}
    )
    data = json.loads(text)
    assert data == {"arr": [0.0, 1.0, 2.0], "flag": True, "none": None}
    assert isinstance(data["flag"], bool)


def test_emit_json_is_deterministic():
    payload = {"z": [1.5, 2.5], "a": {"k": 0.1}}
    assert emit_json(payload) == emit_json(payload)


def test_emit_json_rejects_bad_values():
    with pytest.raises(SpecValidationError):
        emit_json({"x": float("nan")})
    with pytest.raises(SpecValidationError):
        emit_json({"x": float("inf")})
    with pytest.raises(SpecValidationError):
        emit_json({1: "non-string key"})
    with pytest.raises(SpecValidationError):
        emit_json({"x": object()})


def test_profile_csv_shape():
    text = profile_csv([1.0, 2.0], [0.5, 0.25])
    assert text == "param,value\n1,0.5\n2,0.25\n"
    assert profile_csv([], []) == "param,value\n"
    with pytest.raises(SpecValidationError):
        profile_csv([1.0], [1.0, 2.0])


def test_gamma_csv_shape(clamp1):
    from projkit import gamma_profile_report

    rows = gamma_profile_report(clamp1, [0.25, 0.5])
    text = gamma_csv(rows)
    lines = text.split("\n")
    assert lines[0] == GAMMA_CSV_HEADER
    assert len(lines) == 4 and lines[-1] == ""
    assert all(len(ln.split(",")) == 10 for ln in lines[1:3])
    assert gamma_csv([]) == GAMMA_CSV_HEADER + "\n"


def test_check_rows():
    row = check("nonexpansive", 1e-12, 1e-9)
    assert row.status == "pass"
    assert check("x", 1.0, 1.0).status == "pass"  # boundary inclusive
    assert check("x", 1.0 + 1e-16, 1.0).status == "pass"
    assert check("x", 2.0, 1.0).status == "fail"
    f = finding("slope_sign", 1.0, details="documented discrepancy")
    assert f.status == "finding" and f.tolerance == 0.0
    d = row.as_dict()
    assert set(d) == {"name", "status", "measured", "tolerance", "details"}
    with pytest.raises(SpecValidationError):
        CheckReport("x", "maybe", 0.0, 0.0)


def test_checks_payload():
    rows = [check("b", 0.0, 1.0), check("a", 2.0, 1.0)]
    payload = checks_payload("geometry", rows, extra={"n": 3})
    assert payload["suite"] == "geometry"
    assert [r["name"] for r in payload["checks"]] == ["a", "b"]
    assert payload["n"] == 3
    assert has_fail(rows)
    assert not has_fail([rows[0]])
    with pytest.raises(SpecValidationError):
        checks_payload("s", [check("a", 0.0, 1.0), check("a", 0.0, 1.0)])
    with pytest.raises(SpecValidationError):
        checks_payload("s", rows, extra={"suite": "clash"})
