"""Deterministic formatting and report assembly for CSV and JSON outputs.

Every real number is printed through format_real, so identical inputs give
byte-identical files on any platform with IEEE-754 doubles.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import SpecValidationError

__all__ = [
    "format_real",
    "emit_json",
    "profile_csv",
    "gamma_csv",
    "GAMMA_CSV_HEADER",
    "CheckReport",
    "check",
    "finding",
    "checks_payload",
    "has_fail",
]

GAMMA_CSV_HEADER = (
    "r,gamma,gamma_fd,h_inv,phi,phi_fd,eigen_residual,"
    "slope_neg_h_inv_residual,envelope_residual,second_diff"
)


def format_real(v):
    """17-significant-digit decimal, scientific outside [1e-4, 1e6].

    Round-trips every finite double; -0.0 and 0.0 both print as "0.0".
    """
    v = float(v)
    if v == 0.0:
        return "0.0"
    a = abs(v)
    if 1e-4 <= a <= 1e6:
        return "%.17g" % v
    return "%.16e" % v


def _emit(obj, indent, out):
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        keys = sorted(obj.keys())
        for i, k in enumerate(keys):
            if not isinstance(k, str):
                raise SpecValidationError("JSON object keys must be strings")
            out.append(pad + "  " + json.dumps(k) + ": ")
            _emit(obj[k], indent + 1, out)
            out.append(",\n" if i < len(keys) - 1 else "\n")
        out.append(pad + "}")
        return
    if isinstance(obj, (list, tuple, np.ndarray)):
        items = list(np.asarray(obj).tolist()) if isinstance(obj, np.ndarray) else list(obj)
        if not items:
            out.append("[]")
            return
        out.append("[\n")
        for i, item in enumerate(items):
            out.append(pad + "  ")
            _emit(item, indent + 1, out)
            out.append(",\n" if i < len(items) - 1 else "\n")
        out.append(pad + "]")
        return
    if isinstance(obj, (bool, np.bool_)):
        out.append("true" if obj else "false")
        return
    if isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
        return
    if isinstance(obj, (float, np.floating)):
        if not np.isfinite(obj):
            raise SpecValidationError("reports must contain finite numbers only")
        out.append(format_real(obj))
        return
    if isinstance(obj, str):
        out.append(json.dumps(obj))
        return
    if obj is None:
        out.append("null")
        return
    raise SpecValidationError(f"cannot serialize {type(obj).__name__}")


def emit_json(obj):
    """Deterministic JSON text: sorted keys, format_real numbers, LF endings."""
    out = []
    _emit(obj, 0, out)
    out.append("\n")
    return "".join(out)


def profile_csv(params, values):
    """Two-column CSV "param,value", one row per grid point."""
    params = np.asarray(params, dtype=np.float64).reshape(-1)
    values = np.asarray(values, dtype=np.float64).reshape(-1)
    if params.size != values.size:
        raise SpecValidationError("param and value columns must have equal length")
    lines = ["param,value"]
    for p, v in zip(params, values):
        lines.append(format_real(p) + "," + format_real(v))
    return "\n".join(lines) + "\n"


def gamma_csv(rows):
    """CSV for GammaRow records in the fixed 10-column order."""
    lines = [GAMMA_CSV_HEADER]
    for row in rows:
        lines.append(",".join(format_real(v) for v in (
            row.r, row.gamma, row.gamma_fd, row.h_inv, row.phi, row.phi_fd,
            row.eigen_residual, row.slope_neg_h_inv_residual,
            row.envelope_residual, row.second_diff,
        )))
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class CheckReport:
    """One named check: pass/fail by measured <= tolerance, or a finding.

    Findings record genuine numerical observations that are expected to be
    large; they never count as failures.
    """

    name: str
    status: str
    measured: float
    tolerance: float
    details: str = ""

    def __post_init__(self):
        if self.status not in ("pass", "fail", "finding"):
            raise SpecValidationError("status must be pass, fail, or finding")
        object.__setattr__(self, "measured", float(self.measured))
        object.__setattr__(self, "tolerance", float(self.tolerance))

    def as_dict(self):
        return {
            "name": self.name,
            "status": self.status,
            "measured": self.measured,
            "tolerance": self.tolerance,
            "details": self.details,
        }


def check(name, measured, tolerance, details=""):
    status = "pass" if float(measured) <= float(tolerance) else "fail"
    return CheckReport(name, status, measured, tolerance, details)


def finding(name, measured, details):
    return CheckReport(name, "finding", measured, 0.0, details)


def checks_payload(suite, checks, extra=None):
    """Report object: checks sorted by name plus suite-specific fields."""
    names = [c.name for c in checks]
    if len(set(names)) != len(names):
        raise SpecValidationError("check names must be unique")
    payload = {
        "suite": suite,
        "checks": [c.as_dict() for c in sorted(checks, key=lambda c: c.name)],
    }
    if extra:
        for k, v in extra.items():
            if k in payload:
                raise SpecValidationError(f"duplicate report field '{k}'")
            payload[k] = v
    return payload


def has_fail(checks):
    return any(c.status == "fail" for c in checks)
