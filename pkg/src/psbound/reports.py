"""Check reports and their JSON / CSV serialization."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .linalg import matrix_to_dict, psd_verdict

PASSED = "passed"
FAILED = "failed"
#: a conditional statement whose hypothesis did not hold for this input
PRECONDITION_UNMET = "precondition-unmet"
#: evaluation was impossible (e.g. a spectrum left the function's domain)
INCONCLUSIVE = "inconclusive"
#: a failure outside the scope of the statement being tested
INFORMATIVE = "informative"

CSV_COLUMNS = ("label", "status", "lhs", "rhs", "margin", "passed", "tolerance", "seed")


@dataclass
class CheckReport:
    """One inequality trial.

    For scalar inequalities ``lhs <= rhs`` the margin is ``rhs - lhs``. For
    Loewner inequalities ``L <= R`` the report stores ``lhs = 0`` and
    ``rhs = lambda_min(R - L)`` so the margin is still ``rhs - lhs``.
    """

    label: str
    lhs: float
    rhs: float
    margin: float
    passed: bool
    tolerance: float
    seed: int | None = None
    witness: dict | None = None
    status: str = PASSED
    details: dict = field(default_factory=dict)

    @classmethod
    def compare(cls, label, lhs, rhs, tolerance, **kw) -> "CheckReport":
        """Report on the scalar inequality ``lhs <= rhs``."""
        lhs, rhs = float(lhs), float(rhs)
        margin = rhs - lhs
        passed = margin >= -tolerance
        return cls(label, lhs, rhs, margin, passed, float(tolerance), status=PASSED if passed else FAILED, **kw)

    @classmethod
    def psd(cls, label, M, tolerance=None, **kw) -> "CheckReport":
        """Report on ``M >= 0`` in the Loewner order."""
        verdict = psd_verdict(M, tolerance)
        m = verdict.min_eigenvalue
        return cls(label, 0.0, m, m, verdict.is_psd, verdict.tolerance_used,
                   status=PASSED if verdict.is_psd else FAILED, **kw)

    @classmethod
    def skipped(cls, label, status, reason, **kw) -> "CheckReport":
        details = dict(kw.pop("details", {}))
        details["reason"] = reason
        nan = math.nan
        return cls(label, nan, nan, nan, False, nan, status=status, details=details, **kw)

    @property
    def is_violation(self) -> bool:
        return self.status == FAILED

    def to_dict(self, with_witness: bool = True) -> dict:
        out = {
            "label": self.label,
            "status": self.status,
            "lhs": _num(self.lhs),
            "rhs": _num(self.rhs),
            "margin": _num(self.margin),
            "passed": bool(self.passed),
            "tolerance": _num(self.tolerance),
            "seed": self.seed,
        }
        if self.details:
            out["details"] = {k: _jsonable(v) for k, v in self.details.items()}
        if with_witness and self.witness:
            out["witness"] = {k: _jsonable(v) for k, v in self.witness.items()}
        return out


def _num(x):
    if x is None:
        return None
    x = float(x)
    return x if math.isfinite(x) else None


def _jsonable(v):
    if isinstance(v, np.ndarray):
        if v.ndim == 2 and v.shape[0] == v.shape[1]:
            return matrix_to_dict(v)
        return v.tolist()
    if isinstance(v, (np.floating, float)):
        return _num(v)
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def reports_to_csv(reports) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in reports:
        d = r.to_dict(with_witness=False) if isinstance(r, CheckReport) else r
        writer.writerow(["" if d.get(c) is None else d.get(c) for c in CSV_COLUMNS])
    return buf.getvalue()
