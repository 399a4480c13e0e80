"""Verification report records and their lossless serialization.

A report is one executed check: which registry entry, on which test
function, what both sides evaluated to, and whether the configured
direction held at the configured tolerance.  JSON serialization uses
shortest round-trip float representation, so identical runs produce
byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Any

__all__ = ["VerificationReport", "reports_to_json", "reports_from_json", "reports_to_csv", "reports_to_markdown"]

_FIELDS = (
    "timestamp",
    "registry_id",
    "params",
    "test_function",
    "lhs",
    "rhs",
    "constant",
    "ratio",
    "error_estimate",
    "tolerance",
    "pass",
    "seed",
    "node_counts",
)


@dataclass(frozen=True)
class VerificationReport:
    timestamp: str
    registry_id: str
    params: dict
    test_function: dict
    lhs: float
    rhs: float
    constant: float | None
    ratio: float
    error_estimate: float
    tolerance: float
    passed: bool
    seed: int
    node_counts: dict = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {
            "timestamp": self.timestamp,
            "registry_id": self.registry_id,
            "params": self.params,
            "test_function": self.test_function,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "constant": self.constant,
            "ratio": self.ratio,
            "error_estimate": self.error_estimate,
            "tolerance": self.tolerance,
            "pass": self.passed,
            "seed": self.seed,
            "node_counts": self.node_counts,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "VerificationReport":
        return cls(
            timestamp=d["timestamp"],
            registry_id=d["registry_id"],
            params=d["params"],
            test_function=d["test_function"],
            lhs=d["lhs"],
            rhs=d["rhs"],
            constant=d["constant"],
            ratio=d["ratio"],
            error_estimate=d["error_estimate"],
            tolerance=d["tolerance"],
            passed=d["pass"],
            seed=d["seed"],
            node_counts=d["node_counts"],
        )


def reports_to_json(reports: list[VerificationReport], header: dict | None = None) -> str:
    payload: Any = [r.to_dict() for r in reports]
    if header is not None:
        payload = {"config": header, "reports": payload}
    return json.dumps(payload, indent=2, sort_keys=False) + "\n"


def reports_from_json(text: str) -> list[VerificationReport]:
    data = json.loads(text)
    items = data["reports"] if isinstance(data, dict) else data
    return [VerificationReport.from_dict(d) for d in items]


def _flat(value: Any) -> str:
    if isinstance(value, (dict, list)):
        return json.dumps(value, sort_keys=True)
    if value is None:
        return ""
    return repr(value) if isinstance(value, float) else str(value)


def reports_to_csv(reports: list[VerificationReport]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(_FIELDS)
    for r in reports:
        d = r.to_dict()
        writer.writerow([_flat(d[k]) for k in _FIELDS])
    return buf.getvalue()


def reports_to_markdown(reports: list[VerificationReport]) -> str:
    cols = ("registry_id", "params", "test_function", "lhs", "rhs", "ratio", "tolerance", "pass")
    lines = ["| " + " | ".join(cols) + " |", "|" + "|".join("---" for _ in cols) + "|"]
    for r in reports:
        d = r.to_dict()
        cells = []
        for k in cols:
            v = d[k]
            if isinstance(v, float):
                cells.append(f"{v:.6g}")
            elif isinstance(v, (dict, list)):
                cells.append(json.dumps(v, sort_keys=True).replace("|", "/"))
            else:
                cells.append(str(v))
        lines.append("| " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"
