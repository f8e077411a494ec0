"""Machine-readable experiment records (JSON) and experiment tables (CSV)."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

__all__ = ["ExperimentReport", "emit_report", "load_report", "CSV_HEADER"]

REPORT_FIELDS = ("command", "params", "seeds", "theory", "measured", "verdicts", "runtime_ms")
CSV_HEADER = ("n", "min_lp", "theory_floor_exponent", "samples", "seed")


@dataclass
class ExperimentReport:
    command: str
    params: dict = field(default_factory=dict)
    seeds: dict = field(default_factory=dict)
    theory: dict = field(default_factory=dict)
    measured: dict = field(default_factory=dict)
    verdicts: dict = field(default_factory=dict)
    runtime_ms: float = 0.0
    # per-n rows for experiment tables; written to CSV, not part of the JSON record
    rows: list = field(default_factory=list, repr=False)

    @property
    def passed(self) -> bool:
        return all(v == "PASS" for v in self.verdicts.values())

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("rows")
        return _plain(d)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentReport":
        missing = set(REPORT_FIELDS) - set(d)
        if missing:
            raise ValueError(f"report is missing fields {sorted(missing)}")
        return cls(**{k: d[k] for k in REPORT_FIELDS})


def _plain(obj):
    """Convert numpy scalars/arrays and non-finite floats into JSON-safe values."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        if math.isnan(v):
            return "nan"
        return v
    return obj


def emit_report(report: ExperimentReport, path, format: str = "json") -> None:
    path = Path(path)
    if format == "json":
        path.write_text(json.dumps(report.to_dict(), indent=2, sort_keys=False) + "\n")
    elif format == "csv":
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(CSV_HEADER)
            for row in report.rows:
                w.writerow([_csv_cell(row[k]) for k in CSV_HEADER])
    else:
        raise ValueError(f"unknown report format {format!r}")


def _csv_cell(v):
    if isinstance(v, float):
        return repr(v)
    return v


def load_report(path) -> ExperimentReport:
    return ExperimentReport.from_dict(json.loads(Path(path).read_text()))
