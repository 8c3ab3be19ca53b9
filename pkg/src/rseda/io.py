"""File formats: RV data CSV, fitted-curve CSV, JSON reports and metadata."""

from __future__ import annotations

import csv
import hashlib
import json
from pathlib import Path

import numpy as np

from .rv import RvDataset, RvModelParams

RV_HEADER = ["t_days", "rv_mps", "sigma_mps"]
CURVE_HEADER = ["t_days", "rv_model_mps"]
SUMMARY_HEADER = ["algorithm", "seed", "final_best", "evals_used", "wall_seconds"]


class DataFormatError(ValueError):
    """Malformed input file; the message names the offending row when there is one."""


def read_rv_csv(path) -> RvDataset:
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or [c.strip() for c in rows[0]] != RV_HEADER:
        raise DataFormatError(f"missing header: expected {','.join(RV_HEADER)}")
    t, v, s = [], [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 3:
            raise DataFormatError(f"row {lineno}: expected 3 fields, got {len(row)}")
        try:
            ti, vi, si = (float(c) for c in row)
        except ValueError:
            raise DataFormatError(f"row {lineno}: non-numeric field") from None
        if not (np.isfinite(ti) and np.isfinite(vi)) or not si > 0:
            raise DataFormatError(f"row {lineno}: need finite t, v and sigma > 0")
        t.append(ti)
        v.append(vi)
        s.append(si)
    if not t:
        raise DataFormatError("no observations")
    return RvDataset(t, v, s)


def write_rv_csv(data: RvDataset, path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RV_HEADER)
        for row in zip(data.t, data.v, data.sigma):
            w.writerow([repr(float(x)) for x in row])


def write_curve_csv(t, v, path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CURVE_HEADER)
        for row in zip(t, v):
            w.writerow([repr(float(x)) for x in row])


def read_params_json(path) -> RvModelParams:
    with open(path, encoding="utf-8") as fh:
        return RvModelParams.from_dict(json.load(fh))


def write_json(doc, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def config_hash(doc) -> str:
    blob = json.dumps(doc, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def ensure_dir(path) -> Path:
    p = Path(path)
    p.mkdir(parents=True, exist_ok=True)
    return p
