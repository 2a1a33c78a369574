"""Deterministic CSV/JSON writers.

Floats are always written with 17 significant digits so that identical
runs give identical bytes.
"""
import csv
import io
import json
import math
from pathlib import Path

import numpy as np

CSV_HEADER = ["t", "k", "delta0", "d1", "d2", "d3", "n1", "n2", "n3", "purity"]


def fmt(x):
    if x is None:
        return ""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def to_json(obj, indent=2, _level=0):
    """``json.dumps`` with fixed 17-digit floats; NaN/inf become null."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {to_json(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        if all(isinstance(v, (int, float, np.floating, np.integer)) and not isinstance(v, bool) for v in seq):
            return "[" + ", ".join(to_json(v) for v in seq) + "]"
        return "[\n" + ",\n".join(pad + to_json(v, indent, _level + 1) for v in seq) + "\n" + end + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return "null" if not math.isfinite(obj) else fmt(obj)
    if obj is None:
        return "null"
    return json.dumps(obj)


def trajectory_rows(traj):
    t = "steady" if traj.t is None else fmt(traj.t)
    purity = traj.purity
    with np.errstate(invalid="ignore", divide="ignore"):
        n = np.where(purity[:, None] > 0, traj.dvec / purity[:, None], np.nan)
    for i in range(len(traj)):
        yield [t, fmt(traj.k[i]), fmt(traj.delta0[i]), *map(fmt, traj.dvec[i]), *map(fmt, n[i]),
               fmt(purity[i])]


def write_trajectories(path, trajectories, fmt_name="csv"):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if fmt_name == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for traj in trajectories:
            w.writerows(trajectory_rows(traj))
        path.write_text(buf.getvalue())
    elif fmt_name == "json":
        rows = [dict(zip(CSV_HEADER, r)) for traj in trajectories for r in trajectory_rows(traj)]
        records = [{k: (v if k == "t" and v == "steady" else float(v)) for k, v in r.items()} for r in rows]
        path.write_text(to_json(records) + "\n")
    else:
        raise ValueError(f"unknown format {fmt_name!r}")
    return path


def write_table(path, header, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) if isinstance(v, (float, np.floating)) or v is None else v for v in r])
    path.write_text(buf.getvalue())
    return path


def write_report(path, report):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(to_json(report) + "\n")
    return path
