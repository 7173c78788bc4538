"""CSV/JSON writers with embedded run metadata."""
from __future__ import annotations

import json
import math
import platform
from pathlib import Path

import mpmath
import numpy as np
import scipy

from . import __version__


def fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        return format(v, ".17g")
    return str(v)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating,)):
        obj = float(obj)
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def versions():
    return {"catphase": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
            "mpmath": mpmath.__version__, "python": platform.python_version()}


def write_csv(path, columns, rows, meta):
    """Write ``rows`` under ``columns``; ``meta`` goes into leading ``#`` lines as JSON."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        for key in sorted(meta):
            fh.write(f"# {key}: {json.dumps(_jsonable(meta[key]), sort_keys=True)}\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            if isinstance(row, dict):
                row = [row[c] for c in columns]
            fh.write(",".join(fmt(v) for v in row) + "\n")
    return path


def write_json(path, payload, meta):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    doc = {"meta": _jsonable(meta), "data": _jsonable(payload)}
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1, sort_keys=True, allow_nan=False)
        fh.write("\n")
    return path


def read_csv(path):
    """Return ``(meta, columns, float array)`` from a file written by :func:`write_csv`."""
    meta, lines = {}, []
    with open(path) as fh:
        for line in fh:
            if line.startswith("# "):
                key, _, val = line[2:].partition(": ")
                meta[key] = json.loads(val)
            else:
                lines.append(line.rstrip("\n"))
    columns = lines[0].split(",")
    data = np.array([[float(x) for x in ln.split(",")] for ln in lines[1:] if ln], dtype=float)
    return meta, columns, data


def write_table(out_dir, stem, fmt_name, columns, rows, meta):
    out_dir = Path(out_dir)
    if fmt_name == "json":
        rows = [dict(zip(columns, r)) if not isinstance(r, dict) else r for r in rows]
        return write_json(out_dir / f"{stem}.json", rows, meta)
    return write_csv(out_dir / f"{stem}.csv", columns, rows, meta)
