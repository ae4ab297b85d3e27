"""Writers for sweep tables and their metadata sidecars."""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .sweep import SweepResult


def format_value(v):
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.12g}"
    return "" if v is None else str(v)


def _json_value(v):
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return float(f"{float(v):.12g}")
    return v


def render_csv(result: SweepResult) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(result.columns)
    for row in result.rows:
        w.writerow([format_value(v) for v in row])
    return buf.getvalue()


def render_json(result: SweepResult) -> str:
    recs = [{k: _json_value(v) for k, v in r.items()} for r in result.records()]
    return json.dumps({"columns": result.columns, "rows": recs}, indent=1) + "\n"


def _atomic_write(path: Path, text: str):
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def write_results(result: SweepResult, fmt: str = "csv", directory=".", stem=None) -> list[Path]:
    """Write the data table and a ``.meta.json`` sidecar; returns both paths.

    Each file is written to a temporary name and renamed into place, so a
    failure never leaves a truncated output behind.
    """
    if fmt not in ("csv", "json"):
        raise ValueError(f"unknown format {fmt!r}")
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    stem = stem or result.metadata.get("preset", "result")
    data_path = directory / f"{stem}.{fmt}"
    meta_path = directory / f"{stem}.meta.json"
    body = render_csv(result) if fmt == "csv" else render_json(result)
    meta = dict(result.metadata)
    meta["columns"] = result.columns
    meta["rows"] = len(result.rows)
    meta["data_file"] = data_path.name
    meta["written_at"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    _atomic_write(data_path, body)
    _atomic_write(meta_path, json.dumps(meta, indent=2, sort_keys=True, default=_json_value) + "\n")
    return [data_path, meta_path]
