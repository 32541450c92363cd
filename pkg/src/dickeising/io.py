"""Tabular writers, run manifests and ``key = value`` config files."""

import csv
import hashlib
import json
import math
import platform
import time
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__


def format_value(v):
    """CSV cell text: floats in 17-significant-digit scientific notation."""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return f"{v:.16e}"
    if v is None:
        return ""
    return str(getattr(v, "value", v))


def _json_value(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else str(v)
    return getattr(v, "value", v)


def write_csv(path, columns, rows):
    """RFC 4180 CSV: header row, CRLF line ends, quoting only where needed."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([format_value(row.get(c)) for c in columns])
    return path


def write_json(path, columns, rows, extra=None):
    """Same schema as the CSV writer: column list plus one object per row."""
    path = Path(path)
    doc = {"columns": list(columns),
           "rows": [{c: _json_value(row.get(c)) for c in columns} for row in rows]}
    if extra:
        doc.update(extra)
    path.write_text(json.dumps(doc, indent=2, sort_keys=False) + "\n", encoding="utf-8")
    return path


def write_table(out_dir, stem, columns, rows, fmt="csv"):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if fmt == "json":
        return write_json(out_dir / f"{stem}.json", columns, rows)
    return write_csv(out_dir / f"{stem}.csv", columns, rows)


def read_csv(path):
    with Path(path).open(newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def write_report(path, report):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(report, indent=2, default=_json_value) + "\n", encoding="utf-8")
    return path


def sha256(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


class Manifest:
    """Collects inputs, outputs and timing for one run; written last."""

    def __init__(self, command, config):
        self.command = command
        self.config = {k: _json_value(v) for k, v in sorted(config.items())}
        self.outputs = []
        self._t0 = time.perf_counter()
        self.started = datetime.now(timezone.utc).isoformat()

    def add(self, path, rows=None):
        self.outputs.append({"path": Path(path).name, "sha256": sha256(path), "rows": rows})

    def write(self, out_dir, status="ok"):
        doc = {
            "tool": "dickeising",
            "version": __version__,
            "command": self.command,
            "status": status,
            "config": self.config,
            "outputs": self.outputs,
            "python": platform.python_version(),
            "numpy": np.__version__,
            "started": self.started,
            "elapsed_s": time.perf_counter() - self._t0,
        }
        return write_report(Path(out_dir) / "manifest.json", doc)


def read_config(path):
    """Parse ``key = value`` lines; ``#`` starts a comment, blank lines are skipped.

    Keys are normalised to flag spelling with underscores (``quad-points``
    and ``quad_points`` are the same key).  Raises ``ValueError`` listing
    every malformed line.
    """
    out, bad = {}, []
    for n, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            bad.append(f"line {n}: expected key = value")
            continue
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            bad.append(f"line {n}: empty key")
            continue
        out[key.replace("-", "_")] = value
    if bad:
        raise ValueError("; ".join(bad))
    return out
