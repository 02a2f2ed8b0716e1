"""CSV and JSON output with embedded run metadata.

CSV files start with ``#`` lines (schema version, command, resolved config
as JSON), followed by a header row and numeric rows. JSON files hold one
object with ``meta`` and ``data`` keys.
"""

from __future__ import annotations

import csv
import io
import json
from typing import IO, Iterable, Sequence

import numpy as np

SCHEMA_VERSION = "wdqm-output/1"


def _meta(command: str, config: dict) -> dict:
    return {"schema": SCHEMA_VERSION, "command": command, "config": config}


def format_csv(command: str, config: dict, columns: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    buf.write(f"# schema: {SCHEMA_VERSION}\n")
    buf.write(f"# command: {command}\n")
    buf.write(f"# config: {json.dumps(config, sort_keys=True)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def format_json(command: str, config: dict, data) -> str:
    return json.dumps({"meta": _meta(command, config), "data": data}, sort_keys=True, indent=2) + "\n"


def parse_csv(text: str) -> tuple[dict, list[str], np.ndarray]:
    """Return (meta, columns, rows as float array) from :func:`format_csv` output."""
    meta: dict = {}
    body = []
    for line in text.splitlines():
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition(":")
            value = value.strip()
            meta[key.strip()] = json.loads(value) if key.strip() == "config" else value
        elif line.strip():
            body.append(line)
    reader = csv.reader(body)
    columns = next(reader)
    rows = np.array([[float(v) for v in r] for r in reader], dtype=float).reshape(-1, len(columns))
    return meta, columns, rows


def parse_json(text: str) -> tuple[dict, object]:
    obj = json.loads(text)
    return obj["meta"], obj["data"]


def read_sampled_csv(stream: IO[str]) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and complex values from a CSV with columns node, re, im."""
    _, columns, rows = parse_csv(stream.read())
    if columns[:3] != ["node", "re", "im"]:
        raise ValueError("sampled-function CSV needs columns node, re, im")
    return rows[:, 0], rows[:, 1] + 1j * rows[:, 2]
