"""Flat key-value run records and their JSON / CSV encodings.

Every record kind has a fixed column order (the ``*_COLUMNS`` schemas
below); JSON objects use exactly the same keys. Floats are written with
``repr`` (shortest round-trip form, at most 17 significant digits), lists
of floats as ``;``-separated cells in CSV, booleans as ``true``/``false``
and missing values as an empty CSV cell / JSON ``null``.
"""

from __future__ import annotations

import csv
import io
import json
from datetime import datetime, timezone

from . import __version__

# Column type for a list of integers (plain ``list`` means floats).
INTS = "ints"

META = [("command", str), ("timestamp", str), ("tool_version", str)]

SIM_COLUMNS = META + [
    ("m", int),
    ("r", int),
    ("channel", str),
    ("Z", float),
    ("trials", int),
    ("seed", int),
    ("n_max", int),
    ("max_frame_errors", int),
    ("all_zeros_mode", bool),
    ("workers", int),
    ("llr_clamp", float),
    ("tie_break", str),
    ("trials_run", int),
    ("frame_errors", int),
    ("bit_errors", int),
    ("fer", float),
    ("ber", float),
    ("fer_ci95_low", float),
    ("fer_ci95_high", float),
    ("truncated", bool),
    ("wall_seconds", float),
]

BOUND_COLUMNS = META + [
    ("m", int),
    ("r", int),
    ("Z", float),
    ("channel", str),
    ("z_seq", list),
    ("n_seq", list),
    ("log_q1", float),
    ("log_a_terms", list),
    ("log_b_terms", list),
    ("log_q_seq", list),
    ("log_q_r", float),
    ("q_r_clamped", float),
    ("vacuous", bool),
    ("threshold", float),
    ("r_below_threshold", bool),
    ("exact_z", bool),
]

SIM_BOUND_COLUMNS = SIM_COLUMNS + [
    ("bound_" + name, kind)
    for name, kind in BOUND_COLUMNS
    if name not in {"command", "timestamp", "tool_version", "m", "r", "Z", "channel"}
]

THRESHOLD_COLUMNS = META + [
    ("m", int),
    ("Z", float),
    ("channel", str),
    ("lambda", float),
    ("threshold", float),
    ("r", int),
    ("r_below_threshold", bool),
]

CHANNEL_COLUMNS = META + [
    ("channel", str),
    ("Z", float),
    ("alphabet_size", int),
    ("quantize_levels", int),
    ("combine", int),
    ("combined_z", list),
    ("z_upper_bound", list),
    ("combined_alphabet_size", INTS),
]

ENCODE_COLUMNS = META + [
    ("m", int),
    ("r", int),
    ("n", int),
    ("k", int),
    ("message", str),
    ("codeword", str),
    ("codeword_hex", str),
]

DECODE_COLUMNS = META + [
    ("m", int),
    ("r", int),
    ("n_max", int),
    ("tie_break", str),
    ("seed", int),
    ("codeword", str),
    ("codeword_hex", str),
]

SCHEMAS = {
    "simulate": SIM_COLUMNS,
    "simulate+bound": SIM_BOUND_COLUMNS,
    "bound": BOUND_COLUMNS,
    "threshold": THRESHOLD_COLUMNS,
    "channel": CHANNEL_COLUMNS,
    "encode": ENCODE_COLUMNS,
    "decode": DECODE_COLUMNS,
}

TIMING_FIELDS = frozenset({"timestamp", "wall_seconds"})


def stamp(record: dict, command: str) -> dict:
    out = {"command": command, "timestamp": datetime.now(timezone.utc).isoformat(), "tool_version": __version__}
    out.update(record)
    return out


def _schema(kind: str):
    try:
        return SCHEMAS[kind]
    except KeyError:
        raise ValueError(f"unknown record kind {kind!r}") from None


def normalize(record: dict, kind: str) -> dict:
    """Record restricted to, and ordered by, the schema for ``kind``."""
    return {name: record.get(name) for name, _ in _schema(kind)}


def _cell(value, kind) -> str:
    if value is None:
        return ""
    if kind is bool:
        return "true" if value else "false"
    if kind is float:
        return repr(float(value))
    if kind is list:
        return ";".join(repr(float(v)) for v in value)
    if kind == INTS:
        return ";".join(str(int(v)) for v in value)
    return str(value)


def _parse_cell(text: str, kind):
    if text == "":
        return [] if kind is list or kind == INTS else None
    if kind is bool:
        return text == "true"
    if kind is int:
        return int(text)
    if kind is float:
        return float(text)
    if kind is list:
        return [float(v) for v in text.split(";")]
    if kind == INTS:
        return [int(v) for v in text.split(";")]
    return text


def to_csv(records: list[dict], kind: str) -> str:
    cols = _schema(kind)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([name for name, _ in cols])
    for rec in records:
        w.writerow([_cell(rec.get(name), t) for name, t in cols])
    return buf.getvalue()


def from_csv(text: str, kind: str) -> list[dict]:
    cols = dict(_schema(kind))
    rows = list(csv.reader(io.StringIO(text)))
    header, body = rows[0], rows[1:]
    return [{name: _parse_cell(cell, cols.get(name, str)) for name, cell in zip(header, row)} for row in body]


def _json_value(value, kind):
    if value is None:
        return None
    if kind is float:
        return float(value)
    if kind is list:
        return [float(v) for v in value]
    if kind == INTS:
        return [int(v) for v in value]
    if kind is int:
        return int(value)
    if kind is bool:
        return bool(value)
    return value


def to_json(records: list[dict], kind: str) -> str:
    cols = _schema(kind)
    lines = [json.dumps({name: _json_value(rec.get(name), t) for name, t in cols}) for rec in records]
    return "\n".join(lines) + "\n"


def from_json(text: str, kind: str | None = None) -> list[dict]:
    return [json.loads(line) for line in text.splitlines() if line.strip()]


def dumps(records: list[dict], kind: str, fmt: str) -> str:
    if fmt == "csv":
        return to_csv(records, kind)
    if fmt == "json":
        return to_json(records, kind)
    raise ValueError(f"unknown format {fmt!r}")


def column_help(kind: str) -> str:
    return "CSV columns (JSON keys), in order: " + ", ".join(name for name, _ in _schema(kind))
