"""Experiment reports: a stable, versioned JSON schema plus CSV traces.

Reports are canonicalized (sorted keys, shortest-roundtrip floats), so a
fixed (config, seed) pair reproduces byte-identical output.
"""

from __future__ import annotations

import csv
import io
import json
import os
from dataclasses import dataclass, field

SCHEMA_VERSION = 1


@dataclass
class ExperimentReport:
    command: str
    params: dict
    seed: int | None = None
    verdict: str | None = None
    data: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "params": self.params,
            "seed": self.seed,
            "verdict": self.verdict,
            "data": self.data,
        }

    def to_json(self) -> str:
        return canonical_json(self.to_dict())


def canonical_json(obj) -> str:
    return json.dumps(_plain(obj), sort_keys=True, separators=(",", ": "), indent=1) + "\n"


def _plain(obj):
    """Coerce numpy scalars/arrays, complex numbers and tuples to JSON types."""
    import numpy as np
    from fractions import Fraction

    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, Fraction):
        return str(obj)
    return obj


def trace_csv(columns: dict) -> str:
    """CSV with one column per named trace; plain repr floats."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    names = list(columns)
    writer.writerow(names)
    length = max(len(v) for v in columns.values())
    for i in range(length):
        writer.writerow(
            [repr(columns[n][i]) if i < len(columns[n]) else "" for n in names]
        )
    return buf.getvalue()


def default_output_dir() -> str | None:
    return os.environ.get("SHIFTLAB_OUTDIR")


def write_text(path: str, text: str):
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
