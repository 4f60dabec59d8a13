"""CSV tables, JSON reports and run manifests.

Floats are written with 17 significant digits so a float round-trips
exactly; exact rationals are written as ``p/q``.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

__all__ = ["RunManifest", "fmt", "jsonable", "read_csv", "to_csv", "write_json"]


def fmt(x) -> str:
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def to_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(x) for x in row])
    return buf.getvalue()


def read_csv(text: str) -> tuple[list[str], list[list[str]]]:
    rows = list(csv.reader(io.StringIO(text)))
    return rows[0], rows[1:]


def jsonable(obj):
    if isinstance(obj, Fraction):
        return fmt(obj)
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, Path):
        return str(obj)
    return obj


def write_json(path, data) -> str:
    text = json.dumps(jsonable(data), indent=2, sort_keys=True) + "\n"
    Path(path).write_text(text, newline="\n")
    return text


def sha256(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


@dataclass
class RunManifest:
    command: str
    argv: list[str]
    config: dict
    seed: int | None
    version: str
    outputs: dict[str, str] = field(default_factory=dict)

    def record(self, name: str, text: str) -> None:
        self.outputs[name] = sha256(text)

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "argv": self.argv,
            "config": jsonable(self.config),
            "seed": self.seed,
            "version": self.version,
            "outputs": dict(self.outputs),
        }
