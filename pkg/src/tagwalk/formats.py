"""Byte-stable text serialization shared by the pipeline stages.

Floats are written with ``repr``, the shortest round-tripping decimal
form, so identical values always produce identical bytes.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import ParameterError

__all__ = ["format_cell", "write_csv", "read_csv", "sha256_of", "write_json"]


def format_cell(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        raise ParameterError("booleans have no CSV cell form")
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(format_cell(cell) for cell in row) + "\n")


def read_csv(path) -> tuple[list[str], list[list[str]]]:
    """Header and raw string rows of a CSV written by :func:`write_csv`."""
    header: list[str] | None = None
    rows: list[list[str]] = []
    with open(path, "r", encoding="ascii") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            cells = line.split(",")
            if header is None:
                header = cells
            else:
                rows.append(cells)
    if header is None:
        raise ParameterError(f"{path}: empty CSV")
    return header, rows


def sha256_of(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def write_json(path, payload: dict) -> None:
    Path(path).write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n",
                          encoding="ascii")
