"""File ingestion and report serialization helpers.

All output files are written via a temp-file-then-rename sequence so a
crash never leaves a half-written report, and floats are serialized with
round-trip precision so reruns can be compared byte for byte.
"""
from __future__ import annotations

import csv
import hashlib
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .errors import DataError

__all__ = [
    "load_sample_csv",
    "atomic_write_text",
    "atomic_write_json",
    "atomic_write_csv",
    "canonical_json",
    "config_hash",
    "fmt_float",
]


def fmt_float(x: float) -> str:
    """Shortest decimal string that round-trips the double exactly."""
    return repr(float(x))


def load_sample_csv(path: str | os.PathLike, column: int | str = 0,
                    header: bool = False) -> np.ndarray:
    """Read one numeric column from a CSV file.

    ``column`` is a zero-based index, or a column name when ``header`` is
    true.  Raises DataError with the offending line number for anything
    that is not a finite float, and for empty files.
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"sample file not found: {path}")
    values: list[float] = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        col_idx: int | None = None if isinstance(column, str) else int(column)
        start_line = 1
        if header:
            try:
                head = next(reader)
            except StopIteration:
                raise DataError(f"{path}: file is empty") from None
            start_line = 2
            if isinstance(column, str):
                try:
                    col_idx = [h.strip() for h in head].index(column)
                except ValueError:
                    raise DataError(
                        f"{path}: no column named {column!r} in header") from None
        elif isinstance(column, str):
            raise DataError("named column selection requires header=True")
        assert col_idx is not None
        for lineno, row in enumerate(reader, start=start_line):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if col_idx >= len(row):
                raise DataError(
                    f"{path}:{lineno}: row has {len(row)} fields, "
                    f"need column {col_idx}")
            cell = row[col_idx].strip()
            try:
                v = float(cell)
            except ValueError:
                raise DataError(
                    f"{path}:{lineno}: cannot parse {cell!r} as a float") from None
            if not np.isfinite(v):
                raise DataError(f"{path}:{lineno}: non-finite value {cell!r}")
            values.append(v)
    if not values:
        raise DataError(f"{path}: no data rows")
    return np.asarray(values, dtype=float)


def _atomic_write(path: str | os.PathLike, writer) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            writer(fh)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def atomic_write_text(path: str | os.PathLike, text: str) -> None:
    _atomic_write(path, lambda fh: fh.write(text))


def atomic_write_json(path: str | os.PathLike, obj) -> None:
    atomic_write_text(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def atomic_write_csv(path: str | os.PathLike, header: list[str],
                     rows: list[list]) -> None:
    def write(fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt_float(c) if isinstance(c, float) else c for c in row])

    _atomic_write(path, write)


def canonical_json(obj) -> str:
    """Deterministic JSON encoding used for hashing configurations."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def config_hash(obj) -> str:
    return hashlib.sha256(canonical_json(obj).encode()).hexdigest()
