"""Deterministic result files: CSV tables and a JSON run manifest.

Floats are written with 17 significant digits so a float64 round-trips
exactly; newlines are LF on every platform. Identical inputs therefore
produce byte-identical files, which the manifest certifies by recording
a sha256 per artifact.
"""

from __future__ import annotations

import hashlib
import json
import os


def format_cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return "%.17g" % value
    if isinstance(value, complex):
        return "%.17g%+.17gj" % (value.real, value.imag)
    return str(value)


def write_csv(path: str, header: list[str], rows) -> str:
    """Write a table and return its sha256 hex digest."""
    lines = [",".join(header)]
    ncols = len(header)
    for row in rows:
        if len(row) != ncols:
            raise ValueError(f"row width {len(row)} does not match header width {ncols}")
        lines.append(",".join(format_cell(v) for v in row))
    data = ("\n".join(lines) + "\n").encode("ascii")
    with open(path, "wb") as fh:
        fh.write(data)
    return hashlib.sha256(data).hexdigest()


def write_manifest(path: str, payload: dict) -> str:
    data = (json.dumps(payload, indent=2, sort_keys=True, default=str) + "\n").encode("ascii")
    with open(path, "wb") as fh:
        fh.write(data)
    return hashlib.sha256(data).hexdigest()


def sha256_of(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(65536), b""):
            h.update(block)
    return h.hexdigest()


def ensure_outdir(path: str) -> str:
    os.makedirs(path, exist_ok=True)
    return path
