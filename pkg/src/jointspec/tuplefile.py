"""Reading and writing matrix tuples as ``jspec-1`` JSON documents.

Complex entries are ``[re, im]`` pairs printed with 17 significant digits,
which round-trips every 64-bit float exactly.
"""
from __future__ import annotations

import json
import math
from typing import Optional, Tuple

import numpy as np

from .joint_spectrum import MatrixTuple

SCHEMA_VERSION = "jspec-1"


class TupleFileError(ValueError):
    pass


def _num(x: float) -> str:
    x = float(x)
    if not math.isfinite(x):
        raise TupleFileError(f"non-finite value {x!r} cannot be serialized")
    if x == 0.0 and math.copysign(1.0, x) < 0:
        return "-0.0"
    return "%.17g" % x


def dumps_tuple(A: MatrixTuple, metadata: Optional[dict] = None) -> str:
    mats = []
    for M in A.matrices:
        rows = []
        for row in M:
            rows.append("      [" + ", ".join(f"[{_num(z.real)}, {_num(z.imag)}]" for z in row) + "]")
        mats.append("    [\n" + ",\n".join(rows) + "\n    ]")
    parts = [
        f'  "schema_version": {json.dumps(SCHEMA_VERSION)}',
        f'  "n": {A.n}',
        f'  "m": {A.m}',
        '  "matrices": [\n' + ",\n".join(mats) + "\n  ]",
    ]
    if metadata:
        parts.append('  "metadata": ' + json.dumps(metadata, sort_keys=True))
    return "{\n" + ",\n".join(parts) + "\n}\n"


def write_tuple(path, A: MatrixTuple, metadata: Optional[dict] = None) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps_tuple(A, metadata))


def loads_tuple(text: str) -> Tuple[MatrixTuple, dict]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TupleFileError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("schema_version") != SCHEMA_VERSION:
        raise TupleFileError(f"expected schema_version {SCHEMA_VERSION!r}")
    try:
        n, m = int(doc["n"]), int(doc["m"])
        raw = np.asarray(doc["matrices"], dtype=np.float64)
    except (KeyError, TypeError, ValueError) as exc:
        raise TupleFileError(f"malformed tuple file: {exc}") from exc
    if n < 1 or m < 1 or raw.shape != (m, n, n, 2):
        raise TupleFileError(f"matrices have shape {raw.shape}, expected ({m}, {n}, {n}, 2)")
    if not np.all(np.isfinite(raw)):
        raise TupleFileError("matrices contain non-finite values")
    return MatrixTuple(raw[..., 0] + 1j * raw[..., 1]), doc.get("metadata") or {}


def read_tuple(path) -> Tuple[MatrixTuple, dict]:
    with open(path, "r", encoding="utf-8") as fh:
        return loads_tuple(fh.read())


def complex_pairs(values) -> list:
    """Nested ``[re, im]`` lists for JSON output."""
    arr = np.asarray(values, dtype=np.complex128)
    return np.stack([arr.real, arr.imag], axis=-1).tolist()
