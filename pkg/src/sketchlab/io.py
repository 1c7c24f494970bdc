"""Readers for libsvm / dense CSV inputs and the result CSV format."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ParseError

CSV_HEADER = ("k", "predicted", "empirical_mean", "empirical_std", "epsilon_hat", "closed_form")


def _text(data) -> str:
    if isinstance(data, (bytes, bytearray)):
        try:
            return bytes(data).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"input is not UTF-8: {exc}") from exc
    return data


def parse_libsvm(data) -> np.ndarray:
    """Parse libsvm/svmlight text into a dense matrix.

    Each non-blank line is ``label idx:val idx:val ...`` with 1-based,
    strictly increasing indices; ``#`` starts a comment.  Labels are
    discarded and the column count is the largest index seen.
    """
    rows: list[tuple[list[int], list[float]]] = []
    width = 0
    for lineno, line in enumerate(_text(data).splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        label, feats = tokens[0], tokens[1:]
        if ":" in label:
            raise ParseError(f"missing label before {label!r}", lineno)
        try:
            float(label)
        except ValueError:
            raise ParseError(f"bad label {label!r}", lineno) from None
        idx, val = [], []
        prev = 0
        for tok in feats:
            head, sep, tail = tok.partition(":")
            if not sep:
                raise ParseError(f"expected idx:val, got {tok!r}", lineno)
            try:
                j = int(head)
                v = float(tail)
            except ValueError:
                raise ParseError(f"expected idx:val, got {tok!r}", lineno) from None
            if j < 1:
                raise ParseError(f"feature index must be positive, got {j}", lineno)
            if j <= prev:
                raise ParseError(f"feature indices must increase ({prev} then {j})", lineno)
            if not math.isfinite(v):
                raise ParseError(f"non-finite value {tail!r}", lineno)
            idx.append(j - 1)
            val.append(v)
            prev = j
        width = max(width, prev)
        rows.append((idx, val))
    if not rows:
        raise ParseError("EmptyInput: no data lines")
    out = np.zeros((len(rows), width))
    for i, (idx, val) in enumerate(rows):
        out[i, idx] = val
    return out


def format_libsvm(matrix, labels=None) -> str:
    """Inverse of :func:`parse_libsvm`; zero entries are omitted."""
    matrix = np.asarray(matrix, dtype=float)
    if labels is None:
        labels = np.zeros(matrix.shape[0])
    lines = []
    for lab, row in zip(labels, matrix):
        nz = np.flatnonzero(row)
        feats = " ".join(f"{j + 1}:{float(row[j])!r}" for j in nz)
        lines.append(f"{float(lab)!r} {feats}".rstrip())
    return "\n".join(lines) + "\n"


def parse_dense_csv(data) -> np.ndarray:
    """Comma-separated reals, one row per line, no header."""
    text = _text(data)
    if not text.strip():
        raise ParseError("EmptyInput: no data lines")
    try:
        out = np.loadtxt(io.StringIO(text), delimiter=",", ndmin=2, dtype=float)
    except ValueError as exc:
        raise ParseError(str(exc)) from exc
    if not np.all(np.isfinite(out)):
        raise ParseError("non-finite value in CSV input")
    return out


def load_matrix(path, fmt: str | None = None) -> np.ndarray:
    path = Path(path)
    if fmt is None:
        fmt = "csv" if path.suffix.lower() == ".csv" else "libsvm"
    data = path.read_bytes()
    if fmt == "libsvm":
        return parse_libsvm(data)
    if fmt == "csv":
        return parse_dense_csv(data)
    raise ValueError(f"unknown input format {fmt!r}")


@dataclass
class ResultRow:
    k: int
    predicted: float | None = None
    empirical_mean: float | None = None
    empirical_std: float | None = None
    epsilon_hat: float | None = None
    closed_form: float | None = None
    # not written; marks rows whose prediction failed with KExceedsRank
    k_exceeds_rank: bool = False


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".12g")


def format_csv(rows) -> str:
    lines = [",".join(CSV_HEADER)]
    for r in rows:
        lines.append(",".join(_fmt(getattr(r, name)) for name in CSV_HEADER))
    return "\n".join(lines) + "\n"


def write_csv(rows, path) -> None:
    """Write result rows: fixed header, 12 significant digits, UTF-8, LF endings."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_csv(rows))


def read_csv(path) -> list[ResultRow]:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != CSV_HEADER:
            raise ParseError(f"unexpected header {header}")
        out = []
        for rec in reader:
            vals = {name: (float(x) if x != "" else None) for name, x in zip(header, rec)}
            vals["k"] = int(vals["k"])
            out.append(ResultRow(**vals))
    return out

