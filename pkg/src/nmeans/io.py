"""Plain-text matrix format.

A file holds zero or more matrices separated by blank lines.  Each matrix is
a line with its dimension ``d`` followed by ``d`` rows of ``d``
whitespace-separated decimals::

    2
    1 0
    0 1

Numbers are written with 17 significant digits so a round trip is exact.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .exceptions import ParseError, ValidationError
from .spd import check_spd


def parse_matrices(text: str, validate: bool = True) -> list:
    """Parse matrices from ``text``; with ``validate`` each must be SPD."""
    lines = text.splitlines()
    out = []
    i = 0
    n = len(lines)
    while i < n:
        if not lines[i].strip():
            i += 1
            continue
        header = lines[i].split()
        try:
            if len(header) != 1:
                raise ValueError
            dim = int(header[0])
            if dim < 1:
                raise ValueError
        except ValueError:
            raise ParseError(f"expected a positive dimension, got {lines[i]!r}", i + 1) from None
        rows = []
        for r in range(dim):
            lineno = i + 2 + r
            if lineno > n or not lines[lineno - 1].strip():
                raise ParseError(f"matrix {len(out)} ends after {r} of {dim} rows", lineno)
            fields = lines[lineno - 1].split()
            if len(fields) != dim:
                raise ParseError(f"expected {dim} entries, got {len(fields)}", lineno)
            try:
                rows.append([float(v) for v in fields])
            except ValueError:
                raise ParseError(f"non-numeric entry in {lines[lineno - 1]!r}", lineno) from None
        matrix = np.array(rows)
        if validate:
            try:
                matrix = check_spd(matrix)
            except ValueError as exc:
                raise ValidationError(f"matrix {len(out)}: {exc}") from None
        out.append(matrix)
        i += 1 + dim
    return out


def parse_matrix_file(path, validate: bool = True) -> list:
    return parse_matrices(Path(path).read_text(), validate)


def format_matrix(matrix) -> str:
    matrix = np.asarray(matrix, dtype=float)
    rows = [" ".join(f"{v:.17g}" for v in row) for row in matrix]
    return "\n".join([str(matrix.shape[0])] + rows) + "\n"


def format_matrices(matrices) -> str:
    return "\n".join(format_matrix(m) for m in matrices)


def write_matrix_file(path, matrices) -> None:
    Path(path).write_text(format_matrices(matrices))


def parse_scalars(text: str, positive: bool = True) -> list:
    """Whitespace-separated finite reals, required to be positive by default."""
    values = []
    for lineno, line in enumerate(text.splitlines(), 1):
        for field in line.split():
            try:
                value = float(field)
            except ValueError:
                raise ParseError(f"not a number: {field!r}", lineno) from None
            if not np.isfinite(value) or (positive and not value > 0):
                raise ValidationError(f"line {lineno}: expected a {'positive' if positive else 'finite'} real, got {field}")
            values.append(value)
    return values
