"""
Text formats for matrices (".wam") and assignment tables (".wat").

A ".wam" file holds "n k" on its first line, then n lines of k space-separated
0/1 digits. A ".wat" file holds "n k", then n lines "i: c1 c2 ..." with
ascending code numbers.
"""

import os
import tempfile
from pathlib import Path

from pydantic import ValidationError

from walsh.exceptions import MatrixFormatError
from walsh.schemas.matrix import AssignmentTable, BinaryMatrix


def dumps_matrix(m: BinaryMatrix) -> str:
    lines = [f"{m.n} {m.k}"] + [" ".join(str(bit) for bit in row) for row in m.cells]
    return "\n".join(lines) + "\n"


def dumps_table(s: AssignmentTable) -> str:
    s = s.canonical()
    lines = [f"{s.n} {s.k}"]
    for i, codes in enumerate(s.rows, start=1):
        lines.append(f"{i}: {' '.join(str(code) for code in codes)}".rstrip())
    return "\n".join(lines) + "\n"


def _is_number(field: str) -> bool:
    return field.isascii() and field.isdigit()


def _header(lines: list[str]) -> tuple[int, int]:
    if not lines:
        raise MatrixFormatError("empty file, expected header 'n k'", line=1)
    fields = lines[0].split()
    if len(fields) != 2 or not all(_is_number(field) for field in fields):
        raise MatrixFormatError(f"expected header 'n k', got {lines[0]!r}", line=1)
    n, k = int(fields[0]), int(fields[1])
    if n < 1 or k < 1:
        raise MatrixFormatError("n and k must be positive", line=1)
    return n, k


def _body(lines: list[str], n: int) -> list[str]:
    body = lines[1 : n + 1]
    if len(body) < n:
        raise MatrixFormatError(
            f"expected {n} rows, found {len(body)}", line=len(body) + 2
        )
    for extra, line in enumerate(lines[n + 1 :], start=n + 2):
        if line.strip():
            raise MatrixFormatError("unexpected content after the last row", line=extra)
    return body


def loads_matrix(text: str) -> BinaryMatrix:
    """
    Parse a ".wam" document.

    Raises:
        MatrixFormatError: With the 1-based line number of the first problem.
    """
    lines = text.splitlines()
    n, k = _header(lines)

    rows = []
    for number, line in enumerate(_body(lines, n), start=2):
        digits = line.split()
        if len(digits) != k:
            raise MatrixFormatError(f"expected {k} digits, got {len(digits)}", line=number)
        if any(digit not in ("0", "1") for digit in digits):
            raise MatrixFormatError("cells must be 0 or 1", line=number)
        rows.append([int(digit) for digit in digits])

    return BinaryMatrix.from_rows(rows)


def loads_table(text: str) -> AssignmentTable:
    """
    Parse a ".wat" document.

    Raises:
        MatrixFormatError: With the 1-based line number of the first problem.
    """
    lines = text.splitlines()
    n, k = _header(lines)

    rows = []
    for number, line in enumerate(_body(lines, n), start=2):
        user, sep, codes = line.partition(":")
        if not sep or user.strip() != str(number - 1):
            raise MatrixFormatError(f"expected '{number - 1}: codes'", line=number)
        try:
            row = tuple(int(code) for code in codes.split())
            rows.append(AssignmentTable(k=k, rows=(row,)).rows[0])
        except ValueError as e:
            message = e.errors()[0]["msg"] if isinstance(e, ValidationError) else str(e)
            raise MatrixFormatError(message, line=number) from e

    return AssignmentTable(k=k, rows=tuple(rows))


def _write_atomic(path: Path, text: str) -> None:
    path = Path(path)
    handle = tempfile.NamedTemporaryFile(
        "w", dir=path.parent or ".", prefix=f".{path.name}.", delete=False
    )
    try:
        with handle:
            handle.write(text)
        os.replace(handle.name, path)
    except BaseException:
        os.unlink(handle.name)
        raise


def write_matrix(m: BinaryMatrix, path: Path) -> None:
    _write_atomic(path, dumps_matrix(m))


def write_table(s: AssignmentTable, path: Path) -> None:
    _write_atomic(path, dumps_table(s))


def read_text(path: Path) -> str:
    """
    Read a UTF-8 input file.

    Raises:
        MatrixFormatError: With the line of the first byte that does not decode.
    """
    data = Path(path).read_bytes()
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as e:
        line = data[: e.start].count(b"\n") + 1
        raise MatrixFormatError("file is not valid UTF-8 text", line=line) from e


def read_matrix(path: Path) -> BinaryMatrix:
    return loads_matrix(read_text(path))


def read_table(path: Path) -> AssignmentTable:
    return loads_table(read_text(path))
