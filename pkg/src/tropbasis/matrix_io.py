"""Reading and writing matrices in the text and JSON formats.

Text format: a header line ``m n`` (rectangular) or ``n sym`` (symmetric),
then the entries in row-major order, whitespace separated, as integers or
``p/q`` rationals.  ``#`` starts a comment that runs to the end of the line.

JSON format: ``{"rows": m, "cols": n, "symmetric": bool, "entries": [[...]]}``
with entries as numbers or rational strings.
"""
from __future__ import annotations

import json
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .errors import TropBasisError
from .normal_form import FormMatrix
from .trop_core import SymMatrix, TropMatrix

__all__ = [
    "MatrixParseError",
    "parse_matrix",
    "parse_matrix_json",
    "load_matrix",
    "format_matrix",
    "matrix_to_json",
    "data_path",
    "load_data_matrix",
    "load_form",
    "DATA_FILES",
    "FORM_FILES",
]

DATA_FILES = ("fano7.txt", "fano7_sym.txt", "witness13.txt")
FORM_FILES = (
    "identity.txt",
    "three_cycle.txt",
    "five_cycle.txt",
    "transposition_fixed.txt",
    "transposition_three_cycle.txt",
    "two_pairs_positive.txt",
    "offdiagonal.txt",
    "two_pairs_mixed.txt",
    "two_pairs_zero_block.txt",
    "zero_blocks_chain.txt",
    "zero_blocks.txt",
)


class MatrixParseError(TropBasisError, ValueError):
    """Malformed matrix input, with the location of the offending token."""

    def __init__(self, message: str, source: str = "<string>", line: int | None = None, col: int | None = None):
        self.source, self.line, self.col = source, line, col
        where = source if line is None else f"{source}:{line}:{col}"
        super().__init__(f"{where}: {message}")


def _tokens(text: str):
    # (token, line, column), both 1-based, comments stripped
    for lineno, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0]
        col = 0
        for tok in body.split():
            col = body.index(tok, col)
            yield tok, lineno, col + 1
            col += len(tok)


def _rational(tok: str, source: str, line: int, col: int) -> Fraction:
    try:
        return Fraction(tok)
    except (ValueError, ZeroDivisionError):
        raise MatrixParseError(f"bad entry {tok!r}; expected an integer or p/q", source, line, col) from None


def parse_matrix(text: str, source: str = "<string>") -> TropMatrix:
    """Parse the text format; ``n sym`` headers produce a :class:`SymMatrix`."""
    toks = list(_tokens(text))
    if len(toks) < 2:
        raise MatrixParseError("missing header 'm n' or 'n sym'", source, 1, 1)
    (a, la, ca), (b, lb, cb) = toks[0], toks[1]
    if la != lb:
        raise MatrixParseError("header must be a single line 'm n' or 'n sym'", source, lb, cb)
    try:
        m = int(a)
    except ValueError:
        raise MatrixParseError(f"bad dimension {a!r}", source, la, ca) from None
    symmetric = b.lower() == "sym"
    if symmetric:
        n = m
    else:
        try:
            n = int(b)
        except ValueError:
            raise MatrixParseError(f"bad dimension {b!r}; expected an integer or 'sym'", source, lb, cb) from None
    if m <= 0 or n <= 0:
        raise MatrixParseError("dimensions must be positive", source, la, ca)
    body = toks[2:]
    if len(body) != m * n:
        where = body[m * n] if len(body) > m * n else (toks[-1] if toks else ("", 1, 1))
        raise MatrixParseError(f"expected {m * n} entries, found {len(body)}", source, where[1], where[2])
    vals = [_rational(t, source, ln, cl) for t, ln, cl in body]
    grid = [vals[r * n : (r + 1) * n] for r in range(m)]
    if symmetric:
        for i in range(m):
            for j in range(i):
                if grid[i][j] != grid[j][i]:
                    _, ln, cl = body[i * n + j]
                    raise MatrixParseError(
                        f"entry ({i + 1},{j + 1}) = {grid[i][j]} differs from ({j + 1},{i + 1}) = {grid[j][i]}",
                        source,
                        ln,
                        cl,
                    )
        return SymMatrix(grid)
    return TropMatrix(grid)


def parse_matrix_json(obj, source: str = "<json>") -> TropMatrix:
    """Build a matrix from the JSON form (already decoded)."""
    if not isinstance(obj, dict) or "entries" not in obj:
        raise MatrixParseError("JSON matrix needs an 'entries' field", source)
    try:
        grid = [[Fraction(str(v)) for v in row] for row in obj["entries"]]
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise MatrixParseError(f"bad entry: {exc}", source) from None
    rows, cols = obj.get("rows", len(grid)), obj.get("cols", len(grid[0]) if grid else 0)
    if len(grid) != rows or any(len(r) != cols for r in grid):
        raise MatrixParseError(f"entries do not form a {rows}x{cols} grid", source)
    try:
        return SymMatrix(grid) if obj.get("symmetric", False) else TropMatrix(grid)
    except ValueError as exc:
        raise MatrixParseError(str(exc), source) from None


def load_matrix(path: str | Path) -> TropMatrix:
    """Read a matrix file, choosing JSON when the content starts with ``{``."""
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise MatrixParseError(f"cannot read file: {exc.strerror}", str(p)) from None
    if text.lstrip().startswith("{"):
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise MatrixParseError(exc.msg, str(p), exc.lineno, exc.colno) from None
        return parse_matrix_json(obj, str(p))
    return parse_matrix(text, str(p))


def format_matrix(A: TropMatrix) -> str:
    """Text form of ``A``; symmetric matrices get the ``n sym`` header."""
    head = f"{A.rows} sym" if isinstance(A, SymMatrix) else f"{A.rows} {A.cols}"
    width = max(len(str(v)) for row in A.entries for v in row)
    lines = [head] + [" ".join(str(v).rjust(width) for v in row) for row in A.entries]
    return "\n".join(lines) + "\n"


def matrix_to_json(A: TropMatrix) -> dict:
    return {
        "rows": A.rows,
        "cols": A.cols,
        "symmetric": isinstance(A, SymMatrix),
        "entries": [[str(v) for v in row] for row in A.entries],
    }


def data_path(name: str) -> Path:
    """Filesystem path of a bundled data file."""
    return Path(str(resources.files("tropbasis") / "data" / name))


def load_data_matrix(name: str) -> TropMatrix:
    return load_matrix(data_path(name))


def load_form(name: str) -> FormMatrix:
    """A bundled form pattern (``.`` blank, ``+`` positive, rationals)."""
    return FormMatrix.parse(data_path("forms/" + name).read_text())
