"""Reading and writing matrices as JSON documents or Matrix Market files.

JSON matrices are objects ``{"rows": m, "cols": n, "entries": [[re, im], ...]}``
with entries in row-major order and an optional ``"name"``.  Python's float
repr is the shortest string that reads back to the same double, so JSON
round trips are bit-exact.

Matrix Market input accepts the ``array`` and ``coordinate`` layouts with
``complex``, ``real`` or ``integer`` fields and ``general`` symmetry;
coordinate data is densified.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from typing import List, Optional, Union

import numpy as np

from .errors import ParseError, ShapeError


class Format(str, enum.Enum):
    JSON = "json"
    MATRIX_MARKET = "mm"


@dataclass(frozen=True)
class MatrixDocument:
    matrix: np.ndarray
    name: Optional[str] = None
    source: Optional[str] = None

    @property
    def shape(self):
        return self.matrix.shape

    def __eq__(self, other):
        if not isinstance(other, MatrixDocument):
            return NotImplemented
        return (self.name == other.name and self.shape == other.shape
                and np.array_equal(self.matrix, other.matrix))


def detect_format(data: str) -> Format:
    return Format.MATRIX_MARKET if data.lstrip().startswith("%%MatrixMarket") else Format.JSON


def _text(source: Union[bytes, str]) -> str:
    if isinstance(source, bytes):
        try:
            return source.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"input is not UTF-8: {exc.reason}", offset=exc.start) from exc
    return source


def parse_matrix(source: Union[bytes, str], fmt: Optional[Format] = None,
                 path: Optional[str] = None) -> MatrixDocument:
    """Parse a matrix; ``fmt=None`` picks the format from the first line."""
    text = _text(source)
    fmt = detect_format(text) if fmt is None else Format(fmt)
    if fmt is Format.JSON:
        return _parse_json(text, path)
    return _parse_mm(text, path)


def read_matrix(path: str, fmt: Optional[Format] = None) -> MatrixDocument:
    with open(path, "rb") as fh:
        return parse_matrix(fh.read(), fmt, path)


# -- JSON ------------------------------------------------------------------------

def _number(x, where) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ParseError(f"{where}: expected a number, got {json.dumps(x)}")
    return float(x)


def _parse_json(text: str, path) -> MatrixDocument:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno, exc.colno) from exc
    if not isinstance(obj, dict):
        raise ParseError("matrix document must be a JSON object")
    for key in ("rows", "cols", "entries"):
        if key not in obj:
            raise ParseError(f"matrix document is missing {key!r}")
    rows, cols = obj["rows"], obj["cols"]
    for key, v in (("rows", rows), ("cols", cols)):
        if isinstance(v, bool) or not isinstance(v, int) or v < 0:
            raise ParseError(f"{key!r} must be a nonnegative integer, got {json.dumps(v)}")
    entries = obj["entries"]
    if not isinstance(entries, list):
        raise ParseError("'entries' must be an array of [re, im] pairs")
    if len(entries) != rows * cols:
        raise ShapeError(f"{rows}x{cols} matrix needs {rows * cols} entries, got {len(entries)}")
    values = np.empty(rows * cols, dtype=complex)
    for i, e in enumerate(entries):
        if not (isinstance(e, list) and len(e) == 2):
            raise ParseError(f"entry {i} must be a [re, im] pair, got {json.dumps(e)}")
        values[i] = complex(_number(e[0], f"entry {i}"), _number(e[1], f"entry {i}"))
    if not np.all(np.isfinite(values)):
        raise ParseError("entries must be finite")
    name = obj.get("name")
    if name is not None and not isinstance(name, str):
        raise ParseError("'name' must be a string")
    return MatrixDocument(values.reshape(rows, cols), name, path)


def matrix_to_json_obj(M: np.ndarray, name: Optional[str] = None) -> dict:
    M = np.asarray(M, dtype=complex)
    obj = {"rows": int(M.shape[0]), "cols": int(M.shape[1]),
           "entries": [[float(z.real), float(z.imag)] for z in M.ravel()]}
    if name is not None:
        obj["name"] = name
    return obj


# -- Matrix Market -----------------------------------------------------------------

_FIELDS = {"complex": 2, "real": 1, "integer": 1}


def _tokens(line: str, lineno: int, count: int, what: str) -> List[str]:
    parts = line.split()
    if len(parts) != count:
        raise ParseError(f"expected {count} fields for {what}, got {len(parts)}", lineno, 1)
    return parts


def _int_token(tok: str, lineno: int, line: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"expected an integer, got {tok!r}", lineno, line.find(tok) + 1) from None


def _float_token(tok: str, lineno: int, line: str, integer: bool) -> float:
    try:
        return float(int(tok)) if integer else float(tok)
    except ValueError:
        kind = "an integer" if integer else "a number"
        raise ParseError(f"expected {kind}, got {tok!r}", lineno, line.find(tok) + 1) from None


def _parse_mm(text: str, path) -> MatrixDocument:
    lines = text.splitlines()
    if not lines:
        raise ParseError("empty Matrix Market input", 1)
    header = lines[0].split()
    if len(header) != 5 or header[0] != "%%MatrixMarket":
        raise ParseError("header must read '%%MatrixMarket matrix <layout> <field> <symmetry>'", 1, 1)
    obj, layout, fld, symmetry = (h.lower() for h in header[1:])
    if obj != "matrix":
        raise ParseError(f"unsupported object {header[1]!r}", 1, lines[0].find(header[1]) + 1)
    if layout not in ("array", "coordinate"):
        raise ParseError(f"unsupported layout {header[2]!r}", 1, lines[0].find(header[2]) + 1)
    if fld not in _FIELDS:
        raise ParseError(f"unsupported field {header[3]!r}", 1, lines[0].find(header[3]) + 1)
    if symmetry != "general":
        raise ParseError(f"only 'general' symmetry is supported, got {header[4]!r}", 1,
                         lines[0].find(header[4]) + 1)
    width = _FIELDS[fld]
    integer = fld == "integer"

    name = None
    for ln in lines[1:]:
        if not ln.lstrip().startswith("%"):
            break
        if ln.startswith("% name: "):
            name = ln[len("% name: "):]
            break

    # skip comments and blank lines; keep 1-based line numbers
    body = [(i + 1, ln) for i, ln in enumerate(lines[1:], start=1)
            if ln.strip() and not ln.lstrip().startswith("%")]
    if not body:
        raise ParseError("missing size line", len(lines))
    size_no, size_line = body[0]
    data = body[1:]

    if layout == "array":
        rows, cols = (_int_token(t, size_no, size_line)
                      for t in _tokens(size_line, size_no, 2, "the size line"))
        if rows < 0 or cols < 0:
            raise ParseError("dimensions must be nonnegative", size_no, 1)
        # values may be spread over lines freely; keep each token's position
        toks = [(tok, no, ln) for no, ln in data for tok in ln.split()]
        if len(toks) != rows * cols * width:
            raise ShapeError(f"{rows}x{cols} {fld} array needs {rows * cols * width} values, "
                             f"got {len(toks)}")
        nums = np.array([_float_token(t, no, ln, integer) for t, no, ln in toks])
        # assign parts separately: re + 1j * im would turn -0.0 into +0.0
        values = np.zeros(rows * cols, dtype=complex)
        values.real = nums[0::2] if width == 2 else nums
        if width == 2:
            values.imag = nums[1::2]
        # array layout is column-major
        M = values.reshape(cols, rows).T.copy()
    else:
        rows, cols, nnz = (_int_token(t, size_no, size_line)
                           for t in _tokens(size_line, size_no, 3, "the size line"))
        if rows < 0 or cols < 0 or nnz < 0:
            raise ParseError("sizes must be nonnegative", size_no, 1)
        if len(data) != nnz:
            raise ShapeError(f"header announces {nnz} entries, found {len(data)}")
        M = np.zeros((rows, cols), dtype=complex)
        for no, ln in data:
            toks = _tokens(ln, no, 2 + width, "an entry")
            i, j = (_int_token(t, no, ln) for t in toks[:2])
            if not (1 <= i <= rows and 1 <= j <= cols):
                raise ShapeError(f"entry ({i}, {j}) on line {no} lies outside {rows}x{cols}")
            nums = [_float_token(t, no, ln, integer) for t in toks[2:]]
            # repeated coordinates accumulate, as most readers do
            M[i - 1, j - 1] += complex(nums[0], nums[1] if width == 2 else 0.0)
    if not np.all(np.isfinite(M)):
        raise ParseError("entries must be finite")
    return MatrixDocument(M, name, path)


def serialize_matrix(M, fmt: Format = Format.JSON, name: Optional[str] = None) -> str:
    """Text form of ``M``; ``parse_matrix`` reads it back to the same doubles."""
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2:
        raise ShapeError(f"expected a two-dimensional matrix, got ndim={M.ndim}")
    if Format(fmt) is Format.JSON:
        return json.dumps(matrix_to_json_obj(M, name)) + "\n"
    lines = ["%%MatrixMarket matrix array complex general"]
    if name is not None:
        lines.append(f"% name: {name}")
    lines.append(f"{M.shape[0]} {M.shape[1]}")
    lines.extend(f"{float(z.real)!r} {float(z.imag)!r}" for z in M.T.ravel())
    return "\n".join(lines) + "\n"


def write_matrix(path: str, M, fmt: Format = Format.JSON, name: Optional[str] = None):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_matrix(M, fmt, name))


__all__ = [
    "Format",
    "MatrixDocument",
    "detect_format",
    "matrix_to_json_obj",
    "parse_matrix",
    "read_matrix",
    "serialize_matrix",
    "write_matrix",
]
