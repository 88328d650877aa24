"""Dense complex matrix plumbing: text format, norms and small helpers."""

from typing import Iterator, List, Optional, Tuple, Union

import math
import re

import numpy as np

from hermpert.config import Config, pick
from hermpert.exceptions import HermPertException, MatrixParseError
from hermpert.jacobi_oracle import eigvalsh
from hermpert.structs.matrix import DenseMatrix, HermitianMatrix

AnyMatrix = Union[DenseMatrix, HermitianMatrix]

_UNSIGNED = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_ENTRY = re.compile(
    rf"^(?P<re>[+-]?{_UNSIGNED})(?:(?P<sign>[+-])(?P<im>{_UNSIGNED})i)?$"
)
_TOKEN = re.compile(r"\S+")


def _parse_entry(token: str, line: int, column: int) -> complex:
    match = _ENTRY.match(token)
    if match is None:
        raise MatrixParseError(f"malformed entry {token!r}", line, column)
    real = float(match.group("re"))
    imag = 0.0
    if match.group("im") is not None:
        imag = float(match.group("sign") + match.group("im"))
    if not (math.isfinite(real) and math.isfinite(imag)):
        raise MatrixParseError(f"non-finite entry {token!r}", line, column)
    return complex(real, imag)


def _tokens(line: str) -> List[Tuple[str, int]]:
    return [(m.group(0), m.start() + 1) for m in _TOKEN.finditer(line)]


def _read_one(
    lines: List[str], start: int, hermitian: Optional[bool]
) -> Tuple[AnyMatrix, int]:
    # skip blank separator lines between matrices
    while start < len(lines) and not lines[start].strip():
        start += 1
    if start >= len(lines):
        raise MatrixParseError("missing dimension header", start + 1)
    header = _tokens(lines[start])
    try:
        dims = [int(tok) for tok, _ in header]
    except ValueError:
        raise MatrixParseError(
            f"malformed dimension header {lines[start].strip()!r}", start + 1
        ) from None
    if len(dims) not in (1, 2) or any(d < 1 for d in dims):
        raise MatrixParseError(
            f"dimension header must be 'n' or 'r c' with positive integers, "
            f"got {lines[start].strip()!r}",
            start + 1,
        )
    rows, cols = (dims[0], dims[0]) if len(dims) == 1 else (dims[0], dims[1])
    if hermitian and rows != cols:
        raise MatrixParseError(
            f"Hermitian matrix must be square, got {rows}x{cols}", start + 1
        )

    values = np.zeros((rows, cols), dtype=np.complex128)
    for i in range(rows):
        line_no = start + 2 + i
        if start + 1 + i >= len(lines):
            raise MatrixParseError(
                f"expected {rows} rows, found {i}", line_no
            )
        tokens = _tokens(lines[start + 1 + i])
        if len(tokens) != cols:
            raise MatrixParseError(
                f"expected {cols} entries, found {len(tokens)}", line_no
            )
        for j, (token, column) in enumerate(tokens):
            values[i, j] = _parse_entry(token, line_no, column)

    as_hermitian = hermitian if hermitian is not None else len(dims) == 1
    try:
        if as_hermitian:
            matrix: AnyMatrix = HermitianMatrix.from_array(values)
        else:
            matrix = DenseMatrix.from_array(values)
    except HermPertException as exc:
        raise MatrixParseError(exc.message, start + 1) from exc
    return matrix, start + 1 + rows


def parse_matrix(text: str, hermitian: Optional[bool] = None) -> AnyMatrix:
    """Parses one matrix in the text exchange format.

    The first line holds ``n`` (square) or ``r c`` (rectangular), followed by
    one line per row of whitespace-separated entries such as ``1.5``,
    ``1.5-0.25i`` or ``0+1i``.

    Args:
        text: The matrix text.
        hermitian: True to require a Hermitian matrix, False for a dense one,
            None to decide by the header (``n`` means Hermitian).

    Returns:
        A :class:`HermitianMatrix` or :class:`DenseMatrix`.

    Raises:
        MatrixParseError: On malformed entries, dimension mismatches,
            non-finite values or non-Hermitian input in Hermitian mode.
    """
    lines = text.split("\n")
    matrix, end = _read_one(lines, 0, hermitian)
    if any(line.strip() for line in lines[end:]):
        raise MatrixParseError("trailing content after matrix", end + 1)
    return matrix


def parse_matrices(text: str, hermitian: Optional[bool] = None) -> List[AnyMatrix]:
    """Parses consecutive matrices from one stream."""
    lines = text.split("\n")
    out = []
    position = 0
    while any(line.strip() for line in lines[position:]):
        matrix, position = _read_one(lines, position, hermitian)
        out.append(matrix)
    return out


def format_real(x: float) -> str:
    return format(float(x), f".{Config.OUTPUT_DIGITS}g")


def _format_entry(z: complex) -> str:
    real = format_real(z.real)
    if z.imag == 0.0 and not math.copysign(1.0, z.imag) < 0:
        return real
    sign = "-" if math.copysign(1.0, z.imag) < 0 else "+"
    return f"{real}{sign}{format_real(abs(z.imag))}i"


def _format_rows(values: np.ndarray) -> Iterator[str]:
    for row in values:
        yield " ".join(_format_entry(complex(z)) for z in row)


def format_matrix(m: AnyMatrix, square_header: Optional[bool] = None) -> str:
    """Writes a matrix in the text exchange format with 17 significant digits.

    Hermitian matrices get the one-number header unless ``square_header`` is
    False; dense matrices always get ``r c``.
    """
    values = np.asarray(m.entries)
    if square_header is None:
        square_header = isinstance(m, HermitianMatrix)
    rows, cols = values.shape
    header = f"{rows}" if square_header else f"{rows} {cols}"
    return "\n".join([header, *_format_rows(values)]) + "\n"


def frobenius_norm(m: Union[AnyMatrix, np.ndarray]) -> float:
    values = m if isinstance(m, np.ndarray) else m.entries
    return float(np.linalg.norm(values))


def operator_norm(m: Union[AnyMatrix, np.ndarray]) -> float:
    """Returns the spectral norm (largest singular value).

    For Hermitian input this is ``max |lam_i|`` from the Jacobi oracle; other
    matrices go through the oracle on the Gram matrix ``m* m``.
    """
    if isinstance(m, HermitianMatrix):
        return float(np.max(np.abs(eigvalsh(m))))
    values = m if isinstance(m, np.ndarray) else m.entries
    if values.size == 0:
        return 0.0
    gram = values.conj().T @ values
    if gram.shape[0] > values.shape[0]:
        gram = values @ values.conj().T
    top = float(eigvalsh(HermitianMatrix.from_array(gram, 1.0))[0])
    return math.sqrt(max(top, 0.0))


def hadamard(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.multiply(a, b)


def pinv_diagonal(
    values: np.ndarray, scale: float = 1.0, tol: Optional[float] = None
) -> np.ndarray:
    """Moore-Penrose inverse of a real diagonal, given by its diagonal.

    Entries with ``|x| <= tol * max(1, scale)`` map to zero, the others to
    their reciprocal.
    """
    cutoff = pick(tol, Config.PINV_TOL) * max(1.0, scale)
    values = np.asarray(values, dtype=np.float64)
    out = np.zeros_like(values)
    keep = np.abs(values) > cutoff
    out[keep] = 1.0 / values[keep]
    return out
