"""Core domain types and answer semantics for pooled group testing.

A *test matrix* is an m x n boolean matrix: rows are pooled tests, columns
are items (1-based outside this module). A test answers positive (1) exactly
when its pool intersects the set of defective items, so the vector of
answers for a defective set I is the bitwise OR of the columns indexed by I.

Rows are stored bit-packed (one ``uint8`` holds 8 cells, most significant
bit first) because decoding is row-driven: elimination ORs whole rows, and
column bits are extracted on demand. All types here are immutable after
construction and safe to share across threads; every operation is a pure
function.

Matrix interchange uses the ``GTM1`` text format::

    GTM1 <m> <n> <model_tag> <seed>
    <row 1: exactly n characters, each '0' or '1'>
    ...
    <row m>

Every line, including the last row, is terminated by a single ``\\n``.
``write`` after ``read`` reproduces a valid file byte for byte.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "PoolTestError",
    "InputError",
    "ParseError",
    "BudgetExceededError",
    "MODEL_TAGS",
    "MODELS",
    "PROPERTIES",
    "TestMatrix",
    "DesignSpec",
    "validate_items",
    "validate_answers",
    "answer_vector",
    "dumps_gtm1",
    "parse_gtm1",
    "write_gtm1",
    "read_gtm1",
]


class PoolTestError(Exception):
    """Base error for this package."""


class InputError(PoolTestError, ValueError):
    """Inputs violate a documented contract (domain, range, shape)."""


class ParseError(InputError):
    """A text artifact (GTM1 matrix, answer line, item list) is malformed.

    ``line`` and ``column`` are 1-based positions when known.
    """

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(f"{where}{message}")
        self.line = line
        self.column = column


class BudgetExceededError(PoolTestError):
    """An exhaustive phase would exceed its configured work budget."""


MODEL_TAGS = ("RID", "RrSD", "Explicit")
MODELS = ("rid", "rrsd")
PROPERTIES = ("disjunct", "separable", "semidisjunct")

_POPCOUNT8 = np.array([bin(i).count("1") for i in range(256)], dtype=np.int64)


def _require_int(value, name: str, minimum: int | None = None, maximum: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        raise InputError(f"{name} must be an integer, got {value!r}")
    v = int(value)
    if minimum is not None and v < minimum:
        raise InputError(f"{name} must be >= {minimum}, got {v}")
    if maximum is not None and v > maximum:
        raise InputError(f"{name} must be <= {maximum}, got {v}")
    return v


@dataclass(frozen=True, eq=False)
class TestMatrix:
    """Immutable bit-packed m x n test matrix.

    ``bits`` has shape ``(m, ceil(n/8))`` and dtype ``uint8``; cell (j, i)
    (0-based) lives in byte ``i // 8`` of row j at bit mask ``0x80 >> (i % 8)``.
    Padding bits past column n are always zero. ``seed`` records the
    generator seed the matrix was drawn from (0 for explicit matrices) so
    any derived quantity can name its source.
    """

    m: int
    n: int
    bits: np.ndarray
    model_tag: str = "Explicit"
    seed: int = 0

    def __post_init__(self):
        _require_int(self.m, "m", 1)
        _require_int(self.n, "n", 1)
        _require_int(self.seed, "seed", 0)
        if self.model_tag not in MODEL_TAGS:
            raise InputError(f"model_tag must be one of {MODEL_TAGS}, got {self.model_tag!r}")
        if not isinstance(self.bits, np.ndarray) or self.bits.dtype != np.uint8:
            raise InputError("bits must be a uint8 ndarray")
        nbytes = (self.n + 7) // 8
        if self.bits.shape != (self.m, nbytes):
            raise InputError(
                f"bits shape {self.bits.shape} does not match (m, ceil(n/8)) = {(self.m, nbytes)}"
            )
        pad = (-self.n) % 8
        if pad and int(self.bits[:, -1].max(initial=0)) & ((1 << pad) - 1):
            raise InputError("padding bits past column n must be zero")
        self.bits.setflags(write=False)

    @classmethod
    def from_dense(cls, rows, model_tag: str = "Explicit", seed: int = 0) -> "TestMatrix":
        """Build a matrix from a dense 0/1 array of shape (m, n)."""
        dense = np.asarray(rows)
        if dense.ndim != 2:
            raise InputError("dense rows must be a 2-d array")
        if dense.dtype != bool:
            vals = np.unique(dense)
            if not np.isin(vals, (0, 1)).all():
                raise InputError("dense cells must be 0 or 1")
            dense = dense.astype(bool)
        m, n = dense.shape
        return cls(m=m, n=n, bits=np.packbits(dense, axis=1), model_tag=model_tag, seed=seed)

    @classmethod
    def identity(cls, n: int) -> "TestMatrix":
        """The n x n identity design: test j contains exactly item j."""
        return cls.from_dense(np.eye(n, dtype=bool))

    def dense(self) -> np.ndarray:
        """Unpacked uint8 array of shape (m, n)."""
        return np.unpackbits(self.bits, axis=1, count=self.n)

    def get(self, row: int, item: int) -> int:
        """Cell value for 0-based ``row`` and 1-based ``item``."""
        _require_int(row, "row", 0, self.m - 1)
        _require_int(item, "item", 1, self.n)
        i = item - 1
        return (int(self.bits[row, i >> 3]) >> (7 - (i & 7))) & 1

    def column_bits(self, item: int) -> np.ndarray:
        """Column of 1-based ``item`` as a length-m uint8 vector."""
        _require_int(item, "item", 1, self.n)
        i = item - 1
        return (self.bits[:, i >> 3] >> (7 - (i & 7))) & 1

    def row_items(self, row: int) -> tuple[int, ...]:
        """1-based items pooled in 0-based test ``row``."""
        _require_int(row, "row", 0, self.m - 1)
        return tuple((np.flatnonzero(np.unpackbits(self.bits[row], count=self.n)) + 1).tolist())

    def row_weights(self) -> np.ndarray:
        """Number of items in each test."""
        return _POPCOUNT8[self.bits].sum(axis=1)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TestMatrix):
            return NotImplemented
        return (
            self.m == other.m
            and self.n == other.n
            and self.model_tag == other.model_tag
            and self.seed == other.seed
            and bool(np.array_equal(self.bits, other.bits))
        )

    def __repr__(self) -> str:
        return f"TestMatrix(m={self.m}, n={self.n}, model_tag={self.model_tag!r}, seed={self.seed})"


@dataclass(frozen=True)
class DesignSpec:
    """A resolved pool design: problem size plus derived test parameters.

    ``zero_prob`` is the probability that a cell is ZERO in the ``rid``
    model (so a cell is 1 with probability ``1 - zero_prob``); ``row_weight``
    is the exact number of items per test in the ``rrsd`` model. Exactly one
    of the two is set, matching ``model``.
    """

    n: int
    d: int
    delta: float
    model: str
    property_name: str
    m: int
    zero_prob: float | None = None
    row_weight: int | None = None

    def __post_init__(self):
        _require_int(self.n, "n", 2)
        _require_int(self.d, "d", 1)
        _require_int(self.m, "m", 1)
        if self.d > self.n:
            raise InputError(f"d must be <= n, got d={self.d}, n={self.n}")
        if not isinstance(self.delta, (int, float)) or not 0.0 < float(self.delta) < 1.0:
            raise InputError(f"delta must be in (0, 1), got {self.delta!r}")
        if self.model not in MODELS:
            raise InputError(f"model must be one of {MODELS}, got {self.model!r}")
        if self.property_name not in PROPERTIES:
            raise InputError(f"property must be one of {PROPERTIES}, got {self.property_name!r}")
        if self.property_name != "disjunct" and self.d < 2:
            raise InputError(f"d must be >= 2 for {self.property_name}")
        if self.model == "rid":
            if self.zero_prob is None or not 0.0 < float(self.zero_prob) < 1.0:
                raise InputError("rid model requires zero_prob in (0, 1)")
            if self.row_weight is not None:
                raise InputError("rid model does not take row_weight")
        else:
            if self.row_weight is None:
                raise InputError("rrsd model requires row_weight")
            _require_int(self.row_weight, "row_weight", 1, self.n)
            if self.zero_prob is not None:
                raise InputError("rrsd model does not take zero_prob")


def validate_items(items: Iterable[int], n: int) -> tuple[int, ...]:
    """Normalize an item collection to a sorted duplicate-free 1-based tuple."""
    out = []
    for it in items:
        out.append(_require_int(it, "item index", 1, n))
    out.sort()
    for a, b in zip(out, out[1:]):
        if a == b:
            raise InputError(f"duplicate item index {a}")
    return tuple(out)


def validate_answers(matrix: TestMatrix, answers: Sequence[int] | np.ndarray) -> np.ndarray:
    """Normalize an answer vector to a length-m uint8 array of 0/1."""
    arr = np.asarray(answers)
    if arr.ndim != 1 or len(arr) != matrix.m:
        raise InputError(f"answer vector must have length m={matrix.m}, got {arr.shape}")
    if arr.dtype == bool:
        return arr.astype(np.uint8)
    if not np.isin(arr, (0, 1)).all():
        raise InputError("answers must be 0 or 1")
    return arr.astype(np.uint8)


def answer_vector(matrix: TestMatrix, items: Iterable[int]) -> np.ndarray:
    """Answers of every test for defective set ``items``: OR of the columns.

    The empty set yields the all-zero vector.
    """
    members = validate_items(items, matrix.n)
    ans = np.zeros(matrix.m, dtype=np.uint8)
    for item in members:
        i = item - 1
        ans |= (matrix.bits[:, i >> 3] >> (7 - (i & 7))) & 1
    return ans


# ---------------------------------------------------------------------------
# GTM1 text format
# ---------------------------------------------------------------------------

def dumps_gtm1(matrix: TestMatrix) -> str:
    header = f"GTM1 {matrix.m} {matrix.n} {matrix.model_tag} {matrix.seed}\n"
    rows = []
    for j in range(matrix.m):
        line = (np.unpackbits(matrix.bits[j], count=matrix.n) + ord("0")).astype(np.uint8)
        rows.append(line.tobytes().decode("ascii"))
    return header + "\n".join(rows) + "\n"


def parse_gtm1(text: str) -> TestMatrix:
    """Parse a GTM1 document. Strict: errors carry 1-based line/column."""
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    else:
        raise ParseError("missing trailing newline", line=len(lines))
    if not lines:
        raise ParseError("empty file", line=1)

    fields = lines[0].split(" ")
    if len(fields) != 5 or fields[0] != "GTM1":
        raise ParseError("header must be 'GTM1 <m> <n> <model_tag> <seed>'", line=1)
    try:
        m = int(fields[1])
        n = int(fields[2])
    except ValueError:
        raise ParseError("m and n must be integers", line=1) from None
    tag = fields[3]
    if tag not in MODEL_TAGS:
        raise ParseError(f"unknown model tag {tag!r}", line=1)
    try:
        seed = int(fields[4])
    except ValueError:
        raise ParseError("seed must be an integer", line=1) from None
    if m < 1 or n < 1:
        raise ParseError("m and n must be >= 1", line=1)
    if len(lines) - 1 != m:
        raise ParseError(f"expected {m} row lines, found {len(lines) - 1}", line=len(lines))

    bits = np.empty((m, (n + 7) // 8), dtype=np.uint8)
    for j in range(m):
        raw = lines[j + 1]
        lineno = j + 2
        try:
            arr = np.frombuffer(raw.encode("ascii"), dtype=np.uint8)
        except UnicodeEncodeError:
            raise ParseError("row contains non-ASCII characters", line=lineno) from None
        if len(arr) != n:
            raise ParseError(f"expected {n} characters, got {len(arr)}", line=lineno)
        bad = (arr != ord("0")) & (arr != ord("1"))
        if bad.any():
            col = int(np.flatnonzero(bad)[0]) + 1
            raise ParseError(f"invalid character {chr(arr[col - 1])!r}", line=lineno, column=col)
        bits[j] = np.packbits(arr - ord("0"))

    try:
        matrix = TestMatrix(m=m, n=n, bits=bits, model_tag=tag, seed=seed)
    except InputError as exc:
        raise ParseError(str(exc), line=1) from None

    if tag == "RrSD":
        weights = matrix.row_weights()
        if weights.min() < 1:
            raise ParseError("RrSD row has weight 0", line=int(np.argmin(weights)) + 2)
        if weights.min() != weights.max():
            j = int(np.flatnonzero(weights != weights[0])[0])
            raise ParseError(
                f"RrSD rows must share one weight: row 1 has {int(weights[0])}, "
                f"row {j + 1} has {int(weights[j])}",
                line=j + 2,
            )
    return matrix


def write_gtm1(matrix: TestMatrix, path: str | Path) -> None:
    Path(path).write_text(dumps_gtm1(matrix), encoding="ascii")


def read_gtm1(path: str | Path) -> TestMatrix:
    return parse_gtm1(Path(path).read_text(encoding="ascii"))
