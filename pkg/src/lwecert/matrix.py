"""Exact integer, modular and rational matrices.

Matrices are immutable row-major tuples. Rational entries are
``fractions.Fraction`` which keeps them reduced with a positive denominator.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence


class MatrixError(ValueError):
    """Raised on malformed matrices or dimension mismatches."""


class SingularMatrixError(MatrixError):
    pass


def _freeze(rows: Iterable[Iterable], conv) -> tuple[tuple, ...]:
    out = tuple(tuple(conv(x) for x in row) for row in rows)
    if not out or not out[0]:
        raise MatrixError("matrix must have at least one row and one column")
    width = len(out[0])
    if any(len(r) != width for r in out):
        raise MatrixError("ragged matrix")
    return out


@dataclass(frozen=True)
class ModMatrix:
    """Matrix over Z_q with entries stored in [0, q)."""

    entries: tuple[tuple[int, ...], ...]
    q: int

    def __post_init__(self):
        if self.q < 2:
            raise MatrixError(f"modulus must be >= 2, got {self.q}")
        ents = _freeze(self.entries, int)
        object.__setattr__(self, "entries", tuple(tuple(x % self.q for x in r) for r in ents))

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], q: int) -> "ModMatrix":
        return cls(tuple(tuple(r) for r in rows), q)

    @classmethod
    def identity(cls, n: int, q: int) -> "ModMatrix":
        return cls(tuple(tuple(int(i == j) for j in range(n)) for i in range(n)), q)

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0])

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(r[j] for r in self.entries)

    def columns(self) -> list[tuple[int, ...]]:
        return [self.column(j) for j in range(self.cols)]

    def transpose(self) -> "ModMatrix":
        return ModMatrix(tuple(zip(*self.entries)), self.q)

    def __matmul__(self, other: "ModMatrix") -> "ModMatrix":
        if self.q != other.q:
            raise MatrixError("moduli differ")
        return ModMatrix(int_matmul(self.entries, other.entries), self.q)

    def apply(self, v: Sequence[int]) -> tuple[int, ...]:
        """Matrix-vector product reduced mod q."""
        if len(v) != self.cols:
            raise MatrixError(f"vector length {len(v)} != {self.cols}")
        return tuple(sum(a * x for a, x in zip(row, v)) % self.q for row in self.entries)

    def lift(self) -> "RatMatrix":
        return RatMatrix(self.entries)


@dataclass(frozen=True)
class RatMatrix:
    """Matrix with exact rational entries."""

    entries: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "entries", _freeze(self.entries, Fraction))

    @classmethod
    def from_rows(cls, rows) -> "RatMatrix":
        return cls(tuple(tuple(r) for r in rows))

    @classmethod
    def from_columns(cls, cols) -> "RatMatrix":
        return cls(tuple(zip(*cols)))

    @classmethod
    def identity(cls, n: int) -> "RatMatrix":
        return cls(tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0])

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def column(self, j: int) -> tuple[Fraction, ...]:
        return tuple(r[j] for r in self.entries)

    def columns(self) -> list[tuple[Fraction, ...]]:
        return [self.column(j) for j in range(self.cols)]

    def transpose(self) -> "RatMatrix":
        return RatMatrix(tuple(zip(*self.entries)))

    def __matmul__(self, other: "RatMatrix") -> "RatMatrix":
        return RatMatrix(int_matmul(self.entries, other.entries))

    def scale(self, c) -> "RatMatrix":
        c = Fraction(c)
        return RatMatrix(tuple(tuple(c * x for x in r) for r in self.entries))

    def is_integral(self) -> bool:
        return all(x.denominator == 1 for r in self.entries for x in r)

    def inverse(self) -> "RatMatrix":
        return RatMatrix(rat_inverse(self.entries))


def int_matmul(a, b):
    """Plain product of two row-major nested sequences."""
    if len(a[0]) != len(b):
        raise MatrixError(f"cannot multiply {len(a)}x{len(a[0])} by {len(b)}x{len(b[0])}")
    bt = list(zip(*b))
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a)


def rat_inverse(rows) -> tuple[tuple[Fraction, ...], ...]:
    """Gauss-Jordan inverse over Q."""
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise MatrixError("inverse of a non-square matrix")
    aug = [[Fraction(x) for x in r] + [Fraction(int(i == j)) for j in range(n)]
           for i, r in enumerate(rows)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if piv is None:
            raise SingularMatrixError("matrix is singular")
        aug[col], aug[piv] = aug[piv], aug[col]
        p = aug[col][col]
        aug[col] = [x / p for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return tuple(tuple(r[n:]) for r in aug)


def rat_rank(vectors) -> int:
    """Rank over Q of a list of equal-length vectors."""
    rows = [[Fraction(x) for x in v] for v in vectors]
    if not rows:
        return 0
    rank = 0
    width = len(rows[0])
    for col in range(width):
        piv = next((r for r in range(rank, len(rows)) if rows[r][col] != 0), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for r in range(rank + 1, len(rows)):
            if rows[r][col] != 0:
                f = rows[r][col] / rows[rank][col]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[rank])]
        rank += 1
    return rank


# JSON exchange format: {rows, cols, modulus?, entries: [...] row-major}

def _parse_entry(e) -> Fraction:
    if isinstance(e, bool):
        raise MatrixError(f"bad entry {e!r}")
    if isinstance(e, int):
        return Fraction(e)
    if isinstance(e, str):
        s = e.strip()
        if "/" in s:
            num, den = s.split("/", 1)
            num, den = int(num), int(den)
            if den <= 0:
                raise MatrixError(f"non-positive denominator in {e!r}")
            from math import gcd
            if gcd(num, den) != 1:
                raise MatrixError(f"unreduced fraction {e!r}")
            return Fraction(num, den)
        return Fraction(int(s))
    raise MatrixError(f"bad entry {e!r}")


def format_rational(x: Fraction) -> int | str:
    x = Fraction(x)
    return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse_rational(s: str | int) -> Fraction:
    """Parse ``"p/q"`` or an integer; decimals are rejected."""
    if isinstance(s, int):
        return Fraction(s)
    if any(ch in s for ch in ".eE"):
        raise MatrixError(f"decimal syntax not accepted: {s!r}")
    num, _, den = s.partition("/")
    return Fraction(int(num), int(den) if den else 1)


def matrix_to_json(m: ModMatrix | RatMatrix) -> dict:
    flat = [format_rational(x) for r in m.entries for x in r]
    d = {"rows": m.rows, "cols": m.cols}
    if isinstance(m, ModMatrix):
        d["modulus"] = m.q
    d["entries"] = flat
    return d


def matrix_from_json(d: dict) -> ModMatrix | RatMatrix:
    try:
        rows, cols, flat = int(d["rows"]), int(d["cols"]), d["entries"]
    except (KeyError, TypeError) as exc:
        raise MatrixError(f"malformed matrix object: {exc}") from None
    if rows < 1 or cols < 1 or len(flat) != rows * cols:
        raise MatrixError("entry count does not match rows*cols")
    vals = [_parse_entry(e) for e in flat]
    grid = tuple(tuple(vals[i * cols:(i + 1) * cols]) for i in range(rows))
    if d.get("modulus") is not None:
        q = int(d["modulus"])
        if any(v.denominator != 1 or not 0 <= v < q for v in vals):
            raise MatrixError("modular entries must be integers in [0, q)")
        return ModMatrix(tuple(tuple(int(v) for v in r) for r in grid), q)
    return RatMatrix(grid)


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True)
