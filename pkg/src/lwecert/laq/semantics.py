"""Exact evaluation under the standard rational interpretation.

Index terms denote naturals (cutoff subtraction, ``div``/``rem`` by zero give
0 and the dividend), field terms denote rationals with ``inv(0) = 0``, and
matrix terms denote rational matrices of any size including empty ones. Out
of range entries read as 0; sums of differently sized matrices are padded.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from ..matrix import parse_rational, format_rational
from .syntax import FIELD, INDEX, MATRIX


class EvalError(ValueError):
    pass


@dataclass(frozen=True)
class MatVal:
    rows: int
    cols: int
    entries: tuple  # row-major tuple of row tuples

    @classmethod
    def build(cls, rows, cols, fn) -> "MatVal":
        return cls(rows, cols, tuple(tuple(Fraction(fn(i, j)) for j in range(1, cols + 1))
                                     for i in range(1, rows + 1)))

    @classmethod
    def from_rows(cls, rows_) -> "MatVal":
        rows_ = [list(r) for r in rows_]
        cols = len(rows_[0]) if rows_ else 0
        return cls.build(len(rows_), cols, lambda i, j: rows_[i - 1][j - 1])

    def get(self, i: int, j: int) -> Fraction:
        if 1 <= i <= self.rows and 1 <= j <= self.cols:
            return self.entries[i - 1][j - 1]
        return Fraction(0)


@dataclass
class Valuation:
    index: dict = dc_field(default_factory=dict)
    field: dict = dc_field(default_factory=dict)
    matrix: dict = dc_field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "index": dict(self.index),
            "field": {k: format_rational(v) for k, v in self.field.items()},
            "matrix": {k: {"rows": m.rows, "cols": m.cols,
                           "entries": [format_rational(x) for r in m.entries for x in r]}
                       for k, m in self.matrix.items()},
        }

    @classmethod
    def from_json(cls, d: dict) -> "Valuation":
        idx = {k: int(v) for k, v in d.get("index", {}).items()}
        if any(v < 0 for v in idx.values()):
            raise EvalError("index values must be naturals")
        fld = {k: parse_rational(v) for k, v in d.get("field", {}).items()}
        mats = {}
        for k, m in d.get("matrix", {}).items():
            r, c, flat = int(m["rows"]), int(m["cols"]), m.get("entries", [])
            if len(flat) != r * c:
                raise EvalError(f"matrix {k}: entry count does not match {r}x{c}")
            vals = [parse_rational(x) for x in flat]
            mats[k] = MatVal.build(r, c, lambda i, j, vals=vals, c=c: vals[(i - 1) * c + j - 1])
        return cls(idx, fld, mats)


def _lookup(t, v: Valuation):
    name, sort = t[1], t[2]
    table = {INDEX: v.index, FIELD: v.field, MATRIX: v.matrix}[sort]
    if name not in table:
        raise EvalError(f"uncovered {sort} variable {name}")
    return table[name]


def eval_term(t, v: Valuation, memo: dict | None = None):
    """Value of a term. ``memo`` (keyed by node identity) may be shared
    across calls with the same valuation."""
    if memo is not None:
        hit = memo.get(id(t))
        if hit is not None and hit[0] is t:
            return hit[1]
        val = _eval_term(t, v, memo)
        memo[id(t)] = (t, val)
        return val
    return _eval_term(t, v, memo)


def _eval_term(t, v: Valuation, memo):
    tag = t[0]
    if tag == "v":
        return _lookup(t, v)
    if tag == "n":
        return t[2] if t[1] == INDEX else Fraction(t[2])
    a = t[1:]
    if tag == "+i":
        return eval_term(a[0], v, memo) + eval_term(a[1], v, memo)
    if tag == "*i":
        return eval_term(a[0], v, memo) * eval_term(a[1], v, memo)
    if tag == "-i":
        return max(0, eval_term(a[0], v, memo) - eval_term(a[1], v, memo))
    if tag in ("div", "rem"):
        x, y = eval_term(a[0], v, memo), eval_term(a[1], v, memo)
        if y == 0:
            return 0 if tag == "div" else x
        return x // y if tag == "div" else x % y
    if tag == "max":
        return max(eval_term(a[0], v, memo), eval_term(a[1], v, memo))
    if tag == "r":
        return eval_term(a[0], v, memo).rows
    if tag == "c":
        return eval_term(a[0], v, memo).cols
    if tag in ("condi", "condf"):
        return eval_term(a[1], v, memo) if eval_formula(a[0], v, memo) else eval_term(a[2], v, memo)
    if tag == "+f":
        return eval_term(a[0], v, memo) + eval_term(a[1], v, memo)
    if tag == "*f":
        return eval_term(a[0], v, memo) * eval_term(a[1], v, memo)
    if tag == "-f":
        return -eval_term(a[0], v, memo)
    if tag == "inv":
        x = eval_term(a[0], v, memo)
        return Fraction(0) if x == 0 else 1 / x
    if tag == "e":
        return eval_term(a[0], v, memo).get(eval_term(a[1], v, memo), eval_term(a[2], v, memo))
    if tag == "sum":
        m = eval_term(a[0], v, memo)
        return sum((x for r in m.entries for x in r), Fraction(0))
    if tag == "dot":
        x, y = eval_term(a[0], v, memo), eval_term(a[1], v, memo)
        rows, cols = max(x.rows, y.rows), max(x.cols, y.cols)
        return sum((x.get(i, j) * y.get(i, j) for i in range(1, rows + 1)
                    for j in range(1, cols + 1)), Fraction(0))
    if tag == "tr":
        m = eval_term(a[0], v, memo)
        return sum((m.get(i, i) for i in range(1, min(m.rows, m.cols) + 1)), Fraction(0))
    if tag == "+m":
        x, y = eval_term(a[0], v, memo), eval_term(a[1], v, memo)
        return MatVal.build(max(x.rows, y.rows), max(x.cols, y.cols),
                            lambda i, j: x.get(i, j) + y.get(i, j))
    if tag == "smul":
        s, m = eval_term(a[0], v, memo), eval_term(a[1], v, memo)
        return MatVal.build(m.rows, m.cols, lambda i, j: s * m.get(i, j))
    if tag == "tp":
        m = eval_term(a[0], v, memo)
        return MatVal.build(m.cols, m.rows, lambda i, j: m.get(j, i))
    if tag == "*m":
        x, y = eval_term(a[0], v, memo), eval_term(a[1], v, memo)
        inner = max(x.cols, y.rows)
        return MatVal.build(x.rows, y.cols, lambda i, j: sum(
            (x.get(i, k) * y.get(k, j) for k in range(1, inner + 1)), Fraction(0)))
    if tag == "zero":
        return MatVal.build(eval_term(a[0], v, memo), eval_term(a[1], v, memo), lambda i, j: 0)
    if tag == "ident":
        k = eval_term(a[0], v, memo)
        return MatVal.build(k, k, lambda i, j: int(i == j))
    if tag == "col":
        m, j = eval_term(a[0], v, memo), eval_term(a[1], v, memo)
        return MatVal.build(m.rows, 1, lambda i, _: m.get(i, j))
    raise EvalError(f"not a term: {tag!r}")


def _matrix_equal(x: MatVal, y: MatVal) -> bool:
    return x.rows == y.rows and x.cols == y.cols and x.entries == y.entries


def eval_formula(phi, v: Valuation, memo: dict | None = None) -> bool:
    if memo is not None:
        hit = memo.get(id(phi))
        if hit is not None and hit[0] is phi:
            return hit[1]
        val = _eval_formula(phi, v, memo)
        memo[id(phi)] = (phi, val)
        return val
    return _eval_formula(phi, v, memo)


def _eval_formula(phi, v: Valuation, memo) -> bool:
    tag = phi[0]
    a = phi[1:]
    if tag == "not":
        return not eval_formula(a[0], v, memo)
    if tag == "and":
        return eval_formula(a[0], v, memo) and eval_formula(a[1], v, memo)
    if tag == "or":
        return eval_formula(a[0], v, memo) or eval_formula(a[1], v, memo)
    if tag == "imp":
        return (not eval_formula(a[0], v, memo)) or eval_formula(a[1], v, memo)
    if tag == "=":
        x, y = eval_term(a[0], v, memo), eval_term(a[1], v, memo)
        return _matrix_equal(x, y) if isinstance(x, MatVal) else x == y
    if tag in ("le", "leq"):
        return eval_term(a[0], v, memo) <= eval_term(a[1], v, memo)
    if tag in ("lti", "lt"):
        return eval_term(a[0], v, memo) < eval_term(a[1], v, memo)
    if tag == "int":
        return eval_term(a[0], v, memo).denominator == 1
    raise EvalError(f"not a formula: {tag!r}")


def eval_sequent(seq, v: Valuation, memo: dict | None = None) -> bool:
    return (not all(eval_formula(f, v, memo) for f in seq.ante)) or any(
        eval_formula(f, v, memo) for f in seq.succ)
