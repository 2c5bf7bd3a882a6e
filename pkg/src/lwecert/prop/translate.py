"""Translation of LA_Q formulas into Boolean circuits under an object
assignment.

The object assignment fixes every index variable and the dimensions of every
matrix variable, so index terms, index atoms, matrix shapes and entry
positions are all computed statically; only field values become circuitry.

A rational value is a sign-magnitude numerator word over a multiset of
positive denominator factors. Input denominators are factors; so is the
guarded numerator produced by ``inv``. Sums bring both operands to the
least common multiset, products add multisets, and comparisons multiply
each side by the factors only the other side has, so a/D1 < b/D2 becomes
the integer comparison a*(D2\\D1) < b*(D1\\D2). ``int`` is the remainder
of the numerator magnitude by the product of the factors being zero.

Inputs at precision N: a field variable ``x`` has a sign bit ``x.s``,
numerator bits ``x.n0..`` and denominator bits ``x.d0..``; a matrix variable
``A`` has one shared denominator ``A.d0..`` and per entry a sign bit and
numerator bits ``A[i,j].s``, ``A[i,j].n0..``. The output is
``guard -> phi`` where the guard says every input denominator is nonzero.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from math import lcm

from ..laq.semantics import MatVal, Valuation
from ..laq.syntax import FIELD, INDEX, MATRIX, free_vars, sort_of
from .circuit import Builder, PropCircuit
from . import words as W


class TranslationError(ValueError):
    pass


class PrecisionError(TranslationError):
    """N is too small for the object assignment or for a valuation."""


@dataclass(frozen=True)
class ObjectAssignment:
    index: dict = dc_field(default_factory=dict)  # index variable -> natural
    dims: dict = dc_field(default_factory=dict)  # matrix variable -> (rows, cols)
    precision: int = 1

    def __post_init__(self):
        if self.precision < 1:
            raise PrecisionError("precision must be a positive integer")
        vals = list(self.index.values()) + [x for rc in self.dims.values() for x in rc]
        if any(v < 0 for v in vals):
            raise TranslationError("object assignment values must be naturals")
        if vals and max(vals) > self.precision:
            raise PrecisionError(
                f"precision {self.precision} is below the largest assigned value {max(vals)}")

    def to_json(self) -> dict:
        return {"index": dict(self.index), "dims": {k: list(v) for k, v in self.dims.items()},
                "precision": self.precision}

    @classmethod
    def from_json(cls, d: dict, precision: int | None = None) -> "ObjectAssignment":
        return cls({k: int(v) for k, v in d.get("index", {}).items()},
                   {k: (int(v[0]), int(v[1])) for k, v in d.get("dims", {}).items()},
                   int(precision if precision is not None else d.get("precision", 1)))


@dataclass(frozen=True)
class RVal:
    num: W.SWord
    den: tuple  # sorted ((factor key, multiplicity), ...)


@dataclass(frozen=True)
class MVal:
    rows: int
    cols: int
    entries: tuple  # row-major tuple of row tuples of RVal

    def get(self, i: int, j: int, zero: RVal) -> RVal:
        if 1 <= i <= self.rows and 1 <= j <= self.cols:
            return self.entries[i - 1][j - 1]
        return zero


def _static_index(tag, x, y):
    if tag == "+i":
        return x + y
    if tag == "*i":
        return x * y
    if tag == "-i":
        return max(0, x - y)
    if tag == "div":
        return 0 if y == 0 else x // y
    if tag == "rem":
        return x if y == 0 else x % y
    return max(x, y)


class Translator:
    """Translates terms and formulas into one shared builder."""

    def __init__(self, sigma: ObjectAssignment, printed_comparator: bool = False,
                 builder: Builder | None = None):
        self.sigma = sigma
        self.N = sigma.precision
        self.printed = printed_comparator
        self.c = builder or Builder()
        self.factors: dict = {}
        self.layout: list = []
        self.guards: list[int] = []
        self.vars: dict = {}
        self.memo: dict = {}
        self._prod: dict = {}
        self.zero = RVal(W.sconst(self.c, 0), ())
        self.one = RVal(W.sconst(self.c, 1), ())

    # -- inputs -------------------------------------------------------------------

    def _factor(self, w: W.Word) -> tuple:
        key = w.bits
        old = self.factors.get(key)
        if old is None or w.bound < old.bound:
            self.factors[key] = w
        return key

    def _num_inputs(self, prefix: str) -> W.SWord:
        c = self.c
        bits = tuple(c.input(f"{prefix}.n{k}") for k in range(self.N))
        return W.SWord(c.input(f"{prefix}.s"), W.Word(bits, (1 << self.N) - 1))

    def _den_inputs(self, prefix: str) -> tuple:
        c = self.c
        d = W.Word(tuple(c.input(f"{prefix}.d{k}") for k in range(self.N)), (1 << self.N) - 1)
        self.guards.append(W.nonzero(c, d))
        return ((self._factor(d), 1),)

    def declare(self, v):
        """Materialise the inputs of a free variable."""
        key = (v[1], v[2])
        if key in self.vars:
            return self.vars[key]
        name, sort = key
        if sort == INDEX:
            if name not in self.sigma.index:
                raise TranslationError(f"index variable {name} is not covered by the object assignment")
            val = self.sigma.index[name]
        elif sort == FIELD:
            num = self._num_inputs(name)
            val = RVal(num, self._den_inputs(name))
            self.layout.append((FIELD, name))
        else:
            if name not in self.sigma.dims:
                raise TranslationError(f"matrix variable {name} has no dimensions in the object assignment")
            r, cols = self.sigma.dims[name]
            den = self._den_inputs(name) if r * cols else ()
            val = MVal(r, cols, tuple(tuple(RVal(self._num_inputs(f"{name}[{i},{j}]"), den)
                                            for j in range(1, cols + 1)) for i in range(1, r + 1)))
            self.layout.append((MATRIX, name, r, cols))
        self.vars[key] = val
        return val

    # -- rational arithmetic ----------------------------------------------------------

    def prod(self, den: tuple) -> W.Word:
        """The product of a factor multiset as a word."""
        if den in self._prod:
            return self._prod[den]
        if not den:
            out = W.const_word(self.c, 1)
        else:
            head = den[:-1] + (((den[-1][0], den[-1][1] - 1),) if den[-1][1] > 1 else ())
            out = W.mul(self.c, self.prod(head), self.factors[den[-1][0]])
        self._prod[den] = out
        return out

    @staticmethod
    def _ms(den) -> Counter:
        return Counter(dict(den))

    @staticmethod
    def _tuple(ms: Counter) -> tuple:
        return tuple(sorted((k, m) for k, m in ms.items() if m > 0))

    def scale(self, num: W.SWord, den_extra: Counter) -> W.SWord:
        extra = self._tuple(den_extra)
        if not extra:
            return num
        return W.smul_unsigned(self.c, num, self.prod(extra))

    def add(self, x: RVal, y: RVal) -> RVal:
        if x.num.mag.bound == 0:
            return y
        if y.num.mag.bound == 0:
            return x
        dx, dy = self._ms(x.den), self._ms(y.den)
        common = dx | dy
        return RVal(W.sadd(self.c, self.scale(x.num, common - dx), self.scale(y.num, common - dy)),
                    self._tuple(common))

    def mul(self, x: RVal, y: RVal) -> RVal:
        if x.num.mag.bound == 0 or y.num.mag.bound == 0:
            return self.zero
        if x == self.one:
            return y
        if y == self.one:
            return x
        return RVal(W.smul(self.c, x.num, y.num), self._tuple(self._ms(x.den) + self._ms(y.den)))

    def neg(self, x: RVal) -> RVal:
        return RVal(W.sneg(self.c, x.num), x.den)

    def inv(self, x: RVal) -> RVal:
        """inv(a/D) = sign(a) D / |a|, with the numerator forced to 0 and the
        new factor to 1 when a = 0."""
        c = self.c
        if x.num.mag.bound == 0:
            return self.zero
        z = c.not_(W.nonzero(c, x.num.mag))
        num = W.mux(c, z, W.Word((), 0), self.prod(x.den))
        fac = W.mux(c, z, W.const_word(c, 1), x.num.mag)
        return RVal(W.SWord(x.num.sign, num), ((self._factor(fac), 1),))

    def _cross(self, x: RVal, y: RVal):
        dx, dy = self._ms(x.den), self._ms(y.den)
        shared = dx & dy
        return self.scale(x.num, dy - shared), self.scale(y.num, dx - shared)

    def lt(self, x: RVal, y: RVal) -> int:
        if self.printed:
            # numerator against numerator, denominator against denominator
            lhs = W.smul(self.c, x.num, y.num)
            rhs = W.SWord(self.c.FALSE, W.mul(self.c, self.prod(x.den), self.prod(y.den)))
            return W.slt(self.c, lhs, rhs)
        a, b = self._cross(x, y)
        return W.slt(self.c, a, b)

    def eq(self, x: RVal, y: RVal) -> int:
        a, b = self._cross(x, y)
        return W.seq(self.c, a, b)

    def is_int(self, x: RVal) -> int:
        if not x.den or x.num.mag.bound == 0:
            return self.c.TRUE
        r = W.rem(self.c, x.num.mag, self.prod(x.den))
        return self.c.not_(W.nonzero(self.c, r))

    def rmux(self, s: int, x: RVal, y: RVal) -> RVal:
        if s == self.c.TRUE:
            return x
        if s == self.c.FALSE:
            return y
        dx, dy = self._ms(x.den), self._ms(y.den)
        common = dx | dy
        return RVal(W.smux(self.c, s, self.scale(x.num, common - dx), self.scale(y.num, common - dy)),
                    self._tuple(common))

    def fsum(self, vals) -> RVal:
        acc = self.zero
        for v in vals:
            acc = self.add(acc, v)
        return acc

    # -- terms ------------------------------------------------------------------------

    def term(self, t):
        hit = self.memo.get(id(t))
        if hit is not None and hit[0] is t:
            return hit[1]
        val = self._term(t)
        self.memo[id(t)] = (t, val)
        return val

    def _term(self, t):
        tag = t[0]
        if tag == "v":
            return self.declare(t)
        if tag == "n":
            return t[2] if t[1] == INDEX else RVal(W.sconst(self.c, t[2]), ())
        a = t[1:]
        if tag in ("+i", "*i", "-i", "div", "rem", "max"):
            return _static_index(tag, self.term(a[0]), self.term(a[1]))
        if tag == "r":
            return self.term(a[0]).rows
        if tag == "c":
            return self.term(a[0]).cols
        if tag == "condi":
            return self.term(a[1]) if self._static(a[0]) else self.term(a[2])
        if tag == "condf":
            return self.rmux(self.formula(a[0]), self.term(a[1]), self.term(a[2]))
        if tag == "+f":
            return self.add(self.term(a[0]), self.term(a[1]))
        if tag == "*f":
            return self.mul(self.term(a[0]), self.term(a[1]))
        if tag == "-f":
            return self.neg(self.term(a[0]))
        if tag == "inv":
            return self.inv(self.term(a[0]))
        if tag == "e":
            return self.term(a[0]).get(self.term(a[1]), self.term(a[2]), self.zero)
        if tag == "sum":
            m = self.term(a[0])
            return self.fsum(x for row in m.entries for x in row)
        if tag == "dot":
            x, y = self.term(a[0]), self.term(a[1])
            return self.fsum(self.mul(x.get(i, j, self.zero), y.get(i, j, self.zero))
                             for i in range(1, max(x.rows, y.rows) + 1)
                             for j in range(1, max(x.cols, y.cols) + 1))
        if tag == "tr":
            m = self.term(a[0])
            return self.fsum(m.get(i, i, self.zero) for i in range(1, min(m.rows, m.cols) + 1))
        if tag == "+m":
            x, y = self.term(a[0]), self.term(a[1])
            return self._build(max(x.rows, y.rows), max(x.cols, y.cols),
                               lambda i, j: self.add(x.get(i, j, self.zero), y.get(i, j, self.zero)))
        if tag == "smul":
            s, m = self.term(a[0]), self.term(a[1])
            return self._build(m.rows, m.cols, lambda i, j: self.mul(s, m.get(i, j, self.zero)))
        if tag == "tp":
            m = self.term(a[0])
            return self._build(m.cols, m.rows, lambda i, j: m.get(j, i, self.zero))
        if tag == "*m":
            x, y = self.term(a[0]), self.term(a[1])
            inner = max(x.cols, y.rows)
            return self._build(x.rows, y.cols, lambda i, j: self.fsum(
                self.mul(x.get(i, k, self.zero), y.get(k, j, self.zero)) for k in range(1, inner + 1)))
        if tag == "zero":
            return self._build(self.term(a[0]), self.term(a[1]), lambda i, j: self.zero)
        if tag == "ident":
            k = self.term(a[0])
            return self._build(k, k, lambda i, j: self.one if i == j else self.zero)
        if tag == "col":
            m, j = self.term(a[0]), self.term(a[1])
            return self._build(m.rows, 1, lambda i, _: m.get(i, j, self.zero))
        raise TranslationError(f"cannot translate term {tag!r}")

    @staticmethod
    def _build(rows, cols, fn) -> MVal:
        return MVal(rows, cols, tuple(tuple(fn(i, j) for j in range(1, cols + 1))
                                      for i in range(1, rows + 1)))

    def _static(self, phi) -> bool:
        g = self.formula(phi)
        if g not in (self.c.TRUE, self.c.FALSE):
            raise TranslationError("index condition did not evaluate statically")
        return g == self.c.TRUE

    # -- formulas ---------------------------------------------------------------------

    def formula(self, phi) -> int:
        hit = self.memo.get(id(phi))
        if hit is not None and hit[0] is phi:
            return hit[1]
        g = self._formula(phi)
        self.memo[id(phi)] = (phi, g)
        return g

    def _formula(self, phi) -> int:
        c = self.c
        tag = phi[0]
        a = phi[1:]
        if tag == "not":
            return c.not_(self.formula(a[0]))
        if tag == "and":
            return c.and_(self.formula(a[0]), self.formula(a[1]))
        if tag == "or":
            return c.or_(self.formula(a[0]), self.formula(a[1]))
        if tag == "imp":
            return c.implies(self.formula(a[0]), self.formula(a[1]))
        if tag == "=":
            srt = sort_of(a[0])
            x, y = self.term(a[0]), self.term(a[1])
            if srt == INDEX:
                return c.const(x == y)
            if srt == FIELD:
                return self.eq(x, y)
            if (x.rows, x.cols) != (y.rows, y.cols):
                return c.FALSE
            return c.and_(*(self.eq(p, q) for rp, rq in zip(x.entries, y.entries)
                            for p, q in zip(rp, rq)))
        if tag == "le":
            return c.const(self.term(a[0]) <= self.term(a[1]))
        if tag == "lti":
            return c.const(self.term(a[0]) < self.term(a[1]))
        if tag == "lt":
            return self.lt(self.term(a[0]), self.term(a[1]))
        if tag == "leq":
            x, y = self.term(a[0]), self.term(a[1])
            return c.or_(self.lt(x, y), self.eq(x, y))
        if tag == "int":
            return self.is_int(self.term(a[0]))
        raise TranslationError(f"cannot translate formula {tag!r}")

    def declare_all(self, phi):
        for v in sorted(free_vars(phi), key=lambda v: (v[2], v[1])):
            self.declare(v)

    def guarded(self, g: int) -> int:
        return self.c.implies(self.c.and_(*self.guards), g)

    def meta(self) -> dict:
        return {"precision": self.N, "layout": [list(x) for x in self.layout],
                "printed_comparator": self.printed}


def translate(phi, sigma: ObjectAssignment, printed_comparator: bool = False) -> PropCircuit:
    """The circuit ||phi||_sigma at precision ``sigma.precision``."""
    tr = Translator(sigma, printed_comparator)
    tr.declare_all(phi)
    out = tr.guarded(tr.formula(phi))
    return tr.c.freeze([out], tr.meta())


def translate_many(formulas, sigma: ObjectAssignment, printed_comparator: bool = False) -> PropCircuit:
    """One circuit with an output per formula, sharing all subcircuits."""
    tr = Translator(sigma, printed_comparator)
    for phi in formulas:
        tr.declare_all(phi)
    outs = [tr.formula(phi) for phi in formulas]
    guard = tr.c.and_(*tr.guards)
    return tr.c.freeze([tr.c.implies(guard, g) for g in outs], tr.meta())


# -- valuations at precision N ---------------------------------------------------------

def _encode_int(bits: dict, prefix: str, k: int, N: int, signed: bool):
    if abs(k) >= 1 << N:
        raise PrecisionError(f"{prefix}: {k} does not fit in {N} bits")
    if signed:
        bits[f"{prefix}.s"] = int(k < 0)
    for b in range(N):
        bits[f"{prefix}.{'n' if signed else 'd'}{b}"] = (abs(k) >> b) & 1


def encode(v: Valuation, circuit: PropCircuit) -> dict:
    """Input bits of ``circuit`` for valuation ``v``; raises PrecisionError
    rather than truncating."""
    N = circuit.meta["precision"]
    bits: dict = {}
    for item in circuit.meta["layout"]:
        if item[0] == FIELD:
            name = item[1]
            if name not in v.field:
                raise TranslationError(f"valuation does not cover field variable {name}")
            x = Fraction(v.field[name])
            _encode_int(bits, name, x.numerator, N, True)
            _encode_int(bits, name, x.denominator, N, False)
        else:
            _, name, r, cols = item
            if name not in v.matrix:
                raise TranslationError(f"valuation does not cover matrix variable {name}")
            m = v.matrix[name]
            if (m.rows, m.cols) != (r, cols):
                raise TranslationError(f"matrix {name} is {m.rows}x{m.cols}, expected {r}x{cols}")
            if not r * cols:
                continue
            d = lcm(*(x.denominator for row in m.entries for x in row))
            _encode_int(bits, name, d, N, False)
            for i in range(1, r + 1):
                for j in range(1, cols + 1):
                    _encode_int(bits, f"{name}[{i},{j}]", int(m.get(i, j) * d), N, True)
    return bits


def sample_valuation(rng: random.Random, circuit: PropCircuit, sigma: ObjectAssignment) -> Valuation:
    """A uniformly drawn valuation representable at the circuit's precision."""
    N = circuit.meta["precision"]
    top = (1 << N) - 1
    v = Valuation(index=dict(sigma.index))
    for item in circuit.meta["layout"]:
        if item[0] == FIELD:
            v.field[item[1]] = Fraction(rng.randint(-top, top), rng.randint(1, top))
        else:
            _, name, r, cols = item
            d = rng.randint(1, top)
            v.matrix[name] = MatVal.build(r, cols, lambda i, j: Fraction(rng.randint(-top, top), d))
    return v

