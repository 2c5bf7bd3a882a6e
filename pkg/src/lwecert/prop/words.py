"""Integer gadgets on bit words.

An unsigned word is a tuple of gate ids (least significant first) together
with a static upper bound on the value it can take. Widths follow from the
bounds, so results are always wide enough to hold every reachable value:
bits above ``bound.bit_length()`` are provably zero and are not built.
Signed integers are sign-magnitude pairs; zero may carry either sign.
"""

from __future__ import annotations

from dataclasses import dataclass

from .circuit import Builder


@dataclass(frozen=True)
class Word:
    bits: tuple
    bound: int

    @property
    def width(self) -> int:
        return len(self.bits)


@dataclass(frozen=True)
class SWord:
    sign: int  # 1 means negative (when the magnitude is nonzero)
    mag: Word


def _fit(c: Builder, bits, bound: int) -> Word:
    w = bound.bit_length()
    bits = list(bits[:w])
    bits += [c.FALSE] * (w - len(bits))
    return Word(tuple(bits), bound)


def const_word(c: Builder, k: int) -> Word:
    if k < 0:
        raise ValueError("unsigned constant must be non-negative")
    return Word(tuple(c.const((k >> i) & 1) for i in range(k.bit_length())), k)


def const_value(c: Builder, w: Word) -> int | None:
    """The value of a word whose bits are all constant, else None."""
    k = 0
    for i, b in enumerate(w.bits):
        if b == c.TRUE:
            k |= 1 << i
        elif b != c.FALSE:
            return None
    return k


def _bit(c: Builder, w: Word, i: int) -> int:
    return w.bits[i] if i < len(w.bits) else c.FALSE


def add(c: Builder, x: Word, y: Word) -> Word:
    bound = x.bound + y.bound
    out, carry = [], c.FALSE
    for i in range(bound.bit_length()):
        a, b = _bit(c, x, i), _bit(c, y, i)
        axb = c.xor(a, b)
        out.append(c.xor(axb, carry))
        carry = c.or_(c.and_(a, b), c.and_(axb, carry))
    return Word(tuple(out), bound)


def sub(c: Builder, x: Word, y: Word) -> Word:
    """x - y, meaningful only when x >= y (callers mux the result away
    otherwise)."""
    w = max(x.width, y.width)
    out, borrow = [], c.FALSE
    for i in range(w):
        a, b = _bit(c, x, i), _bit(c, y, i)
        axb = c.xor(a, b)
        out.append(c.xor(axb, borrow))
        borrow = c.or_(c.and_(c.not_(a), b), c.and_(c.not_(axb), borrow))
    return _fit(c, out, x.bound)


def lt(c: Builder, x: Word, y: Word) -> int:
    """x < y: the borrow out of x - y."""
    borrow = c.FALSE
    for i in range(max(x.width, y.width)):
        a, b = _bit(c, x, i), _bit(c, y, i)
        borrow = c.or_(c.and_(c.not_(a), b), c.and_(c.xnor(a, b), borrow))
    return borrow


def eq(c: Builder, x: Word, y: Word) -> int:
    return c.and_(*(c.xnor(_bit(c, x, i), _bit(c, y, i)) for i in range(max(x.width, y.width))))


def nonzero(c: Builder, x: Word) -> int:
    return c.or_(*x.bits)


def mux(c: Builder, s: int, x: Word, y: Word) -> Word:
    if s == c.TRUE:
        return x
    if s == c.FALSE:
        return y
    bound = max(x.bound, y.bound)
    return Word(tuple(c.mux(s, _bit(c, x, i), _bit(c, y, i)) for i in range(bound.bit_length())),
                bound)


def mul(c: Builder, x: Word, y: Word) -> Word:
    """Shift-and-add multiplier. The running bound after row i is
    x.bound * min(y.bound, 2**(i+1) - 1)."""
    if x.width < y.width:
        x, y = y, x
    acc = Word((), 0)
    for i, yb in enumerate(y.bits):
        if yb == c.FALSE:
            continue
        row = Word((c.FALSE,) * i + tuple(c.and_(yb, xb) for xb in x.bits), x.bound << i)
        acc = add(c, acc, row)
        acc = _fit(c, acc.bits, min(acc.bound, x.bound * min(y.bound, (1 << (i + 1)) - 1)))
    return _fit(c, acc.bits, min(acc.bound, x.bound * y.bound))


def rem(c: Builder, x: Word, d: Word) -> Word:
    """x mod d by restoring division; requires d > 0."""
    r = Word((), 0)
    for i in reversed(range(x.width)):
        sh = Word((x.bits[i],) + r.bits, 2 * r.bound + 1)
        ge = c.not_(lt(c, sh, d))
        diff = sub(c, sh, d)
        r = mux(c, ge, diff, sh)
        r = _fit(c, r.bits, min(sh.bound, max(d.bound - 1, 0)))
    return r


# -- sign-magnitude --------------------------------------------------------------------

def sconst(c: Builder, k: int) -> SWord:
    return SWord(c.const(k < 0), const_word(c, abs(k)))


def sneg(c: Builder, x: SWord) -> SWord:
    return SWord(c.not_(x.sign), x.mag)


def smul(c: Builder, x: SWord, y: SWord) -> SWord:
    return SWord(c.xor(x.sign, y.sign), mul(c, x.mag, y.mag))


def smul_unsigned(c: Builder, x: SWord, y: Word) -> SWord:
    return SWord(x.sign, mul(c, x.mag, y))


def sadd(c: Builder, x: SWord, y: SWord) -> SWord:
    if x.mag.bound == 0:
        return y
    if y.mag.bound == 0:
        return x
    same = c.xnor(x.sign, y.sign)
    total = add(c, x.mag, y.mag) if same != c.FALSE else None
    if same == c.TRUE:
        return SWord(x.sign, total)
    x_small = lt(c, x.mag, y.mag)
    diff = mux(c, x_small, sub(c, y.mag, x.mag), sub(c, x.mag, y.mag))
    sign_diff = c.mux(x_small, y.sign, x.sign)
    if same == c.FALSE:
        return SWord(sign_diff, diff)
    return SWord(c.mux(same, x.sign, sign_diff), mux(c, same, total, diff))


def negative(c: Builder, x: SWord) -> int:
    return c.and_(x.sign, nonzero(c, x.mag))


def slt(c: Builder, x: SWord, y: SWord) -> int:
    nx, ny = negative(c, x), negative(c, y)
    return c.or_(
        c.and_(nx, c.not_(ny)),
        c.and_(c.not_(nx), c.not_(ny), lt(c, x.mag, y.mag)),
        c.and_(nx, ny, lt(c, y.mag, x.mag)),
    )


def seq(c: Builder, x: SWord, y: SWord) -> int:
    return c.and_(eq(c, x.mag, y.mag),
                  c.or_(c.not_(nonzero(c, x.mag)), c.xnor(x.sign, y.sign)))


def smux(c: Builder, s: int, x: SWord, y: SWord) -> SWord:
    return SWord(c.mux(s, x.sign, y.sign), mux(c, s, x.mag, y.mag))
