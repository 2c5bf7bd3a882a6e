"""Normal forms for the identity rule.

Field terms are unfolded into polynomials with rational coefficients over
atoms. The atoms are field variables, entries ``e(A,i,j)`` of matrix
variables, inverses of non-constant polynomials (keyed by the normal form of
their argument), and any subterm whose indices are not closed numerals.
Matrix terms are unfolded entrywise, which needs the dimensions of every
matrix variable involved. Two terms are identical when their normal forms
agree; that is exactly the commutative-ring consequences of the field axioms,
with the defined matrix operations read through their definitions.
"""

from __future__ import annotations

from fractions import Fraction

from .syntax import FIELD, FORMULA, INDEX, MATRIX, show, sort_of


class IdentityError(ValueError):
    pass


# A polynomial is a dict {monomial: coefficient}; a monomial is a sorted
# tuple of (atom, exponent) with atoms rendered as strings.

def _const(c) -> dict:
    c = Fraction(c)
    return {(): c} if c else {}


def _atom(key: str) -> dict:
    return {((key, 1),): Fraction(1)}


def _add(p: dict, q: dict) -> dict:
    out = dict(p)
    for m, c in q.items():
        v = out.get(m, 0) + c
        if v:
            out[m] = v
        else:
            out.pop(m, None)
    return out


def _neg(p: dict) -> dict:
    return {m: -c for m, c in p.items()}


def _mono_mul(a: tuple, b: tuple) -> tuple:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for k, e in b:
        d[k] = d.get(k, 0) + e
    return tuple(sorted(d.items()))


def _mul(p: dict, q: dict) -> dict:
    out: dict = {}
    for m1, c1 in p.items():
        for m2, c2 in q.items():
            m = _mono_mul(m1, m2)
            v = out.get(m, 0) + c1 * c2
            if v:
                out[m] = v
            else:
                out.pop(m, None)
    return out


def poly_key(p: dict) -> str:
    return ";".join(f"{c}*" + ".".join(f"{a}^{e}" for a, e in m) for m, c in sorted(p.items()))


class Normalizer:
    """Unfolds terms given the dimensions of matrix variables."""

    def __init__(self, dims: dict[str, tuple[int, int]] | None = None):
        self.dims = dict(dims or {})

    # -- index terms: closed values or None ------------------------------------
    def index_value(self, t):
        tag = t[0]
        if tag == "n":
            return t[2]
        if tag == "v":
            return None
        a = t[1:]
        if tag in ("r", "c"):
            shape = self.shape(a[0])
            if shape is None:
                return None
            return shape[0] if tag == "r" else shape[1]
        if tag == "condi":
            truth = self.static_truth(a[0])
            if truth is None:
                return None
            return self.index_value(a[1] if truth else a[2])
        x, y = self.index_value(a[0]), self.index_value(a[1])
        if x is None or y is None:
            return None
        if tag == "+i":
            return x + y
        if tag == "*i":
            return x * y
        if tag == "-i":
            return max(0, x - y)
        if tag == "max":
            return max(x, y)
        if tag == "div":
            return x // y if y else 0
        if tag == "rem":
            return x % y if y else x
        raise IdentityError(f"not an index term: {tag}")

    def static_truth(self, phi):
        tag = phi[0]
        if tag == "not":
            v = self.static_truth(phi[1])
            return None if v is None else not v
        if tag in ("and", "or", "imp"):
            x, y = self.static_truth(phi[1]), self.static_truth(phi[2])
            if x is None or y is None:
                return None
            return {"and": x and y, "or": x or y, "imp": (not x) or y}[tag]
        x, y = self.index_value(phi[1]), self.index_value(phi[2])
        if x is None or y is None:
            return None
        return {"=": x == y, "le": x <= y, "lti": x < y}[tag]

    # -- matrix shapes ------------------------------------------------------------
    def shape(self, t):
        tag = t[0]
        if tag == "v":
            return self.dims.get(t[1])
        a = t[1:]
        if tag in ("+m", "*m"):
            s1, s2 = self.shape(a[0]), self.shape(a[1])
            if s1 is None or s2 is None:
                return None
            if tag == "+m":
                return max(s1[0], s2[0]), max(s1[1], s2[1])
            return s1[0], s2[1]
        if tag == "smul":
            return self.shape(a[1])
        if tag == "tp":
            s = self.shape(a[0])
            return None if s is None else (s[1], s[0])
        if tag == "zero":
            r, c = self.index_value(a[0]), self.index_value(a[1])
            return None if r is None or c is None else (r, c)
        if tag == "ident":
            k = self.index_value(a[0])
            return None if k is None else (k, k)
        if tag == "col":
            s = self.shape(a[0])
            return None if s is None else (s[0], 1)
        raise IdentityError(f"not a matrix term: {tag}")

    # -- field terms ----------------------------------------------------------------
    def field(self, t) -> dict:
        tag = t[0]
        if tag == "v":
            return _atom(f"x:{t[1]}")
        if tag == "n":
            return _const(t[2])
        a = t[1:]
        if tag == "+f":
            return _add(self.field(a[0]), self.field(a[1]))
        if tag == "*f":
            return _mul(self.field(a[0]), self.field(a[1]))
        if tag == "-f":
            return _neg(self.field(a[0]))
        if tag == "inv":
            p = self.field(a[0])
            if not p:
                return {}
            if list(p) == [()]:
                return _const(1 / p[()])
            return _atom("inv:{" + poly_key(p) + "}")
        if tag == "condf":
            truth = self.static_truth(a[0])
            if truth is None:
                return _atom("opaque:" + show(t))
            return self.field(a[1] if truth else a[2])
        if tag == "e":
            i, j = self.index_value(a[1]), self.index_value(a[2])
            if i is None or j is None:
                return _atom("opaque:" + show(t))
            return self.entry(a[0], i, j)
        if tag == "sum":
            r, c = self._need_shape(a[0])
            out: dict = {}
            for i in range(1, r + 1):
                for j in range(1, c + 1):
                    out = _add(out, self.entry(a[0], i, j))
            return out
        if tag == "dot":
            (r1, c1), (r2, c2) = self._need_shape(a[0]), self._need_shape(a[1])
            out = {}
            for i in range(1, max(r1, r2) + 1):
                for j in range(1, max(c1, c2) + 1):
                    out = _add(out, _mul(self.entry(a[0], i, j), self.entry(a[1], i, j)))
            return out
        if tag == "tr":
            r, c = self._need_shape(a[0])
            out = {}
            for i in range(1, min(r, c) + 1):
                out = _add(out, self.entry(a[0], i, i))
            return out
        raise IdentityError(f"not a field term: {tag}")

    def _need_shape(self, m):
        s = self.shape(m)
        if s is None:
            raise IdentityError(f"size of {show(m)} is not determined")
        return s

    def entry(self, m, i: int, j: int) -> dict:
        """Normal form of e(m, i, j) for closed indices."""
        if i < 1 or j < 1:
            return {}
        tag = m[0]
        if tag == "v":
            s = self.dims.get(m[1])
            if s is None:
                raise IdentityError(f"matrix variable {m[1]} has no declared size")
            if i > s[0] or j > s[1]:
                return {}
            return _atom(f"e:{m[1]}:{i}:{j}")
        r, c = self._need_shape(m)
        if i > r or j > c:
            return {}
        a = m[1:]
        if tag == "+m":
            return _add(self.entry(a[0], i, j), self.entry(a[1], i, j))
        if tag == "smul":
            return _mul(self.field(a[0]), self.entry(a[1], i, j))
        if tag == "tp":
            return self.entry(a[0], j, i)
        if tag == "*m":
            inner = max(self._need_shape(a[0])[1], self._need_shape(a[1])[0])
            out: dict = {}
            for k in range(1, inner + 1):
                out = _add(out, _mul(self.entry(a[0], i, k), self.entry(a[1], k, j)))
            return out
        if tag == "zero":
            return {}
        if tag == "ident":
            return _const(1) if i == j else {}
        if tag == "col":
            k = self.index_value(a[1])
            if k is None:
                return _atom("opaque:" + show(("e", m, ("n", INDEX, i), ("n", INDEX, j))))
            return self.entry(a[0], i, k)
        raise IdentityError(f"not a matrix term: {tag}")

    def matrix(self, m):
        r, c = self._need_shape(m)
        return (r, c, tuple(tuple(self.entry(m, i, j) for j in range(1, c + 1))
                            for i in range(1, r + 1)))

    # -- the rule ---------------------------------------------------------------------
    def is_identity(self, eq) -> bool:
        """True if ``eq`` is an equation whose sides have equal normal forms."""
        if eq[0] != "=":
            raise IdentityError("identity steps prove equations only")
        s, t = eq[1], eq[2]
        srt = sort_of(s)
        if srt == FIELD:
            return self.field(s) == self.field(t)
        if srt == MATRIX:
            return self.matrix(s) == self.matrix(t)
        if srt == INDEX:
            x, y = self.index_value(s), self.index_value(t)
            if x is None or y is None:
                return s == t
            return x == y
        assert srt != FORMULA
        return False
