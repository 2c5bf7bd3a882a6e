"""Terms and formulas of the three-sorted language, with an s-expression
reader and printer.

Nodes are plain tuples so they hash and compare structurally:

* ``("v", name, sort)``: variable, sort one of ``"i"``, ``"f"``, ``"m"``
* ``("n", sort, k)``: numeral of index or field sort
* ``(op, arg, ...)``: application of a function or predicate symbol

Concrete syntax (one form per symbol)::

    index   (+i s t) (*i s t) (-i s t) (div s t) (rem s t) (max s t)
            (r A) (c A) (condi phi s t)         numerals: 0 1 2 ...
    field   (+f a b) (*f a b) (-f a) (inv a) (e A i j) (sum A) (dot A B)
            (tr A) (condf phi a b)              numerals: 0f 1f 2f ...
            sugar: (sub a b) reads as (+f a (-f b))
    matrix  (+m A B) (smul a A) (tp A) (*m A B) (zero i j) (ident i) (col A i)
    atoms   (= s t) (le i j) (lti i j) (lt a b) (leq a b) (int a)
    logic   (not p) (and p q ...) (or p q ...) (imp p q) (iff p q)

``and``/``or`` with more than two arguments nest to the right and ``iff``
expands to a conjunction of implications. A variable's sort comes from an
explicit ``name:sort`` suffix, then from the caller's declarations, then from
the convention: capitalised names are matrices, names starting with
i, j, k or l are indices, everything else is a field element.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

INDEX, FIELD, MATRIX, FORMULA = "i", "f", "m", "formula"

# op -> (argument sorts, result sort)
FUNCTIONS: dict[str, tuple[tuple[str, ...], str]] = {
    "+i": ((INDEX, INDEX), INDEX),
    "*i": ((INDEX, INDEX), INDEX),
    "-i": ((INDEX, INDEX), INDEX),
    "div": ((INDEX, INDEX), INDEX),
    "rem": ((INDEX, INDEX), INDEX),
    "max": ((INDEX, INDEX), INDEX),
    "r": ((MATRIX,), INDEX),
    "c": ((MATRIX,), INDEX),
    "condi": ((FORMULA, INDEX, INDEX), INDEX),
    "+f": ((FIELD, FIELD), FIELD),
    "*f": ((FIELD, FIELD), FIELD),
    "-f": ((FIELD,), FIELD),
    "inv": ((FIELD,), FIELD),
    "e": ((MATRIX, INDEX, INDEX), FIELD),
    "sum": ((MATRIX,), FIELD),
    "dot": ((MATRIX, MATRIX), FIELD),
    "tr": ((MATRIX,), FIELD),
    "condf": ((FORMULA, FIELD, FIELD), FIELD),
    "+m": ((MATRIX, MATRIX), MATRIX),
    "smul": ((FIELD, MATRIX), MATRIX),
    "tp": ((MATRIX,), MATRIX),
    "*m": ((MATRIX, MATRIX), MATRIX),
    "zero": ((INDEX, INDEX), MATRIX),
    "ident": ((INDEX,), MATRIX),
    "col": ((MATRIX, INDEX), MATRIX),
}

PREDICATES: dict[str, tuple[str, ...]] = {
    "le": (INDEX, INDEX),
    "lti": (INDEX, INDEX),
    "lt": (FIELD, FIELD),
    "leq": (FIELD, FIELD),
    "int": (FIELD,),
}

CONNECTIVES = {"not": 1, "and": 2, "or": 2, "imp": 2}


class LaqSyntaxError(ValueError):
    def __init__(self, msg: str, pos: int | None = None):
        super().__init__(msg if pos is None else f"{msg} (at offset {pos})")
        self.pos = pos


class LaqSortError(LaqSyntaxError):
    pass


# -- constructors ---------------------------------------------------------------

def var(name: str, sort: str) -> tuple:
    return ("v", name, sort)


def num(k: int, sort: str = FIELD) -> tuple:
    return ("n", sort, int(k))


def is_var(t) -> bool:
    return t[0] == "v"


def is_num(t) -> bool:
    return t[0] == "n"


def is_formula(t) -> bool:
    return t[0] in CONNECTIVES or t[0] in PREDICATES or t[0] == "="


def Not(p):
    return ("not", p)


def And(*ps):
    if not ps:
        raise ValueError("empty conjunction")
    out = ps[-1]
    for p in reversed(ps[:-1]):
        out = ("and", p, out)
    return out


def Or(*ps):
    if not ps:
        raise ValueError("empty disjunction")
    out = ps[-1]
    for p in reversed(ps[:-1]):
        out = ("or", p, out)
    return out


def Imp(p, q):
    return ("imp", p, q)


def Iff(p, q):
    return ("and", ("imp", p, q), ("imp", q, p))


def Eq(s, t):
    return ("=", s, t)


def Neq(s, t):
    return ("not", ("=", s, t))


# -- sorts ------------------------------------------------------------------------

def sort_of(t) -> str:
    """Sort of a well-formed node (``"formula"`` for formulas)."""
    tag = t[0]
    if tag == "v":
        return t[2]
    if tag == "n":
        return t[1]
    if tag in FUNCTIONS:
        return FUNCTIONS[tag][1]
    return FORMULA


def check_sorts(t) -> str:
    """Recursively sort-check a node; returns its sort or raises."""
    tag = t[0]
    if tag == "v":
        if t[2] not in (INDEX, FIELD, MATRIX):
            raise LaqSortError(f"bad sort {t[2]!r} for variable {t[1]}")
        return t[2]
    if tag == "n":
        if t[1] not in (INDEX, FIELD) or t[2] < 0:
            raise LaqSortError(f"bad numeral {t!r}")
        return t[1]
    args = t[1:]
    if tag == "=":
        if len(args) != 2:
            raise LaqSortError("= takes two arguments")
        s1, s2 = check_sorts(args[0]), check_sorts(args[1])
        if s1 != s2 or s1 == FORMULA:
            raise LaqSortError(f"= between sorts {s1} and {s2}")
        return FORMULA
    if tag in CONNECTIVES:
        if len(args) != CONNECTIVES[tag]:
            raise LaqSortError(f"{tag} takes {CONNECTIVES[tag]} arguments")
        for a in args:
            if check_sorts(a) != FORMULA:
                raise LaqSortError(f"{tag} expects formulas")
        return FORMULA
    if tag in PREDICATES:
        want = PREDICATES[tag]
    elif tag in FUNCTIONS:
        want = FUNCTIONS[tag][0]
    else:
        raise LaqSortError(f"unknown symbol {tag!r}")
    if len(args) != len(want):
        raise LaqSortError(f"{tag} takes {len(want)} arguments, got {len(args)}")
    for a, w in zip(args, want):
        got = check_sorts(a)
        if got != w:
            raise LaqSortError(f"{tag} expects {w} argument, got {got}")
        if w == FORMULA and not index_only(a):
            raise LaqSortError(f"condition of {tag} must use index atoms only")
    return FUNCTIONS[tag][1] if tag in FUNCTIONS else FORMULA


def index_only(phi) -> bool:
    """Quantifier-free formula whose atoms are index = / le / lti."""
    tag = phi[0]
    if tag in CONNECTIVES:
        return all(index_only(a) for a in phi[1:])
    if tag == "=":
        return sort_of(phi[1]) == INDEX
    return tag in ("le", "lti")


# -- traversal ----------------------------------------------------------------------

def subterm(t, path):
    for k in path:
        t = t[k]
    return t


def replace_at(t, path, new):
    if not path:
        return new
    k = path[0]
    return t[:k] + (replace_at(t[k], path[1:], new),) + t[k + 1:]


def positions(t, target, prefix=()):
    """All paths at which ``target`` occurs."""
    if t == target:
        yield prefix
        return
    if t[0] in ("v", "n"):
        return
    for k in range(1, len(t)):
        yield from positions(t[k], target, prefix + (k,))


def free_vars(t, acc=None) -> set:
    acc = set() if acc is None else acc
    if t[0] == "v":
        acc.add(t)
    elif t[0] != "n":
        for a in t[1:]:
            free_vars(a, acc)
    return acc


def substitute(t, mapping: dict):
    """Simultaneous substitution; keys are variable nodes."""
    if t[0] == "v":
        return mapping.get(t, t)
    if t[0] == "n":
        return t
    return (t[0],) + tuple(substitute(a, mapping) for a in t[1:])


# -- reader -------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\()|(\))|([^\s()]+))")


def read_sexpr(text: str):
    """Parse one s-expression into nested lists of (token, offset) leaves."""
    pos, stack, root = 0, [[]], None
    while True:
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            break
        start = m.start(m.lastindex)
        pos = m.end()
        if m.group(1):
            stack.append([("(", start)])
        elif m.group(2):
            if len(stack) == 1:
                raise LaqSyntaxError("unbalanced ')'", start)
            done = stack.pop()
            stack[-1].append(done)
        else:
            stack[-1].append((m.group(3), start))
    if text[pos:].strip():
        raise LaqSyntaxError("unexpected trailing input", pos)
    if len(stack) != 1:
        raise LaqSyntaxError("unbalanced '('", len(text))
    if len(stack[0]) != 1:
        raise LaqSyntaxError("expected exactly one expression", 0)
    root = stack[0][0]
    return root


_NUMERAL = re.compile(r"^(\d+)(f?)$")


def default_sort(name: str) -> str:
    if name[:1].isupper():
        return MATRIX
    if name[:1] in "ijkl":
        return INDEX
    return FIELD


def _build(node, sorts):
    if isinstance(node, tuple):
        tok, off = node
        m = _NUMERAL.match(tok)
        if m:
            return ("n", FIELD if m.group(2) else INDEX, int(m.group(1)))
        if not re.match(r"^[A-Za-z_][A-Za-z0-9_'.]*(:[ifm])?$", tok):
            raise LaqSyntaxError(f"bad token {tok!r}", off)
        name, _, s = tok.partition(":")
        if name in CONNECTIVES:
            raise LaqSyntaxError(f"connective {name!r} used as a variable", off)
        return ("v", name, s or sorts.get(name) or default_sort(name))
    head, *rest = node
    if not rest:
        raise LaqSyntaxError("empty application", head[1])
    op_tok, off = rest[0] if isinstance(rest[0], tuple) else (None, head[1])
    if op_tok is None:
        raise LaqSyntaxError("operator must be a symbol", head[1])
    args = [_build(a, sorts) for a in rest[1:]]
    if op_tok == "sub":
        if len(args) != 2:
            raise LaqSyntaxError("sub takes two arguments", off)
        return ("+f", args[0], ("-f", args[1]))
    if op_tok in ("and", "or") and len(args) >= 2:
        return And(*args) if op_tok == "and" else Or(*args)
    if op_tok == "iff":
        if len(args) != 2:
            raise LaqSyntaxError("iff takes two arguments", off)
        return Iff(*args)
    if op_tok not in FUNCTIONS and op_tok not in PREDICATES and op_tok not in CONNECTIVES and op_tok != "=":
        raise LaqSyntaxError(f"unknown symbol {op_tok!r}", off)
    t = (op_tok,) + tuple(args)
    try:
        check_sorts(t)
    except LaqSortError as exc:
        raise LaqSortError(str(exc), off) from None
    return t


def parse_term(text: str, sorts: dict | None = None):
    """Parse a term or formula; sort errors carry the offending offset."""
    return _build(read_sexpr(text), sorts or {})


def parse_formula(text: str, sorts: dict | None = None):
    t = parse_term(text, sorts)
    if sort_of(t) != FORMULA:
        raise LaqSortError(f"expected a formula, got a {sort_of(t)} term", 0)
    return t


# -- printer ------------------------------------------------------------------------

def show(t, sorts: dict | None = None) -> str:
    tag = t[0]
    if tag == "v":
        name, s = t[1], t[2]
        declared = (sorts or {}).get(name)
        return name if (declared or default_sort(name)) == s else f"{name}:{s}"
    if tag == "n":
        return f"{t[2]}f" if t[1] == FIELD else str(t[2])
    return "(" + " ".join([tag] + [show(a, sorts) for a in t[1:]]) + ")"


@dataclass(frozen=True)
class Sequent:
    ante: tuple
    succ: tuple

    def show(self, sorts=None) -> str:
        a = " ".join(show(f, sorts) for f in self.ante)
        s = " ".join(show(f, sorts) for f in self.succ)
        return f"(seq ({a}) ({s}))"

    def formula(self):
        """The sequent as one formula: conjunction of the antecedent implies
        the disjunction of the succedent."""
        left = And(*self.ante) if self.ante else None
        if self.succ:
            right = Or(*self.succ)
        else:
            right = ("=", num(0), num(1))  # 0f = 1f stands for falsum
        return right if left is None else Imp(left, right)


def parse_sequent(text: str, sorts: dict | None = None) -> Sequent:
    node = read_sexpr(text)
    if (not isinstance(node, list) or len(node) != 4 or not isinstance(node[1], tuple)
            or node[1][0] != "seq"):
        raise LaqSyntaxError("expected (seq (antecedent...) (succedent...))", 0)
    parts = []
    for side in node[2:]:
        if not isinstance(side, list):
            raise LaqSyntaxError("sequent sides must be lists", 0)
        parts.append(tuple(_build(f, sorts or {}) for f in side[1:]))
    for f in parts[0] + parts[1]:
        if sort_of(f) != FORMULA:
            raise LaqSortError("sequents contain formulas only", 0)
    return Sequent(parts[0], parts[1])
