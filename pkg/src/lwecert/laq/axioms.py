"""Axiom schemas and their instantiation.

A schema is a formula over placeholder variables. Instantiation replaces
placeholders by name with the supplied terms and re-checks sorts. The
congruence schema ``1.d`` is generated per symbol: for a function symbol
``f`` of arity k it reads ``x1 = y1 and ... and xk = yk -> f(x) = f(y)``;
for the field predicates ``lt``, ``leq``, ``int`` and the index predicate
``lti`` it reads ``x = y and P(x) -> P(y)``. Item 4.c is read with the sum
symbol on both sides.
"""

from __future__ import annotations

from .syntax import (
    FIELD, FORMULA, FUNCTIONS, INDEX, MATRIX, PREDICATES, And, Eq, Imp, LaqSortError,
    check_sorts, index_only, parse_formula, parse_term, sort_of,
)

_SORTS = {
    "i": INDEX, "j": INDEX, "k": INDEX, "i1": INDEX, "j1": INDEX, "i2": INDEX, "j2": INDEX,
    "a": FIELD, "b": FIELD, "c": FIELD, "d": FIELD,
    "x": FIELD, "y": FIELD, "z": FIELD, "w": FIELD,
    "A": MATRIX,
}

# placeholder variables whose sort is fixed by the substitution
_POLY = {"1.a": ("x",), "1.b": ("x", "y"), "1.c": ("x", "y", "z")}

SCHEMAS: dict[str, str] = {
    "1.a": "(= x x)",
    "1.b": "(imp (= x y) (= y x))",
    "1.c": "(imp (and (= x y) (= y z)) (= x z))",
    "1.e": "(imp (and (= i1 j1) (and (= i2 j2) (le i1 i2))) (le j1 j2))",
    "2.a": "(= (+i i 0) i)",
    "2.b": "(= (+i i (+i j 1)) (+i (+i i j) 1))",
    "2.c": "(= (*i i (+i j 1)) (+i (*i i j) i))",
    "2.d": "(imp (= (+i i 1) (+i j 1)) (= i j))",
    "2.e": "(not (= (+i i 1) 0))",
    "2.f": "(le i (+i i j))",
    "2.g": "(or (le i j) (le j i))",
    "2.h": "(imp (and (le i j) (= (+i i k) j)) (= (-i j i) k))",
    "2.i": "(imp (and (le i j) (= (+i i k) j)) (imp (not (lti i j)) (= (-i j i) 0)))",
    "2.j": "(imp (not (= j 0)) (lti (rem i j) j))",
    "2.k": "(imp (not (= j 0)) (= i (+i (*i j (div i j)) (rem i j))))",
    "2.l": "(imp alpha (= (condi alpha i j) i))",
    "2.m": "(imp (not alpha) (= (condi alpha i j) j))",
    "3.a": "(and (not (= 0f 1f)) (= (+f a 0f) a))",
    "3.b": "(= (+f a (-f a)) 0f)",
    "3.c": "(= (*f 1f a) a)",
    "3.d": "(imp (not (= a 0f)) (= (*f a (inv a)) 1f))",
    "3.e": "(= (+f a b) (+f b a))",
    "3.f": "(= (*f a b) (*f b a))",
    "3.g": "(= (+f a (+f b c)) (+f (+f a b) c))",
    "3.h": "(= (*f a (*f b c)) (*f (*f a b) c))",
    "3.i": "(= (*f a (+f b c)) (+f (*f a b) (*f a c)))",
    "3.j": "(imp alpha (= (condf alpha a b) a))",
    "3.k": "(imp (not alpha) (= (condf alpha a b) b))",
    "4.a": "(imp (or (= i 0) (or (lti (r A) i) (or (= j 0) (lti (c A) j)))) (= (e A i j) 0f))",
    "4.b": "(imp (and (= (r A) 1) (= (c A) 1)) (= (sum A) (e A 1 1)))",
    "4.c": "(imp (= (c A) 1) (= (sum A) (sum (tp A))))",
    "4.d": "(imp (or (= (r A) 0) (= (c A) 0)) (= (sum A) 0f))",
    "Int1": "(int 0f)",
    "Int2": "(int 1f)",
    "Int3": "(int (-f 1f))",
    "Int4": "(imp (and (int x) (int y)) (int (+f x y)))",
    "Int5": "(imp (and (int x) (int y)) (int (*f x y)))",
    "Int6": "(imp (and (int x) (lt 0f x)) (leq 1f x))",
    "Ord1": "(iff (leq x y) (or (lt x y) (= x y)))",
    "Ord2": "(not (lt x x))",
    "Ord3": "(imp (lt x y) (not (= x y)))",
    "Ord4": "(imp (and (lt x y) (lt y z)) (lt x z))",
    "Ord5": "(imp (not (= x y)) (or (lt x y) (lt y x)))",
    "Ord6": "(imp (and (leq x y) (leq z w)) (leq (+f x z) (+f y w)))",
    "Ord7": "(imp (and (leq 0f x) (leq 0f y)) (leq 0f (*f x y)))",
    "Ord8": "(leq 0f (*f x x))",
    "Ord9": "(imp (and (leq 0f x) (lt y 0f)) (leq (*f x y) 0f))",
    "Ord10": "(imp (and (leq 0f a) (leq 0f b) (leq 0f c) (leq 0f d) (lt a b) (lt c d)) "
             "(lt (*f a c) (*f b d)))",
}

AXIOM_IDS = ("1.a", "1.b", "1.c", "1.d", "1.e") + tuple(k for k in SCHEMAS if not k.startswith("1."))

CONGRUENCE_SYMBOLS = tuple(s for s, (args, _) in FUNCTIONS.items() if FORMULA not in args) + (
    "lt", "leq", "int", "lti")


class AxiomError(ValueError):
    pass


_SCHEMA_CACHE: dict[str, tuple] = {}

# the formula placeholder alpha is stored as this index atom
_ALPHA_TEXT = "(= alpha:i alpha:i)"
_ALPHA = ("=", ("v", "alpha", INDEX), ("v", "alpha", INDEX))


def _schema(axiom_id: str):
    if axiom_id not in _SCHEMA_CACHE:
        sorts = dict(_SORTS)
        for name in _POLY.get(axiom_id, ()):
            sorts[name] = FIELD  # placeholder sort, replaced on instantiation
        _SCHEMA_CACHE[axiom_id] = parse_formula(SCHEMAS[axiom_id].replace("alpha", _ALPHA_TEXT), sorts)
    return _SCHEMA_CACHE[axiom_id]


def placeholders(axiom_id: str) -> dict[str, str]:
    """Placeholder names of a schema with their sorts (``"formula"`` for alpha)."""
    if axiom_id == "1.d":
        return {"f": "symbol"}
    out = {}

    def walk(t):
        if t[0] == "v":
            out[t[1]] = t[2]
        elif t[0] != "n":
            for a in t[1:]:
                walk(a)
    walk(_schema(axiom_id))
    if "alpha" in out:
        out["alpha"] = FORMULA
    return out


def _coerce(value, sort_hint):
    if isinstance(value, str):
        return parse_term(value)
    return value


def _replace(t, mapping):
    if t == _ALPHA:
        return mapping.get("alpha", t)
    tag = t[0]
    if tag == "v":
        return mapping.get(t[1], t)
    if tag == "n":
        return t
    return (tag,) + tuple(_replace(a, mapping) for a in t[1:])


def _congruence(subst: dict):
    sym = subst.get("f")
    if sym not in CONGRUENCE_SYMBOLS:
        raise AxiomError(f"1.d needs a function or predicate symbol, got {sym!r}")
    arg_sorts = FUNCTIONS[sym][0] if sym in FUNCTIONS else PREDICATES[sym]
    k = len(arg_sorts)
    allowed = {"f"} | {f"x{t}" for t in range(1, k + 1)} | {f"y{t}" for t in range(1, k + 1)}
    extra = set(subst) - allowed
    if extra:
        raise AxiomError(f"unknown placeholders {sorted(extra)} for 1.d on {sym}")
    xs, ys = [], []
    for t, s in enumerate(arg_sorts, 1):
        x = _coerce(subst.get(f"x{t}", ("v", f"x{t}", s)), s)
        y = _coerce(subst.get(f"y{t}", ("v", f"y{t}", s)), s)
        for val in (x, y):
            if check_sorts(val) != s:
                raise AxiomError(f"1.d on {sym}: argument {t} must have sort {s}")
        xs.append(x)
        ys.append(y)
    eqs = [Eq(x, y) for x, y in zip(xs, ys)]
    if sym in FUNCTIONS:
        return Imp(And(*eqs), Eq((sym,) + tuple(xs), (sym,) + tuple(ys)))
    return Imp(And(*eqs, (sym,) + tuple(xs)), (sym,) + tuple(ys))


def instantiate_axiom(axiom_id: str, substitution: dict | None = None):
    """Instance of an axiom schema.

    ``substitution`` maps placeholder names to terms (tuples or s-expression
    text). Placeholders left out stay as variables of their schema sort.
    """
    subst = dict(substitution or {})
    if axiom_id == "1.d":
        return _congruence(subst)
    if axiom_id not in SCHEMAS:
        raise AxiomError(f"unknown axiom id {axiom_id!r}")
    holes = placeholders(axiom_id)
    extra = set(subst) - set(holes)
    if extra:
        raise AxiomError(f"unknown placeholders {sorted(extra)} for {axiom_id}")
    mapping = {}
    poly_sort = None
    for name, value in subst.items():
        term = _coerce(value, holes[name])
        try:
            got = check_sorts(term)
        except LaqSortError as exc:
            raise AxiomError(f"{axiom_id}: {name}: {exc}") from None
        want = holes[name]
        if name in _POLY.get(axiom_id, ()):
            if got == FORMULA:
                raise AxiomError(f"{axiom_id}: {name} must be a term")
            if poly_sort not in (None, got):
                raise AxiomError(f"{axiom_id}: placeholders must share one sort")
            poly_sort = got
        elif got != want:
            raise AxiomError(f"{axiom_id}: {name} must have sort {want}, got {got}")
        if want == FORMULA and not index_only(term):
            raise AxiomError(f"{axiom_id}: alpha must be built from index atoms")
        mapping[name] = term
    if poly_sort is not None:
        for name in _POLY[axiom_id]:
            mapping.setdefault(name, ("v", name, poly_sort))
    out = _replace(_schema(axiom_id), mapping)
    try:
        check_sorts(out)
    except LaqSortError as exc:
        raise AxiomError(f"{axiom_id}: ill-sorted instance: {exc}") from None
    assert sort_of(out) == FORMULA
    return out
