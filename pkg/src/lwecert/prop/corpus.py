"""Random well-sorted terms and the instantiated axiom corpus."""

from __future__ import annotations

import random

from ..laq.axioms import AXIOM_IDS, CONGRUENCE_SYMBOLS, instantiate_axiom, placeholders
from ..laq.syntax import FIELD, FORMULA, FUNCTIONS, INDEX, MATRIX, PREDICATES, check_sorts
from .translate import ObjectAssignment

FIELD_VARS = ("p", "q", "s")
INDEX_VARS = ("i", "j")
MATRIX_VARS = ("A", "B")

ORDER_AXIOMS = tuple(f"Ord{k}" for k in range(1, 11))
INT_AXIOMS = tuple(f"Int{k}" for k in range(1, 7))


def random_term(rng: random.Random, sort: str, depth: int = 2):
    """A random term of the given sort over the fixed variable pools."""
    if sort == FORMULA:
        return random_index_atom(rng, depth)
    if depth <= 0 or rng.random() < 0.3:
        if sort == INDEX:
            return ("v", rng.choice(INDEX_VARS), INDEX) if rng.random() < 0.5 else \
                ("n", INDEX, rng.randint(0, 3))
        if sort == FIELD:
            return ("v", rng.choice(FIELD_VARS), FIELD) if rng.random() < 0.7 else \
                ("n", FIELD, rng.randint(0, 3))
        return ("v", rng.choice(MATRIX_VARS), MATRIX)
    ops = [op for op, (_, res) in FUNCTIONS.items() if res == sort]
    op = rng.choice(ops)
    args = []
    for s in FUNCTIONS[op][0]:
        if s == INDEX and sort != INDEX:
            # keep matrix shapes small: index arguments are shallow
            args.append(random_term(rng, INDEX, 0))
        else:
            args.append(random_term(rng, s, depth - 1))
    return (op,) + tuple(args)


def random_index_atom(rng: random.Random, depth: int = 1):
    op = rng.choice(("=", "le", "lti"))
    atom = (op, random_term(rng, INDEX, depth - 1), random_term(rng, INDEX, depth - 1))
    return ("not", atom) if rng.random() < 0.3 else atom


def random_sigma(rng: random.Random, precision: int, max_dim: int = 3) -> ObjectAssignment:
    top = min(max_dim, precision)
    return ObjectAssignment({v: rng.randint(0, min(3, precision)) for v in INDEX_VARS},
                            {v: (rng.randint(0, top), rng.randint(0, top)) for v in MATRIX_VARS},
                            precision)


def random_instance(rng: random.Random, axiom_id: str, depth: int = 2):
    """An instance of the schema with every placeholder replaced by a random
    term of its sort."""
    if axiom_id == "1.d":
        sym = rng.choice(CONGRUENCE_SYMBOLS)
        sorts = FUNCTIONS[sym][0] if sym in FUNCTIONS else PREDICATES[sym]
        subst = {"f": sym}
        for t, s in enumerate(sorts, 1):
            x = random_term(rng, s, depth - 1)
            subst[f"x{t}"] = x
            subst[f"y{t}"] = x if rng.random() < 0.5 else random_term(rng, s, depth - 1)
        return instantiate_axiom("1.d", subst)
    holes = placeholders(axiom_id)
    poly = rng.choice((INDEX, FIELD, MATRIX))
    subst = {}
    for name, s in holes.items():
        if axiom_id in ("1.a", "1.b", "1.c"):
            s = poly
        subst[name] = random_term(rng, s, depth)
    phi = instantiate_axiom(axiom_id, subst)
    check_sorts(phi)
    return phi


def axiom_corpus(rng: random.Random, per_axiom: int = 3, depth: int = 2) -> list[tuple[str, tuple]]:
    """``per_axiom`` random instances of every schema (the congruence schema
    once per symbol)."""
    out = []
    for axiom_id in AXIOM_IDS:
        reps = per_axiom * (len(CONGRUENCE_SYMBOLS) if axiom_id == "1.d" else 1)
        for _ in range(reps):
            out.append((axiom_id, random_instance(rng, axiom_id, depth)))
    return out


def plain_instance(axiom_id: str):
    """The schema with its placeholders as plain field variables."""
    return instantiate_axiom(axiom_id)
