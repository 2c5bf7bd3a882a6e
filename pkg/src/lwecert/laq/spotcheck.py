"""Semantic spot-checks of proof scripts.

Every sequent of every block is evaluated exactly under sampled valuations.
A sequent is only informative under valuations that satisfy its antecedent,
so besides uniform random valuations each block gets a generator that builds
valuations satisfying its theorem's hypotheses (lattice bases, dual vectors,
certificates) and a few degenerate variants (zero vectors, parallel vectors,
orthogonal coefficient columns) that reach the case splits of the proofs.
Sequents whose antecedent no sampled valuation satisfies are reported as
vacuous rather than counted as checked.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from ..matrix import rat_inverse
from .kernel import LaqProof
from .semantics import MatVal, Valuation, eval_formula
from .syntax import FIELD, INDEX, MATRIX


@dataclass
class SpotReport:
    block: str
    sequents: int = 0
    covered: int = 0  # sequents with the full quota of satisfying valuations
    partial: int = 0  # some, but fewer than the quota
    vacuous: int = 0  # no satisfying valuation in the pool
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def _rand_q(rng: random.Random, span: int = 4) -> Fraction:
    return Fraction(rng.randint(-span, span), rng.randint(1, 3))


def _mat(rows) -> MatVal:
    return MatVal.from_rows(rows)


def _mm(a, b):
    return [[sum((a[i][k] * b[k][j] for k in range(len(b))), Fraction(0)) for j in range(len(b[0]))]
            for i in range(len(a))]


def _tp(a):
    return [list(r) for r in zip(*a)]


def _rand_int_matrix(rng, r, c, span=3):
    return [[Fraction(rng.randint(-span, span)) for _ in range(c)] for _ in range(r)]


def _invertible_int(rng, k, span=3):
    while True:
        m = _rand_int_matrix(rng, k, k, span)
        try:
            rat_inverse(m)
            return m
        except Exception:  # noqa: BLE001 - singular, draw again
            continue


_FREE: dict = {}


def _free_vars(proof: LaqProof):
    key = id(proof)
    if key in _FREE and _FREE[key][0] is proof:
        return _FREE[key][1]
    seen = {}
    visited = set()

    def walk(t):
        if id(t) in visited:
            return
        visited.add(id(t))
        if t[0] == "v":
            seen[(t[1], t[2])] = None
        elif t[0] != "n":
            for a in t[1:]:
                if isinstance(a, tuple):
                    walk(a)

    for st in proof.steps:
        for f in st.conclusion.ante + st.conclusion.succ:
            walk(f)
    out = sorted(seen)
    _FREE[key] = (proof, out)
    return out


def random_valuation(proof: LaqProof, rng: random.Random, degenerate: bool = False) -> Valuation:
    val = Valuation()
    mats: dict = {}
    for name, sort in _free_vars(proof):
        if sort == INDEX:
            val.index[name] = rng.randint(0, 3)
        elif sort == FIELD:
            val.field[name] = Fraction(0) if degenerate and rng.random() < 0.3 else _rand_q(rng)
        else:
            r, c = proof.dims.get(name, (rng.randint(0, 3), rng.randint(0, 3)))
            same = [m for m in mats.values() if (m.rows, m.cols) == (r, c)]
            if degenerate and same and rng.random() < 0.3:
                m = rng.choice(same)
                lam = _rand_q(rng)
                m = MatVal.build(r, c, lambda i, j, m=m, lam=lam: lam * m.get(i, j))
            elif degenerate and rng.random() < 0.3:
                m = MatVal.build(r, c, lambda i, j: 0)
            else:
                m = MatVal.build(r, c, lambda i, j: _rand_q(rng))
            mats[name] = m
            val.matrix[name] = m
    return val


def _lattice_setup(rng, k, orthogonal_to=None, cols=()):
    """Basis G, Gram inverse B, integer coefficients CW, dual vectors
    W = G B CW and Wp with Wp W^T = I."""
    G = _invertible_int(rng, k)
    B = [list(r) for r in rat_inverse(_mm(_tp(G), G))]
    while True:
        CW = _invertible_int(rng, k)
        if orthogonal_to is not None:
            # since <G x, G B y> = <x, y>, the columns in ``cols`` are drawn
            # from the integer vectors orthogonal to the coefficient vector
            x = orthogonal_to
            xx = sum((t * t for t in x), Fraction(0))
            for j in cols:
                y = [Fraction(rng.randint(-2, 2)) for _ in range(k)]
                xy = sum((s * t for s, t in zip(x, y)), Fraction(0))
                for i in range(k):
                    CW[i][j] = xx * y[i] - xy * x[i]
        try:
            rat_inverse(CW)
            break
        except Exception:  # noqa: BLE001
            continue
    W = _mm(G, _mm(B, CW))
    Wp = [list(r) for r in rat_inverse(_tp(W))]
    return G, B, CW, W, Wp


def _banaszczyk_valuation(rng, k, orth=False, zero=False) -> Valuation:
    while True:
        cv = [Fraction(rng.randint(-2, 2)) for _ in range(k)]
        if any(cv):
            break
    if zero:
        # v = 0 is the only way to be orthogonal to every column of W
        cv = [Fraction(0)] * k
    # any proper subset of the columns may be orthogonal to v
    cols = rng.sample(range(k), rng.randint(1, k - 1)) if orth and k >= 2 else ()
    G, B, CW, W, Wp = _lattice_setup(rng, k, cv if orth else None, cols)
    v = _mm(G, [[x] for x in cv])
    val = Valuation()
    for name, m in (("G", G), ("B", B), ("CW", CW), ("W", W), ("Wp", Wp), ("v", v),
                    ("cv", [[x] for x in cv])):
        val.matrix[name] = _mat(m)
    return val


def _cert_valuation(rng, n, m, collide=False) -> Valuation:
    k = m
    G, B, CW, W, Wp = _lattice_setup(rng, k)
    while True:
        c1 = [Fraction(rng.randint(-2, 2)) for _ in range(k)]
        c2 = [Fraction(rng.randint(-2, 2)) for _ in range(k)]
        if c1 != c2:
            break
    v1 = _mm(G, [[x] for x in c1])
    v2 = _mm(G, [[x] for x in c2])
    maxw = max(sum((W[r][i] ** 2 for r in range(k)), Fraction(0)) for i in range(k))
    # choose c with 400 c^2 n m < 1 / maxw
    c = Fraction(1, 1)
    while 400 * c * c * n * m * maxw >= 1:
        c /= 2
    K = 400 * c * c * n * m
    e1 = [[_rand_q(rng) * c / 8] for _ in range(k)]
    if collide:
        # keep the norm-bound constant, zero it, or redraw it, so that the
        # collision branch is reached with each hypothesis true or false
        c = rng.choice((c, Fraction(0), _rand_q(rng)))
        e2 = [[v1[i][0] + e1[i][0] - v2[i][0]] for i in range(k)]
    else:
        while True:
            e2 = [[_rand_q(rng) * c / 8] for _ in range(k)]
            d = sum(((e2[i][0] - e1[i][0]) ** 2 for i in range(k)), Fraction(0))
            if d < K:
                break
    val = Valuation()
    val.field["c"] = c
    for name, mm in (("G", G), ("B", B), ("CW", CW), ("W", W), ("Wp", Wp), ("v1", v1),
                     ("v2", v2), ("c1", [[x] for x in c1]), ("c2", [[x] for x in c2]),
                     ("e1", e1), ("e2", e2)):
        val.matrix[name] = _mat(mm)
    return val


def _ordered(rng, names, strict) -> Valuation:
    val = Valuation()
    x = _rand_q(rng)
    for name, s in zip(names, strict):
        val.field[name] = x
        step = Fraction(rng.randint(1, 4), rng.randint(1, 3))
        x = x + step if s or rng.random() < 0.5 else x
    return val


def structured_valuation(proof: LaqProof, rng: random.Random) -> Valuation | None:
    """A valuation built to satisfy the block's hypotheses, or None."""
    name = proof.name
    pick = rng.random()
    if name.startswith("banaszczyk_left_n"):
        k = int(name.rsplit("n", 1)[1])
        return _banaszczyk_valuation(rng, k, orth=pick < 0.7, zero=pick >= 0.9)
    if name.startswith("cert_implies_inj_"):
        n, m = (int(x[1:]) for x in name.split("_")[-2:])
        return _cert_valuation(rng, n, m, collide=pick < 0.3)
    if name == "inv_nonneg":
        val = Valuation()
        val.field["x"] = Fraction(rng.randint(1, 9), rng.randint(1, 5))
        return val
    if name == "mixed_trans":
        # a <= b < c
        return _ordered(rng, ("a", "b", "c"), (False, True, True))
    if name == "leq_trans":
        return _ordered(rng, ("a", "b", "c"), (False, False, False))
    return None


def _complete(val: Valuation, proof: LaqProof, rng) -> Valuation:
    base = random_valuation(proof, rng)
    for k, x in base.field.items():
        val.field.setdefault(k, x)
    for k, x in base.index.items():
        val.index.setdefault(k, x)
    for k, x in base.matrix.items():
        val.matrix.setdefault(k, x)
    return val


def spot_check_block(proof: LaqProof, quota: int = 100, pool: int = 1000,
                     seed: int = 0) -> SpotReport:
    """Half the pool comes from the structured generator (when the block has
    one), a quarter is uniform and a quarter degenerate."""
    rng = random.Random(seed)
    vals = []
    for t in range(pool):
        mode = t % 4
        if mode < 2:
            s = structured_valuation(proof, rng)
            vals.append(_complete(s, proof, rng) if s else random_valuation(proof, rng, mode == 1))
        else:
            vals.append(random_valuation(proof, rng, degenerate=(mode == 3)))
    memos = [dict() for _ in vals]
    rep = SpotReport(proof.name)
    for st in proof.steps:
        rep.sequents += 1
        seq = st.conclusion
        hits = 0
        for v, memo in zip(vals, memos):
            if not all(eval_formula(f, v, memo) for f in seq.ante):
                continue
            hits += 1
            if not any(eval_formula(f, v, memo) for f in seq.succ):
                rep.failures.append((st.id, v.to_json()))
                break
            if hits >= quota:
                break
        if hits >= quota:
            rep.covered += 1
        elif hits:
            rep.partial += 1
        else:
            rep.vacuous += 1
    return rep


def spot_check(proof: LaqProof, quota: int = 100, pool: int = 1000, seed: int = 0) -> list[SpotReport]:
    """Spot-check the proof and every lemma block it cites."""
    out: dict[str, SpotReport] = {}

    def walk(p: LaqProof):
        for lem in p.lemmas.values():
            if lem.name not in out:
                walk(lem)
        if p.name not in out:
            out[p.name] = spot_check_block(p, quota, pool, seed)

    walk(proof)
    return list(out.values())
