"""Generators for the shipped proof scripts.

Each generator returns a ``LaqProof`` at concrete sizes. Supporting facts
are separate lemma proofs cited by name:

* ``zero_lt_one``, ``inv_nonneg``, ``mixed_trans``, ``leq_trans``: small
  order facts over field variables;
* ``la7a_k``, ``la7b_k``, ``la7c_k``: the inner-product theorems
  (symmetry, additivity, scalars) for k x 1 vectors;
* ``inner_nonneg_nK``, ``cauchy_schwarz_nK``, ``banaszczyk_left_nK`` and
  ``cert_implies_inj_nN_mM``: the four main statements.

The lattice-side statements use a square k x k basis G of a full-rank
lattice in Q^k; for ``cert_implies_inj`` the lattice has rank m and n only
enters the constant 400 c^2 n m.
"""

from __future__ import annotations

from math import isqrt

from .builder import ProofBuilder
from .kernel import KernelError, LaqProof
from .syntax import FIELD, INDEX, MATRIX, And, Eq, Not, Or, Sequent


class ScriptError(ValueError):
    pass


# -- term shorthands --------------------------------------------------------------------

def M(name):
    return ("v", name, MATRIX)


def F(name):
    return ("v", name, FIELD)


def I(k):
    return ("n", INDEX, k)


def Q(k):
    return ("n", FIELD, k)


def add(a, b):
    return ("+f", a, b)


def mul(a, b):
    return ("*f", a, b)


def neg(a):
    return ("-f", a)


def inv(a):
    return ("inv", a)


def dot(a, b):
    return ("dot", a, b)


def ent(m, i, j):
    return ("e", m, I(i), I(j))


def col(m, i):
    return ("col", m, I(i))


def mmul(a, b):
    return ("*m", a, b)


def madd(a, b):
    return ("+m", a, b)


def smul(a, m):
    return ("smul", a, m)


def tp(m):
    return ("tp", m)


def leq(a, b):
    return ("leq", a, b)


def lt(a, b):
    return ("lt", a, b)


def isint(a):
    return ("int", a)


def fsum(terms):
    """Left-nested sum, 0f when empty."""
    if not terms:
        return Q(0)
    acc = terms[0]
    for t in terms[1:]:
        acc = add(acc, t)
    return acc


def minus(a, b):
    return add(a, neg(b))


def vsub(a, b):
    return madd(a, smul(neg(Q(1)), b))


# -- tactics ------------------------------------------------------------------------------

class Tactics(ProofBuilder):
    """Order and equality moves used by several scripts."""

    def ax0(self, axiom_id, **subst):
        return self.emit("axiom", (axiom_id, tuple(sorted(subst.items()))))

    def apply(self, ctx, axiom_id, facts, **subst):
        """Modus ponens with an implicational axiom whose premise is the
        conjunction of ``facts``."""
        return self.use(ctx, self.ax0(axiom_id, **subst), *facts)

    def cite(self, ctx, name, mapping: dict, facts=()):
        pairs = tuple(mapping.items())
        f = self.lemma(ctx, name, pairs)
        if facts:
            f = self.mp(self.and_i(*facts), f)
        return f

    def iff(self, ctx, axiom_id, which, **subst):
        return self.and_e(self.ax(ctx, axiom_id, **subst), which)

    def falsum(self, ctx):
        """ctx |- not (0f = 1f)."""
        return self.and_e(self.ax(ctx, "3.a", a=Q(0)), 0)

    def leq_of_lt(self, f):
        x, y = self.goal(f)[1:]
        d = self.or_i(f, Eq(x, y), left=True)
        return self.mp(d, self.iff(self.ctx(f), "Ord1", 1, x=x, y=y))

    def leq_of_eq(self, f):
        x, y = self.goal(f)[1:]
        d = self.or_i(f, lt(x, y), left=False)
        return self.mp(d, self.iff(self.ctx(f), "Ord1", 1, x=x, y=y))

    def leq_refl(self, ctx, t):
        return self.leq_of_eq(self.refl(ctx, t))

    def leq_split(self, f, on_lt, on_eq):
        """Case split x <= y into x < y and x = y; the callbacks receive the
        extended context and the hypothesis fact."""
        ctx = self.ctx(f)
        x, y = self.goal(f)[1:]
        d = self.mp(f, self.iff(ctx, "Ord1", 0, x=x, y=y))
        a, b = lt(x, y), Eq(x, y)
        ca, cb = (a,) + ctx, (b,) + ctx
        return self.or_e(d, on_lt(ca, self.hyp(ca, a)), on_eq(cb, self.hyp(cb, b)))

    def or_elim(self, f_or, disjuncts, branch):
        """Eliminate a right-nested disjunction; ``branch(k, ctx, fact)``
        proves the common goal in the context extended by disjunct k."""
        ctx = self.ctx(f_or)
        d0 = disjuncts[0]
        c0 = (d0,) + ctx
        fa = branch(0, c0, self.hyp(c0, d0))
        if len(disjuncts) == 1:
            s = f_or
            for pos, c in enumerate(self.seq(fa).succ):
                s = self.emit("wr", (pos, c), (s,))
            return self.emit("cut", (), (s, fa))
        rest = Or(*disjuncts[1:])
        cr = (rest,) + ctx
        fb = self.or_elim(self.hyp(cr, rest), disjuncts[1:],
                          lambda k, c, h: branch(k + 1, c, h))
        return self.or_e(f_or, fa, fb)

    def nonneg_sum_squares(self, ctx, bases):
        """ctx |- 0 <= b1*b1 + ... + bk*bk (left-nested, starting from 0f)."""
        f = self.leq_refl(ctx, Q(0))
        acc = Q(0)
        zz = self.ident(ctx, Eq(add(Q(0), Q(0)), Q(0)))
        for b in bases:
            t = mul(b, b)
            g = self.ax(ctx, "Ord8", x=b)
            h = self.apply(ctx, "Ord6", (f, g), x=Q(0), y=acc, z=Q(0), w=t)
            f = self.rewrite(zz, h, (1,))
            acc = add(acc, t)
        return f, acc

    def nonneg_num(self, ctx, k: int):
        """ctx |- 0 <= kf as a sum of squares of numerals."""
        bases = []
        r = k
        while r > 0:
            s = isqrt(r)
            bases.append(Q(s))
            r -= s * s
        f, acc = self.nonneg_sum_squares(ctx, bases)
        return self.rewrite(self.ident(ctx, Eq(acc, Q(k))), f, (2,))

    def eq_rhs(self, f, steps):
        """Extend ctx |- s = t by identity steps through the given terms."""
        ctx = self.ctx(f)
        cur = self.goal(f)[2]
        links = [f]
        for t in steps:
            links.append(self.ident(ctx, Eq(cur, t)))
            cur = t
        return self.trans(*links)


# -- small order lemmas --------------------------------------------------------------------

def zero_lt_one() -> LaqProof:
    b = Tactics()
    ctx = ()
    f = b.ax(ctx, "Ord8", x=Q(1))
    f = b.rewrite(b.ident(ctx, Eq(mul(Q(1), Q(1)), Q(1))), f, (2,))
    goal = lt(Q(0), Q(1))

    def on_eq(c, h):
        return b.exfalso(b.contra(h, b.falsum(c)), goal)

    out = b.leq_split(f, lambda c, h: h, on_eq)
    return b.finish("zero_lt_one", Sequent((), (goal,)), out)


def inv_nonneg() -> LaqProof:
    """0 <= x, x != 0 |- 0 <= inv x."""
    x = F("x")
    y = inv(x)
    h0, h1 = leq(Q(0), x), Not(Eq(x, Q(0)))
    ctx = (h0, h1)
    lemmas = {"zero_lt_one": zero_lt_one()}
    b = Tactics(lemmas=lemmas)
    goal = leq(Q(0), y)
    # case inv x = 0
    c0 = (Eq(y, Q(0)),) + ctx
    z = b.leq_refl(c0, Q(0))
    pos = b.rewrite(b.sym(b.hyp(c0, Eq(y, Q(0)))), z, (2,))
    # case inv x != 0
    c1 = (Not(Eq(y, Q(0))),) + ctx
    d = b.apply(c1, "Ord5", (b.hyp(c1, Not(Eq(y, Q(0)))),), x=y, y=Q(0))

    def branch(k, c, h):
        if k == 1:
            return b.leq_of_lt(h)
        # inv x < 0 : x * inv x <= 0, and x * inv x = 1
        p = b.apply(c, "Ord9", (b.hyp(c, h0), h), x=x, y=y)
        one = b.apply(c, "3.d", (b.hyp(c, h1),), a=x)
        p = b.rewrite(one, p, (1,))

        def on_lt(c2, h2):
            zl = b.cite(c2, "zero_lt_one", {})
            bad = b.apply(c2, "Ord4", (zl, h2), x=Q(0), y=Q(1), z=Q(0))
            return b.exfalso(b.contra(bad, b.ax(c2, "Ord2", x=Q(0))), goal)

        def on_eq(c2, h2):
            return b.exfalso(b.contra(b.sym(h2), b.falsum(c2)), goal)

        return b.leq_split(p, on_lt, on_eq)

    neg_case = b.or_elim(d, [lt(y, Q(0)), lt(Q(0), y)], branch)
    out = b.cases(ctx, Eq(y, Q(0)), pos, neg_case)
    return b.finish("inv_nonneg", Sequent(ctx, (goal,)), out)


def mixed_trans() -> LaqProof:
    """a <= b, b < c |- a < c."""
    a, bb, c = F("a"), F("b"), F("c")
    ctx = (leq(a, bb), lt(bb, c))
    b = Tactics()

    def on_lt(c1, h):
        return b.apply(c1, "Ord4", (h, b.hyp(c1, lt(bb, c))), x=a, y=bb, z=c)

    def on_eq(c1, h):
        return b.rewrite(b.sym(h), b.hyp(c1, lt(bb, c)), (1,))

    out = b.leq_split(b.hyp(ctx, leq(a, bb)), on_lt, on_eq)
    return b.finish("mixed_trans", Sequent(ctx, (lt(a, c),)), out)


def leq_trans() -> LaqProof:
    """a <= b, b <= c |- a <= c."""
    a, bb, c = F("a"), F("b"), F("c")
    ctx = (leq(a, bb), leq(bb, c))
    b = Tactics(lemmas={"mixed_trans": mixed_trans()})

    def on_lt(c1, h):
        f = b.cite(c1, "mixed_trans", {a: a, bb: bb, c: c}, (b.hyp(c1, leq(a, bb)), h))
        return b.leq_of_lt(f)

    def on_eq(c1, h):
        return b.rewrite(h, b.hyp(c1, leq(a, bb)), (2,))

    out = b.leq_split(b.hyp(ctx, leq(bb, c)), on_lt, on_eq)
    return b.finish("leq_trans", Sequent(ctx, (leq(a, c),)), out)


# -- inner-product theorems --------------------------------------------------------------------

def _identity_lemma(name, dims, eq) -> LaqProof:
    b = Tactics(dims)
    return b.finish(name, Sequent((), (eq,)), b.ident((), eq))


def la7a(k: int) -> LaqProof:
    A, B = M("A"), M("B")
    return _identity_lemma(f"la7a_{k}", {"A": (k, 1), "B": (k, 1)}, Eq(dot(A, B), dot(B, A)))


def la7b(k: int) -> LaqProof:
    A, B, C = M("A"), M("B"), M("C")
    return _identity_lemma(f"la7b_{k}", {"A": (k, 1), "B": (k, 1), "C": (k, 1)},
                           Eq(dot(A, madd(B, C)), add(dot(A, B), dot(A, C))))


def la7c(k: int) -> LaqProof:
    A, B = M("A"), M("B")
    return _identity_lemma(f"la7c_{k}", {"A": (k, 1), "B": (k, 1)},
                           Eq(dot(smul(F("a"), A), B), mul(F("a"), dot(A, B))))


# -- Lemma: 0 <= <v, v> --------------------------------------------------------------------------

def inner_nonneg(n: int) -> LaqProof:
    v = M("v")
    b = Tactics({"v": (n, 1)})
    f, acc = b.nonneg_sum_squares((), [ent(v, i, 1) for i in range(1, n + 1)])
    goal = leq(Q(0), dot(v, v))
    f = b.rewrite(b.ident((), Eq(acc, dot(v, v))), f, (2,))
    return b.finish(f"inner_nonneg_n{n}", Sequent((), (goal,)), f)


# -- Lemma: <u,v>^2 <= <u,u><v,v> ------------------------------------------------------------------

def cauchy_schwarz(n: int) -> LaqProof:
    u, v = M("u"), M("v")
    lemmas = {}
    for lem in (inner_nonneg(n), inv_nonneg(), la7a(n), la7b(n), la7c(n)):
        lemmas[lem.name] = lem
    b = Tactics({"u": (n, 1), "v": (n, 1)}, lemmas)
    P, Qd, S = dot(u, v), dot(u, u), dot(v, v)
    PP, QS = mul(P, P), mul(Qd, S)
    D = minus(QS, PP)
    goal = leq(PP, QS)
    A_, B_, C_, a_ = M("A"), M("B"), M("C"), F("a")

    def rearrange(ctx, nonneg_d):
        # 0 <= D and PP <= PP give 0 + PP <= D + PP
        f = b.apply(ctx, "Ord6", (nonneg_d, b.leq_refl(ctx, PP)), x=Q(0), y=D, z=PP, w=PP)
        f = b.rewrite(b.ident(ctx, Eq(add(Q(0), PP), PP)), f, (1,))
        return b.rewrite(b.ident(ctx, Eq(add(D, PP), QS)), f, (2,))

    # case <v,v> != 0: the weighted identity for w = <v,v>u - <u,v>v
    nz = Not(Eq(S, Q(0)))
    c1 = (nz,)
    Bt, Ct = smul(S, u), smul(neg(P), v)
    w = madd(Bt, Ct)
    T0 = mul(inv(S), dot(w, w))
    e = b.cite(c1, f"la7b_{n}", {A_: w, B_: Bt, C_: Ct})
    cur = b.rewrite(e, b.refl(c1, T0), (2, 2))
    for scal, vec, term in ((S, u, Bt), (neg(P), v, Ct)):
        sw = b.cite(c1, f"la7a_{n}", {A_: w, B_: term})
        pull = b.cite(c1, f"la7c_{n}", {a_: scal, A_: vec, B_: w})
        cur = b.rw(b.trans(sw, pull), cur)
    cur = b.eq_rhs(cur, [mul(inv(S), minus(mul(mul(S, S), Qd), mul(S, PP))),
                         mul(mul(S, inv(S)), D)])
    one = b.apply(c1, "3.d", (b.hyp(c1, nz),), a=S)
    cur = b.rw(one, cur)
    cur = b.eq_rhs(cur, [D])
    nn_w = b.cite(c1, f"inner_nonneg_n{n}", {M("v"): w})
    nn_s = b.cite(c1, f"inner_nonneg_n{n}", {M("v"): v})
    nn_inv = b.cite(c1, "inv_nonneg", {F("x"): S}, (nn_s, b.hyp(c1, nz)))
    f = b.apply(c1, "Ord7", (nn_inv, nn_w), x=inv(S), y=dot(w, w))
    f = b.rw(cur, f)
    nonzero_case = rearrange(c1, f)

    # case <v,v> = 0: the sum-of-squares form of the same difference
    c0 = (Eq(S, Q(0)),)
    diffs = [minus(mul(ent(u, i, 1), ent(v, j, 1)), mul(ent(u, j, 1), ent(v, i, 1)))
             for i in range(1, n + 1) for j in range(i + 1, n + 1)]
    f, acc = b.nonneg_sum_squares(c0, diffs)
    f = b.rewrite(b.ident(c0, Eq(acc, D)), f, (2,))
    zero_case = rearrange(c0, f)

    out = b.cases((), Eq(S, Q(0)), zero_case, nonzero_case)
    return b.finish(f"cauchy_schwarz_n{n}", Sequent((), (goal,)), out)


# -- Lemma: some <v,v><w_i,w_i> >= 1 -----------------------------------------------------------------

def _int_entries(m, rows, cols):
    return [isint(ent(m, i, j)) for i in range(1, rows + 1) for j in range(1, cols + 1)]


def banaszczyk_hyps(k: int, v, cv):
    G, B, CW, W, Wp = M("G"), M("B"), M("CW"), M("W"), M("Wp")
    h1 = Or(*[Not(Eq(ent(v, j, 1), Q(0))) for j in range(1, k + 1)])
    h2 = And(Eq(v, mmul(G, cv)), *_int_entries(cv, k, 1))
    h3 = And(Eq(W, mmul(G, mmul(B, CW))), *_int_entries(CW, k, k))
    h4 = Eq(mmul(mmul(tp(G), G), B), ("ident", I(k)))
    h5 = Eq(mmul(Wp, tp(W)), ("ident", I(k)))
    return (h1, h2, h3, h4, h5)


def _square_dims(k, square, vectors):
    d = {name: (k, k) for name in square}
    d.update({name: (k, 1) for name in vectors})
    return d


def banaszczyk_left(n: int) -> LaqProof:
    k = n
    v, cv = M("v"), M("cv")
    G, B, CW, W, Wp = M("G"), M("B"), M("CW"), M("W"), M("Wp")
    lemmas = {}
    for lem in (cauchy_schwarz(k), leq_trans()):
        lemmas[lem.name] = lem
    b = Tactics(_square_dims(k, ("G", "B", "CW", "W", "Wp"), ("v", "cv")), lemmas)
    ctx = banaszczyk_hyps(k, v, cv)
    h1, h2, h3, h4, h5 = ctx
    idk = ("ident", I(k))
    h2p = b.conjuncts(b.hyp(ctx, h2), 1 + k)
    h3p = b.conjuncts(b.hyp(ctx, h3), 1 + k * k)
    v_eq, cv_int = h2p[0], h2p[1:]
    w_eq, cw_int = h3p[0], h3p[1:]
    f4 = b.hyp(ctx, h4)
    f5 = b.hyp(ctx, h5)

    d = [dot(v, col(W, i)) for i in range(1, k + 1)]
    gram_b = mmul(mmul(tp(G), G), B)

    # step 1: each <v, w_i> is an integer
    ints = []
    for i in range(1, k + 1):
        cur = b.refl(ctx, d[i - 1])
        cur = b.rewrite(v_eq, cur, (2, 1))
        cur = b.rewrite(w_eq, cur, (2, 2, 1))
        y = fsum([mul(ent(cv, j, 1), mul(("e", gram_b, I(j), I(l)), ent(CW, l, i)))
                  for j in range(1, k + 1) for l in range(1, k + 1)])
        cur = b.eq_rhs(cur, [y])
        cur = b.rw(f4, cur)
        z_terms = [mul(ent(cv, j, 1), ent(CW, j, i)) for j in range(1, k + 1)]
        cur = b.eq_rhs(cur, [fsum(z_terms)])
        acc_f = None
        for j in range(1, k + 1):
            t = b.apply(ctx, "Int5", (cv_int[j - 1], cw_int[(j - 1) * k + (i - 1)]),
                        x=ent(cv, j, 1), y=ent(CW, j, i))
            if acc_f is None:
                acc_f, acc = t, z_terms[0]
            else:
                acc_f = b.apply(ctx, "Int4", (acc_f, t), x=acc, y=z_terms[j - 1])
                acc = add(acc, z_terms[j - 1])
        ints.append(b.rw(b.sym(cur), acc_f))

    # step 2: some <v, w_i> is non-zero
    nz = [Not(Eq(di, Q(0))) for di in d]
    some = Or(*nz)

    def split(i, c):
        if i == k:
            return b.exfalso(all_zero(c), some)
        a = Eq(d[i], Q(0))
        ca, cn = (a,) + c, (Not(a),) + c
        pos = split(i + 1, ca)
        negf = b.or_i_n(b.hyp(cn, Not(a)), nz, i)
        return b.cases(c, a, pos, negf)

    def all_zero(c):
        zeros = [b.hyp(c, Eq(di, Q(0))) for di in d]
        p5 = b.weaken(f5, c)

        def entry_zero(j):
            cur = b.ident(c, Eq(ent(v, j, 1), ("e", mmul(idk, v), I(j), I(1))))
            cur = b.rewrite(b.sym(p5), cur, (2, 1, 1))
            cur = b.eq_rhs(cur, [fsum([mul(ent(Wp, j, i), d[i - 1]) for i in range(1, k + 1)])])
            for zf in zeros:
                cur = b.rw(zf, cur)
            return b.eq_rhs(cur, [Q(0)])

        disj = [Not(Eq(ent(v, j, 1), Q(0))) for j in range(1, k + 1)]
        return b.or_elim(b.hyp(c, h1), disj,
                         lambda j, c2, h: b.contra(b.weaken(entry_zero(j + 1), c2), h))

    some_f = split(0, ctx)

    # step 3: a non-zero integer square is at least 1; then Cauchy-Schwarz
    concl = [leq(Q(1), mul(dot(v, v), dot(col(W, i), col(W, i)))) for i in range(1, k + 1)]

    def branch(idx, c, h):
        di = d[idx]
        sq = mul(di, di)
        nn = b.ax(c, "Ord8", x=di)
        # sq != 0
        cz = (Eq(sq, Q(0)),) + c
        e1 = b.ident(cz, Eq(mul(sq, mul(inv(di), inv(di))),
                            mul(mul(di, inv(di)), mul(di, inv(di)))))
        e1 = b.rw(b.hyp(cz, Eq(sq, Q(0))), e1)
        e1 = b.rw(b.apply(cz, "3.d", (b.weaken(h, cz),), a=di), e1)
        zero_one = b.trans(b.ident(cz, Eq(Q(0), mul(Q(0), mul(inv(di), inv(di))))), e1,
                           b.ident(cz, Eq(mul(Q(1), Q(1)), Q(1))))
        sq_nz = b.not_i(b.contra(zero_one, b.falsum(cz)))
        pos_goal = lt(Q(0), sq)

        def on_eq(c2, h2):
            return b.exfalso(b.contra(b.sym(h2), b.weaken(sq_nz, c2)), pos_goal)

        pos = b.leq_split(nn, lambda c2, h2: h2, on_eq)
        int_sq = b.apply(c, "Int5", (b.weaken(ints[idx], c), b.weaken(ints[idx], c)), x=di, y=di)
        one_le = b.apply(c, "Int6", (int_sq, pos), x=sq)
        cs = b.cite(c, f"cauchy_schwarz_n{k}", {M("u"): v, M("v"): col(W, idx + 1)})
        fin = b.cite(c, "leq_trans", {F("a"): Q(1), F("b"): sq,
                                      F("c"): mul(dot(v, v), dot(col(W, idx + 1), col(W, idx + 1)))},
                     (one_le, cs))
        return b.or_i_n(fin, concl, idx)

    out = b.or_elim(some_f, nz, branch)
    return b.finish(f"banaszczyk_left_n{n}", Sequent(ctx, (Or(*concl),)), out)


# -- Lemma: a certificate implies injectivity -------------------------------------------------------

def cert_constant(n: int, m: int):
    c = F("c")
    return mul(Q(400), mul(c, mul(c, mul(Q(n), Q(m)))))


def cert_hyps(n: int, m: int):
    k = m
    G, B, CW, W, Wp = M("G"), M("B"), M("CW"), M("W"), M("Wp")
    v1, v2, c1, c2, e1, e2 = (M(x) for x in ("v1", "v2", "c1", "c2", "e1", "e2"))
    K = cert_constant(n, m)
    eps = vsub(e2, e1)
    return (
        And(Eq(v1, mmul(G, c1)), *_int_entries(c1, k, 1)),
        And(Eq(v2, mmul(G, c2)), *_int_entries(c2, k, 1)),
        Or(*[Not(Eq(ent(v1, j, 1), ent(v2, j, 1))) for j in range(1, k + 1)]),
        And(Eq(W, mmul(G, mmul(B, CW))), *_int_entries(CW, k, k)),
        Eq(mmul(mmul(tp(G), G), B), ("ident", I(k))),
        Eq(mmul(Wp, tp(W)), ("ident", I(k))),
        And(*[lt(dot(col(W, i), col(W, i)), inv(K)) for i in range(1, k + 1)]),
        lt(dot(eps, eps), K),
    )


def cert_implies_inj(n: int, m: int) -> LaqProof:
    k = m
    v1, v2, c1, c2, e1, e2 = (M(x) for x in ("v1", "v2", "c1", "c2", "e1", "e2"))
    W = M("W")
    lemmas = {}
    for lem in (banaszczyk_left(k), inner_nonneg(k), inv_nonneg(), mixed_trans()):
        lemmas[lem.name] = lem
    dims = _square_dims(k, ("G", "B", "CW", "W", "Wp"), ("v1", "v2", "c1", "c2", "e1", "e2"))
    b = Tactics(dims, lemmas)
    ctx = cert_hyps(n, m)
    H = ctx
    K = cert_constant(n, m)
    eps = vsub(e2, e1)
    v = vsub(v1, v2)
    cv = vsub(c1, c2)
    coll = Eq(madd(v1, e1), madd(v2, e2))
    goal = Not(coll)
    cc = (coll,) + ctx

    # a collision gives v1 - v2 = e2 - e1
    hc = b.hyp(cc, coll)
    ve = b.ident(cc, Eq(v, madd(madd(madd(v1, e1), smul(neg(Q(1)), e1)), smul(neg(Q(1)), v2))))
    ve = b.rw(hc, ve)
    ve = b.eq_rhs(ve, [eps])

    # hypotheses of the Banaszczyk lemma for v with coefficients c1 - c2
    p1 = b.conjuncts(b.hyp(cc, H[0]), 1 + k)
    p2 = b.conjuncts(b.hyp(cc, H[1]), 1 + k)
    bh = banaszczyk_hyps(k, v, cv)

    def entry_nonzero(j, c, h):
        cz = (Eq(ent(v, j, 1), Q(0)),) + c
        x = b.ident(cz, Eq(ent(v1, j, 1), add(ent(v, j, 1), ent(v2, j, 1))))
        x = b.rw(b.hyp(cz, Eq(ent(v, j, 1), Q(0))), x)
        x = b.eq_rhs(x, [ent(v2, j, 1)])
        nzf = b.not_i(b.contra(x, b.weaken(h, cz)))
        return b.or_i_n(nzf, [Not(Eq(ent(v, i, 1), Q(0))) for i in range(1, k + 1)], j - 1)

    distinct = [Not(Eq(ent(v1, j, 1), ent(v2, j, 1))) for j in range(1, k + 1)]
    g1 = b.or_elim(b.hyp(cc, H[2]), distinct, lambda j, c, h: entry_nonzero(j + 1, c, h))

    lat = b.ident(cc, Eq(v, v))
    lat = b.rewrite(p1[0], lat, (2, 1))
    lat = b.rewrite(p2[0], lat, (2, 2, 2))
    lat = b.eq_rhs(lat, [mmul(M("G"), cv)])
    cint = []
    for j in range(1, k + 1):
        x1, x2 = ent(c1, j, 1), ent(c2, j, 1)
        t = b.apply(cc, "Int5", (b.ax(cc, "Int3"), p2[j]), x=neg(Q(1)), y=x2)
        s = b.apply(cc, "Int4", (p1[j], t), x=x1, y=mul(neg(Q(1)), x2))
        e = b.ident(cc, Eq(add(x1, mul(neg(Q(1)), x2)), ent(cv, j, 1)))
        cint.append(b.rw(e, s))
    g2 = b.and_i(lat, *cint)
    g3, g4, g5 = (b.hyp(cc, H[i]) for i in (3, 4, 5))
    assert [b.goal(x) for x in (g1, g2, g3, g4, g5)] == list(bh)
    names = ("G", "B", "CW", "W", "Wp")
    bl = b.cite(cc, f"banaszczyk_left_n{k}",
                {M("v"): v, M("cv"): cv, **{M(x): M(x) for x in names}}, (g1, g2, g3, g4, g5))
    bl = b.rw(ve, bl)

    # 0 <= K, and K != 0 or a contradiction from hypothesis 8
    h7 = b.conjuncts(b.hyp(cc, H[6]), k)
    h8 = b.hyp(cc, H[7])
    nn_eps = b.cite(cc, f"inner_nonneg_n{k}", {M("v"): eps})
    c = F("c")
    kk = mul(c, c)
    k_nn = b.apply(cc, "Ord7", (b.nonneg_num(cc, 400 * n * m), b.ax(cc, "Ord8", x=c)),
                   x=Q(400 * n * m), y=kk)
    k_nn = b.rewrite(b.ident(cc, Eq(mul(Q(400 * n * m), kk), K)), k_nn, (2,))

    ck0 = (Eq(K, Q(0)),) + cc
    neg8 = b.rw(b.hyp(ck0, Eq(K, Q(0))), b.weaken(h8, ck0))
    bad = b.cite(ck0, "mixed_trans", {F("a"): Q(0), F("b"): dot(eps, eps), F("c"): Q(0)},
                 (b.weaken(nn_eps, ck0), neg8))
    k_zero = b.contra(bad, b.ax(ck0, "Ord2", x=Q(0)))

    ck = (Not(Eq(K, Q(0))),) + cc
    nn_inv = b.cite(ck, "inv_nonneg", {F("x"): K}, (b.weaken(k_nn, ck), b.hyp(ck, ck[0])))
    one = b.trans(b.ident(ck, Eq(mul(inv(K), K), mul(K, inv(K)))),
                  b.apply(ck, "3.d", (b.hyp(ck, ck[0]),), a=K))
    E = dot(eps, eps)
    concl = [leq(Q(1), mul(E, dot(col(W, i), col(W, i)))) for i in range(1, k + 1)]

    def branch(idx, c2, h):
        a_i = dot(col(W, idx + 1), col(W, idx + 1))
        nn_a = b.cite(c2, f"inner_nonneg_n{k}", {M("v"): col(W, idx + 1)})
        prod = b.apply(c2, "Ord10", (nn_a, b.weaken(nn_inv, c2), b.weaken(nn_eps, c2),
                                     b.weaken(k_nn, c2), b.weaken(h7[idx], c2),
                                     b.weaken(h8, c2)),
                       a=a_i, b=inv(K), c=E, d=K)
        prod = b.rw(b.weaken(one, c2), prod)
        low = b.rw(b.ident(c2, Eq(mul(E, a_i), mul(a_i, E))), h)
        bad = b.cite(c2, "mixed_trans", {F("a"): Q(1), F("b"): mul(a_i, E), F("c"): Q(1)},
                     (low, prod))
        return b.contra(bad, b.ax(c2, "Ord2", x=Q(1)))

    k_nonzero = b.or_elim(b.weaken(bl, ck), concl, branch)
    bot = b.cases(cc, Eq(K, Q(0)), k_zero, k_nonzero)
    out = b.not_i(bot)
    return b.finish(f"cert_implies_inj_n{n}_m{m}", Sequent(ctx, (goal,)), out)


# -- entry point -------------------------------------------------------------------------------------

LIMITS = {"inner_nonneg": 4, "cauchy_schwarz": 3, "banaszczyk_left": 3, "cert_implies_inj": 3}
LEMMA_IDS = tuple(LIMITS)


def generate_script(lemma_id: str, sizes) -> LaqProof:
    """Proof script for one of the four statements at concrete sizes.

    ``sizes`` is an int ``n`` or a tuple ``(n,)`` / ``(n, m)``;
    ``cert_implies_inj`` needs both n and m (the lattice has rank m).
    """
    if isinstance(sizes, int):
        sizes = (sizes,)
    sizes = tuple(int(s) for s in sizes)
    if lemma_id not in LIMITS:
        raise ScriptError(f"unknown lemma {lemma_id!r}; expected one of {', '.join(LEMMA_IDS)}")
    cap = LIMITS[lemma_id]
    if lemma_id == "cert_implies_inj":
        if len(sizes) != 2:
            raise ScriptError("cert_implies_inj needs sizes (n, m)")
        n, m = sizes
        if not (1 <= n <= m <= cap):
            raise ScriptError(f"unsupported sizes n={n}, m={m} (need 1 <= n <= m <= {cap})")
        return cert_implies_inj(n, m)
    if len(sizes) != 1 or not 1 <= sizes[0] <= cap:
        raise ScriptError(f"unsupported size {sizes} for {lemma_id} (need 1 <= n <= {cap})")
    n = sizes[0]
    if lemma_id == "cauchy_schwarz" and n < 1:
        raise ScriptError("cauchy_schwarz needs n >= 1")
    return {"inner_nonneg": inner_nonneg, "cauchy_schwarz": cauchy_schwarz,
            "banaszczyk_left": banaszczyk_left}[lemma_id](n)


__all__ = ["generate_script", "ScriptError", "LEMMA_IDS", "KernelError"]
