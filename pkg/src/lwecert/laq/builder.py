"""Programmatic proof construction.

``ProofBuilder`` emits kernel steps one at a time and checks each on the
spot, so a generator that builds a wrong inference fails where it goes
wrong. Facts are step ids; the helpers below give natural-deduction style
moves (modus ponens, and/or introduction and elimination, case splits) on
top of the sequent rules. The same helpers provide the primitive expansions
of the derived steps ``eqchain``, ``rewrite`` and ``lemma``.
"""

from __future__ import annotations

from .axioms import placeholders
from .kernel import (
    DERIVED, KernelError, LaqProof, Step, apply_rule, lemma_mapping, _lemma_statement,
)
from .poly import Normalizer
from .syntax import (
    CONNECTIVES, FUNCTIONS, INDEX, PREDICATES, And, Sequent, positions, replace_at, sort_of,
    substitute,
)


class ProofBuilder:
    def __init__(self, dims: dict | None = None, lemmas: dict | None = None, prefix: str = "s",
                 macros: bool = True):
        self.dims = dict(dims or {})
        self.norm = Normalizer(self.dims)
        self.lemmas = dict(lemmas or {})
        self.prefix = prefix
        self.macros = macros
        self.steps: list[Step] = []
        self.concl: dict[str, Sequent] = {}
        self._memo: dict = {}
        self._n = 0

    # -- emission -------------------------------------------------------------------
    def _fresh(self) -> str:
        self._n += 1
        return f"{self.prefix}{self._n}"

    def emit(self, kind: str, payload: tuple = (), premises: tuple = ()) -> str:
        premises = tuple(premises)
        key = (kind, payload, premises)
        if key in self._memo:
            return self._memo[key]
        seq = apply_rule(kind, payload, [self.concl[p] for p in premises], self.norm, self.lemmas)
        sid = self._fresh()
        self.steps.append(Step(sid, kind, payload, premises, seq))
        self.concl[sid] = seq
        self._memo[key] = sid
        return sid

    def given(self, sid: str, seq: Sequent) -> str:
        """Register a premise proved elsewhere."""
        self.concl[sid] = seq
        return sid

    def seq(self, f: str) -> Sequent:
        return self.concl[f]

    def goal(self, f: str):
        s = self.concl[f].succ
        if len(s) != 1:
            raise KernelError("fact has no single conclusion")
        return s[0]

    def ctx(self, f: str) -> tuple:
        return self.concl[f].ante

    def finish(self, name: str, theorem: Sequent, final: str) -> LaqProof:
        """Prune steps the final fact does not use and package the proof."""
        if self.concl[final] != theorem:
            raise KernelError(f"final fact proves {self.concl[final]}, not the theorem")
        steps = prune(self.steps, final)
        if steps[-1].id != final:
            raise KernelError("final fact must be the last step")
        return LaqProof(name, theorem, steps, dict(self.dims), dict(self.lemmas))

    # -- structural -----------------------------------------------------------------
    def weaken(self, f: str, ctx: tuple) -> str:
        """Extend the antecedent of ``f`` to ``ctx`` (which must contain it as a
        subsequence)."""
        cur = self.ctx(f)
        if cur == ctx:
            return f
        j = 0
        for pos, a in enumerate(ctx):
            if j < len(cur) and cur[j] == a:
                j += 1
                continue
            f = self.emit("wl", (pos, a), (f,))
        if self.ctx(f) != ctx:
            raise KernelError("context is not an extension")
        return f

    def init(self, a) -> str:
        return self.emit("init", (a,))

    def hyp(self, ctx: tuple, a) -> str:
        if a not in ctx:
            raise KernelError("hypothesis not in context")
        k = ctx.index(a)
        f = self.init(a)
        for pos in range(k):
            f = self.emit("wl", (pos, ctx[pos]), (f,))
        for pos in range(k + 1, len(ctx)):
            f = self.emit("wl", (pos, ctx[pos]), (f,))
        return f

    def ax(self, ctx: tuple, axiom_id: str, **subst) -> str:
        pairs = tuple(sorted(subst.items()))
        return self.weaken(self.emit("axiom", (axiom_id, pairs)), ctx)

    def ident(self, ctx: tuple, eq) -> str:
        return self.weaken(self.emit("identity", (eq,)), ctx)

    def lemma(self, ctx: tuple, name: str, pairs) -> str:
        pairs = tuple(pairs)
        if self.macros:
            f = self.emit("lemma", (name, pairs))
        else:
            f = self.inline_lemma(name, pairs)
        return self.weaken(f, ctx)

    # -- propositional --------------------------------------------------------------
    def mp(self, fa: str, fimp: str) -> str:
        ctx = self.ctx(fa)
        imp = self.goal(fimp)
        if imp[0] != "imp" or imp[1] != self.goal(fa) or self.ctx(fimp) != ctx:
            raise KernelError("modus ponens does not fit")
        b = imp[2]
        s1 = self.weaken(self.init(b), (b,) + ctx)
        s2 = self.emit("wr", (0, b), (fa,))
        s3 = self.emit("impl", (), (s2, s1))
        s4 = self.emit("wr", (0, b), (fimp,))
        return self.emit("cut", (), (s4, s3))

    def use(self, ctx: tuple, fimp: str, *facts: str) -> str:
        """Apply an implication whose premise is the conjunction of ``facts``."""
        return self.mp(self.and_i(*facts), self.weaken(fimp, ctx))

    def and_i(self, *facts: str) -> str:
        """Right-nested conjunction of facts sharing one context."""
        f = facts[-1]
        for g in reversed(facts[:-1]):
            f = self.emit("andr", (), (g, f))
        return f

    def and_e(self, f: str, which: int) -> str:
        ctx = self.ctx(f)
        conj = self.goal(f)
        if conj[0] != "and":
            raise KernelError("not a conjunction")
        a, b = conj[1], conj[2]
        pick = a if which == 0 else b
        s1 = self.weaken(self.init(pick), (pick,) + ctx)
        if which == 0:
            s2 = self.emit("andl1", (b,), (s1,))
        else:
            s2 = self.emit("andl2", (a,), (s1,))
        s3 = self.emit("wr", (0, pick), (f,))
        return self.emit("cut", (), (s3, s2))

    def conjuncts(self, f: str, n: int) -> list[str]:
        """Split a right-nested n-fold conjunction."""
        out = []
        for _ in range(n - 1):
            out.append(self.and_e(f, 0))
            f = self.and_e(f, 1)
        out.append(f)
        return out

    def or_i(self, f: str, other, left: bool = True) -> str:
        return self.emit("orr1" if left else "orr2", (other,), (f,))

    def or_i_n(self, f: str, disjuncts: list, k: int) -> str:
        """Introduce the right-nested disjunction of ``disjuncts`` from its k-th member."""
        n = len(disjuncts)
        if k < n - 1:
            f = self.or_i(f, _or(disjuncts[k + 1:]), left=True)
        for j in range(k - 1, -1, -1):
            f = self.or_i(f, disjuncts[j], left=False)
        return f

    def or_e(self, f_or: str, fa: str, fb: str) -> str:
        disj = self.goal(f_or)
        s1 = self.emit("orl", (), (fa, fb))
        s2 = f_or
        for pos, c in enumerate(self.seq(fa).succ):
            s2 = self.emit("wr", (pos, c), (s2,))
        del disj
        return self.emit("cut", (), (s2, s1))

    def imp_i(self, f: str) -> str:
        return self.emit("impr", (), (f,))

    def not_i(self, f: str) -> str:
        return self.emit("notr", (), (f,))

    def contra(self, fb: str, fnot: str) -> str:
        s1 = self.emit("notl", (), (fb,))
        return self.emit("cut", (), (fnot, s1))

    def exfalso(self, fbot: str, goal) -> str:
        return self.emit("wr", (0, goal), (fbot,))

    def cases(self, ctx: tuple, a, fa: str, fna: str) -> str:
        """From A,G |- S and not A,G |- S conclude G |- S."""
        succ = self.seq(fa).succ
        s = self.weaken(self.emit("notr", (), (self.init(a),)), ctx)
        for pos, c in enumerate(succ):
            s = self.emit("wr", (pos, c), (s,))
        t = self.emit("wr", (len(succ), a), (fna,))
        u = self.emit("cut", (), (s, t))
        return self.emit("cut", (), (u, fa))

    # -- equality ---------------------------------------------------------------------
    def refl(self, ctx: tuple, t) -> str:
        return self.ax(ctx, "1.a", x=t)

    def sym(self, f: str) -> str:
        eq = self.goal(f)
        return self.mp(f, self.ax(self.ctx(f), "1.b", x=eq[1], y=eq[2]))

    def trans(self, *facts: str) -> str:
        if len(facts) == 1:
            return facts[0]
        if self.macros:
            return self.emit("eqchain", (), facts)
        return self._trans_prim(facts)

    def _trans_prim(self, facts) -> str:
        f = facts[0]
        for g in facts[1:]:
            x, y = self.goal(f)[1], self.goal(f)[2]
            z = self.goal(g)[2]
            f = self.use(self.ctx(f), self.emit("axiom", ("1.c", (("x", x), ("y", y), ("z", z)))),
                         f, g)
        return f

    def rewrite(self, feq: str, fphi: str, path: tuple) -> str:
        if self.macros:
            return self.emit("rewrite", (tuple(path),), (feq, fphi))
        return self._rewrite_prim(feq, fphi, tuple(path))

    def rw(self, feq: str, fphi: str, occurrence: int | None = None) -> str:
        """Rewrite occurrences of the equation's left side (all, or the k-th)."""
        s = self.goal(feq)[1]
        paths = list(positions(self.goal(fphi), s))
        if not paths:
            raise KernelError("left side does not occur")
        if occurrence is not None:
            paths = [paths[occurrence]]
        for p in reversed(paths):
            fphi = self.rewrite(feq, fphi, p)
        return fphi

    def chain(self, ctx: tuple, terms: list, justify) -> str:
        """Prove terms[0] = terms[-1]; ``justify(ctx, s, t)`` returns a fact
        ctx |- s = t or None to use an identity step."""
        links = []
        for s, t in zip(terms, terms[1:]):
            f = justify(ctx, s, t) if justify else None
            links.append(f if f is not None else self.ident(ctx, ("=", s, t)))
        return self.trans(*links)

    # -- primitive expansion of rewrite ---------------------------------------------
    def _cong(self, ctx, term, rel, feq) -> str:
        """ctx |- term = term' where the subterm at ``rel`` is replaced."""
        if not rel:
            return feq
        k = rel[0]
        sub = self._cong(ctx, term[k], rel[1:], feq)
        sym_ = term[0]
        eqs = []
        subst = {"f": sym_}
        new = self.goal(sub)[2]
        for i in range(1, len(term)):
            subst[f"x{i}"] = term[i]
            subst[f"y{i}"] = new if i == k else term[i]
            eqs.append(sub if i == k else self.refl(ctx, term[i]))
        ax = self.emit("axiom", ("1.d", tuple(sorted(subst.items()))))
        return self.use(ctx, ax, *eqs)

    def _transport(self, ctx, atom, k, feq) -> str:
        """ctx |- atom -> atom with argument k replaced per ``feq``."""
        new = self.goal(feq)[2]
        target = atom[:k] + (new,) + atom[k + 1:]
        c1 = (atom,) + ctx
        h = self.hyp(c1, atom)
        e = self.weaken(feq, c1)
        tag = atom[0]
        if tag == "=":
            l, r = atom[1], atom[2]
            if k == 1:
                f = self._trans_prim((self.sym(e), h))
            else:
                f = self._trans_prim((h, e))
        elif tag == "le":
            subst = {"i1": atom[1], "i2": atom[2], "j1": target[1], "j2": target[2]}
            eqs = [e if i == k else self.refl(c1, atom[i]) for i in (1, 2)]
            ax = self.emit("axiom", ("1.e", tuple(sorted(subst.items()))))
            f = self.use(c1, ax, *eqs, h)
        else:
            subst = {"f": tag}
            eqs = []
            for i in range(1, len(atom)):
                subst[f"x{i}"] = atom[i]
                subst[f"y{i}"] = target[i]
                eqs.append(e if i == k else self.refl(c1, atom[i]))
            ax = self.emit("axiom", ("1.d", tuple(sorted(subst.items()))))
            f = self.use(c1, ax, *eqs, h)
        assert self.goal(f) == target
        return self.imp_i(f)

    def _lift(self, ctx, phi, path, feq):
        """Facts ctx |- phi -> phi' and ctx |- phi' -> phi."""
        k = path[0]
        tag = phi[0]
        if tag not in CONNECTIVES:
            e = self._cong(ctx, phi[k], path[1:], feq)
            new = replace_at(phi, (k,), self.goal(e)[2])
            return self._transport(ctx, phi, k, e), self._transport(ctx, new, k, self.sym(e))
        fwd, bwd = self._lift(ctx, phi[k], path[1:], feq)
        new = replace_at(phi, (k,), self.goal(fwd)[2])
        if tag == "not":
            return self._not_map(ctx, phi, new, bwd), self._not_map(ctx, new, phi, fwd)
        m = {"and": self._and_map, "or": self._or_map, "imp": self._imp_map}[tag]
        if tag == "imp" and k == 1:
            return m(ctx, phi, k, bwd), m(ctx, new, k, fwd)
        return m(ctx, phi, k, fwd), m(ctx, new, k, bwd)

    def _not_map(self, ctx, nx, ny, g) -> str:
        """ctx |- not X -> not Y from g: ctx |- Y -> X."""
        y = ny[1]
        c1 = (nx,) + ctx
        c2 = (y,) + c1
        x = self.mp(self.hyp(c2, y), self.weaken(g, c2))
        bot = self.contra(x, self.hyp(c2, nx))
        return self.imp_i(self.not_i(bot))

    def _and_map(self, ctx, phi, k, g) -> str:
        c1 = (phi,) + ctx
        h = self.hyp(c1, phi)
        parts = [self.and_e(h, 0), self.and_e(h, 1)]
        parts[k - 1] = self.mp(parts[k - 1], self.weaken(g, c1))
        return self.imp_i(self.emit("andr", (), tuple(parts)))

    def _or_map(self, ctx, phi, k, g) -> str:
        c1 = (phi,) + ctx
        a, b = phi[1], phi[2]
        y = self.goal(g)[2]
        new = ("or", y, b) if k == 1 else ("or", a, y)
        ca, cb = (a,) + c1, (b,) + c1
        fa = self.hyp(ca, a)
        fb = self.hyp(cb, b)
        if k == 1:
            fa = self.mp(fa, self.weaken(g, ca))
        else:
            fb = self.mp(fb, self.weaken(g, cb))
        fa = self.or_i(fa, new[2], left=True)
        fb = self.or_i(fb, new[1], left=False)
        return self.imp_i(self.or_e(self.hyp(c1, phi), fa, fb))

    def _imp_map(self, ctx, phi, k, g) -> str:
        """k=1: g proves A' -> A and we map (A -> C) to (A' -> C);
        k=2: g proves C -> C' and we map (A -> C) to (A -> C')."""
        c1 = (phi,) + ctx
        if k == 1:
            a2 = self.goal(g)[1]
            c2 = (a2,) + c1
            a = self.mp(self.hyp(c2, a2), self.weaken(g, c2))
            c = self.mp(a, self.hyp(c2, phi))
        else:
            a = phi[1]
            c2 = (a,) + c1
            c = self.mp(self.hyp(c2, a), self.hyp(c2, phi))
            c = self.mp(c, self.weaken(g, c2))
        return self.imp_i(self.imp_i(c))

    def _rewrite_prim(self, feq, fphi, path) -> str:
        ctx = self.ctx(fphi)
        fwd, _ = self._lift(ctx, self.goal(fphi), path, feq)
        return self.mp(fphi, fwd)

    # -- primitive expansion of lemma citations -------------------------------------
    def inline_lemma(self, name: str, pairs) -> str:
        lem = self.lemmas[name]
        mapping = lemma_mapping(lem, pairs, self.norm)
        fp = lem.fingerprint()
        if fp not in _EXPANDED:
            _EXPANDED[fp] = expand_proof(lem)
        flat = _EXPANDED[fp]
        tag = f"{self.prefix}{name}{self._fresh()}_"
        idmap = {}
        last = None
        for st in flat.steps:
            new = Step(tag + st.id, st.kind, _subst_payload(st.kind, st.payload, mapping),
                       tuple(idmap[p] for p in st.premises),
                       Sequent(tuple(substitute(a, mapping) for a in st.conclusion.ante),
                               tuple(substitute(a, mapping) for a in st.conclusion.succ)))
            self.steps.append(new)
            self.concl[new.id] = new.conclusion
            idmap[st.id] = new.id
            last = new.id
        hyps = self.ctx(last)
        if not hyps:
            return last
        g = And(*hyps)
        parts = self.conjuncts(self.init(g), len(hyps))
        w = self.weaken(last, hyps + (g,))
        concl = self.goal(last)
        for i in range(len(hyps)):
            rest = hyps[i + 1:] + (g,)
            p1 = self.emit("wr", (0, concl), (self.weaken(parts[i], rest),))
            w = self.emit("cut", (), (p1, w))
        out = self.imp_i(w)
        assert self.goal(out) == _lemma_statement(lem, mapping)
        return out


_EXPANDED: dict = {}


def _or(ds):
    from .syntax import Or
    return Or(*ds)


def _subst_payload(kind: str, payload: tuple, mapping: dict) -> tuple:
    s = lambda t: substitute(t, mapping)  # noqa: E731
    if kind in ("init", "identity", "andl1", "andl2", "orr1", "orr2"):
        return (s(payload[0]),)
    if kind in ("wl", "wr"):
        return (payload[0], s(payload[1]))
    if kind == "axiom":
        ax_id, pairs = payload
        full = dict(pairs)
        if ax_id == "1.d":
            sym_ = full["f"]
            arg_sorts = FUNCTIONS[sym_][0] if sym_ in FUNCTIONS else PREDICATES[sym_]
            for i, srt in enumerate(arg_sorts, 1):
                full.setdefault(f"x{i}", ("v", f"x{i}", srt))
                full.setdefault(f"y{i}", ("v", f"y{i}", srt))
        else:
            holes = placeholders(ax_id)
            poly = next((sort_of(v) for v in full.values()), None)
            for name, srt in holes.items():
                if name == "alpha":
                    full.setdefault(name, ("=", ("v", "alpha", INDEX), ("v", "alpha", INDEX)))
                elif ax_id in ("1.a", "1.b", "1.c"):
                    full.setdefault(name, ("v", name, poly or srt))
                else:
                    full.setdefault(name, ("v", name, srt))
        return (ax_id, tuple(sorted((k, v if k == "f" else s(v)) for k, v in full.items())))
    if kind == "lemma":
        name, pairs = payload
        return (name, tuple((k, s(v)) for k, v in pairs))
    return payload


def prune(steps: list, final: str) -> list:
    """Keep only the steps the final one depends on, in order."""
    by_id = {s.id: s for s in steps}
    live = set()
    todo = [final]
    while todo:
        sid = todo.pop()
        if sid in live or sid not in by_id:
            continue
        live.add(sid)
        todo.extend(by_id[sid].premises)
    return [s for s in steps if s.id in live]


def expand_proof(proof: LaqProof) -> LaqProof:
    """An equivalent proof using primitive rules only (lemmas inlined)."""
    b = ProofBuilder(proof.dims, proof.lemmas, prefix="p", macros=False)
    idmap: dict[str, str] = {}
    for st in proof.steps:
        prem = tuple(idmap[p] for p in st.premises)
        if st.kind not in DERIVED:
            sid = b.emit(st.kind, st.payload, prem)
        elif st.kind == "eqchain":
            sid = b._trans_prim(prem)
        elif st.kind == "rewrite":
            sid = b._rewrite_prim(prem[0], prem[1], st.payload[0])
        else:
            sid = b.inline_lemma(*st.payload)
        if b.concl[sid] != st.conclusion:
            raise KernelError(f"expansion of {st.id} proves a different sequent")
        idmap[st.id] = sid
    final = idmap[proof.steps[-1].id]
    steps = prune(b.steps, final)
    if steps[-1].id != final:
        last = b.concl[final]
        src = next(s for s in steps if s.id == final)
        steps.append(Step(final + "_end", src.kind, src.payload, src.premises, last))
    return LaqProof(proof.name, proof.theorem, steps, dict(proof.dims), {})


def expand_step(step: Step, premise_seqs: list, dims: dict, lemmas: dict) -> list:
    """Primitive steps deriving a derived step's conclusion from its premises.

    The returned steps cite the original premise ids; the last one proves
    ``step.conclusion``.
    """
    b = ProofBuilder(dims, lemmas, prefix=f"{step.id}.", macros=False)
    prem = tuple(b.given(pid, seq) for pid, seq in zip(step.premises, premise_seqs))
    if step.kind == "eqchain":
        sid = b._trans_prim(prem)
    elif step.kind == "rewrite":
        sid = b._rewrite_prim(prem[0], prem[1], step.payload[0])
    elif step.kind == "lemma":
        sid = b.inline_lemma(*step.payload)
    else:
        raise KernelError(f"{step.kind} is primitive")
    if b.concl[sid] != step.conclusion:
        raise KernelError(f"expansion of {step.id} proves a different sequent")
    steps = prune(b.steps, sid)
    if not steps or steps[-1].id != sid:
        src = next((s for s in b.steps if s.id == sid), None)
        if src is None:
            raise KernelError("expansion produced no steps")
        steps.append(Step(sid + "_end", src.kind, src.payload, src.premises, src.conclusion))
    return steps


def check_expansions(proof: LaqProof):
    """Expand every derived step of ``proof`` and check each expansion with
    primitive rules only. Yields (step id, verdict, primitive step count)."""
    from .kernel import check_steps
    concl = {s.id: s.conclusion for s in proof.steps}
    norm = Normalizer(proof.dims)
    for st in proof.steps:
        if st.kind not in DERIVED:
            continue
        prem = [concl[p] for p in st.premises]
        sub = expand_step(st, prem, proof.dims, proof.lemmas)
        givens = dict(zip(st.premises, prem))
        v = check_steps(sub, norm, {}, givens=givens)
        if v and sub[-1].conclusion != st.conclusion:
            v = type(v)(False, sub[-1].id, "expansion proves a different sequent")
        yield st.id, v, len(sub)
