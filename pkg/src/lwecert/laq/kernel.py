"""Sequent-calculus proof checker.

Sequents are pairs of formula tuples. Rules act on the front of the
antecedent and the back of the succedent; ``exchange`` and ``contraction``
reorder or merge neighbours, ``weakening`` inserts at a given position.

Primitive step kinds::

    init A              A |- A
    axiom ID SUBST      |- instance of an axiom schema
    identity EQ         |- EQ, when both sides have the same normal form
    wl/wr POS A         weakening          xl/xr POS   exchange
    cl/cr POS           contraction        cut         (A cut formula)
    notl notr andl1 andl2 andr orl orr1 orr2 impl impr

Derived steps (each has a primitive expansion, see ``expand``)::

    eqchain             G |- t0=t1, G |- t1=t2, ...  gives  G |- t0=tk
    rewrite PATH        G |- s=t, G |- phi  gives  G |- phi with s at PATH replaced by t
    lemma NAME SUBST    |- H1 & ... & Hk -> C  for a checked lemma  H1..Hk |- C

Every step records its claimed conclusion; the checker recomputes it and
rejects the first step where the two differ.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, replace

from .axioms import AxiomError, instantiate_axiom
from .poly import IdentityError, Normalizer
from .syntax import (
    FORMULA, MATRIX, And, Imp, LaqSyntaxError, Sequent, check_sorts, read_sexpr, _build,
    parse_sequent, replace_at, show, sort_of, subterm, substitute,
)

PRIMITIVE = ("init", "axiom", "identity", "wl", "wr", "xl", "xr", "cl", "cr", "notl", "notr",
             "andl1", "andl2", "andr", "orl", "orr1", "orr2", "impl", "impr", "cut")
DERIVED = ("eqchain", "rewrite", "lemma")
KINDS = PRIMITIVE + DERIVED

_ARITY = {"init": 0, "axiom": 0, "identity": 0, "lemma": 0, "andr": 2, "orl": 2, "impl": 2,
          "cut": 2, "rewrite": 2}


class KernelError(ValueError):
    pass


@dataclass(frozen=True)
class Step:
    id: str
    kind: str
    payload: tuple
    premises: tuple
    conclusion: Sequent


@dataclass
class LaqProof:
    name: str
    theorem: Sequent
    steps: list
    dims: dict = field(default_factory=dict)
    lemmas: dict = field(default_factory=dict)

    @property
    def sorts(self) -> dict:
        return {k: MATRIX for k in self.dims}

    def fingerprint(self) -> str:
        h = hashlib.sha256(repr((self.name, self.theorem, tuple(self.steps),
                                 sorted(self.dims.items()))).encode())
        for name in sorted(self.lemmas):
            h.update(self.lemmas[name].fingerprint().encode())
        return h.hexdigest()


@dataclass(frozen=True)
class Verdict:
    ok: bool
    step: str | None = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


# -- single rule application --------------------------------------------------------

def _need(cond: bool, msg: str):
    if not cond:
        raise KernelError(msg)


def _front(seq: Sequent) -> tuple:
    _need(len(seq.ante) >= 1, "antecedent is empty")
    return seq.ante[0], seq.ante[1:]


def _back(seq: Sequent) -> tuple:
    _need(len(seq.succ) >= 1, "succedent is empty")
    return seq.succ[-1], seq.succ[:-1]


def _formula(x):
    _need(isinstance(x, tuple) and sort_of(x) == FORMULA, "payload must be a formula")
    try:
        check_sorts(x)
    except LaqSyntaxError as exc:
        raise KernelError(str(exc)) from None
    return x


def _lemma_statement(lem: "LaqProof", mapping: dict):
    thm = lem.theorem
    _need(len(thm.succ) == 1, f"lemma {lem.name} must have a single conclusion")
    concl = substitute(thm.succ[0], mapping)
    if thm.ante:
        return Imp(And(*(substitute(h, mapping) for h in thm.ante)), concl)
    return concl


def lemma_mapping(lem: "LaqProof", pairs, norm: Normalizer) -> dict:
    mapping = {}
    for v, t in pairs:
        _need(isinstance(v, tuple) and v[0] == "v", "lemma substitution keys are variables")
        try:
            srt = check_sorts(t)
        except LaqSyntaxError as exc:
            raise KernelError(str(exc)) from None
        _need(srt == v[2], f"lemma substitution for {v[1]} has sort {srt}")
        _need(v not in mapping, f"duplicate substitution for {v[1]}")
        mapping[v] = t
    for name, shape in lem.dims.items():
        key = ("v", name, MATRIX)
        if key in mapping:
            got = norm.shape(mapping[key])
        else:
            got = norm.dims.get(name)
        _need(got == tuple(shape),
              f"lemma {lem.name}: {name} must be {shape[0]}x{shape[1]}, got {got}")
    return mapping


def apply_rule(kind: str, payload: tuple, prem: list, norm: Normalizer,
               lemmas: dict) -> Sequent:
    """Conclusion of one inference, or ``KernelError``."""
    _need(kind in KINDS, f"unknown step kind {kind!r}")
    want = _ARITY.get(kind, 1)
    if kind == "eqchain":
        _need(len(prem) >= 2, "eqchain needs at least two premises")
    else:
        _need(len(prem) == want, f"{kind} takes {want} premises, got {len(prem)}")

    if kind == "init":
        a = _formula(payload[0])
        return Sequent((a,), (a,))
    if kind == "axiom":
        ax_id, pairs = payload
        try:
            return Sequent((), (instantiate_axiom(ax_id, dict(pairs)),))
        except (AxiomError, LaqSyntaxError) as exc:
            raise KernelError(str(exc)) from None
    if kind == "identity":
        eq = _formula(payload[0])
        try:
            ok = norm.is_identity(eq)
        except IdentityError as exc:
            raise KernelError(str(exc)) from None
        _need(ok, "sides of the equation have different normal forms")
        return Sequent((), (eq,))
    if kind == "lemma":
        name, pairs = payload
        _need(name in lemmas, f"unknown lemma {name!r}")
        lem = lemmas[name]
        return Sequent((), (_lemma_statement(lem, lemma_mapping(lem, pairs, norm)),))

    p = prem[0]
    if kind in ("wl", "wr"):
        pos, a = payload
        a = _formula(a)
        side = p.ante if kind == "wl" else p.succ
        _need(isinstance(pos, int) and 0 <= pos <= len(side), "weakening position out of range")
        new = side[:pos] + (a,) + side[pos:]
        return Sequent(new, p.succ) if kind == "wl" else Sequent(p.ante, new)
    if kind in ("xl", "xr", "cl", "cr"):
        (pos,) = payload
        side = p.ante if kind[1] == "l" else p.succ
        _need(isinstance(pos, int) and 0 <= pos < len(side) - 1, "position out of range")
        if kind[0] == "x":
            new = side[:pos] + (side[pos + 1], side[pos]) + side[pos + 2:]
        else:
            _need(side[pos] == side[pos + 1], "contraction of different formulas")
            new = side[:pos + 1] + side[pos + 2:]
        return Sequent(new, p.succ) if kind[1] == "l" else Sequent(p.ante, new)
    if kind == "notl":
        a, rest = _back(p)
        return Sequent((("not", a),) + p.ante, rest)
    if kind == "notr":
        a, rest = _front(p)
        return Sequent(rest, p.succ + (("not", a),))
    if kind in ("andl1", "andl2"):
        other = _formula(payload[0])
        a, rest = _front(p)
        conj = ("and", a, other) if kind == "andl1" else ("and", other, a)
        return Sequent((conj,) + rest, p.succ)
    if kind in ("orr1", "orr2"):
        other = _formula(payload[0])
        a, rest = _back(p)
        disj = ("or", a, other) if kind == "orr1" else ("or", other, a)
        return Sequent(p.ante, rest + (disj,))
    if kind == "impr":
        a, ante = _front(p)
        b, succ = _back(p)
        return Sequent(ante, succ + (("imp", a, b),))
    if kind == "andr":
        a, d1 = _back(prem[0])
        b, d2 = _back(prem[1])
        _need(prem[0].ante == prem[1].ante and d1 == d2, "andr premises differ in context")
        return Sequent(prem[0].ante, d1 + (("and", a, b),))
    if kind == "orl":
        a, g1 = _front(prem[0])
        b, g2 = _front(prem[1])
        _need(g1 == g2 and prem[0].succ == prem[1].succ, "orl premises differ in context")
        return Sequent((("or", a, b),) + g1, prem[0].succ)
    if kind == "impl":
        a, d = _back(prem[0])
        b, g = _front(prem[1])
        _need(prem[0].ante == g and d == prem[1].succ, "impl premises differ in context")
        return Sequent((("imp", a, b),) + g, d)
    if kind == "cut":
        a, d = _back(prem[0])
        a2, g = _front(prem[1])
        _need(a == a2, "cut formulas differ")
        _need(prem[0].ante == g and d == prem[1].succ, "cut premises differ in context")
        return Sequent(g, d)
    if kind == "eqchain":
        ctx = prem[0].ante
        terms = None
        for q in prem:
            _need(q.ante == ctx and len(q.succ) == 1 and q.succ[0][0] == "=",
                  "eqchain premises must be equations in one context")
            s, t = q.succ[0][1], q.succ[0][2]
            if terms is None:
                terms = [s, t]
            else:
                _need(terms[-1] == s, "eqchain links do not match")
                terms.append(t)
        return Sequent(ctx, (("=", terms[0], terms[-1]),))
    if kind == "rewrite":
        (path,) = payload
        eq, target = prem
        _need(eq.ante == target.ante, "rewrite premises differ in context")
        _need(len(eq.succ) == 1 and eq.succ[0][0] == "=", "first rewrite premise must be an equation")
        _need(len(target.succ) == 1, "rewrite target must have one formula")
        phi = target.succ[0]
        _need(isinstance(path, tuple) and len(path) >= 1, "rewrite path must be non-empty")
        node = phi
        for k in path:
            _need(isinstance(k, int) and node[0] not in ("v", "n") and 1 <= k < len(node),
                  "rewrite path leaves the formula")
            _need(node[0] not in ("condi", "condf"), "rewrite path passes through cond")
            node = node[k]
        _need(node == eq.succ[0][1], "rewrite path does not point at the equation's left side")
        return Sequent(eq.ante, (replace_at(phi, path, eq.succ[0][2]),))
    raise KernelError(f"unhandled kind {kind}")


# -- checking ------------------------------------------------------------------------

_STEP_CACHE: dict = {}
_LEMMA_CACHE: dict = {}
_CACHE_LIMIT = 500_000


def _check_step(step: Step, prem: list, norm: Normalizer, lemmas: dict, lemma_key) -> str | None:
    key = (step.kind, step.payload, tuple(prem), step.conclusion, lemma_key)
    hit = _STEP_CACHE.get(key)
    if hit is not None:
        return hit or None
    try:
        got = apply_rule(step.kind, step.payload, prem, norm, lemmas)
        reason = "" if got == step.conclusion else "conclusion does not match the rule"
    except KernelError as exc:
        reason = str(exc) or "invalid step"
    if len(_STEP_CACHE) > _CACHE_LIMIT:
        _STEP_CACHE.clear()
    _STEP_CACHE[key] = reason
    return reason or None


def check_steps(steps, norm: Normalizer, lemmas: dict, givens: dict | None = None,
                lemma_key=None) -> Verdict:
    """Check a step list; ``givens`` supplies premise ids defined elsewhere."""
    known = dict(givens or {})
    for step in steps:
        if step.id in known:
            return Verdict(False, step.id, "duplicate step id")
        prem = []
        for pid in step.premises:
            if pid not in known:
                return Verdict(False, step.id, f"premise {pid} does not appear earlier")
            prem.append(known[pid])
        reason = _check_step(step, prem, norm, lemmas, lemma_key)
        if reason:
            return Verdict(False, step.id, reason)
        known[step.id] = step.conclusion
    return Verdict(True)


def check_proof(proof: LaqProof) -> Verdict:
    """Accept iff every lemma and every step checks and the last step proves
    the stated theorem. Rejections name the first bad step."""
    for name, lem in proof.lemmas.items():
        v = _check_lemma(lem)
        if not v:
            return Verdict(False, f"{name}:{v.step}", v.reason)
    return _check_body(proof)


def _check_lemma(lem: LaqProof) -> Verdict:
    fp = lem.fingerprint()
    if fp not in _LEMMA_CACHE:
        _LEMMA_CACHE[fp] = check_proof(lem)
    return _LEMMA_CACHE[fp]


def _lemma_key(proof: LaqProof):
    return tuple(sorted((n, l.fingerprint()) for n, l in proof.lemmas.items()))


def _check_body(proof: LaqProof) -> Verdict:
    if not proof.steps:
        return Verdict(False, None, "empty proof")
    norm = Normalizer(proof.dims)
    key = (tuple(sorted(proof.dims.items())), _lemma_key(proof))
    v = check_steps(proof.steps, norm, proof.lemmas, lemma_key=key)
    if not v:
        return v
    last = proof.steps[-1]
    if last.conclusion != proof.theorem:
        return Verdict(False, last.id, "final sequent is not the stated theorem")
    return Verdict(True)


# -- text format ----------------------------------------------------------------------

def _show_payload(step: Step, sorts: dict) -> str:
    k, p = step.kind, step.payload
    if k in ("init", "identity", "andl1", "andl2", "orr1", "orr2"):
        return show(p[0], sorts)
    if k == "axiom":
        return " ".join([p[0]] + [f"({n} {show(t, sorts)})" for n, t in p[1]])
    if k == "lemma":
        return " ".join([p[0]] + [f"({v[1]}:{v[2]} {show(t, sorts)})" for v, t in p[1]])
    if k in ("wl", "wr"):
        return f"{p[0]} {show(p[1], sorts)}"
    if k in ("xl", "xr", "cl", "cr"):
        return str(p[0])
    if k == "rewrite":
        return ".".join(str(x) for x in p[0])
    return ""


def step_to_line(step: Step, sorts: dict) -> str:
    payload = _show_payload(step, sorts)
    return (f"{step.id} | {step.kind} | {payload} => {step.conclusion.show(sorts)} | "
            f"{' '.join(step.premises)}")


def proof_to_text(proof: LaqProof) -> str:
    """Serialise a proof and its lemmas (dependencies first)."""
    out: list[str] = []
    done: set = set()

    def emit(p: LaqProof, kind: str):
        for name, lem in p.lemmas.items():
            if name not in done:
                emit(lem, "lemma")
                done.add(name)
        out.append(f"begin {kind} {p.name}")
        for name, (r, c) in p.dims.items():
            out.append(f"dim {name} {r} {c}")
        out.append(f"uses {' '.join(p.lemmas)}".rstrip())
        out.append(f"theorem {p.theorem.show(p.sorts)}")
        for s in p.steps:
            out.append(step_to_line(s, p.sorts))
        out.append("end")

    emit(proof, "proof")
    return "\n".join(out) + "\n"


def _read_many(text: str):
    node = read_sexpr("(" + text + ")")
    return node[1:]


def _leaf(node) -> str:
    if not isinstance(node, tuple):
        raise LaqSyntaxError("expected a symbol")
    return node[0]


def _parse_payload(kind: str, text: str, sorts: dict) -> tuple:
    items = _read_many(text) if text.strip() else []
    b = lambda n: _build(n, sorts)  # noqa: E731
    if kind in ("init", "identity", "andl1", "andl2", "orr1", "orr2"):
        _need(len(items) == 1, f"{kind} payload takes one formula")
        return (b(items[0]),)
    if kind in ("axiom", "lemma"):
        _need(len(items) >= 1, f"{kind} payload needs a name")
        name = _leaf(items[0])
        pairs = []
        for it in items[1:]:
            _need(isinstance(it, list) and len(it) == 3, "substitution entries are (name term)")
            key = _leaf(it[1])
            if kind == "lemma":
                key = _build(it[1], {})
            pairs.append((key, b(it[2])))
        return (name, tuple(pairs))
    if kind in ("wl", "wr"):
        _need(len(items) == 2, "weakening payload is POS FORMULA")
        return (int(_leaf(items[0])), b(items[1]))
    if kind in ("xl", "xr", "cl", "cr"):
        _need(len(items) == 1, "payload is a position")
        return (int(_leaf(items[0])),)
    if kind == "rewrite":
        return (tuple(int(x) for x in text.strip().split(".")),)
    _need(not items, f"{kind} takes no payload")
    return ()


def parse_step(line: str, sorts: dict) -> Step:
    parts = [x.strip() for x in line.split("|")]
    if len(parts) != 4:
        raise LaqSyntaxError(f"step line needs 4 fields: {line[:60]!r}")
    sid, kind, payload, prem = parts
    if kind not in KINDS:
        raise LaqSyntaxError(f"unknown step kind {kind!r}")
    args, sep, concl = payload.rpartition("=>")
    if not sep:
        raise LaqSyntaxError(f"step {sid}: payload lacks '=> conclusion'")
    try:
        pl = _parse_payload(kind, args, sorts)
    except KernelError as exc:
        raise LaqSyntaxError(f"step {sid}: {exc}") from None
    return Step(sid, kind, pl, tuple(prem.split()), parse_sequent(concl.strip(), sorts))


def _intern(t, pool: dict):
    """Share equal subtrees, so identity-keyed evaluation memos hit across
    sequents as they do for generated proofs."""
    if type(t) is tuple:
        t = tuple(_intern(x, pool) for x in t)
        # keyed with the child types so that 1 and Fraction(1) stay apart
        return pool.setdefault((t, tuple(map(type, t))), t)
    return t


def _intern_sequent(seq: Sequent, pool: dict) -> Sequent:
    return Sequent(_intern(seq.ante, pool), _intern(seq.succ, pool))


def parse_script(text: str) -> LaqProof:
    """Read the block format written by ``proof_to_text``."""
    table: dict[str, LaqProof] = {}
    pool: dict = {}
    cur = None
    main = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            if line.startswith("begin "):
                _, kind, name = line.split(maxsplit=2)
                cur = {"name": name, "kind": kind, "dims": {}, "uses": [], "theorem": None,
                       "steps": []}
            elif cur is None:
                raise LaqSyntaxError("text outside a block")
            elif line == "end":
                sorts = {k: MATRIX for k in cur["dims"]}
                missing = [u for u in cur["uses"] if u not in table]
                if missing:
                    raise LaqSyntaxError(f"unknown lemmas {missing}")
                if cur["theorem"] is None:
                    raise LaqSyntaxError("block without theorem")
                p = LaqProof(cur["name"], cur["theorem"], cur["steps"], cur["dims"],
                             {u: table[u] for u in cur["uses"]})
                del sorts
                table[p.name] = p
                if cur["kind"] == "proof":
                    main = p
                cur = None
            elif line.startswith("dim "):
                _, name, r, c = line.split()
                cur["dims"][name] = (int(r), int(c))
            elif line.startswith("uses"):
                cur["uses"] = line.split()[1:]
            elif line.startswith("theorem "):
                sorts = {k: MATRIX for k in cur["dims"]}
                cur["theorem"] = _intern_sequent(parse_sequent(line[len("theorem "):], sorts), pool)
            else:
                sorts = {k: MATRIX for k in cur["dims"]}
                st = parse_step(line, sorts)
                cur["steps"].append(replace(st, conclusion=_intern_sequent(st.conclusion, pool)))
        except (LaqSyntaxError, ValueError) as exc:
            raise LaqSyntaxError(f"line {lineno}: {exc}") from None
    if cur is not None:
        raise LaqSyntaxError("unterminated block")
    if main is None:
        raise LaqSyntaxError("no proof block")
    return main
