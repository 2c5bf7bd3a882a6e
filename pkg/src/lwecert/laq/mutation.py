"""Single-step mutations of proof scripts, used to probe the checker.

Three mutation kinds:

* ``axiom-swap``: an axiom step cites a different axiom id;
* ``premise-swap``: one premise of a step is replaced by another earlier
  step with a different conclusion, or two premises trade places;
* ``term-edit``: one subterm of a step's payload or claimed conclusion is
  replaced by a different term of the same sort.

Every mutant differs from the original in exactly one step of one block.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, replace

from .axioms import AXIOM_IDS
from .kernel import LaqProof, Step
from .syntax import FIELD, FORMULA, INDEX, MATRIX, Sequent, replace_at, sort_of

KINDS = ("axiom-swap", "premise-swap", "term-edit")


@dataclass(frozen=True)
class Mutation:
    block: str  # proof or lemma name
    step: str
    kind: str
    detail: str


def _blocks(proof: LaqProof) -> dict[str, LaqProof]:
    out: dict[str, LaqProof] = {}

    def walk(p):
        for lem in p.lemmas.values():
            if lem.name not in out:
                walk(lem)
        out[p.name] = p

    walk(proof)
    return out


def _term_sites(t, path=()):
    """Paths of all non-formula subterms."""
    if t[0] in ("v", "n"):
        yield path
        return
    if sort_of(t) != FORMULA:
        yield path
    for k in range(1, len(t)):
        if isinstance(t[k], tuple):
            yield from _term_sites(t[k], path + (k,))


def _edit(t, rng: random.Random):
    srt = sort_of(t)
    if srt == INDEX:
        options = [("+i", t, ("n", INDEX, 1)), ("n", INDEX, 0 if t != ("n", INDEX, 0) else 2)]
    elif srt == FIELD:
        options = [("-f", t), ("+f", t, ("n", FIELD, 1)),
                   ("n", FIELD, 0 if t != ("n", FIELD, 0) else 1)]
    elif srt == MATRIX:
        options = [("tp", t), ("smul", ("n", FIELD, 2), t)]
    else:
        return None
    new = rng.choice(options)
    return new if new != t else None


def _term_edit(step: Step, rng: random.Random):
    """Edit a term in the payload (if it holds formulas) or in the conclusion."""
    carriers = []
    for idx, x in enumerate(step.payload):
        if isinstance(x, tuple) and x and isinstance(x[0], str) and x[0] not in ("v",) \
                and len(x) > 1:
            try:
                sort_of(x)
            except Exception:  # noqa: BLE001 - substitution lists are not terms
                continue
            carriers.append(("payload", idx))
    side = "ante" if step.conclusion.ante and rng.random() < 0.5 else "succ"
    formulas = getattr(step.conclusion, side)
    if formulas:
        carriers.append(("concl", side))
    if not carriers:
        return None
    where = rng.choice(carriers)
    if where[0] == "payload":
        target = step.payload[where[1]]
    else:
        k = rng.randrange(len(formulas))
        target = formulas[k]
    sites = list(_term_sites(target))
    if not sites:
        return None
    path = rng.choice(sites)
    sub = target
    for k_ in path:
        sub = sub[k_]
    new_sub = _edit(sub, rng)
    if new_sub is None:
        return None
    new = replace_at(target, path, new_sub)
    if where[0] == "payload":
        pl = step.payload[:where[1]] + (new,) + step.payload[where[1] + 1:]
        return replace(step, payload=pl), f"payload term at {path}"
    fs = formulas[:k] + (new,) + formulas[k + 1:]
    concl = Sequent(fs, step.conclusion.succ) if side == "ante" else Sequent(step.conclusion.ante, fs)
    return replace(step, conclusion=concl), f"conclusion {side}[{k}] term at {path}"


def _axiom_swap(step: Step, rng: random.Random):
    if step.kind != "axiom":
        return None
    new_id = rng.choice([a for a in AXIOM_IDS if a != step.payload[0]])
    return replace(step, payload=(new_id,) + step.payload[1:]), f"{step.payload[0]} -> {new_id}"


def _premise_swap(step: Step, earlier: list[Step], concl: dict, rng: random.Random):
    if not step.premises:
        return None
    prem = list(step.premises)
    if len(prem) >= 2 and rng.random() < 0.5:
        i, j = rng.sample(range(len(prem)), 2)
        if concl[prem[i]] != concl[prem[j]]:
            prem[i], prem[j] = prem[j], prem[i]
            return replace(step, premises=tuple(prem)), f"swap premises {i} and {j}"
    i = rng.randrange(len(prem))
    pool = [s.id for s in earlier if s.conclusion != concl[prem[i]]]
    if not pool:
        return None
    old = prem[i]
    prem[i] = rng.choice(pool)
    return replace(step, premises=tuple(prem)), f"premise {old} -> {prem[i]}"


def mutate(proof: LaqProof, rng: random.Random, kind: str | None = None) -> tuple[LaqProof, Mutation]:
    """Return a copy of ``proof`` with one step of one block mutated."""
    blocks = _blocks(proof)
    weighted = [(name, i) for name, p in blocks.items() for i in range(len(p.steps))]
    for _ in range(10_000):
        name, i = rng.choice(weighted)
        block = blocks[name]
        step = block.steps[i]
        k = kind or rng.choice(KINDS)
        if k == "axiom-swap":
            res = _axiom_swap(step, rng)
        elif k == "premise-swap":
            concl = {s.id: s.conclusion for s in block.steps}
            res = _premise_swap(step, block.steps[:i], concl, rng)
        else:
            res = _term_edit(step, rng)
        if res is None or res[0] == step:
            continue
        new_step, detail = res
        steps = block.steps[:i] + [new_step] + block.steps[i + 1:]
        return _rebuild(proof, name, steps), Mutation(name, step.id, k, detail)
    raise ValueError("no applicable mutation found")


def _rebuild(proof: LaqProof, target: str, steps: list) -> LaqProof:
    """Copy the proof tree replacing the steps of block ``target``."""
    memo: dict[str, LaqProof] = {}

    def copy(p: LaqProof) -> LaqProof:
        if p.name in memo:
            return memo[p.name]
        lemmas = {n: copy(l) for n, l in p.lemmas.items()}
        new = LaqProof(p.name, p.theorem, steps if p.name == target else p.steps,
                       p.dims, lemmas)
        memo[p.name] = new
        return new

    return copy(proof)
