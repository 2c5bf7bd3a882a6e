"""Semantic checks of the translation: equivalence with exact evaluation,
exhaustive tautology scans and gate-count growth."""

from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from ..laq.semantics import eval_formula
from ..laq.syntax import show
from .circuit import eval_packed, is_tautology
from .corpus import INT_AXIOMS, ORDER_AXIOMS, plain_instance
from .translate import ObjectAssignment, encode, sample_valuation, translate, translate_many


@dataclass
class EquivalenceReport:
    formula: str
    trials: int
    gates: int
    mismatches: int = 0
    examples: list = dc_field(default_factory=list)  # first few mismatching valuations

    @property
    def ok(self) -> bool:
        return self.mismatches == 0

    def to_json(self) -> dict:
        return {"formula": self.formula, "trials": self.trials, "gates": self.gates,
                "mismatches": self.mismatches, "examples": self.examples}


def _pack(rows: list[dict], names) -> dict:
    packed = {}
    for name in names:
        v = 0
        for t, bits in enumerate(rows):
            if bits[name]:
                v |= 1 << t
        packed[name] = v
    return packed


def check_equivalence_many(formulas, sigma: ObjectAssignment, trials: int = 1000, seed: int = 0,
                           printed_comparator: bool = False, keep: int = 3) -> list[EquivalenceReport]:
    """Compare exact evaluation with the circuit on ``trials`` valuations
    representable at ``sigma.precision``, shared by all formulas."""
    formulas = list(formulas)
    circuit = translate_many(formulas, sigma, printed_comparator)
    rng = random.Random(seed)
    vals = [sample_valuation(rng, circuit, sigma) for _ in range(trials)]
    packed = _pack([encode(v, circuit) for v in vals], circuit.input_names)
    lanes = eval_packed(circuit, packed, trials)
    memos = [dict() for _ in vals]
    reports = []
    gates = circuit.size()
    for k, phi in enumerate(formulas):
        rep = EquivalenceReport(show(phi), trials, gates)
        for t, (v, memo) in enumerate(zip(vals, memos)):
            if bool((lanes[k] >> t) & 1) != eval_formula(phi, v, memo):
                rep.mismatches += 1
                if len(rep.examples) < keep:
                    rep.examples.append(v.to_json())
        reports.append(rep)
    return reports


def check_equivalence(phi, sigma: ObjectAssignment, trials: int = 1000, seed: int = 0,
                      printed_comparator: bool = False) -> EquivalenceReport:
    rep = check_equivalence_many([phi], sigma, trials, seed, printed_comparator)[0]
    rep.gates = translate(phi, sigma, printed_comparator).size()
    return rep


@dataclass
class TautologyReport:
    axiom: str
    precision: int
    inputs: int
    gates: int
    tautology: bool
    counterexample: dict | None = None


def check_axiom_tautologies(axioms=INT_AXIOMS + ORDER_AXIOMS, precisions=(1, 2, 3),
                            printed_comparator: bool = False) -> list[TautologyReport]:
    """Exhaustively scan the translations of the integrality and order
    axioms (placeholders as field variables) at each precision."""
    out = []
    for axiom_id in axioms:
        phi = plain_instance(axiom_id)
        for N in precisions:
            circuit = translate(phi, ObjectAssignment({}, {}, N), printed_comparator)
            ok, cex = is_tautology(circuit)
            out.append(TautologyReport(axiom_id, N, len(circuit.inputs), circuit.size(), ok, cex))
    return out


def size_profile(phi, sigma: ObjectAssignment, precisions) -> dict[int, int]:
    """Gate count of the translation at each precision."""
    out = {}
    for N in precisions:
        s = ObjectAssignment(sigma.index, sigma.dims, N)
        out[N] = translate(phi, s).size()
    return out


def fit_cubic_envelope(profile: dict[int, int], fit_on: int = 3) -> tuple[Fraction, list[int]]:
    """Fit c = max gates/N^3 over the ``fit_on`` smallest precisions and
    return c with the precisions whose counts exceed c * N^3."""
    ns = sorted(profile)
    c = max(Fraction(profile[n], n ** 3) for n in ns[:fit_on])
    return c, [n for n in ns if profile[n] > c * n ** 3]
