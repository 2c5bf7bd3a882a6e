"""Propositional translation of LA_Q formulas into Boolean circuits."""

from .check import (
    EquivalenceReport, TautologyReport, check_axiom_tautologies, check_equivalence,
    check_equivalence_many, fit_cubic_envelope, size_profile,
)
from .circuit import PropCircuit, eval_circuit, eval_demand, eval_packed, is_tautology
from .cnf import exhaustive_unsat, export_cnf, parse_dimacs
from .translate import (
    ObjectAssignment, PrecisionError, TranslationError, encode, sample_valuation, translate,
    translate_many,
)

__all__ = [
    "EquivalenceReport", "ObjectAssignment", "PrecisionError", "PropCircuit", "TautologyReport",
    "TranslationError", "check_axiom_tautologies", "check_equivalence", "check_equivalence_many",
    "encode", "eval_circuit", "eval_demand", "eval_packed", "exhaustive_unsat", "export_cnf",
    "fit_cubic_envelope", "is_tautology", "parse_dimacs", "sample_valuation", "size_profile",
    "translate", "translate_many",
]
