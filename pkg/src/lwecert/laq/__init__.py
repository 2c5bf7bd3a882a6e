"""A quantifier-free three-sorted theory of rational linear algebra: syntax,
exact semantics, a proof checker and proof generators."""

from .kernel import LaqProof, Step, Verdict, check_proof, parse_script, proof_to_text
from .syntax import Sequent, parse_formula, parse_sequent, parse_term, show

__all__ = ["LaqProof", "Step", "Verdict", "check_proof", "parse_script", "proof_to_text",
           "Sequent", "parse_formula", "parse_sequent", "parse_term", "show"]
