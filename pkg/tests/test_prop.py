import random
from fractions import Fraction

import pytest

from lwecert.laq.axioms import instantiate_axiom
from lwecert.laq.semantics import MatVal, Valuation, eval_formula
from lwecert.laq.syntax import parse_formula
from lwecert.prop import (ObjectAssignment, PrecisionError, PropCircuit, check_axiom_tautologies,
                          check_equivalence, encode, eval_circuit, eval_demand, exhaustive_unsat,
                          export_cnf, fit_cubic_envelope, is_tautology, parse_dimacs, sample_valuation,
                          size_profile, translate, translate_many)
from lwecert.prop import words as W
from lwecert.prop.circuit import Builder, MissingInput, random_circuit
from lwecert.prop.corpus import axiom_corpus, random_sigma

PLAIN = ObjectAssignment({}, {}, 2)


def fval(**field):
    return Valuation({}, {k: Fraction(v) for k, v in field.items()}, {})


# -- circuits ----------------------------------------------------------------------

def test_constant_true():
    c = translate(parse_formula("(lt 0f 1f)"), PLAIN)
    assert c.gates == (("const1", ()),) and c.inputs == ()
    assert eval_circuit(c, {}) == 1


def test_reflexivity_on_random_bits(rng):
    c = translate(parse_formula("(= a a)"), PLAIN)
    for _ in range(50):
        bits = {name: rng.randrange(2) for name in c.input_names}
        assert eval_circuit(c, bits) == 1


def test_dual_evaluators_agree(rng):
    for _ in range(40):
        c = random_circuit(rng, 6, 60)
        for _ in range(10):
            bits = {name: rng.randrange(2) for name in c.input_names}
            assert eval_circuit(c, bits) == eval_demand(c, bits)


def test_missing_input():
    c = translate(parse_formula("(lt a b)"), PLAIN)
    with pytest.raises(MissingInput):
        eval_demand(c, {})


def test_circuit_json_round_trip():
    c = translate(parse_formula("(imp (int x) (leq x (*f x x)))"), PLAIN)
    assert PropCircuit.from_json(c.to_json()) == c


def test_builder_folds_constants():
    b = Builder()
    x = b.input("x")
    assert b.and_(x, b.const(1)) == x
    assert b.or_(x, b.not_(x)) == b.const(1)


@pytest.mark.parametrize("a,b", [(5, 3), (7, 7), (0, 9), (12, 1)])
def test_word_arithmetic(a, b):
    bld = Builder()
    x, y = W.const_word(bld, a), W.const_word(bld, b)
    assert W.const_value(bld, W.add(bld, x, y)) == a + b
    assert W.const_value(bld, W.mul(bld, x, y)) == a * b
    if b:
        assert W.const_value(bld, W.rem(bld, x, y)) == a % b


# -- translation ---------------------------------------------------------------------

def test_comparison_example():
    c = translate(parse_formula("(lt x y)"), PLAIN)
    v = fval(x=Fraction(1, 2), y=Fraction(2, 3))
    assert eval_circuit(c, encode(v, c)) == 1
    assert eval_circuit(c, encode(fval(x=Fraction(2, 3), y=Fraction(1, 2)), c)) == 0


def test_printed_comparator_is_wrong_on_example():
    c = translate(parse_formula("(lt x y)"), PLAIN, printed_comparator=True)
    # 1*2 < 2*3 holds, but so does the swapped pair, so the gadget cannot be the order
    assert eval_circuit(c, encode(fval(x=Fraction(1, 2), y=Fraction(2, 3)), c)) == \
        eval_circuit(c, encode(fval(x=Fraction(2, 3), y=Fraction(1, 2)), c)) == 1


def test_int4_tautology_at_n2():
    c = translate(instantiate_axiom("Int4"), PLAIN)
    assert is_tautology(c) == (True, None)


def test_non_tautology_counterexample():
    c = translate(parse_formula("(lt x y)"), ObjectAssignment({}, {}, 1))
    ok, cex = is_tautology(c)
    assert not ok and eval_circuit(c, cex) == 0


def test_precision_errors():
    with pytest.raises(PrecisionError):
        ObjectAssignment({"i": 5}, {}, 2)
    c = translate(parse_formula("(lt x y)"), PLAIN)
    with pytest.raises(PrecisionError):
        encode(fval(x=9, y=1), c)


def test_determinism():
    phi = instantiate_axiom("Ord10")
    assert translate(phi, PLAIN).to_json() == translate(phi, PLAIN).to_json()


def test_matrix_formula():
    sigma = ObjectAssignment({"i": 1}, {"A": (2, 2), "B": (2, 2)}, 4)
    phi = parse_formula("(= (tr (*m A B)) (tr (*m B A)))")
    c = translate(phi, sigma)
    v = Valuation({"i": 1}, {}, {"A": MatVal.from_rows([[1, 2], [3, 4]]),
                                 "B": MatVal.from_rows([[Fraction(1, 2), 0], [5, -1]])})
    assert eval_circuit(c, encode(v, c)) == 1


@pytest.mark.parametrize("text", ["(= (+f a b) (+f b a))",
                                  "(imp (and (leq 0f a) (leq 0f b) (leq 0f c) (leq 0f d) (lt a b) (lt c d)) "
                                  "(lt (*f a c) (*f b d)))",
                                  "(int (+f (inv x) y))"])
def test_equivalence_examples(text):
    rep = check_equivalence(parse_formula(text), ObjectAssignment({}, {}, 3), trials=1000, seed=1)
    assert rep.mismatches == 0 and rep.trials == 1000


def test_printed_comparator_detected():
    rep = check_equivalence(parse_formula("(lt x y)"), ObjectAssignment({}, {}, 3), 1000, 1,
                            printed_comparator=True)
    assert rep.mismatches > 100


def test_corpus_equivalence_sample():
    rng = random.Random(8)
    for axiom_id, phi in axiom_corpus(rng, per_axiom=1)[::5]:
        sigma = random_sigma(rng, 3)
        assert check_equivalence(phi, sigma, trials=200, seed=2).ok, axiom_id


def test_multi_output_matches_single():
    fs = [parse_formula("(lt a b)"), parse_formula("(int (*f a b))")]
    multi = translate_many(fs, PLAIN)
    rng = random.Random(3)
    for _ in range(30):
        v = sample_valuation(rng, multi, PLAIN)
        for k, phi in enumerate(fs):
            assert eval_demand(multi, encode(v, multi), multi.outputs[k]) == eval_formula(phi, v)


def test_small_tautology_scan():
    reps = check_axiom_tautologies(("Int6", "Ord2", "Ord4"), precisions=(1, 2))
    assert all(r.tautology for r in reps)


def test_printed_comparator_breaks_tautologies():
    reps = check_axiom_tautologies(("Int6", "Ord2"), precisions=(2,), printed_comparator=True)
    assert not any(r.tautology for r in reps)


def test_size_envelope():
    phi = parse_formula("(leq (*f a b) (+f (*f a a) (*f b b)))")
    profile = size_profile(phi, ObjectAssignment({}, {}, 1), range(1, 9))
    c, violators = fit_cubic_envelope(profile)
    assert violators == []
    assert profile[8] > profile[1]


# -- CNF -------------------------------------------------------------------------------

def test_cnf_constant_true():
    cnf = export_cnf(translate(parse_formula("(lt 0f 1f)"), PLAIN))
    assert cnf.dimacs() == "p cnf 1 2\n1 0\n-1 0\n"
    assert exhaustive_unsat(cnf) == (True, None)


@pytest.mark.parametrize("axiom,N", [("Int6", 2), ("Ord2", 3)])
def test_cnf_unsat(axiom, N):
    cnf = export_cnf(translate(instantiate_axiom(axiom), ObjectAssignment({}, {}, N)))
    assert len(cnf.primary) <= 20
    assert exhaustive_unsat(parse_dimacs(cnf.dimacs())) == (True, None)


def test_cnf_satisfiable_gives_counterexample():
    c = translate(parse_formula("(lt x y)"), ObjectAssignment({}, {}, 1))
    sat_free, model = exhaustive_unsat(export_cnf(c))
    assert not sat_free and eval_circuit(c, model) == 0


def test_cnf_matches_circuit_on_random_circuits(rng):
    for _ in range(20):
        c = random_circuit(rng, 5, 30)
        assert exhaustive_unsat(export_cnf(c))[0] == is_tautology(c)[0]
