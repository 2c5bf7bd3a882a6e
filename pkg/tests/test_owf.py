import random
from fractions import Fraction

import pytest

from oracles import distinct_lattices_bruteforce, short_line_fraction, subspaces_by_echelon_shapes
from lwecert.lattice import (LatticeBasis, ResourceLimitError, centered_rep, is_full_rank_mod_q,
                             lambda1_qary_via_modular, norm_sq)
from lwecert.matrix import ModMatrix, RatMatrix
from lwecert.owf import (DomainError, InjectivityCertificate, OwfParams, count_lattices, eval_f,
                         experiment_gaussian_tail, experiment_rank, experiment_short_vectors,
                         experiment_transference, find_collisions, generate_certificate,
                         injectivity_bruteforce, log_inequality_holds, sample_gaussian_vector,
                         sample_instance, transference_product, uniform_matrix, verify_certificate)

TINY = OwfParams(2, 3, 13, Fraction(1, 221))


def identity_cert(n, q):
    I = RatMatrix.identity(n)
    return InjectivityCertificate(ModMatrix.identity(n, q), I, I)


# -- parameters and sampling ---------------------------------------------------

def test_params_validation():
    with pytest.raises(ValueError):
        OwfParams(3, 2, 5, 0)
    with pytest.raises(ValueError):
        OwfParams(1, 2, 5, 2)
    p = OwfParams(2, 4, 10, Fraction(1, 5))
    assert p.c_sq == 2 and p.error_bound_sq == 1600


def test_zero_noise_instance():
    inst = sample_instance(OwfParams(2, 4, 11, 0), seed=5)
    assert inst.epsilon == (0,) * 4
    assert inst.z == inst.A.apply(inst.s)


def test_instance_determinism():
    p = OwfParams(2, 5, 31, Fraction(1, 20))
    assert sample_instance(p, 99) == sample_instance(p, 99)
    assert sample_instance(p, 99) != sample_instance(p, 100)


def test_instance_json_round_trip():
    from lwecert.owf import LweInstance
    inst = sample_instance(OwfParams(2, 5, 31, Fraction(1, 20)), 3)
    assert LweInstance.from_json(inst.to_json()) == inst


def test_gaussian_variance():
    sigma = Fraction(101, 50)
    xs = sample_gaussian_vector(sigma, 101, 10_000, random.Random(7))
    mean = sum(xs) / len(xs)
    var = sum((x - mean) ** 2 for x in xs) / len(xs)
    assert abs(var / float(sigma) ** 2 - 1) < 0.2


def test_instance_noise_within_ball():
    p = OwfParams(2, 8, 101, Fraction(1, 50))
    for seed in range(20):
        assert norm_sq(sample_instance(p, seed).epsilon) <= p.error_bound_sq


def test_resample_ceiling():
    with pytest.raises(ResourceLimitError):
        sample_instance(OwfParams(1, 40, 1009, Fraction(1, 2)), 0, max_resamples=0)


# -- f_A -----------------------------------------------------------------------

def test_eval_identity_and_zero_secret():
    p = OwfParams(3, 3, 7, Fraction(1, 7))
    assert eval_f(ModMatrix.identity(3, 7), (1, 5, 6), (0, 0, 0), p) == (1, 5, 6)
    A = ModMatrix.from_rows([[1, 2, 3]] * 3, 7)
    assert eval_f(A, (0, 0, 0), (1, -1, 0), p) == (1, 6, 0)


def test_eval_matches_direct_arithmetic(rng):
    p = OwfParams(2, 4, 17, Fraction(1, 10))
    for _ in range(20):
        A = uniform_matrix(2, 4, 17, rng)
        s = (rng.randrange(17), rng.randrange(17))
        e = tuple(rng.randint(-1, 1) for _ in range(4))
        direct = [(A.entries[i][0] * s[0] + A.entries[i][1] * s[1] + e[i]) % 17 for i in range(4)]
        assert eval_f(A, s, e, p) == tuple(direct)


def test_eval_rejects_oversized_noise():
    p = OwfParams(1, 1, 5, 0)
    with pytest.raises(DomainError):
        eval_f(ModMatrix.identity(1, 5), (1,), (1,), p)


# -- certificates --------------------------------------------------------------

def test_identity_certificate_verifies():
    p = OwfParams(2, 2, 5, Fraction(1, 200))
    assert 1 < p.dual_norm_bound_sq
    assert verify_certificate(ModMatrix.identity(2, 5), identity_cert(2, 5), p)


def test_scaled_dual_vector_fails_norm_bound():
    p = OwfParams(2, 2, 5, Fraction(1, 200))
    W = RatMatrix.from_rows([[5, 0], [0, 1]])
    Wp = W.transpose().inverse()
    cert = InjectivityCertificate(ModMatrix.identity(2, 5), W, Wp)
    v = verify_certificate(ModMatrix.identity(2, 5), cert, p)
    assert not v and v.reason == "norm bound"


@pytest.mark.parametrize("field,reason", [("A_L_inv", "left inverse"), ("W", "dual membership"),
                                          ("W_prime", "linear independence")])
def test_certificate_reports_first_failure(field, reason):
    p = OwfParams(2, 2, 5, Fraction(1, 200))
    good = identity_cert(2, 5)
    bad = {"A_L_inv": ModMatrix.from_rows([[2, 0], [0, 1]], 5),
           "W": RatMatrix.from_rows([[Fraction(1, 3), 0], [0, 1]]),
           "W_prime": RatMatrix.from_rows([[1, 1], [0, 1]])}[field]
    cert = InjectivityCertificate(**{**good.__dict__, field: bad})
    v = verify_certificate(ModMatrix.identity(2, 5), cert, p)
    assert not v and v.reason == reason


def test_generate_identity_certificate():
    p = OwfParams(2, 2, 5, Fraction(1, 200))
    cert = generate_certificate(ModMatrix.identity(2, 5), p)
    assert cert.W == RatMatrix.identity(2)


def test_generate_absent_for_short_column():
    # the column (1, 0, 0) is a short vector of L_q(A), so the dual minima are large
    A = ModMatrix.from_rows([[1, 0], [0, 1], [0, 0]], 97)
    p = OwfParams(2, 3, 97, Fraction(1, 1000))
    assert lambda1_qary_via_modular(A) == 1
    assert generate_certificate(A, p) is None


def test_generate_absent_when_rank_deficient():
    A = ModMatrix.from_rows([[1, 2], [2, 4], [3, 6]], 7)
    assert generate_certificate(A, OwfParams(2, 3, 7, Fraction(1, 1000))) is None


def test_generate_round_trip(rng):
    p = OwfParams(2, 4, 97, Fraction(1, 1000))
    made = 0
    for _ in range(10):
        A = uniform_matrix(2, 4, 97, rng)
        cert = generate_certificate(A, p)
        if cert is not None:
            made += 1
            assert verify_certificate(A, cert, p)
            assert InjectivityCertificate.from_json(cert.to_json()) == cert
    assert made >= 5


# -- brute force and the certificate properties --------------------------------

def test_bruteforce_identity_and_zero():
    p = OwfParams(2, 2, 5, 0)
    assert injectivity_bruteforce(ModMatrix.identity(2, 5), p)
    assert not injectivity_bruteforce(ModMatrix.from_rows([[0, 0], [0, 0]], 5), p)


def test_certificate_soundness():
    certified = 0
    for seed in range(120):
        A = uniform_matrix(2, 3, 13, random.Random(seed))
        cert = generate_certificate(A, TINY)
        if cert is not None and verify_certificate(A, cert, TINY):
            certified += 1
            assert injectivity_bruteforce(A, TINY)
    assert certified >= 5


def test_certificate_completeness_at_margin():
    p = OwfParams(1, 2, 101, Fraction(1, 10000))
    checked = 0
    for seed in range(60):
        A = uniform_matrix(1, 2, 101, random.Random(seed))
        if not is_full_rank_mod_q(A):
            continue
        if lambda1_qary_via_modular(A) > p.certificate_threshold_sq:
            checked += 1
            assert generate_certificate(A, p) is not None
    assert checked >= 5


def test_collision_dichotomy():
    p = OwfParams(2, 3, 5, Fraction(1, 10))
    seen = 0
    for seed in range(30):
        A = uniform_matrix(2, 3, 5, random.Random(seed))
        for (s, e), (s2, e2) in find_collisions(A, p, limit=20):
            seen += 1
            if e == e2:
                assert not is_full_rank_mod_q(A)
            else:
                diff = A.apply([a - b for a, b in zip(s2, s)])
                assert norm_sq(centered_rep(diff, 5)) <= p.injectivity_threshold_sq
    assert seen > 0


def test_bruteforce_resource_ceiling():
    with pytest.raises(ResourceLimitError):
        injectivity_bruteforce(ModMatrix.identity(3, 101), OwfParams(3, 3, 101, Fraction(1, 10)), max_work=100)


# -- experiments ---------------------------------------------------------------

def test_rank_one_by_one():
    rep = experiment_rank(OwfParams(1, 1, 2, 0), 4000, seed=1)
    assert abs(rep.empirical_rate - Fraction(1, 2)) < Fraction(3, 100)
    assert rep.paper_bound == Fraction(1, 2)


def test_rank_determinism():
    p = OwfParams(2, 3, 3, 0)
    assert experiment_rank(p, 200, 5) == experiment_rank(p, 200, 5)


def test_short_vectors_trivial_radii():
    p = OwfParams(1, 3, 7, 0)
    assert experiment_short_vectors(p, Fraction(9, 10), 50, 0).successes == 0
    big = experiment_short_vectors(p, 7 * 2, 50, 0)
    assert big.successes == big.trials


def test_short_vectors_matches_exact_count():
    p = OwfParams(1, 4, 11, 0)
    rep = experiment_short_vectors(p, 2, 3000, seed=3)
    exact = short_line_fraction(4, 11, 4)
    sd = (exact * (1 - exact) / rep.trials) ** 0.5
    assert abs(float(rep.empirical_rate - exact)) <= 4 * sd
    assert rep.paper_bound == Fraction(5 ** 4, 11)


def test_tail_zero_noise():
    assert experiment_gaussian_tail(OwfParams(2, 4, 11, 0), 20, 0).empirical_rate == 1


def test_tail_monotone_in_threshold():
    p = OwfParams(4, 16, 257, Fraction(1, 20))
    rates = [experiment_gaussian_tail(p, 300, 11, multiplier=k).empirical_rate for k in range(10, 0, -1)]
    assert all(a >= b for a, b in zip(rates, rates[1:]))
    assert rates[-1] < 1


def test_count_lattices_examples():
    assert count_lattices(1, 2, 2) == 3
    assert all(count_lattices(k, k, q) == 1 for k in (1, 2, 3) for q in (2, 3, 5))
    assert count_lattices(2, 3, 3) == distinct_lattices_bruteforce(2, 3, 3) == 13


def test_count_lattices_echelon_oracle():
    for p in (2, 3, 5):
        for m in range(1, 5):
            for n in range(1, m + 1):
                assert count_lattices(n, m, p) == subspaces_by_echelon_shapes(n, m, p)


def test_count_lattices_composite_modulus_differs():
    # over Z_4 the free rank-1 summands of Z_4^2 number 6, the product gives 5
    assert distinct_lattices_bruteforce(1, 2, 4) == 6
    assert count_lattices(1, 2, 4) == 5


def test_log_inequality():
    assert all(log_inequality_holds(n, q) for q in range(1, 30) for n in range(1, q + 1))
    assert not log_inequality_holds(40, 2)


def test_transference_product_bounds(rng):
    done = 0
    while done < 5:
        A = uniform_matrix(1, 3, 5, rng)
        if is_full_rank_mod_q(A):
            assert 1 <= transference_product(A) <= 9
            done += 1


def test_transference_experiment():
    rep = experiment_transference(OwfParams(2, 3, 5, 0), 20, seed=2)
    assert rep.successes == rep.trials > 0
