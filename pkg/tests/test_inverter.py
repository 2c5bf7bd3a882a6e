import random
from fractions import Fraction

import pytest

from lwecert.inverter import (BruteForceOracle, CertificateError, InconsistentOracleError, Preimage,
                              TrapdoorOracle, all_preimages, bit_width, decode_preimage,
                              encode_preimage, invert_bitwise, invert_bruteforce, invert_with_trapdoor)
from lwecert.matrix import ModMatrix, RatMatrix
from lwecert.owf import (InjectivityCertificate, OwfParams, generate_certificate, injectivity_bruteforce,
                         sample_instance)

TINY = OwfParams(2, 3, 13, Fraction(1, 221))


def certified_instances(count, params=TINY):
    out, seed = [], 0
    while len(out) < count:
        inst = sample_instance(params, seed)
        cert = generate_certificate(inst.A, params)
        if cert is not None:
            out.append((inst, cert))
        seed += 1
    return out


@pytest.fixture(scope="module")
def certified():
    return certified_instances(8)


def test_encode_decode_round_trip(rng):
    p = OwfParams(2, 3, 13, Fraction(1, 221))
    for _ in range(30):
        pre = Preimage(tuple(rng.randrange(13) for _ in range(2)), tuple(rng.randint(-6, 6) for _ in range(3)))
        bits = encode_preimage(pre, p)
        assert len(bits) == bit_width(p) == 2 * 4 + 3 * 5
        assert decode_preimage(bits, p) == pre


def test_bruteforce_finds_sampled_preimage(certified):
    for inst, _ in certified:
        assert invert_bruteforce(inst.A, inst.z, TINY) == Preimage(inst.s, inst.epsilon)


def test_bruteforce_lists_all_preimages():
    p = OwfParams(1, 1, 5, 0)
    A = ModMatrix.from_rows([[0]], 5)
    assert all_preimages(A, (0,), p) == [Preimage((s,), (0,)) for s in range(5)]
    assert invert_bruteforce(A, (1,), p) is None


def test_trapdoor_agrees_with_bruteforce(certified):
    for inst, cert in certified:
        assert injectivity_bruteforce(inst.A, TINY)
        assert invert_with_trapdoor(inst.A, cert, inst.z, TINY) == invert_bruteforce(inst.A, inst.z, TINY)


def test_trapdoor_rejects_invalid_certificate(certified):
    inst, cert = certified[0]
    bad = InjectivityCertificate(cert.A_L_inv, cert.W.scale(13), cert.W_prime)
    with pytest.raises(CertificateError):
        invert_with_trapdoor(inst.A, bad, inst.z, TINY)


@pytest.mark.parametrize("backend", ["bruteforce", "trapdoor"])
def test_bitwise_agrees_and_counts_queries(certified, backend):
    for inst, cert in certified:
        oracle = BruteForceOracle(TINY) if backend == "bruteforce" else TrapdoorOracle(TINY, cert)
        got = invert_bitwise(oracle, inst.A, inst.z, TINY)
        assert got == Preimage(inst.s, inst.epsilon)
        assert oracle.calls == bit_width(TINY)


def test_bitwise_no_preimage():
    p = OwfParams(1, 1, 5, 0)
    A = ModMatrix.from_rows([[0]], 5)
    assert invert_bitwise(BruteForceOracle(p), A, (1,), p) is None


def test_bitwise_detects_lying_oracle(certified):
    inst, _ = certified[0]

    def liar(A, z, prefix):
        return 1 if len(prefix) < 3 else None

    with pytest.raises(InconsistentOracleError):
        invert_bitwise(liar, inst.A, inst.z, TINY)


def test_identity_trapdoor():
    p = OwfParams(2, 2, 7, Fraction(1, 300))
    I = RatMatrix.identity(2)
    cert = InjectivityCertificate(ModMatrix.identity(2, 7), I, I)
    assert invert_with_trapdoor(ModMatrix.identity(2, 7), cert, (3, 4), p) == Preimage((3, 4), (0, 0))
