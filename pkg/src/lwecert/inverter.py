"""Three ways to invert f_A: exhaustive scan, certificate trapdoor, and
bit-by-bit recovery against a one-bit oracle."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Protocol, Sequence

from .lattice import centered_rep, inner_product, norm_sq
from .matrix import ModMatrix
from .owf import (
    DEFAULT_MAX_WORK,
    DomainError,
    InjectivityCertificate,
    OwfParams,
    eval_f,
    verify_certificate,
)
from .lattice import ResourceLimitError


class CertificateError(ValueError):
    pass


class InconsistentOracleError(RuntimeError):
    pass


@dataclass(frozen=True)
class Preimage:
    s: tuple[int, ...]
    epsilon: tuple[int, ...]

    def to_json(self) -> dict:
        return {"s": list(self.s), "epsilon": list(self.epsilon)}


def _reproduces(A, p: Preimage, z, params) -> bool:
    try:
        return eval_f(A, p.s, p.epsilon, params) == tuple(z)
    except DomainError:
        return False


def all_preimages(A: ModMatrix, z: Sequence[int], params: OwfParams,
                  max_work: int = DEFAULT_MAX_WORK) -> list[Preimage]:
    """Every preimage, with s in lexicographic order.

    For a fixed s the only candidate noise is the centered representative of
    z - A s, so the scan is over Z_q^n alone.
    """
    q = params.q
    if q ** A.cols > max_work:
        raise ResourceLimitError(f"q^n = {q ** A.cols} exceeds {max_work}")
    bound = params.error_bound_sq
    out = []
    for s in product(range(q), repeat=A.cols):
        eps = centered_rep([a - b for a, b in zip(z, A.apply(s))], q)
        if norm_sq(eps) <= bound:
            out.append(Preimage(s, eps))
    return out


def invert_bruteforce(A: ModMatrix, z: Sequence[int], params: OwfParams,
                      max_work: int = DEFAULT_MAX_WORK) -> Preimage | None:
    found = all_preimages(A, z, params, max_work)
    return found[0] if found else None


def trapdoor_roundings(cert: InjectivityCertificate, z: Sequence[int], q: int) -> list[Fraction]:
    """W^T z over Q, with z lifted to centered representatives."""
    zc = centered_rep(z, q)
    return [inner_product(w, zc) for w in cert.W.columns()]


def invert_with_trapdoor(A: ModMatrix, cert: InjectivityCertificate, z: Sequence[int],
                         params: OwfParams) -> Preimage | None:
    """Round W^T z to the lattice coordinates of the closest Delta_q(A) point.

    Each |<w_i, eps>| is below 1/2 for a valid certificate, so rounding
    recovers t = W^T x exactly and x = W' t.
    """
    verdict = verify_certificate(A, cert, params)
    if not verdict:
        raise CertificateError(f"invalid certificate: {verdict.reason}")
    q = params.q
    t = [(u + Fraction(1, 2)).__floor__() for u in trapdoor_roundings(cert, z, q)]
    x = [sum((a * b for a, b in zip(row, t)), Fraction(0)) for row in cert.W_prime.entries]
    if any(v.denominator != 1 for v in x):
        return None
    x = [int(v) for v in x]
    eps = centered_rep([a - b for a, b in zip(z, x)], q)
    s = cert.A_L_inv.apply(x)
    p = Preimage(s, eps)
    return p if _reproduces(A, p, z, params) else None


# -- bitwise recovery ----------------------------------------------------------

def coord_bits(q: int) -> int:
    """ceil(log2 q)."""
    return max(1, (q - 1).bit_length())


def bit_width(params: OwfParams) -> int:
    b = coord_bits(params.q)
    return params.n * b + params.m * (b + 1)


def encode_preimage(p: Preimage, params: OwfParams) -> tuple[int, ...]:
    """s coordinates little-endian, then each noise coordinate as a sign bit
    followed by its magnitude little-endian."""
    b = coord_bits(params.q)
    bits: list[int] = []
    for x in p.s:
        bits.extend((x >> k) & 1 for k in range(b))
    for e in p.epsilon:
        bits.append(int(e < 0))
        bits.extend((abs(e) >> k) & 1 for k in range(b))
    return tuple(bits)


def decode_preimage(bits: Sequence[int], params: OwfParams) -> Preimage:
    b = coord_bits(params.q)
    it = iter(bits)

    def word():
        return sum(next(it) << k for k in range(b))

    s = tuple(word() for _ in range(params.n))
    eps = []
    for _ in range(params.m):
        neg = next(it)
        mag = word()
        eps.append(-mag if neg else mag)
    return Preimage(s, tuple(eps))


class BitOracle(Protocol):
    def __call__(self, A: ModMatrix, z: Sequence[int], prefix: tuple[int, ...]) -> int | None:
        """Next bit of some preimage extending ``prefix``, or None if none does."""


class BruteForceOracle:
    def __init__(self, params: OwfParams, max_work: int = DEFAULT_MAX_WORK):
        self.params = params
        self.max_work = max_work
        self.calls = 0

    def __call__(self, A, z, prefix):
        self.calls += 1
        k = len(prefix)
        for p in all_preimages(A, z, self.params, self.max_work):
            enc = encode_preimage(p, self.params)
            if enc[:k] == tuple(prefix):
                return enc[k]
        return None


class TrapdoorOracle:
    def __init__(self, params: OwfParams, cert: InjectivityCertificate):
        self.params = params
        self.cert = cert
        self.calls = 0

    def __call__(self, A, z, prefix):
        self.calls += 1
        p = invert_with_trapdoor(A, self.cert, z, self.params)
        if p is None:
            return None
        enc = encode_preimage(p, self.params)
        k = len(prefix)
        return enc[k] if enc[:k] == tuple(prefix) else None


def invert_bitwise(oracle: BitOracle, A: ModMatrix, z: Sequence[int],
                   params: OwfParams) -> Preimage | None:
    """Fix the preimage one bit at a time; exactly ``bit_width`` queries."""
    prefix: tuple[int, ...] = ()
    for k in range(bit_width(params)):
        bit = oracle(A, z, prefix)
        if bit is None:
            if k == 0:
                return None
            raise InconsistentOracleError(f"oracle lost the preimage at bit {k}")
        prefix += (int(bit),)
    p = decode_preimage(prefix, params)
    if not _reproduces(A, p, z, params):
        raise InconsistentOracleError("decoded preimage does not reproduce z")
    return p
