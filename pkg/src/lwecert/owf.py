"""The bounded-error LWE function family, certificates of injectivity and
Monte Carlo checks of the random-lattice estimates.

The scale parameter ``c = alpha q / sqrt(n)`` is irrational in general, so
it is only ever handled through ``c^2 = alpha^2 q^2 / n``. All thresholds
below are squared.
"""

from __future__ import annotations

import math
import random
from bisect import bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import isqrt
from typing import Sequence

from .lattice import (
    DEFAULT_MAX_NODES,
    BoundTooSmallError,
    LatticeBasis,
    RankDeficientError,
    ResourceLimitError,
    centered_rep,
    dual_basis,
    inner_product,
    is_full_rank_mod_q,
    lambda1_enum,
    left_inverse_mod_q,
    norm_sq,
    qary_basis,
    successive_minima_enum,
)
from .matrix import ModMatrix, RatMatrix, format_rational, matrix_from_json, matrix_to_json, parse_rational

DEFAULT_MAX_RESAMPLES = 10_000
DEFAULT_MAX_WORK = 5_000_000


class DomainError(ValueError):
    """Input lies outside the declared domain of f_A."""


@dataclass(frozen=True)
class OwfParams:
    n: int
    m: int
    q: int
    alpha: Fraction

    def __post_init__(self):
        object.__setattr__(self, "alpha", Fraction(self.alpha))
        if self.n < 1 or self.m < self.n:
            raise ValueError(f"need 1 <= n <= m, got n={self.n}, m={self.m}")
        if self.q < 2:
            raise ValueError("q must be >= 2")
        if not 0 <= self.alpha <= 1:
            raise ValueError("alpha must lie in [0, 1]")

    @property
    def c_sq(self) -> Fraction:
        return self.alpha ** 2 * self.q ** 2 / self.n

    @property
    def sigma(self) -> Fraction:
        """Standard deviation alpha*q of the noise distribution."""
        return self.alpha * self.q

    @property
    def error_bound_sq(self) -> Fraction:
        """(10 c sqrt(mn))^2: squared radius of the error domain."""
        return 100 * self.c_sq * self.m * self.n

    @property
    def dual_norm_bound_sq(self) -> Fraction | None:
        """1/(400 c^2 n m), the strict bound on <w_i, w_i>; None when c = 0."""
        if self.c_sq == 0:
            return None
        return 1 / (400 * self.c_sq * self.n * self.m)

    @property
    def injectivity_threshold_sq(self) -> Fraction:
        """(20 c sqrt(nm))^2: lambda_1 above this forces injectivity."""
        return 400 * self.c_sq * self.n * self.m

    @property
    def certificate_threshold_sq(self) -> Fraction:
        """(20 m c sqrt(nm))^2: lambda_1 above this guarantees a certificate."""
        return 400 * self.m ** 2 * self.c_sq * self.n * self.m

    def to_json(self) -> dict:
        return {"n": self.n, "m": self.m, "q": self.q, "alpha": format_rational(self.alpha)}

    @classmethod
    def from_json(cls, d: dict) -> "OwfParams":
        return cls(int(d["n"]), int(d["m"]), int(d["q"]), parse_rational(d["alpha"]))


@dataclass(frozen=True)
class LweInstance:
    params: OwfParams
    A: ModMatrix
    s: tuple[int, ...]
    epsilon: tuple[int, ...]
    z: tuple[int, ...]

    def __post_init__(self):
        if norm_sq(self.epsilon) > self.params.error_bound_sq:
            raise DomainError("noise vector outside the error ball")
        if self.A.apply(self.s) != tuple((a - e) % self.params.q for a, e in zip(self.z, self.epsilon)):
            raise DomainError("z != A s + epsilon (mod q)")

    def to_json(self) -> dict:
        return {"params": self.params.to_json(), "A": matrix_to_json(self.A),
                "s": list(self.s), "epsilon": list(self.epsilon), "z": list(self.z)}

    @classmethod
    def from_json(cls, d: dict) -> "LweInstance":
        return cls(OwfParams.from_json(d["params"]), matrix_from_json(d["A"]),
                   tuple(d["s"]), tuple(d["epsilon"]), tuple(d["z"]))


@dataclass(frozen=True)
class InjectivityCertificate:
    A_L_inv: ModMatrix
    W: RatMatrix
    W_prime: RatMatrix
    # per column of W: (A^T w_i, q w_i), both integral when w_i is in the dual
    membership_witnesses: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...] = ()

    def to_json(self) -> dict:
        return {
            "A_L_inv": matrix_to_json(self.A_L_inv),
            "W": matrix_to_json(self.W),
            "W_prime": matrix_to_json(self.W_prime),
            "membership_witnesses": [{"At_w": list(a), "q_w": list(b)}
                                     for a, b in self.membership_witnesses],
        }

    @classmethod
    def from_json(cls, d: dict) -> "InjectivityCertificate":
        wit = tuple((tuple(x["At_w"]), tuple(x["q_w"])) for x in d.get("membership_witnesses", []))
        return cls(matrix_from_json(d["A_L_inv"]), matrix_from_json(d["W"]),
                   matrix_from_json(d["W_prime"]), wit)


@dataclass(frozen=True)
class Verdict:
    ok: bool
    reason: str = ""

    def __bool__(self):
        return self.ok


@dataclass(frozen=True)
class ExperimentReport:
    trials: int
    successes: int
    empirical_rate: Fraction
    paper_bound: Fraction
    seed: int
    extra: dict = field(default_factory=dict, compare=False)

    def to_json(self) -> dict:
        d = {"trials": self.trials, "successes": self.successes,
             "empirical_rate": format_rational(self.empirical_rate),
             "paper_bound": format_rational(self.paper_bound), "seed": self.seed}
        d.update(self.extra)
        return d


def stream(seed: int, *labels) -> random.Random:
    """Independent deterministic stream for (seed, labels...)."""
    return random.Random(":".join(map(str, (seed,) + labels)))


# -- noise -------------------------------------------------------------------

@lru_cache(maxsize=64)
def _gaussian_table(sigma: Fraction, q: int, tail: int = 12):
    """Support and integer cumulative weights of the discrete Gaussian with
    standard deviation ``sigma``, truncated at ``tail`` deviations and to the
    centered range of Z_q."""
    half = q // 2
    cut = min(half, int(tail * sigma) + 1)
    s2 = float(sigma) ** 2
    support = list(range(-cut, cut + 1))
    scale = 1 << 62
    weights = [int(Fraction(math.exp(-x * x / (2 * s2))) * scale) for x in support]
    cum, acc = [], 0
    for w in weights:
        acc += w
        cum.append(acc)
    return tuple(support), tuple(cum)


def sample_gaussian_vector(sigma: Fraction, q: int, length: int, rng: random.Random) -> tuple[int, ...]:
    if sigma == 0:
        return (0,) * length
    support, cum = _gaussian_table(Fraction(sigma), q)
    total = cum[-1]
    return tuple(support[bisect_right(cum, rng.randrange(total))] for _ in range(length))


def sample_error(params: OwfParams, rng: random.Random,
                 max_resamples: int = DEFAULT_MAX_RESAMPLES) -> tuple[int, ...]:
    """Gaussian noise vector conditioned on the error ball (whole-vector rejection)."""
    bound = params.error_bound_sq
    for _ in range(max_resamples):
        eps = sample_gaussian_vector(params.sigma, params.q, params.m, rng)
        if norm_sq(eps) <= bound:
            return eps
    raise ResourceLimitError(f"no admissible noise vector after {max_resamples} draws")


def uniform_matrix(n: int, m: int, q: int, rng: random.Random) -> ModMatrix:
    return ModMatrix(tuple(tuple(rng.randrange(q) for _ in range(n)) for _ in range(m)), q)


def sample_instance(params: OwfParams, seed: int,
                    max_resamples: int = DEFAULT_MAX_RESAMPLES) -> LweInstance:
    rng = stream(seed, "instance")
    A = uniform_matrix(params.n, params.m, params.q, rng)
    s = tuple(rng.randrange(params.q) for _ in range(params.n))
    eps = sample_error(params, rng, max_resamples)
    return LweInstance(params, A, s, eps, eval_f(A, s, eps, params))


def eval_f(A: ModMatrix, s: Sequence[int], epsilon: Sequence[int], params: OwfParams) -> tuple[int, ...]:
    """(A s + epsilon) mod q on the bounded-error domain."""
    if len(epsilon) != A.rows or len(s) != A.cols:
        raise DomainError("dimension mismatch")
    if norm_sq(epsilon) > params.error_bound_sq:
        raise DomainError("epsilon outside the error ball")
    return tuple((x + e) % params.q for x, e in zip(A.apply(s), epsilon))


# -- certificates ------------------------------------------------------------

def verify_certificate(A: ModMatrix, cert: InjectivityCertificate, params: OwfParams) -> Verdict:
    m, n, q = A.rows, A.cols, A.q
    L = cert.A_L_inv
    if L.q != q or L.shape != (n, m) or (L @ A).entries != ModMatrix.identity(n, q).entries:
        return Verdict(False, "left inverse")
    W = cert.W
    if W.shape != (m, m) or cert.W_prime.shape != (m, m):
        return Verdict(False, "dimensions")
    cols = A.columns()
    for i, w in enumerate(W.columns()):
        at_w = [inner_product(a, w) for a in cols]
        q_w = [q * x for x in w]
        if any(x.denominator != 1 for x in at_w + q_w):
            return Verdict(False, "dual membership")
        if cert.membership_witnesses:
            if cert.membership_witnesses[i] != (tuple(int(x) for x in at_w), tuple(int(x) for x in q_w)):
                return Verdict(False, "dual membership")
    if (cert.W_prime @ W.transpose()).entries != RatMatrix.identity(m).entries:
        return Verdict(False, "linear independence")
    bound = params.dual_norm_bound_sq
    if bound is not None and any(norm_sq(w) >= bound for w in W.columns()):
        return Verdict(False, "norm bound")
    return Verdict(True, "")


def generate_certificate(A: ModMatrix, params: OwfParams,
                         max_nodes: int = DEFAULT_MAX_NODES) -> InjectivityCertificate | None:
    """Left inverse plus the m successive minima of the dual q-ary lattice,
    returned only when they meet the norm bound."""
    L = left_inverse_mod_q(A)
    if L is None:
        return None
    try:
        B = qary_basis(A)
    except RankDeficientError:
        return None
    D = dual_basis(B)
    # Z^m lies in the dual, so lambda_m <= 1; a smaller norm bound only
    # shrinks the search
    bound = params.dual_norm_bound_sq
    radius = Fraction(1) if bound is None else min(Fraction(1), bound)
    try:
        minima = successive_minima_enum(LatticeBasis.integer(D), A.rows, radius, max_nodes)
    except BoundTooSmallError:
        return None
    if bound is not None and any(r.length_squared >= bound for r in minima):
        return None
    W = RatMatrix.from_columns([r.witness for r in minima])
    W_prime = W.transpose().inverse()
    cols = A.columns()
    wit = tuple(
        (tuple(int(inner_product(a, w)) for a in cols), tuple(int(A.q * x) for x in w))
        for w in W.columns()
    )
    return InjectivityCertificate(L, W, W_prime, wit)


# -- brute force ---------------------------------------------------------------

def error_ball(params: OwfParams) -> list[tuple[int, ...]]:
    """All centered noise vectors admitted by the domain, lexicographic."""
    bound = params.error_bound_sq
    r = min(params.q // 2, isqrt(int(bound)))
    out = []
    axis = range(-r, r + 1)
    if params.q % 2 == 0:
        axis = range(-r if r < params.q // 2 else -(r - 1), r + 1)
    for e in product(axis, repeat=params.m):
        if norm_sq(e) <= bound:
            out.append(e)
    return out


def _domain_size(params: OwfParams) -> int:
    r = min(params.q // 2, isqrt(int(params.error_bound_sq)))
    return params.q ** params.n * (2 * r + 1) ** params.m


def find_collisions(A: ModMatrix, params: OwfParams, max_work: int = DEFAULT_MAX_WORK,
                    limit: int | None = None):
    """Pairs of distinct domain points with equal image (first hit per image)."""
    if _domain_size(params) > max_work:
        raise ResourceLimitError(f"domain of size {_domain_size(params)} exceeds {max_work}")
    ball = error_ball(params)
    seen: dict = {}
    out = []
    for s in product(range(params.q), repeat=params.n):
        As = A.apply(s)
        for e in ball:
            z = tuple((x + y) % params.q for x, y in zip(As, e))
            prev = seen.setdefault(z, (s, e))
            if prev != (s, e):
                out.append((prev, (s, e)))
                if limit is not None and len(out) >= limit:
                    return out
    return out


def injectivity_bruteforce(A: ModMatrix, params: OwfParams, max_work: int = DEFAULT_MAX_WORK) -> bool:
    return not find_collisions(A, params, max_work, limit=1)


# -- experiments ---------------------------------------------------------------

def _report(trials, successes, bound, seed, **extra) -> ExperimentReport:
    rate = Fraction(successes, trials) if trials else Fraction(0)
    return ExperimentReport(trials, successes, rate, Fraction(bound), seed, extra)


def experiment_rank(params: OwfParams, trials: int, seed: int) -> ExperimentReport:
    """Fraction of uniform A that have a left inverse mod q."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    n, m, q = params.n, params.m, params.q
    hits = sum(is_full_rank_mod_q(uniform_matrix(n, m, q, stream(seed, "rank", t)))
               for t in range(trials))
    return _report(trials, hits, 1 - Fraction(n, q ** (m - n + 1)), seed, experiment="rank")


def short_vector_bound(params: OwfParams, r) -> Fraction:
    """(2r+1)^m / q^(m-2n-1)."""
    r = Fraction(r)
    return (2 * r + 1) ** params.m / Fraction(params.q) ** (params.m - 2 * params.n - 1)


def experiment_short_vectors(params: OwfParams, r, trials: int, seed: int,
                             max_nodes: int = DEFAULT_MAX_NODES) -> ExperimentReport:
    """Frequency of lambda_1(L_q(A)) < r among full-rank samples."""
    r = Fraction(r)
    n, m, q = params.n, params.m, params.q
    full = short = 0
    for t in range(trials):
        A = uniform_matrix(n, m, q, stream(seed, "short", t))
        if not is_full_rank_mod_q(A):
            continue
        full += 1
        if r * r > 1 and _has_vector_shorter(A, r * r, max_nodes):
            short += 1
    return _report(full, short, short_vector_bound(params, r), seed,
                   experiment="short", samples=trials, r=format_rational(r))


def _has_vector_shorter(A: ModMatrix, r_sq: Fraction, max_nodes: int) -> bool:
    try:
        return lambda1_enum(LatticeBasis.modular(A), r_sq, max_nodes).length_squared < r_sq
    except BoundTooSmallError:
        return False


def experiment_gaussian_tail(params: OwfParams, trials: int, seed: int,
                             multiplier=10) -> ExperimentReport:
    """Fraction of unconditioned Gaussian noise vectors inside the radius
    ``multiplier * c * sqrt(mn)``."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    mult = Fraction(multiplier)
    bound = mult ** 2 * params.c_sq * params.m * params.n
    hits = 0
    for t in range(trials):
        eps = sample_gaussian_vector(params.sigma, params.q, params.m, stream(seed, "tail", t))
        hits += norm_sq(eps) <= bound
    return _report(trials, hits, Fraction(99, 100), seed, experiment="tail",
                   multiplier=format_rational(mult))


def count_lattices(n: int, m: int, q: int) -> int:
    """prod_{i<n} (q^m - q^i)/(q^n - q^i); the number of n-dimensional
    subspaces of F_q^m when q is prime."""
    total = Fraction(1)
    for i in range(n):
        total *= Fraction(q ** m - q ** i, q ** n - q ** i)
    if total.denominator != 1:
        raise ArithmeticError(f"non-integral lattice count {total}")
    return total.numerator


def log_inequality_holds(n: int, q: int) -> bool:
    """(q+1)^(n-1) <= q^n, the exponentiated form of log_q(q+1)(n-1) <= n."""
    return (q + 1) ** (n - 1) <= q ** n


def transference_product(A: ModMatrix, max_nodes: int = DEFAULT_MAX_NODES) -> Fraction:
    """lambda_1(Delta_q(A))^2 * lambda_m(Delta_q(A)^*)^2 for full-rank A.

    Delta_q contains q Z^m and lies in Z^m, so lambda_1 <= q and the dual,
    which contains Z^m, has lambda_m <= 1; those bound the searches.
    """
    q, m = A.q, A.rows
    l1 = lambda1_enum(LatticeBasis.qary(A), Fraction(q * q), max_nodes).length_squared
    D = dual_basis(qary_basis(A))
    lm = successive_minima_enum(LatticeBasis.integer(D), m, Fraction(1), max_nodes)[-1].length_squared
    return l1 * lm


def experiment_transference(params: OwfParams, trials: int, seed: int,
                            max_nodes: int = DEFAULT_MAX_NODES) -> ExperimentReport:
    """Fraction of full-rank samples with the product inside [1, m^2]."""
    n, m, q = params.n, params.m, params.q
    full = inside = 0
    lo = hi = None
    for t in range(trials):
        A = uniform_matrix(n, m, q, stream(seed, "transference", t))
        if not is_full_rank_mod_q(A):
            continue
        full += 1
        p = transference_product(A, max_nodes)
        lo = p if lo is None else min(lo, p)
        hi = p if hi is None else max(hi, p)
        inside += 1 <= p <= m * m
    return _report(full, inside, 1, seed, experiment="transference", samples=trials,
                   min_product=None if lo is None else format_rational(lo),
                   max_product=None if hi is None else format_rational(hi))
