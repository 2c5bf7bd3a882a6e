"""Independent reference computations used by the tests."""

from __future__ import annotations

from itertools import combinations, product

from lwecert.lattice import is_full_rank_mod_q
from lwecert.matrix import ModMatrix


def span_mod_q(A: ModMatrix) -> frozenset:
    return frozenset(A.apply(a) for a in product(range(A.q), repeat=A.cols))


def distinct_lattices_bruteforce(n: int, m: int, q: int) -> int:
    """Distinct L_q(A) over every full-rank m x n matrix A."""
    seen = set()
    for flat in product(range(q), repeat=m * n):
        A = ModMatrix(tuple(tuple(flat[i * n:(i + 1) * n]) for i in range(m)), q)
        if is_full_rank_mod_q(A):
            seen.add(span_mod_q(A))
    return len(seen)


def subspaces_by_echelon_shapes(n: int, m: int, p: int) -> int:
    """n-dimensional subspaces of F_p^m, one per reduced row echelon form:
    for each pivot set, the free entries sit right of a pivot outside the
    other pivot columns."""
    total = 0
    for piv in combinations(range(m), n):
        free = sum(m - 1 - c - (n - 1 - i) for i, c in enumerate(piv))
        total += p ** free
    return total


def is_prime(q: int) -> bool:
    return q >= 2 and all(q % d for d in range(2, int(q ** 0.5) + 1))


def short_line_fraction(m: int, q: int, r_sq: int):
    """Exact fraction of nonzero a in Z_q^m (q prime, n = 1) whose modular
    lattice holds a centered vector of squared length < r_sq."""
    from fractions import Fraction
    from lwecert.lattice import centered_rep

    hits = 0
    for a in product(range(q), repeat=m):
        if not any(a):
            continue
        if any(0 < sum(x * x for x in centered_rep([k * y for y in a], q)) < r_sq for k in range(1, q)):
            hits += 1
    return Fraction(hits, q ** m - 1)




def prime_power_factors(q: int) -> list[tuple[int, int]]:
    """(p, p^e) for each prime p dividing q exactly e times."""
    out, d = [], 2
    while d * d <= q:
        if q % d == 0:
            pe = 1
            while q % d == 0:
                q //= d
                pe *= d
            out.append((d, pe))
        d += 1
    if q > 1:
        out.append((q, q))
    return out


def _normal_forms_local(n: int, m: int, pe: int, p: int) -> int:
    """Over Z_{p^e} a full-rank lattice has a unit n x n minor; with R the
    lexicographically first such row set, its unique basis is the identity
    on R. Count the matrices with identity rows R and free remaining rows
    for which no earlier row set has a unit minor."""
    from lwecert.lattice import int_det

    subsets = list(combinations(range(m), n))
    total = 0
    for k, R in enumerate(subsets):
        others = [i for i in range(m) if i not in R]
        for flat in product(range(pe), repeat=n * len(others)):
            rows = [None] * m
            for t, i in enumerate(R):
                rows[i] = tuple(int(j == t) for j in range(n))
            for t, i in enumerate(others):
                rows[i] = flat[t * n:(t + 1) * n]
            if all(int_det([rows[i] for i in S]) % p == 0 for S in subsets[:k]):
                total += 1
    return total


def distinct_lattices_by_normal_forms(n: int, m: int, q: int, max_work: int = 300_000) -> int | None:
    """Distinct L_q(A) over full-rank A by enumerating normal forms over each
    prime-power factor of q (the lattices mod q are the tuples of lattices
    mod the factors). Returns None past ``max_work`` candidate checks."""
    from math import comb

    factors = prime_power_factors(q)
    k = comb(m, n)
    if sum(pe ** (n * (m - n)) * k * (k + 1) // 2 for _, pe in factors) > max_work:
        return None
    total = 1
    for p, pe in factors:
        total *= _normal_forms_local(n, m, pe, p)
    return total
