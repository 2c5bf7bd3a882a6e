"""Modular, q-ary and dual lattices with exact enumeration of short vectors.

Every length in this module is a *squared* Euclidean length held as a
``Fraction``; nothing here touches floating point.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from math import gcd, isqrt
from typing import Sequence

from .matrix import (
    MatrixError,
    ModMatrix,
    RatMatrix,
    SingularMatrixError,
    int_matmul,
    rat_inverse,
    rat_rank,
)

INTEGER = "integer-lattice"
MODULAR = "modular-lattice"
QARY = "q-ary-lattice"

DEFAULT_MAX_NODES = 2_000_000


class ResourceLimitError(RuntimeError):
    """An enumeration or sampling loop hit its configured work ceiling."""


class BoundTooSmallError(ValueError):
    """The search radius does not contain the requested vectors."""


class RankDeficientError(ValueError):
    pass


@dataclass(frozen=True)
class LatticeBasis:
    kind: str
    basis: RatMatrix | ModMatrix
    modulus: int | None = None

    def __post_init__(self):
        if self.kind not in (INTEGER, MODULAR, QARY):
            raise ValueError(f"unknown lattice kind {self.kind!r}")
        if self.kind == INTEGER:
            if self.modulus is not None:
                raise ValueError("integer lattices carry no modulus")
            if not isinstance(self.basis, RatMatrix):
                object.__setattr__(self, "basis", self.basis.lift())
        else:
            if self.modulus is None:
                if isinstance(self.basis, ModMatrix):
                    object.__setattr__(self, "modulus", self.basis.q)
                else:
                    raise ValueError(f"{self.kind} needs a modulus")
            if not isinstance(self.basis, ModMatrix):
                object.__setattr__(self, "basis", ModMatrix(
                    tuple(tuple(int(x) for x in r) for r in self.basis.entries), self.modulus))

    @classmethod
    def integer(cls, B) -> "LatticeBasis":
        return cls(INTEGER, B if isinstance(B, RatMatrix) else RatMatrix.from_rows(B))

    @classmethod
    def modular(cls, A: ModMatrix) -> "LatticeBasis":
        return cls(MODULAR, A, A.q)

    @classmethod
    def qary(cls, A: ModMatrix) -> "LatticeBasis":
        return cls(QARY, A, A.q)


@dataclass(frozen=True)
class MinimaReport:
    index: int
    length_squared: Fraction
    witness: tuple[Fraction, ...]
    coefficients: tuple[int, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if self.length_squared <= 0:
            raise ValueError("successive minima are positive")


def norm_sq(v: Sequence) -> Fraction:
    return sum((Fraction(x) * x for x in v), Fraction(0))


def inner_product(u: Sequence, v: Sequence) -> Fraction:
    if len(u) != len(v):
        raise MatrixError(f"dimension mismatch: {len(u)} vs {len(v)}")
    return sum((Fraction(a) * b for a, b in zip(u, v)), Fraction(0))


def centered_rep(x: Sequence[int], q: int) -> tuple[int, ...]:
    """Coordinatewise representative in [-floor(q/2), floor(q/2)].

    For even q the residue q/2 stays at +q/2.
    """
    if q < 2:
        raise ValueError("modulus must be >= 2")
    half = q // 2
    out = []
    for xi in x:
        r = int(xi) % q
        out.append(r - q if r > half else r)
    return tuple(out)


# -- modular linear algebra ------------------------------------------------

def _prime_powers(q: int) -> list[tuple[int, int]]:
    out, p, rest = [], 2, q
    while p * p <= rest:
        if rest % p == 0:
            k = 0
            while rest % p == 0:
                rest //= p
                k += 1
            out.append((p, p ** k))
        p += 1
    if rest > 1:
        out.append((rest, rest))
    return out


def int_det(rows) -> int:
    """Exact determinant of a square integer matrix (Bareiss)."""
    a = [list(map(int, r)) for r in rows]
    n = len(a)
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1] if n else 1


def inverse_mod(rows, q: int) -> tuple[tuple[int, ...], ...] | None:
    """Inverse of a square integer matrix modulo q, or None if the
    determinant is not a unit."""
    d = int_det(rows)
    if gcd(d, q) != 1:
        return None
    inv = rat_inverse(rows)
    dinv = pow(d % q, -1, q)
    return tuple(tuple(int(x * d) * dinv % q for x in r) for r in inv)


def _independent_rows_mod_p(entries, p: int, n: int) -> list[int] | None:
    """Greedy (hence lexicographically first) rows independent mod prime p."""
    chosen: list[int] = []
    echelon: list[tuple[int, list[int]]] = []  # (pivot column, reduced row)
    for idx, row in enumerate(entries):
        v = [x % p for x in row]
        for pc, er in echelon:
            if v[pc]:
                f = v[pc]
                v = [(a - f * b) % p for a, b in zip(v, er)]
        pc = next((j for j, x in enumerate(v) if x), None)
        if pc is None:
            continue
        inv = pow(v[pc], -1, p)
        echelon.append((pc, [x * inv % p for x in v]))
        chosen.append(idx)
        if len(chosen) == n:
            return chosen
    return None


def _crt(residues: list[tuple[int, int]]) -> int:
    x, mod = 0, 1
    for r, m in residues:
        t = (r - x) * pow(mod, -1, m) % m
        x, mod = x + mod * t, mod * m
    return x % mod


def left_inverse_mod_q(A: ModMatrix) -> ModMatrix | None:
    """L with L @ A == I_n (mod q), or None when no left inverse exists.

    Works one prime power at a time: Z_{p^k} is local, so a left inverse
    exists there iff some n x n minor is a unit, i.e. nonzero mod p. The
    local inverses are glued with the CRT.
    """
    m, n, q = A.rows, A.cols, A.q
    if m < n:
        return None
    locals_: list[tuple[tuple[tuple[int, ...], ...], int]] = []
    for p, pk in _prime_powers(q):
        rows = _independent_rows_mod_p(A.entries, p, n)
        if rows is None:
            return None
        minv = inverse_mod([A.entries[i] for i in rows], pk)
        assert minv is not None
        L = [[0] * m for _ in range(n)]
        for c, ri in enumerate(rows):
            for r in range(n):
                L[r][ri] = minv[r][c]
        locals_.append((tuple(map(tuple, L)), pk))
    if len(locals_) == 1:
        return ModMatrix(locals_[0][0], q)
    glued = tuple(
        tuple(_crt([(L[r][c], pk) for L, pk in locals_]) for c in range(m))
        for r in range(n)
    )
    return ModMatrix(glued, q)


def is_full_rank_mod_q(A: ModMatrix) -> bool:
    if A.rows < A.cols:
        return False
    return all(_independent_rows_mod_p(A.entries, p, A.cols) is not None
               for p, _ in _prime_powers(A.q))


def unit_minor_rows(A: ModMatrix) -> tuple[int, ...] | None:
    """Lexicographically first row set whose square minor is a unit mod q."""
    n = A.cols
    for rows in combinations(range(A.rows), n):
        if gcd(int_det([A.entries[i] for i in rows]), A.q) == 1:
            return rows
    return None


# -- lattice bases -----------------------------------------------------------

def dual_basis(B: RatMatrix) -> RatMatrix:
    """B (B^T B)^{-1}; its columns generate the dual of L(B)."""
    Bt = B.transpose()
    try:
        G_inv = rat_inverse(int_matmul(Bt.entries, B.entries))
    except SingularMatrixError:
        raise SingularMatrixError("basis columns are linearly dependent") from None
    return RatMatrix(int_matmul(B.entries, G_inv))


def qary_basis_with_rows(A: ModMatrix) -> tuple[RatMatrix, tuple[int, ...]]:
    """Square integer basis of Delta_q(A) and the pivot rows used.

    With rows permuted so the chosen rows come first, the basis is
    [[I, 0], [B2 B1^{-1} mod q, q I]]; undoing the permutation gives
    C^T K C, which spans the same lattice as C^T K.
    """
    m, n, q = A.rows, A.cols, A.q
    rows = unit_minor_rows(A) if m >= n else None
    if rows is None:
        if m >= n and is_full_rank_mod_q(A):
            # composite q can leave a left inverse without any unit minor
            return _hermite_basis(list(A.columns()) + [tuple(q * (i == j) for i in range(m))
                                                       for j in range(m)], m), ()
        raise RankDeficientError("A has no unit n x n minor mod q")
    order = list(rows) + [i for i in range(m) if i not in rows]
    B1 = [A.entries[i] for i in order[:n]]
    B2 = [A.entries[i] for i in order[n:]]
    B1_inv = inverse_mod(B1, q)
    lower = [[x % q for x in r] for r in int_matmul(B2, B1_inv)] if B2 else []
    K = [[0] * m for _ in range(m)]
    for i in range(n):
        K[i][i] = 1
    for r in range(m - n):
        for c in range(n):
            K[n + r][c] = lower[r][c]
        K[n + r][n + r] = q
    # permuted coordinate k holds original coordinate order[k]
    out = [[0] * m for _ in range(m)]
    for k in range(m):
        for l in range(m):
            out[order[k]][order[l]] = K[k][l]
    return RatMatrix(tuple(map(tuple, out))), tuple(rows)


def _hermite_basis(gens, m: int) -> RatMatrix:
    """Lower-triangular basis of the full-rank integer lattice spanned by
    ``gens``: row by row, Euclid on the remaining generators leaves one with
    a non-zero entry there and clears the rest."""
    pool = [list(g) for g in gens]
    cols = []
    for r in range(m):
        live = [g for g in pool if g[r] != 0]
        dead = [g for g in pool if g[r] == 0]
        while len(live) > 1:
            live.sort(key=lambda g: abs(g[r]))
            piv = live[0]
            rest = []
            for g in live[1:]:
                k = g[r] // piv[r]
                g = [x - k * y for x, y in zip(g, piv)]
                (rest if g[r] != 0 else dead).append(g)
            live = [piv] + rest
        if not live:
            raise RankDeficientError("generators do not span a full-rank lattice")
        piv = live[0] if live[0][r] > 0 else [-x for x in live[0]]
        cols.append(tuple(piv))
        pool = [g for g in dead if any(g)]
    return RatMatrix.from_columns(cols)


def qary_basis(A: ModMatrix) -> RatMatrix:
    return qary_basis_with_rows(A)[0]


def in_qary_lattice(x: Sequence[int], A: ModMatrix) -> bool:
    """Membership of an integer vector in Delta_q(A), by scanning Z_q^n."""
    target = tuple(int(v) % A.q for v in x)
    return any(A.apply(a) == target for a in product(range(A.q), repeat=A.cols))


# -- enumeration -------------------------------------------------------------

def _ldl(gram) -> tuple[list[Fraction], list[list[Fraction]]]:
    """G = L D L^T with unit lower-triangular L (exact)."""
    n = len(gram)
    L = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    D = [Fraction(0)] * n
    for j in range(n):
        D[j] = Fraction(gram[j][j]) - sum(L[j][k] ** 2 * D[k] for k in range(j))
        if D[j] <= 0:
            raise SingularMatrixError("basis columns are linearly dependent")
        for i in range(j + 1, n):
            L[i][j] = (Fraction(gram[i][j]) - sum(L[i][k] * L[j][k] * D[k] for k in range(j))) / D[j]
    return D, L


def _int_interval(center: Fraction, radius_sq: Fraction) -> range:
    """Integers x with (x - center)^2 <= radius_sq."""
    if radius_sq < 0:
        return range(0)
    s = isqrt(radius_sq.numerator // radius_sq.denominator) + 1
    lo = (center - s).__floor__()
    hi = (center + s).__ceil__()
    while lo <= hi and (lo - center) ** 2 > radius_sq:
        lo += 1
    while hi >= lo and (hi - center) ** 2 > radius_sq:
        hi -= 1
    return range(lo, hi + 1)


def lll_reduce(B: RatMatrix, delta: Fraction = Fraction(3, 4)) -> tuple[RatMatrix, list[list[int]]]:
    """Exact LLL on the columns of B. Returns (reduced basis, U) with
    reduced = B U and U unimodular."""
    cols = [list(c) for c in B.columns()]
    n = len(cols)
    U = [[int(i == j) for j in range(n)] for i in range(n)]  # U[col] = coefficients

    def gso():
        bstar, mu, bb = [], [[Fraction(0)] * n for _ in range(n)], []
        for i in range(n):
            v = list(cols[i])
            for j in range(i):
                mu[i][j] = inner_product(cols[i], bstar[j]) / bb[j]
                v = [a - mu[i][j] * b for a, b in zip(v, bstar[j])]
            bstar.append(v)
            bb.append(norm_sq(v))
        return mu, bb

    mu, bb = gso()
    k = 1
    while k < n:
        for j in range(k - 1, -1, -1):
            r = round(mu[k][j])
            if r:
                cols[k] = [a - r * b for a, b in zip(cols[k], cols[j])]
                U[k] = [a - r * b for a, b in zip(U[k], U[j])]
                mu, bb = gso()
        if bb[k] >= (delta - mu[k][k - 1] ** 2) * bb[k - 1]:
            k += 1
        else:
            cols[k], cols[k - 1] = cols[k - 1], cols[k]
            U[k], U[k - 1] = U[k - 1], U[k]
            mu, bb = gso()
            k = max(k - 1, 1)
    # U holds coefficient vectors per column; transpose to a matrix
    Umat = [[U[j][i] for j in range(n)] for i in range(n)]
    return RatMatrix.from_columns(cols), Umat


def enumerate_short(B: RatMatrix, bound_sq: Fraction, max_nodes: int = DEFAULT_MAX_NODES):
    """All nonzero coefficient vectors x with ||B x||^2 <= bound_sq.

    Depth-first over coefficients from the last one down, pruning with the
    exact partial norms of the LDL^T factorisation of the Gram matrix.
    Yields (norm_sq, coefficients). Raises ResourceLimitError once more than
    ``max_nodes`` tree nodes have been visited.
    """
    n = B.cols
    gram = int_matmul(B.transpose().entries, B.entries)
    D, L = _ldl(gram)
    bound_sq = Fraction(bound_sq)
    x = [0] * n
    nodes = 0

    def rec(i: int, remaining: Fraction):
        nonlocal nodes
        # coordinate i of the "projected" vector is x_i + sum_{j>i} L[j][i] x_j
        shift = sum((L[j][i] * x[j] for j in range(i + 1, n)), Fraction(0))
        for xi in _int_interval(-shift, remaining / D[i]):
            nodes += 1
            if nodes > max_nodes:
                raise ResourceLimitError(f"enumeration exceeded {max_nodes} nodes")
            x[i] = xi
            rem = remaining - D[i] * (xi + shift) ** 2
            if i == 0:
                if any(x):
                    yield bound_sq - rem, tuple(x)
            else:
                yield from rec(i - 1, rem)
        x[i] = 0

    yield from rec(n - 1, bound_sq)


def _canonical_sign(v: tuple) -> bool:
    first = next((c for c in v if c != 0), 0)
    return first > 0


def _short_vectors(basis: LatticeBasis, bound_sq: Fraction, max_nodes: int):
    """Sorted list of (norm_sq, vector, coefficients), one of each +-pair."""
    bound_sq = Fraction(bound_sq)
    found = []
    if basis.kind == MODULAR:
        A: ModMatrix = basis.basis
        q = A.q
        if q ** A.cols > max_nodes:
            raise ResourceLimitError(f"q^n = {q ** A.cols} exceeds {max_nodes} nodes")
        seen = set()
        for a in product(range(q), repeat=A.cols):
            v = centered_rep(A.apply(a), q)
            if not any(v) or v in seen:
                continue
            seen.add(v)
            ns = norm_sq(v)
            if ns <= bound_sq:
                found.append((ns, tuple(Fraction(c) for c in v), a))
    else:
        B = basis.basis if basis.kind == INTEGER else qary_basis(basis.basis)
        R, U = lll_reduce(B)
        for ns, red in enumerate_short(R, bound_sq, max_nodes):
            v = tuple(sum((row[j] * c for j, c in enumerate(red)), Fraction(0)) for row in R.entries)
            if _canonical_sign(v):
                coeffs = tuple(sum(u * c for u, c in zip(row, red)) for row in U)
                found.append((ns, v, coeffs))
    # shorter first; among equals, lexicographically larger first so that
    # the unit lattice yields e_1, e_2, ... in order
    found.sort(key=lambda t: (t[0], tuple(-c for c in t[1])))
    return found


def lambda1_enum(basis: LatticeBasis, bound_sq, max_nodes: int = DEFAULT_MAX_NODES) -> MinimaReport:
    """Shortest nonzero vector with squared length at most ``bound_sq``.

    For modular lattices lengths are those of centered representatives. The
    q-ary kind enumerates Delta_q(A) itself, whose minimum never exceeds q
    because q e_1 belongs to it.
    """
    found = _short_vectors(basis, bound_sq, max_nodes)
    if not found:
        raise BoundTooSmallError(f"no nonzero lattice vector of squared length <= {bound_sq}")
    ns, v, coeffs = found[0]
    return MinimaReport(1, ns, v, tuple(coeffs))


def successive_minima_enum(basis: LatticeBasis, k: int, bound_sq,
                           max_nodes: int = DEFAULT_MAX_NODES) -> list[MinimaReport]:
    """lambda_1 .. lambda_k with linearly independent witnesses.

    Greedy by increasing length (ties broken lexicographically); independence
    is tested exactly over Q.
    """
    rank = basis.basis.cols if basis.kind == INTEGER else (
        basis.basis.rows if basis.kind == QARY else basis.basis.cols)
    if k < 1 or k > rank:
        raise ValueError(f"k must be in [1, {rank}]")
    found = _short_vectors(basis, bound_sq, max_nodes)
    chosen: list[MinimaReport] = []
    vecs: list[tuple] = []
    for ns, v, coeffs in found:
        if rat_rank(vecs + [v]) > len(vecs):
            vecs.append(v)
            chosen.append(MinimaReport(len(chosen) + 1, ns, v, tuple(coeffs)))
            if len(chosen) == k:
                return chosen
    raise BoundTooSmallError(
        f"only {len(chosen)} independent vectors within squared length {bound_sq}")


def lambda1_qary_via_modular(A: ModMatrix, max_nodes: int = DEFAULT_MAX_NODES) -> Fraction:
    """min(q^2, lambda_1(L_q(A))^2), computed from the modular lattice."""
    q2 = Fraction(A.q ** 2)
    try:
        return min(q2, lambda1_enum(LatticeBasis.modular(A), q2, max_nodes).length_squared)
    except BoundTooSmallError:
        return q2
