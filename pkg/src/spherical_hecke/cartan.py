"""Exact p-adic linear algebra on SL_n(Q_p) restricted to Z[1/p] entries.

Elementary divisors are read off p-adic valuations of minors: if ``d_k`` is
the minimum valuation of the k x k minors of g, the k-th smallest
elementary divisor has valuation ``d_k - d_{k-1}``.  Sorting these
decreasingly gives the dominant coweight labelling the double coset
``K g K``.

Cosets ``gK`` are handled through the lattice ``g Z_p^n``.  After scaling by
``p^E`` every coset inside ``K lam K`` (with ``E = -lam_l``) has a unique
integer representative in lower-triangular Hermite form::

    A[i, i] = p**b_i,   0 <= A[i, j] < p**b_i  (j < i),   A[i, j] = 0 (j > i)

which corresponds to ``g = z_t u`` with ``t_i = b_i - E`` and ``u`` lower
unitriangular with entries ``A[i, j] / p**b_i``.  This is the canonical
coset normal form used for enumeration and deduplication.
"""

from __future__ import annotations

import itertools
import logging
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Iterable, Sequence

import numpy as np

from .lattice import Coweight, delta_exponent, height, is_dominant

__all__ = [
    "PMatrix",
    "BudgetExceeded",
    "vp",
    "cartan",
    "denominator",
    "coset_normal_form",
    "unipotent_reps",
    "CosetTable",
    "double_coset_reps",
    "coset_count",
    "coset_count_formula",
    "cartan_batch",
    "double_coset_convolve",
    "DEFAULT_HEIGHT_BUDGET",
]

log = logging.getLogger(__name__)

DEFAULT_HEIGHT_BUDGET = 4
_VINF = 1 << 30


class BudgetExceeded(RuntimeError):
    """An enumeration would exceed the configured height budget."""

    def __init__(self, label, bound):
        super().__init__(f"{label} has height {height(label)} > budget {bound}")
        self.label = label
        self.bound = bound


def vp(x, p: int) -> int:
    """p-adic valuation of an int or Fraction; a large sentinel for 0."""
    x = Fraction(x)
    if x == 0:
        return _VINF
    v = 0
    num, den = x.numerator, x.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def _is_p_power(d: int, p: int) -> bool:
    while d % p == 0:
        d //= p
    return d == 1


def _bareiss_det(rows: Sequence[Sequence[int]]) -> int:
    """Fraction-free determinant of a square integer matrix."""
    m = [list(r) for r in rows]
    k = len(m)
    sign, prev = 1, 1
    for i in range(k - 1):
        if m[i][i] == 0:
            for r in range(i + 1, k):
                if m[r][i] != 0:
                    m[i], m[r] = m[r], m[i]
                    sign = -sign
                    break
            else:
                return 0
        for r in range(i + 1, k):
            for c in range(i + 1, k):
                m[r][c] = (m[r][c] * m[i][i] - m[r][i] * m[i][c]) // prev
        prev = m[i][i]
    return sign * m[k - 1][k - 1]


@lru_cache(maxsize=None)
def _minor_index(n: int, k: int) -> tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]:
    subsets = list(itertools.combinations(range(n), k))
    return tuple((r, c) for r in subsets for c in subsets)


class PMatrix:
    """An n x n matrix over Z[1/p] with determinant exactly 1."""

    __slots__ = ("entries", "p")

    def __init__(self, entries: Iterable[Iterable], p: int, check: bool = True):
        rows = tuple(tuple(Fraction(x) for x in row) for row in entries)
        n = len(rows)
        if n < 2 or any(len(r) != n for r in rows):
            raise ValueError("PMatrix must be square of size >= 2")
        self.entries = rows
        self.p = int(p)
        if check:
            for row in rows:
                for x in row:
                    if not _is_p_power(x.denominator, self.p):
                        raise ValueError(f"entry {x} has a denominator prime to p={p}")
            if self.det() != 1:
                raise ValueError(f"determinant {self.det()} is not 1")

    @property
    def n(self) -> int:
        return len(self.entries)

    @classmethod
    def identity(cls, n: int, p: int) -> "PMatrix":
        return cls([[int(i == j) for j in range(n)] for i in range(n)], p, check=False)

    @classmethod
    def diag(cls, exponents: Sequence[int], p: int) -> "PMatrix":
        """``diag(p**e_0, ..., p**e_l)``; the exponents must sum to zero."""
        n = len(exponents)
        return cls(
            [[Fraction(p) ** exponents[i] if i == j else 0 for j in range(n)] for i in range(n)],
            p,
        )

    @classmethod
    def from_coweight(cls, t: Sequence[int], p: int) -> "PMatrix":
        """A representative ``z`` of ``nu^{-1}(t)``."""
        return cls.diag(tuple(t), p)

    def det(self) -> Fraction:
        m = [list(r) for r in self.entries]
        n = len(m)
        det = Fraction(1)
        for i in range(n):
            piv = next((r for r in range(i, n) if m[r][i] != 0), None)
            if piv is None:
                return Fraction(0)
            if piv != i:
                m[i], m[piv] = m[piv], m[i]
                det = -det
            det *= m[i][i]
            for r in range(i + 1, n):
                f = m[r][i] / m[i][i]
                if f:
                    for c in range(i, n):
                        m[r][c] -= f * m[i][c]
        return det

    def __matmul__(self, other: "PMatrix") -> "PMatrix":
        if self.p != other.p or self.n != other.n:
            raise ValueError("incompatible matrices")
        cols = list(zip(*other.entries))
        return PMatrix(
            [[sum(a * b for a, b in zip(row, col)) for col in cols] for row in self.entries],
            self.p,
            check=False,
        )

    def inverse(self) -> "PMatrix":
        n = self.n
        aug = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(self.entries)]
        for i in range(n):
            piv = next(r for r in range(i, n) if aug[r][i] != 0)
            aug[i], aug[piv] = aug[piv], aug[i]
            inv = 1 / aug[i][i]
            aug[i] = [x * inv for x in aug[i]]
            for r in range(n):
                if r != i and aug[r][i] != 0:
                    f = aug[r][i]
                    aug[r] = [a - f * b for a, b in zip(aug[r], aug[i])]
        return PMatrix([row[n:] for row in aug], self.p, check=False)

    def scaled(self) -> tuple[list[list[int]], int]:
        """Integer matrix A and exponent E with ``self == A / p**E``."""
        E = max(0, -min(vp(x, self.p) for row in self.entries for x in row))
        scale = self.p**E
        return [[int(x * scale) for x in row] for row in self.entries], E

    def is_integral(self) -> bool:
        return all(x.denominator == 1 for row in self.entries for x in row)

    def __eq__(self, other):
        return isinstance(other, PMatrix) and self.p == other.p and self.entries == other.entries

    def __hash__(self):
        return hash((self.p, self.entries))

    def __repr__(self) -> str:
        body = ", ".join("[" + ", ".join(str(x) for x in r) + "]" for r in self.entries)
        return f"PMatrix([{body}], p={self.p})"


def _elementary_valuations(A: Sequence[Sequence[int]], p: int) -> list[int]:
    """Valuations of the elementary divisors of an integer matrix (ascending)."""
    n = len(A)
    d = [0]
    for k in range(1, n + 1):
        best = _VINF
        for rows, cols in _minor_index(n, k):
            minor = _bareiss_det([[A[r][c] for c in cols] for r in rows])
            if minor:
                best = min(best, vp(minor, p))
        d.append(best)
    return [d[k] - d[k - 1] for k in range(1, n + 1)]


def cartan(g: PMatrix) -> Coweight:
    """Dominant coweight t with g in K nu^{-1}(t) K."""
    A, E = g.scaled()
    ev = [e - E for e in _elementary_valuations(A, g.p)]
    return Coweight(sorted(ev, reverse=True))


def denominator(g: PMatrix) -> int:
    """p**(-n_l) for the Cartan label of g; equals 1 exactly on K_p."""
    return g.p ** (-cartan(g)[-1])


def _reduce_mod_pk(x: Fraction, p: int, k: int) -> int:
    """The integer in [0, p^k) congruent to the p-adic integer x mod p^k."""
    mod = p**k
    return (x.numerator * pow(x.denominator, -1, mod)) % mod if k > 0 else 0


def coset_normal_form(g: PMatrix) -> tuple[int, tuple[tuple[int, ...], ...]]:
    """Canonical form of the coset ``g K``.

    Returns ``(E, A)`` where ``A`` is the lower-triangular Hermite form of
    ``p**E g`` under integral column operations, with ``E = -n_l`` of the
    Cartan label of ``g``.  Two matrices lie in the same left coset of K
    exactly when their normal forms agree.
    """
    p, n = g.p, g.n
    E = -cartan(g)[-1]
    scale = Fraction(p) ** E
    M = [[x * scale for x in row] for row in g.entries]
    # Column operations over Z_(p): entries stay in Q with p-integral
    # ratios, which is enough to realise GL_n(Z_p) column moves.
    for i in range(n):
        j = min(range(i, n), key=lambda c: vp(M[i][c], p))
        if j != i:
            for r in range(n):
                M[r][i], M[r][j] = M[r][j], M[r][i]
        piv = M[i][i]
        v = vp(piv, p)
        unit = piv / Fraction(p) ** v
        for r in range(n):
            M[r][i] /= unit
        for c in range(i + 1, n):
            f = M[i][c] / M[i][i]
            if f:
                for r in range(n):
                    M[r][c] -= f * M[r][i]
    b = [vp(M[i][i], p) for i in range(n)]
    # Reduce below-diagonal entries, right to left, using later columns.
    for j in range(n - 2, -1, -1):
        for k in range(j + 1, n):
            x = M[k][j]
            target = _reduce_mod_pk(x, p, b[k])
            f = (x - target) / M[k][k]
            if f:
                for r in range(k, n):
                    M[r][j] -= f * M[r][k]
    A = tuple(tuple(int(M[i][j]) if j <= i else 0 for j in range(n)) for i in range(n))
    return E, A


def unipotent_reps(n: int, p: int, bound: int) -> list[PMatrix]:
    """Lower unitriangular matrices with entries a / p**bound, 0 <= a < p**bound.

    These are coset representatives of the unipotents with entries of
    valuation >= -bound, modulo the integral unipotents; each carries unit
    Haar mass.
    """
    positions = [(i, j) for i in range(1, n) for j in range(i)]
    q = p**bound
    reps = []
    for values in itertools.product(range(q), repeat=len(positions)):
        rows = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
        for (i, j), a in zip(positions, values):
            rows[i][j] = Fraction(a, q)
        reps.append(PMatrix(rows, p, check=False))
    return reps


# ---------------------------------------------------------------------------
# Batched integer machinery for enumeration.


def _vp_array(x: np.ndarray, p: int) -> np.ndarray:
    y = np.abs(x)
    out = np.zeros(y.shape, dtype=np.int64)
    zero = y == 0
    out[zero] = _VINF
    live = ~zero
    while True:
        hit = live & (y % p == 0)
        if not hit.any():
            return out
        out[hit] += 1
        y = np.where(hit, y // p, y)


def _batch_det(M: np.ndarray) -> np.ndarray:
    """Leibniz determinant over the leading batch axis (k <= 4)."""
    k = M.shape[-1]
    if k == 1:
        return M[..., 0, 0].copy()
    if k == 2:
        return M[..., 0, 0] * M[..., 1, 1] - M[..., 0, 1] * M[..., 1, 0]
    total = np.zeros(M.shape[:-2], dtype=M.dtype)
    for perm in itertools.permutations(range(k)):
        inversions = sum(1 for a, b in itertools.combinations(perm, 2) if a > b)
        term = M[..., 0, perm[0]]
        for r in range(1, k):
            term = term * M[..., r, perm[r]]
        total = total - term if inversions % 2 else total + term
    return total


def cartan_batch(A: np.ndarray, E: int, p: int) -> np.ndarray:
    """Cartan labels (rows of n-coordinates) of ``A[b] / p**E`` for a batch.

    Determinant 1 is assumed, so minors of size n are not evaluated.
    """
    A = np.asarray(A)
    N, n, _ = A.shape
    bound = int(np.abs(A).max()) if A.size else 0
    if bound and factorial(n - 1) * float(bound) ** (n - 1) >= 2.0**62:
        A = A.astype(object)
    d = np.zeros((N, n + 1), dtype=np.int64)
    for k in range(1, n):
        best = np.full(N, _VINF, dtype=np.int64)
        for rows, cols in _minor_index(n, k):
            sub = A[:, list(rows)][:, :, list(cols)]
            minor = _batch_det(sub)
            if minor.dtype == object:
                val = np.array([vp(int(x), p) for x in minor], dtype=np.int64)
            else:
                val = _vp_array(minor, p)
            np.minimum(best, val, out=best)
        d[:, k] = best - k * E
    d[:, n] = 0
    ev = np.diff(d, axis=1)
    return -np.sort(-ev, axis=1)


@dataclass(frozen=True)
class CosetTable:
    """All left K-cosets inside ``K nu^{-1}(label) K``.

    ``matrices[i] / p**scale`` is the Hermite-form representative of the
    i-th coset; ``torus[i]`` is its Iwasawa torus part t (so the coset is
    ``z_t u K``).
    """

    label: Coweight
    p: int
    scale: int
    matrices: np.ndarray
    torus: tuple[Coweight, ...]

    def __len__(self) -> int:
        return len(self.torus)

    def pmatrix(self, i: int) -> PMatrix:
        q = Fraction(self.p) ** self.scale
        return PMatrix([[Fraction(int(x)) / q for x in row] for row in self.matrices[i]], self.p)

    def torus_counts(self) -> Counter:
        return Counter(self.torus)


def _hermite_candidates(b: Sequence[int], p: int) -> np.ndarray:
    """All lower Hermite integer matrices with diagonal p**b_i."""
    n = len(b)
    positions = [(i, j) for i in range(1, n) for j in range(i)]
    ranges = [p ** b[i] for i, _ in positions]
    total = int(np.prod(ranges, dtype=np.int64)) if ranges else 1
    A = np.zeros((total, n, n), dtype=np.int64)
    for i in range(n):
        A[:, i, i] = p ** b[i]
    if positions:
        idx = np.indices(ranges, dtype=np.int64).reshape(len(ranges), -1)
        for (i, j), col in zip(positions, idx):
            A[:, i, j] = col
    return A


def _torus_box(lam: Coweight) -> list[Coweight]:
    lo, hi = lam[-1], lam[0]
    n = len(lam)
    out = []
    for head in itertools.product(range(lo, hi + 1), repeat=n - 1):
        last = -sum(head)
        if lo <= last <= hi:
            out.append(Coweight(head + (last,)))
    return out


def _check_label(lam: Sequence[int], budget: int | None) -> Coweight:
    lam = Coweight(lam)
    if not is_dominant(lam):
        raise ValueError(f"{lam} is not dominant")
    if budget is not None and height(lam) > budget:
        raise BudgetExceeded(lam, budget)
    return lam


@lru_cache(maxsize=64)
def _double_coset_reps(lam: Coweight, p: int) -> CosetTable:
    E = -lam[-1]
    blocks, torus = [], []
    for t in _torus_box(lam):
        b = [ti + E for ti in t]
        cand = _hermite_candidates(b, p)
        labels = cartan_batch(cand, E, p)
        keep = np.all(labels == np.array(lam), axis=1)
        if keep.any():
            blocks.append(cand[keep])
            torus.extend([t] * int(keep.sum()))
    matrices = np.concatenate(blocks) if blocks else np.zeros((0, len(lam), len(lam)), dtype=np.int64)
    return CosetTable(lam, p, E, matrices, tuple(torus))


def double_coset_reps(lam: Sequence[int], p: int, budget: int | None = DEFAULT_HEIGHT_BUDGET) -> CosetTable:
    """Enumerate the cosets ``gK`` contained in ``K nu^{-1}(lam) K``.

    For each torus part t in the box ``lam_l <= t_i <= lam_0`` every
    Hermite matrix with diagonal ``p**(t_i - lam_l)`` is tested with the
    exact minor criterion; the survivors are the cosets.
    """
    return _double_coset_reps(_check_label(lam, budget), int(p))


def coset_count(lam: Sequence[int], p: int, budget: int | None = DEFAULT_HEIGHT_BUDGET) -> int:
    """Haar mass of ``K nu^{-1}(lam) K`` (K has mass 1)."""
    return len(double_coset_reps(lam, p, budget))


def coset_count_formula(lam: Sequence[int], p: int) -> int:
    """Closed form ``p^{<lam, 2 rho>} W(1/p) / W_lam(1/p)`` of :func:`coset_count`.

    ``W_lam`` is the Poincare polynomial of the stabilizer of lam.
    """
    lam = Coweight(lam)
    q = Fraction(1, p)

    def poincare(sizes):
        out = Fraction(1)
        for m in sizes:
            for k in range(1, m + 1):
                out *= (1 - q**k) / (1 - q)
        return out

    value = p ** delta_exponent(lam) * poincare([len(lam)]) / poincare(Counter(lam).values())
    if value.denominator != 1:
        raise ArithmeticError(f"non-integral coset count for {lam}")
    return int(value)


def double_coset_convolve(
    lam: Sequence[int], mu: Sequence[int], p: int, budget: int | None = DEFAULT_HEIGHT_BUDGET
) -> dict[Coweight, int]:
    """Structure constants of ``chi_lam * chi_mu = sum_nu c_nu chi_nu``.

    Brute force: multiply every coset representative of ``lam`` with every
    one of ``mu`` and classify the products by Cartan label.  Each coset of
    ``K nu K`` is hit exactly ``c_nu`` times, so the tallies are divisible
    by the coset counts; a failed division raises ``ArithmeticError``.
    The divisors come from :func:`coset_count_formula`, so labels of the
    products are never enumerated.
    """
    lam = _check_label(lam, budget)
    mu = _check_label(mu, budget)
    left = double_coset_reps(lam, p, None)
    right = double_coset_reps(mu, p, None)
    if len(mu) != len(lam):
        raise ValueError("rank mismatch")
    E = left.scale + right.scale
    tally: Counter = Counter()
    B = right.matrices.astype(object) if _overflow_risk(left, right) else right.matrices
    for A in left.matrices:
        prod = np.einsum("ij,bjk->bik", A.astype(B.dtype), B)
        labels = cartan_batch(prod, E, p)
        uniq, counts = np.unique(labels, axis=0, return_counts=True)
        for row, c in zip(uniq, counts):
            tally[Coweight(int(x) for x in row)] += int(c)
    out = {}
    for nu in sorted(tally, key=Coweight.sort_key):
        size = coset_count_formula(nu, p)
        c, r = divmod(tally[nu], size)
        if r:
            raise ArithmeticError(f"tally {tally[nu]} for {nu} not divisible by {size}")
        out[nu] = c
    total = sum(c * coset_count_formula(nu, p) for nu, c in out.items())
    if total != len(left) * len(right):
        raise ArithmeticError("mass multiplicativity failed")
    log.debug("convolved %s * %s over %d products", lam, mu, len(left) * len(right))
    return out


def _overflow_risk(left: CosetTable, right: CosetTable) -> bool:
    n = left.matrices.shape[1]
    a = int(np.abs(left.matrices).max()) if len(left) else 1
    b = int(np.abs(right.matrices).max()) if len(right) else 1
    entry = n * a * b
    return factorial(n) * float(entry) ** (n - 1) >= 2.0**62

