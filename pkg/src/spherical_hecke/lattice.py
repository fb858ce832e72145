"""Coweight lattice and finite Weyl group of type A_{n-1}.

A coweight is stored by its n-coordinates ``(n_0, ..., n_l)`` (integers with
zero sum).  The m-coordinates express the same element in the coroot basis
``E_{i-1} - E_i``::

    m_i = n_0 + ... + n_{i-1}          (i = 1..l)
    n   = (m_1, m_2 - m_1, ..., m_l - m_{l-1}, -m_l)

The finite Weyl group W_0 = S_n acts by permuting n-coordinates.  The
ordering used throughout is the lexicographic order on m-coordinates, which
is the same as "t >= 0 iff the first non-zero m_i is positive".
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

__all__ = [
    "Coweight",
    "WeylElement",
    "convert_coords",
    "from_m_coords",
    "weyl_act",
    "dominant_rep",
    "height",
    "norm",
    "compare",
    "delta_exponent",
    "is_dominant",
    "weyl_group",
    "weyl_orbit",
    "dominant_coweights",
    "hilbert_basis",
    "decompose",
    "dominance_leq",
]


class Coweight(tuple):
    """An element of the translation lattice ``T``, in n-coordinates.

    Behaves like a tuple of ints for hashing and indexing, but ``+``, ``-``
    and unary ``-`` are the group operations of the lattice.
    """

    __slots__ = ()

    def __new__(cls, coords: Iterable[int]) -> "Coweight":
        values = tuple(int(c) for c in coords)
        if len(values) < 2:
            raise ValueError("a coweight needs at least two coordinates")
        if sum(values) != 0:
            raise ValueError(f"coordinates {values} do not sum to zero")
        return super().__new__(cls, values)

    @classmethod
    def zero(cls, n: int) -> "Coweight":
        return cls((0,) * n)

    @property
    def n(self) -> int:
        return len(self)

    @property
    def m(self) -> tuple[int, ...]:
        return convert_coords(self)

    def __add__(self, other):
        if not isinstance(other, Coweight):
            return NotImplemented
        if len(other) != len(self):
            raise ValueError("rank mismatch")
        return Coweight(a + b for a, b in zip(self, other))

    def __sub__(self, other):
        if not isinstance(other, Coweight):
            return NotImplemented
        if len(other) != len(self):
            raise ValueError("rank mismatch")
        return Coweight(a - b for a, b in zip(self, other))

    def __neg__(self):
        return Coweight(-a for a in self)

    def __mul__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        return Coweight(k * a for a in self)

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"Coweight({list(self)})"

    # tuple's ordering would be misleading; use ``compare`` or ``sort_key``.
    def __lt__(self, other):
        return NotImplemented

    __le__ = __gt__ = __ge__ = __lt__

    def sort_key(self) -> tuple[int, ...]:
        return convert_coords(self)


class WeylElement(tuple):
    """A permutation ``w`` of ``{0, ..., n-1}`` in one-line notation.

    ``weyl_act(w, t)`` puts coordinate ``t[w[i]]`` in position ``i``.
    Composition follows the action: ``(w1 * w2)`` acts as ``w1`` after ``w2``.
    """

    __slots__ = ()

    def __new__(cls, perm: Iterable[int]) -> "WeylElement":
        values = tuple(int(i) for i in perm)
        if sorted(values) != list(range(len(values))):
            raise ValueError(f"{values} is not a permutation")
        return super().__new__(cls, values)

    @classmethod
    def identity(cls, n: int) -> "WeylElement":
        return cls(range(n))

    def __mul__(self, other):
        if not isinstance(other, WeylElement):
            return NotImplemented
        # (self*other).t = self.(other.t): position i reads other.t[self[i]]
        # = t[other[self[i]]]
        return WeylElement(other[i] for i in self)

    def inverse(self) -> "WeylElement":
        inv = [0] * len(self)
        for i, j in enumerate(self):
            inv[j] = i
        return WeylElement(inv)

    def __repr__(self) -> str:
        return f"WeylElement({list(self)})"


def convert_coords(t: Sequence[int]) -> tuple[int, ...]:
    """n-coordinates to m-coordinates (partial sums, dropping the last)."""
    if sum(t) != 0:
        raise ValueError(f"coordinates {tuple(t)} do not sum to zero")
    return tuple(itertools.accumulate(t))[:-1]


def from_m_coords(m: Sequence[int]) -> Coweight:
    """Inverse of :func:`convert_coords`."""
    m = [int(x) for x in m]
    padded = [0] + m + [0]
    return Coweight(padded[i + 1] - padded[i] for i in range(len(m) + 1))


def weyl_act(w: WeylElement, t: Coweight) -> Coweight:
    if len(w) != len(t):
        raise ValueError("rank mismatch")
    return Coweight(t[i] for i in w)


def dominant_rep(t: Coweight) -> tuple[Coweight, WeylElement]:
    """Dominant representative ``t+`` and the stable sorting permutation."""
    order = sorted(range(len(t)), key=lambda i: -t[i])
    w = WeylElement(order)
    return weyl_act(w, t), w


def is_dominant(t: Sequence[int]) -> bool:
    return all(t[i] >= t[i + 1] for i in range(len(t) - 1))


def height(t: Coweight) -> int:
    return sum(abs(x) for x in convert_coords(t))


def norm(t: Sequence[int]) -> float:
    return math.sqrt(sum(x * x for x in t))


def compare(t1: Coweight, t2: Coweight) -> int:
    """Total order on T: -1, 0 or 1 by the first non-zero m-coordinate of t1 - t2."""
    for x in convert_coords(Coweight(a - b for a, b in zip(t1, t2))):
        if x:
            return 1 if x > 0 else -1
    return 0


def delta_exponent(t: Sequence[int]) -> int:
    """Exponent e with delta(t) = p**e, i.e. sum_{i<j} (n_i - n_j).

    Always even in type A, so delta(t)**(1/2) is an integral power of p.
    """
    l = len(t) - 1
    return sum((l - 2 * i) * x for i, x in enumerate(t))


def dominance_leq(a: Sequence[int], b: Sequence[int]) -> bool:
    """Dominance order on dominant coweights: partial sums of a bounded by those of b."""
    return all(x <= y for x, y in zip(convert_coords(a), convert_coords(b)))


@lru_cache(maxsize=None)
def weyl_group(n: int) -> tuple[WeylElement, ...]:
    return tuple(WeylElement(p) for p in itertools.permutations(range(n)))


def weyl_orbit(t: Coweight) -> list[Coweight]:
    """Distinct elements of the W_0-orbit of t, sorted by ``compare``."""
    orbit = {Coweight(p) for p in set(itertools.permutations(t))}
    return sorted(orbit, key=Coweight.sort_key)


def dominant_coweights(n: int, max_height: int) -> Iterator[Coweight]:
    """All dominant coweights of height <= max_height, in increasing order.

    Dominant elements have non-negative m-coordinates, so the height is
    just the sum of the m-coordinates.
    """
    l = n - 1
    found = []
    for m in itertools.product(range(max_height + 1), repeat=l):
        if sum(m) > max_height:
            continue
        t = from_m_coords(m)
        if is_dominant(t):
            found.append(t)
    found.sort(key=Coweight.sort_key)
    return iter(found)


@lru_cache(maxsize=None)
def hilbert_basis(n: int, max_height: int | None = None) -> tuple[Coweight, ...]:
    """Minimal generating set of the semigroup of dominant coweights.

    Enumerates dominant elements up to ``max_height`` (default ``2n``) and
    discards every element that is a sum of two non-zero dominant elements.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    bound = 2 * n if max_height is None else max_height
    elements = [t for t in dominant_coweights(n, bound) if any(t)]
    members = set(elements)
    basis = []
    for t in elements:
        reducible = False
        for s in elements:
            if s == t:
                continue
            rest = t - s
            if rest in members:
                reducible = True
                break
        if not reducible:
            basis.append(t)
    return tuple(sorted(basis, key=Coweight.sort_key))


def decompose(t: Coweight, generators: Sequence[Coweight] | None = None) -> list[Coweight]:
    """Write a dominant t as a sum of semigroup generators.

    Greedy: always try the largest generator first, backtracking when the
    remainder leaves the dominant cone.  Raises ValueError if t is not
    dominant.
    """
    if not is_dominant(t):
        raise ValueError(f"{t} is not dominant")
    gens = sorted(generators or hilbert_basis(len(t)), key=Coweight.sort_key, reverse=True)

    @lru_cache(maxsize=None)
    def solve(u: Coweight):
        if not any(u):
            return ()
        for g in gens:
            rest = u - g
            if is_dominant(rest):
                tail = solve(rest)
                if tail is not None:
                    return (g,) + tail
        return None

    result = solve(t)
    if result is None:
        raise ValueError(f"{t} is not in the semigroup generated by {gens}")
    return list(result)
