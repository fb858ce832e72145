"""Finitely supported functions on T and the Satake transform.

Values are kept exact (``Fraction``) wherever they come from counting; the
transform of a double-coset indicator is::

    chi~_lam(t) = delta(t)^{1/2} * #{cosets z_t u K inside K lam K}

with lower unitriangular ``u``.  Because ``2r(t)`` is always even in type A,
``delta(t)^{1/2}`` is an integral power of p and every coefficient is a
rational number.
"""

from __future__ import annotations

import numbers
from collections import defaultdict
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Mapping

from .cartan import DEFAULT_HEIGHT_BUDGET, coset_count, double_coset_reps, vp
from .lattice import (
    Coweight,
    delta_exponent,
    dominant_rep,
    is_dominant,
    weyl_orbit,
)

__all__ = [
    "TorusFunction",
    "ConventionError",
    "convolve",
    "adjoint",
    "dual",
    "satake_chi",
    "monomial",
    "spectral_eval",
    "to_monomial",
    "from_monomial",
    "to_chi",
    "from_chi",
    "change_basis",
    "half_delta",
    "torus_to_json",
    "torus_from_json",
]


class ConventionError(AssertionError):
    """A computed transform failed a self-consistency check."""


def half_delta(t, p: int) -> Fraction:
    """delta(t)^{1/2} = p^{r(t)} as an exact rational."""
    return Fraction(p) ** (delta_exponent(t) // 2)


def _is_zero(v) -> bool:
    return v == 0


class TorusFunction:
    """A finitely supported function T -> C.

    ``terms`` maps coweights to numbers (``Fraction`` for exact data, complex
    or float otherwise).  Zero values are dropped.  When
    ``weyl_invariant=True`` the constructor checks constancy on W_0-orbits.
    """

    __slots__ = ("terms", "n", "weyl_invariant")

    def __init__(self, terms: Mapping | Iterable = (), n: int | None = None, weyl_invariant: bool = False):
        items = terms.items() if isinstance(terms, Mapping) else terms
        clean: dict[Coweight, numbers.Number] = {}
        for t, v in items:
            t = t if isinstance(t, Coweight) else Coweight(t)
            if not _is_zero(v):
                clean[t] = v
        dims = {len(t) for t in clean}
        if n is None:
            if len(dims) != 1:
                raise ValueError("rank must be given for an empty or mixed support")
            n = dims.pop()
        elif dims and dims != {n}:
            raise ValueError(f"support does not live in rank {n}")
        self.terms = clean
        self.n = n
        self.weyl_invariant = bool(weyl_invariant)
        if self.weyl_invariant and not self.is_weyl_invariant():
            raise ValueError("values are not constant on W_0-orbits")

    @classmethod
    def delta(cls, t: Iterable[int], value=Fraction(1)) -> "TorusFunction":
        t = Coweight(t)
        return cls({t: value}, n=len(t), weyl_invariant=not any(t))

    @classmethod
    def zero(cls, n: int) -> "TorusFunction":
        return cls({}, n=n, weyl_invariant=True)

    def __getitem__(self, t) -> numbers.Number:
        return self.terms.get(Coweight(t), 0)

    def __call__(self, t) -> numbers.Number:
        return self[t]

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self):
        return iter(self.support())

    def items(self):
        return [(t, self.terms[t]) for t in self.support()]

    def support(self) -> list[Coweight]:
        return sorted(self.terms, key=Coweight.sort_key)

    def is_weyl_invariant(self) -> bool:
        for t, v in self.terms.items():
            for u in weyl_orbit(t):
                if self.terms.get(u, 0) != v:
                    return False
        return True

    def dominant_support(self) -> list[Coweight]:
        return [t for t in self.support() if is_dominant(t)]

    def map(self, fn: Callable) -> "TorusFunction":
        return TorusFunction({t: fn(v) for t, v in self.terms.items()}, n=self.n,
                             weyl_invariant=self.weyl_invariant)

    def _combine(self, other: "TorusFunction", sign: int) -> "TorusFunction":
        if self.n != other.n:
            raise ValueError("rank mismatch")
        out = dict(self.terms)
        for t, v in other.terms.items():
            out[t] = out.get(t, 0) + sign * v
        return TorusFunction(out, n=self.n,
                             weyl_invariant=self.weyl_invariant and other.weyl_invariant)

    def __add__(self, other):
        if not isinstance(other, TorusFunction):
            return NotImplemented
        return self._combine(other, 1)

    def __sub__(self, other):
        if not isinstance(other, TorusFunction):
            return NotImplemented
        return self._combine(other, -1)

    def __neg__(self):
        return self.map(lambda v: -v)

    def __mul__(self, c):
        if isinstance(c, TorusFunction):
            return convolve(self, c)
        if not isinstance(c, numbers.Number):
            return NotImplemented
        return self.map(lambda v: c * v)

    __rmul__ = __mul__

    def __truediv__(self, c):
        return self.map(lambda v: v / c)

    def __eq__(self, other):
        if not isinstance(other, TorusFunction):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def __hash__(self):
        return hash((self.n, frozenset(self.terms.items())))

    def max_abs(self) -> float:
        return max((abs(v) for v in self.terms.values()), default=0.0)

    def l2_squared(self):
        """sum |f(t)|^2, exact for rational values."""
        total = 0
        for v in self.terms.values():
            total += v * v.conjugate() if isinstance(v, complex) else v * v
        return total.real if isinstance(total, complex) else total

    def __repr__(self) -> str:
        body = ", ".join(f"{list(t)}: {v}" for t, v in self.items())
        flag = ", invariant" if self.weyl_invariant else ""
        return f"TorusFunction({{{body}}}{flag})"


def convolve(f: TorusFunction, g: TorusFunction) -> TorusFunction:
    """(f*g)(t) = sum_{t'} f(t - t') g(t')."""
    if f.n != g.n:
        raise ValueError("rank mismatch")
    acc: dict[Coweight, numbers.Number] = defaultdict(int)
    for t1, v1 in f.terms.items():
        for t2, v2 in g.terms.items():
            acc[t1 + t2] += v1 * v2
    return TorusFunction(acc, n=f.n, weyl_invariant=f.weyl_invariant and g.weyl_invariant)


def _conj(v):
    return v.conjugate()


def adjoint(f: TorusFunction) -> TorusFunction:
    """f*(t) = conj(f(-t))."""
    return TorusFunction({-t: _conj(v) for t, v in f.terms.items()}, n=f.n,
                         weyl_invariant=f.weyl_invariant)


def dual(t: Coweight) -> Coweight:
    """Dominant representative of -t (the label of the inverse double coset)."""
    return dominant_rep(-Coweight(t))[0]


def spectral_eval(f: TorusFunction, s) -> numbers.Number:
    """hat-omega_s(f) = sum_t f(t) s(t).  Exact when ``s`` evaluates exactly."""
    total = 0
    for t, v in f.terms.items():
        total += v * s(t)
    return total


@lru_cache(maxsize=256)
def _satake_chi(lam: Coweight, p: int, modulus_sign: int) -> TorusFunction:
    table = double_coset_reps(lam, p, None)
    terms = {}
    for t, count in table.torus_counts().items():
        terms[t] = Fraction(count) * Fraction(p) ** (modulus_sign * delta_exponent(t) // 2)
    return TorusFunction(terms, n=len(lam))


def satake_chi(lam, p: int, budget: int | None = DEFAULT_HEIGHT_BUDGET,
               modulus_sign: int = 1, check: bool = True) -> TorusFunction:
    """Satake transform of the indicator of ``K nu^{-1}(lam) K``.

    Integrates over lower unitriangular unipotents with the modulus factor
    ``delta(t)^{modulus_sign/2}``.  With the default ``+1`` the result is
    W_0-invariant and its value at ``s = delta^{1/2}`` equals the Haar mass
    of the double coset; both are asserted when ``check`` is set.
    """
    lam = Coweight(lam)
    if not is_dominant(lam):
        raise ValueError(f"{lam} is not dominant")
    double_coset_reps(lam, p, budget)  # budget check
    f = _satake_chi(lam, int(p), modulus_sign)
    if not check:
        return f
    if not f.is_weyl_invariant():
        raise ConventionError(f"transform of {lam} is not W_0-invariant")
    mass = sum(v * half_delta(t, p) for t, v in f.terms.items())
    if mass != coset_count(lam, p, None):
        raise ConventionError(f"mass check failed for {lam}: {mass}")
    return TorusFunction(f.terms, n=f.n, weyl_invariant=True)


def monomial(t) -> TorusFunction:
    """<t>: indicator of the W_0-orbit of t."""
    t = Coweight(t)
    return TorusFunction({u: Fraction(1) for u in weyl_orbit(t)}, n=len(t), weyl_invariant=True)


# ---------------------------------------------------------------------------
# Basis changes.


def _require_invariant(f: TorusFunction) -> None:
    if not (f.weyl_invariant or f.is_weyl_invariant()):
        raise ValueError("basis change needs a W_0-invariant function")


def to_monomial(f: TorusFunction) -> dict[Coweight, numbers.Number]:
    """Coefficients of f in the orbit basis <t>, keyed by dominant t."""
    _require_invariant(f)
    return {t: f.terms[t] for t in f.dominant_support()}


def from_monomial(coeffs: Mapping, n: int) -> TorusFunction:
    out = TorusFunction.zero(n)
    for t, c in coeffs.items():
        out = out + monomial(t) * c
    return out


def to_chi(f: TorusFunction, p: int, method: str = "satake",
           budget: int | None = DEFAULT_HEIGHT_BUDGET) -> dict[Coweight, numbers.Number]:
    """Coefficients of f in the basis chi~_lam of double-coset transforms.

    ``method="satake"`` back-substitutes along the total order, using the
    counted transforms and their leading coefficient delta(t)^{1/2}.
    ``method="inversion"`` reads the coefficients off the exact Plancherel
    inversion (the group-side values), which needs no enumeration and so
    scales to large supports.
    """
    _require_invariant(f)
    if method == "inversion":
        from .spectral import exact_group_values

        return {nu: v for nu, v in exact_group_values(f, p).items() if v != 0}
    if method != "satake":
        raise ValueError(f"unknown method {method!r}")
    remaining = f
    out: dict[Coweight, numbers.Number] = {}
    while remaining.terms:
        top = remaining.dominant_support()[-1]
        chi = satake_chi(top, p, budget)
        lead = chi[top]
        if lead != half_delta(top, p):
            raise ConventionError(f"leading coefficient of chi~_{list(top)} is {lead}")
        a = remaining[top] / lead
        out[top] = a
        remaining = remaining - chi * a
    return dict(sorted(out.items(), key=lambda kv: kv[0].sort_key()))


def from_chi(coeffs: Mapping, p: int, n: int | None = None,
             budget: int | None = DEFAULT_HEIGHT_BUDGET) -> TorusFunction:
    if n is None:
        n = len(next(iter(coeffs)))
    out = TorusFunction.zero(n)
    for lam, c in coeffs.items():
        out = out + satake_chi(lam, p, budget) * c
    return out


def change_basis(f: TorusFunction, direction: str, p: int | None = None, **kw):
    """Coefficient map of f in the monomial or chi basis.

    ``direction`` is ``"chi->monomial"`` (orbit-basis coefficients) or
    ``"monomial->chi"`` (double-coset coefficients; needs ``p``).
    """
    direction = direction.replace("→", "->")
    if direction == "chi->monomial":
        return to_monomial(f)
    if direction == "monomial->chi":
        if p is None:
            raise ValueError("p is required for the chi basis")
        return to_chi(f, p, **kw)
    raise ValueError(f"unknown direction {direction!r}")


# ---------------------------------------------------------------------------
# JSON.  Exact values are written as rational strings ``re * p^(k/2)`` with
# the doubled exponent ``k``; inexact ones as float reprs with ``k = 0``.


def _encode(x, p: int | None) -> tuple[str, int]:
    if isinstance(x, (int, Fraction)):
        x = Fraction(x)
        if p is None or x == 0:
            return str(x), 0
        k = vp(x, p)
        return str(x / Fraction(p) ** k), 2 * k
    return repr(float(x)), 0


def _decode(text: str):
    if any(c in text for c in ".eEn"):
        return float(text)
    return Fraction(text)


def torus_to_json(f: TorusFunction, p: int | None = None) -> dict:
    terms = []
    for t, v in f.items():
        if isinstance(v, complex):
            re, k = _encode(v.real, None)
            im, _ = _encode(v.imag, None)
        else:
            re, k = _encode(v, p)
            im = "0"
        terms.append({"t": list(t), "re": re, "im": im, "p_half_power": k})
    return {"invariant": f.weyl_invariant, "n": f.n, "terms": terms}


def torus_from_json(data: Mapping, p: int | None = None) -> TorusFunction:
    out = {}
    for term in data["terms"]:
        re, im, k = _decode(term["re"]), _decode(term["im"]), int(term["p_half_power"])
        if k:
            if p is None:
                raise ValueError("p is needed to decode p-power scaled terms")
            if k % 2:
                raise ValueError("odd half-powers of p are not rational")
            re = re * Fraction(p) ** (k // 2)
        value = re if im == 0 else complex(re, im)
        out[Coweight(term["t"])] = value
    n = data.get("n")
    return TorusFunction(out, n=n, weyl_invariant=bool(data.get("invariant", False)))
