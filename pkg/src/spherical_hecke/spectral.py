"""Spectral side: unitary characters, the c-function, spherical functions.

A character ``s`` of T is stored through ``L = log xi`` (length n, zero
sum), so ``s(t) = exp(sum_i t_i L_i)``.  In m-coordinates this reads
``s(t) = exp(sum_i m_i zeta_i)`` with ``zeta_i = L_{i-1} - L_i``; for
unitary s, ``zeta = 2 pi i theta``.

Spherical functions.  Macdonald's sum

    M(s, t0) = delta(t0)^{-1/2} sum_w (ws)(t0) c(ws) / sum_w c(ws)

is the value of omega_s at ``z0^{-1}``, where z0 lies in the double coset
labelled ``t0``.  So on the double coset labelled ``nu`` the function takes
the value ``M(s, nu*)`` with ``nu*`` the dual label.  In rank 2 the two
agree.

Quadrature never evaluates the (singular) c-function.  The product
``M(s, t0) |c(s)|^{-2}`` is rewritten, term by term in w, as
``(ws)(t0) / c((ws)^{-1})``, which is real analytic on the unitary torus.

Exact inversion.  Expanding ``1 / c(s^{-1}) = prod_{a>0} (1 - s(a)) / (1 - q s(a))``
(q = 1/p, a over positive coroots) as a power series over the positive
cone gives a q-analogue F of Kostant's partition function, and for a
W_0-invariant f the group-side value on the coset labelled nu is::

    f(nu) = delta(nu)^{-1/2} sum_t f~(t) F(-t - nu*)

a finite, exact sum.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

import mpmath
import numpy as np

from .lattice import (
    Coweight,
    WeylElement,
    convert_coords,
    delta_exponent,
    dominant_coweights,
    height,
    is_dominant,
    weyl_group,
)
from .satake import TorusFunction, dual

__all__ = [
    "SpectralParameter",
    "SingularParameter",
    "QuadratureGrid",
    "c_function",
    "plancherel_density",
    "spherical_value",
    "spherical_function",
    "macdonald_constant",
    "plancherel_pair",
    "inverse_transform",
    "fourier_decay_probe",
    "calibration_constant",
    "partition_function",
    "exact_group_value",
    "exact_group_values",
    "density_csv",
    "spherical_csv",
]

SINGULAR_TOL = 1e-3
PERTURB_RADIUS = 1e-5
MIN_RESOLUTION = 8


class SingularParameter(ValueError):
    """Raised when a quantity is undefined because xi_i = xi_j for some i < j."""


def _as_complex_vector(v) -> np.ndarray:
    return np.asarray(v, dtype=complex).reshape(-1)


@dataclass(frozen=True, eq=False)
class SpectralParameter:
    """A character of T, given by ``log xi`` (normalized to zero sum)."""

    log_xi: np.ndarray = field(repr=False)

    def __post_init__(self):
        L = _as_complex_vector(self.log_xi)
        if L.size < 2:
            raise ValueError("need at least two coordinates")
        object.__setattr__(self, "log_xi", L - L.mean())

    @classmethod
    def from_theta(cls, theta: Sequence[float]) -> "SpectralParameter":
        """Unitary character with xi_{i-1} / xi_i = exp(2 pi i theta_i)."""
        theta = np.asarray(theta, dtype=float).reshape(-1)
        return cls.from_zeta(2j * np.pi * theta)

    @classmethod
    def from_zeta(cls, zeta: Sequence[complex]) -> "SpectralParameter":
        """General character with xi_{i-1} / xi_i = exp(zeta_i)."""
        zeta = _as_complex_vector(zeta)
        L = np.concatenate([[0.0], -np.cumsum(zeta)])
        return cls(L)

    @classmethod
    def trivial(cls, n: int) -> "SpectralParameter":
        return cls(np.zeros(n))

    @classmethod
    def half_delta(cls, n: int, p: int) -> "SpectralParameter":
        """The character t -> delta(t)^{1/2} (value p^{r(t)})."""
        l = n - 1
        return cls(np.array([(l - 2 * i) / 2 * math.log(p) for i in range(n)]))

    @property
    def n(self) -> int:
        return self.log_xi.size

    @property
    def xi(self) -> np.ndarray:
        return np.exp(self.log_xi)

    @property
    def zeta(self) -> np.ndarray:
        return self.log_xi[:-1] - self.log_xi[1:]

    @property
    def theta(self) -> np.ndarray:
        """theta in [0, 1)^l; only meaningful for unitary parameters."""
        return np.mod(self.zeta.imag / (2 * np.pi), 1.0)

    @property
    def is_unitary(self) -> bool:
        return bool(np.all(np.abs(self.log_xi.real) < 1e-12))

    def __call__(self, t: Sequence[int]) -> complex:
        return complex(np.exp(np.dot(np.asarray(t, dtype=float), self.log_xi)))

    def act(self, w: WeylElement) -> "SpectralParameter":
        """w s, i.e. the character with permuted xi."""
        return SpectralParameter(np.array([self.log_xi[i] for i in w]))

    def singular_distance(self) -> float:
        """Distance (in theta units) to the nearest wall xi_i = xi_j."""
        L = self.log_xi
        best = math.inf
        for i in range(self.n):
            for j in range(i + 1, self.n):
                d = L[i] - L[j]
                frac = d.imag / (2 * np.pi)
                wall = math.hypot(d.real / (2 * np.pi), frac - round(frac))
                best = min(best, wall)
        return best

    def __repr__(self) -> str:
        if self.is_unitary:
            return f"SpectralParameter(theta={np.round(self.theta, 12).tolist()})"
        return f"SpectralParameter(zeta={np.round(self.zeta, 12).tolist()})"


# ---------------------------------------------------------------------------
# Pointwise quantities.


def _pairs(n: int):
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


def c_function(s: SpectralParameter, p: int) -> complex:
    """prod_{i<j} (xi_i - xi_j / p) / (xi_i - xi_j)."""
    xi = s.xi
    out = 1.0 + 0j
    for i, j in _pairs(s.n):
        den = xi[i] - xi[j]
        if abs(den) < 1e-300 or s.singular_distance() == 0.0:
            raise SingularParameter(f"{s} lies on the wall xi_{i} = xi_{j}")
        out *= (xi[i] - xi[j] / p) / den
    return complex(out)


def plancherel_density(s: SpectralParameter, p: int) -> float:
    """|c(s)|^{-2} as prod |xi_i - xi_j|^2 / |xi_i - xi_j/p|^2; zero on the walls."""
    xi = s.xi
    out = 1.0
    for i, j in _pairs(s.n):
        out *= abs(xi[i] - xi[j]) ** 2 / abs(xi[i] - xi[j] / p) ** 2
    return float(out)


def macdonald_constant(n: int, p: int) -> Fraction:
    """sum_w c(ws), independent of s: prod_{k=1}^n (1 - q^k) / (1 - q)."""
    q = Fraction(1, p)
    out = Fraction(1)
    for k in range(1, n + 1):
        out *= (1 - q**k) / (1 - q)
    return out


def _macdonald_raw_mp(L, t0, p, ws):
    """Raw sum and normalizer in mpmath at log xi = L."""
    n = len(L)
    xi = [mpmath.exp(x) for x in L]
    raw = mpmath.mpc(0)
    norm = mpmath.mpc(0)
    for w in ws:
        x = [xi[i] for i in w]
        c = mpmath.mpf(1)
        for i, j in _pairs(n):
            c *= (x[i] - x[j] / p) / (x[i] - x[j])
        val = mpmath.exp(mpmath.fsum(t0[k] * L[w[k]] for k in range(n)))
        raw += val * c
        norm += c
    return raw, norm


def _perturbed_value(s: SpectralParameter, t0: Coweight, p: int, h: float) -> complex:
    n = s.n
    ws = weyl_group(n)
    scale = mpmath.mpf(p) ** (-mpmath.mpf(delta_exponent(t0)) / 2)
    with mpmath.workdps(40):
        base = [mpmath.mpc(complex(x)) for x in s.log_xi]

        def average(radius):
            total = mpmath.mpc(0)
            count = 0
            for k in range(n - 1):
                # Directions with positive interval sums stay off every wall.
                d = [mpmath.mpf(0.5)] * (n - 1)
                d[k] += 1
                for sign in (1, -1):
                    zeta = [base[i] - base[i + 1] + sign * 2j * mpmath.pi * radius * d[i]
                            for i in range(n - 1)]
                    L = [mpmath.mpc(0)]
                    for z in zeta:
                        L.append(L[-1] - z)
                    raw, norm = _macdonald_raw_mp(L, t0, p, ws)
                    total += raw / norm
                    count += 1
            return total / count

        a1 = average(mpmath.mpf(h))
        a2 = average(2 * mpmath.mpf(h))
        value = (4 * a1 - a2) / 3 * scale
    return complex(value)


def spherical_value(s: SpectralParameter, t0: Sequence[int], p: int,
                    singular_tol: float = SINGULAR_TOL,
                    radius: float = PERTURB_RADIUS) -> complex:
    """Macdonald's sum M(s, t0), normalized so that M(s, 0) = 1.

    This is omega_s at ``z0^{-1}`` for z0 in the double coset labelled t0.
    Near the walls the value is the limit, computed from a symmetric
    2l-point perturbation of the given radius with Richardson extrapolation.
    """
    t0 = Coweight(t0)
    if len(t0) != s.n:
        raise ValueError("rank mismatch")
    if not is_dominant(t0):
        raise ValueError(f"{t0} is not dominant")
    if not any(t0):
        return 1.0 + 0j
    if s.singular_distance() < singular_tol:
        return _perturbed_value(s, t0, p, radius)
    xi_all = s.xi
    raw = 0j
    norm = 0j
    for w in weyl_group(s.n):
        x = xi_all[list(w)]
        c = 1.0 + 0j
        for i, j in _pairs(s.n):
            c *= (x[i] - x[j] / p) / (x[i] - x[j])
        raw += np.exp(sum(t0[k] * s.log_xi[w[k]] for k in range(s.n))) * c
        norm += c
    return complex(raw / norm * float(p) ** (-delta_exponent(t0) / 2))


def spherical_function(s: SpectralParameter, g, **kw) -> complex:
    """omega_s(g) for a PMatrix g."""
    from .cartan import cartan

    return spherical_value(s, cartan(g.inverse()), g.p, **kw)


# ---------------------------------------------------------------------------
# Quadrature.


@dataclass(frozen=True)
class QuadratureGrid:
    """Uniform tensor grid on [0, 1)^l with equal weights."""

    n: int
    resolution: int

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("n must be at least 2")
        if self.resolution < MIN_RESOLUTION:
            raise ValueError(f"resolution {self.resolution} below the minimum {MIN_RESOLUTION}")

    @property
    def size(self) -> int:
        return self.resolution ** (self.n - 1)

    @cached_property
    def nodes(self) -> np.ndarray:
        axis = np.arange(self.resolution) / self.resolution
        mesh = np.meshgrid(*([axis] * (self.n - 1)), indexing="ij")
        return np.stack([m.reshape(-1) for m in mesh], axis=1)

    @cached_property
    def weights(self) -> np.ndarray:
        return np.full(self.size, 1.0 / self.size)

    @cached_property
    def log_xi(self) -> np.ndarray:
        """log xi at every node, shape (size, n)."""
        zeta = 2j * np.pi * self.nodes
        L = np.concatenate([np.zeros((self.size, 1)), -np.cumsum(zeta, axis=1)], axis=1)
        return L - L.mean(axis=1, keepdims=True)

    def characters(self, support: Sequence[Coweight]) -> np.ndarray:
        """s(t) for every node (rows) and every t (columns)."""
        if not support:
            return np.zeros((self.size, 0), dtype=complex)
        M = np.array([convert_coords(t) for t in support], dtype=float)
        return np.exp(2j * np.pi * (self.nodes @ M.T))

    def transform(self, f: TorusFunction) -> np.ndarray:
        """hat-omega_s(f) at every node."""
        support = f.support()
        vals = np.array([complex(f.terms[t]) for t in support], dtype=complex)
        return self.characters(support) @ vals

    @cached_property
    def _density_cache(self) -> dict:
        return {}

    def density(self, p: int) -> np.ndarray:
        cache = self._density_cache
        if p not in cache:
            xi = np.exp(self.log_xi)
            out = np.ones(self.size)
            for i, j in _pairs(self.n):
                out *= np.abs(xi[:, i] - xi[:, j]) ** 2 / np.abs(xi[:, i] - xi[:, j] / p) ** 2
            cache[p] = out
        return cache[p]

    def spherical_density(self, t0: Sequence[int], p: int) -> np.ndarray:
        """M(s, t0) |c(s)|^{-2} at every node, via the wall-free form."""
        t0 = Coweight(t0)
        L = self.log_xi
        xi = np.exp(L)
        total = np.zeros(self.size, dtype=complex)
        for w in weyl_group(self.n):
            x = xi[:, list(w)]
            term = np.exp(L[:, list(w)] @ np.asarray(t0, dtype=float))
            for i, j in _pairs(self.n):
                # 1 / c(u^{-1}) for u = ws
                term = term * (1 / x[:, i] - 1 / x[:, j]) / (1 / x[:, i] - 1 / (p * x[:, j]))
            total += term
        scale = float(p) ** (-delta_exponent(t0) / 2) / float(macdonald_constant(self.n, p))
        return total * scale


def calibration_constant(grid: QuadratureGrid, p: int) -> float:
    """kappa with kappa * mean(density) = 1, fixing ||chi_0||^2 = 1."""
    return 1.0 / float(np.sum(grid.density(p) * grid.weights))


def _check_rank(grid: QuadratureGrid, *fs: TorusFunction) -> None:
    for f in fs:
        if f.n != grid.n:
            raise ValueError("rank mismatch between function and grid")


def plancherel_pair(f: TorusFunction, g: TorusFunction, grid: QuadratureGrid, p: int) -> complex:
    """Grid approximation of the Plancherel inner product <f, g>."""
    _check_rank(grid, f, g)
    integrand = grid.transform(f) * np.conj(grid.transform(g)) * grid.density(p)
    return complex(calibration_constant(grid, p) * np.sum(integrand * grid.weights))


def inverse_transform(f: TorusFunction, t0: Sequence[int], grid: QuadratureGrid, p: int) -> complex:
    """Group-side value of f on the double coset labelled t0, by quadrature."""
    _check_rank(grid, f)
    t0 = Coweight(t0)
    if not is_dominant(t0):
        raise ValueError(f"{t0} is not dominant")
    # omega_s on the coset labelled t0 is M(s, t0*).
    integrand = grid.transform(f) * grid.spherical_density(dual(t0), p)
    return complex(calibration_constant(grid, p) * np.sum(integrand * grid.weights))


def fourier_decay_probe(t: Sequence[int], t0: Sequence[int], grid: QuadratureGrid, p: int) -> complex:
    """The single coefficient of s(t) omega_s(x) d mu(s), x in the coset labelled t0."""
    t = Coweight(t)
    return inverse_transform(TorusFunction({t: 1.0}, n=len(t)), t0, grid, p)


# ---------------------------------------------------------------------------
# Exact inversion.


def _positive_coroots(n: int) -> tuple[tuple[int, ...], ...]:
    """E_i - E_j (i < j) in m-coordinates: ones in positions i..j-1."""
    out = []
    for i, j in _pairs(n):
        out.append(tuple(1 if i <= k < j else 0 for k in range(n - 1)))
    return tuple(out)


@lru_cache(maxsize=None)
def _partition(n: int, p: int, r: int, mu: tuple[int, ...]) -> Fraction:
    roots = _positive_coroots(n)
    if any(x < 0 for x in mu):
        return Fraction(0)
    if r == len(roots):
        return Fraction(int(not any(mu)))
    q = Fraction(1, p)
    a = roots[r]
    total = _partition(n, p, r + 1, mu)
    k = 1
    rest = tuple(x - y for x, y in zip(mu, a))
    while all(x >= 0 for x in rest):
        total += (q - 1) * q ** (k - 1) * _partition(n, p, r + 1, rest)
        k += 1
        rest = tuple(x - y for x, y in zip(rest, a))
    return total


def partition_function(mu: Sequence[int], p: int) -> Fraction:
    """Coefficient of s(mu) in prod_{a>0} (1 - s(a)) / (1 - s(a)/p)."""
    mu = Coweight(mu)
    return _partition(len(mu), int(p), 0, convert_coords(mu))


def exact_group_value(f: TorusFunction, nu: Sequence[int], p: int) -> Fraction:
    """Value of the Hecke-algebra element with transform f on the coset labelled nu."""
    nu = Coweight(nu)
    if not is_dominant(nu):
        raise ValueError(f"{nu} is not dominant")
    nd = dual(nu)
    total = Fraction(0)
    for t, v in f.terms.items():
        F = partition_function(-t - nd, p)
        if F:
            total += v * F
    return total * Fraction(p) ** (-(delta_exponent(nu) // 2))


def exact_group_values(f: TorusFunction, p: int, max_height: int | None = None) -> dict[Coweight, Fraction]:
    """Group-side values on every double coset where f can be non-zero.

    The value at nu needs ``-t - nu*`` in the positive cone for some t in the
    support, which forces ``height(nu) <= max height of the support``.
    """
    if not (f.weyl_invariant or f.is_weyl_invariant()):
        raise ValueError("exact inversion needs a W_0-invariant function")
    if max_height is None:
        max_height = max((height(t) for t in f.dominant_support()), default=0)
    return {nu: exact_group_value(f, nu, p) for nu in dominant_coweights(f.n, max_height)}


# ---------------------------------------------------------------------------
# CSV emitters.


def density_csv(grid: QuadratureGrid, p: int) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow([f"theta{k + 1}" for k in range(grid.n - 1)] + ["density"])
    for node, d in zip(grid.nodes, grid.density(p)):
        writer.writerow([repr(float(x)) for x in node] + [repr(float(d))])
    return buf.getvalue()


def spherical_csv(s: SpectralParameter, labels: Iterable[Sequence[int]], p: int) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["t0", "re", "im"])
    for t0 in labels:
        v = spherical_value(s, t0, p)
        writer.writerow([" ".join(str(x) for x in t0), repr(v.real), repr(v.imag)])
    return buf.getvalue()
