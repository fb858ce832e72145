"""The acceptance suite, shared by the test-suite and ``selftest``.

Each criterion returns a :class:`Criterion` with a pass flag and a one-line
summary.  ``restrict`` limits the parameter sets to n=2, p=2 for the quick
self-test.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .amplifier import build_kernel, shell_check, verify_sweep
from .cartan import PMatrix, cartan, coset_count, denominator, double_coset_convolve, double_coset_reps
from .kronecker import simultaneous_approx
from .lattice import (
    Coweight,
    compare,
    dominant_coweights,
    from_m_coords,
    height,
    norm,
    weyl_group,
)
from .satake import (
    TorusFunction,
    adjoint,
    convolve,
    dual,
    from_chi,
    half_delta,
    monomial,
    satake_chi,
    spectral_eval,
    to_monomial,
)
from .spectral import (
    QuadratureGrid,
    SpectralParameter,
    fourier_decay_probe,
    inverse_transform,
    plancherel_density,
    plancherel_pair,
    spherical_function,
    spherical_value,
)

__all__ = ["Criterion", "CRITERIA", "run_all", "AMPLIFIER_THETA"]

# Construction parameter for the amplifier sweep.  At N <= 50 the q1 window
# holds a handful of integers, and only parameters close to a wall give a
# q1 that moves with N (see the notes in the README).
AMPLIFIER_THETA = 0.01


@dataclass
class Criterion:
    number: int
    title: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return f"[{flag}] criterion {self.number}: {self.title} ({self.detail}; {self.seconds:.1f}s)"


def _labels_up_to(n: int, h: int) -> list[Coweight]:
    return [t for t in dominant_coweights(n, h) if any(t)]


def satake_homomorphism(restrict: bool = False) -> Criterion:
    cases = [(2, p, [(1, -1), (2, -2)]) for p in ((2,) if restrict else (2, 3, 5))]
    if not restrict:
        cases += [(3, p, _labels_up_to(3, 2)) for p in (2, 3)]
    checked = 0
    bad = []
    worst = 0.0
    for n, p, labels in cases:
        start = time.perf_counter()
        for lam, mu in itertools.combinations_with_replacement(labels, 2):
            lhs = convolve(satake_chi(lam, p), satake_chi(mu, p))
            rhs = from_chi(double_coset_convolve(lam, mu, p), p, n=n)
            checked += 1
            if lhs != rhs:
                bad.append((n, p, lam, mu))
        worst = max(worst, time.perf_counter() - start)
    ok = not bad and worst <= 120
    return Criterion(1, "Satake homomorphism, exact", ok,
                     f"{checked} products exact, slowest (n,p) {worst:.1f}s, mismatches {bad}")


def coset_count_check(restrict: bool = False) -> Criterion:
    out = []
    for p in ((2,) if restrict else (2, 3, 5)):
        lam = (1, -1)
        count = coset_count(lam, p)
        mass = spectral_eval(satake_chi(lam, p), lambda t: half_delta(t, p))
        out.append(count == p * p + p and mass == p * p + p)
    return Criterion(2, "coset count and mass of chi~_(1,-1)", all(out), f"{len(out)} primes exact")


def plancherel_isometry(restrict: bool = False) -> Criterion:
    grid = QuadratureGrid(2, 2048)
    labels = [Coweight((0, 0)), Coweight((1, -1)), Coweight((2, -2))]
    worst_iso = worst_orth = 0.0
    for p in ((2,) if restrict else (2, 3)):
        chis = {lam: satake_chi(lam, p) for lam in labels}
        for lam in labels:
            mass = coset_count(lam, p)
            val = plancherel_pair(chis[lam], chis[lam], grid, p)
            worst_iso = max(worst_iso, abs(val - mass) / mass)
        for a, b in itertools.combinations(labels, 2):
            val = plancherel_pair(chis[a], chis[b], grid, p)
            worst_orth = max(worst_orth, abs(val) / math.sqrt(coset_count(a, p) * coset_count(b, p)))
    ok = worst_iso <= 1e-6 and worst_orth <= 1e-6
    return Criterion(3, "Plancherel isometry at resolution 2048", ok,
                     f"max rel. error {worst_iso:.2e}, max orthogonality {worst_orth:.2e}")


def plancherel_inversion(restrict: bool = False) -> Criterion:
    grid = QuadratureGrid(2, 2048)
    labels = [Coweight((0, 0)), Coweight((1, -1)), Coweight((2, -2))]
    worst = 0.0
    for p in ((2,) if restrict else (2, 3)):
        for lam in labels:
            f = satake_chi(lam, p)
            for t0 in labels:
                worst = max(worst, abs(inverse_transform(f, t0, grid, p) - (t0 == lam)))
    return Criterion(4, "Plancherel inversion", worst <= 1e-6, f"max error {worst:.2e}")


def eigenfunction_identity(restrict: bool = False, seed: int = 5) -> Criterion:
    rng = np.random.default_rng(seed)
    worst = 0.0
    lam = (1, -1)
    for p in ((2,) if restrict else (2, 3)):
        table = double_coset_reps(lam, p)
        reps = [table.pmatrix(i) for i in range(len(table))]
        chi = satake_chi(dual(Coweight(lam)), p)
        for _ in range(20):
            s = SpectralParameter.from_theta(rng.random(1))
            k = int(rng.integers(0, 4))
            x = PMatrix.from_coweight((k, -k), p)
            lhs = sum(spherical_function(s, x @ b) for b in reps)
            rhs = spectral_eval(chi, s) * spherical_function(s, x)
            worst = max(worst, abs(lhs - rhs) / max(abs(rhs), 1e-300))
    closed = [abs(spherical_value(SpectralParameter.from_theta([0.5]), lam, p) + 1 / p) for p in (2, 3)]
    ok = worst <= 1e-8 and max(closed) <= 1e-12
    return Criterion(5, "eigenfunction identity for the coset sum", ok,
                     f"max rel. error {worst:.2e}, closed value error {max(closed):.1e}")


def amplifier_properties(restrict: bool = False) -> Criterion:
    s = SpectralParameter.from_theta([AMPLIFIER_THETA])
    sweep = verify_sweep((20, 30, 40, 50), s, L=3, p=2, epsilon=0.5, resolution=4096)
    reps = sweep["reports"]
    eig_ok = all(r["eigenvalue"] >= 2 for r in reps)
    pos_ok = all(r["min_spectral"] >= -1 - 1e-8 for r in reps)
    ok = (sweep["support_r_stable"] and sweep["supnorm_delta_fit"] > 0 and sweep["supnorm_monotone"]
          and eig_ok and pos_ok and sweep["pass"]["kernels"])
    detail = (f"r={sweep['support_r']}, delta={sweep['supnorm_delta_fit']:.4f}, "
              f"min eigenvalue {min(r['eigenvalue'] for r in reps):.3f}, "
              f"min spectral {min(r['min_spectral'] for r in reps):.12f}")
    return Criterion(6, "amplifier kernel properties over N = 20..50", ok, detail)


def shell_structure(restrict: bool = False) -> Criterion:
    kernels = []
    for theta, Ns in ((AMPLIFIER_THETA, (20, 30, 40, 50)), (0.1, (100, 200, 400)), (0.37, (60, 120))):
        s = SpectralParameter.from_theta([theta])
        kernels += [build_kernel(3, N, s, 0.5, 2) for N in Ns]
    if not restrict:
        s3 = SpectralParameter.from_theta([0.01, 0.013])
        kernels += [build_kernel(2, N, s3, 0.5, 2) for N in (16, 24)]
    reports = [shell_check(k) for k in kernels]
    ok = all(r["pass"] for r in reports)
    return Criterion(7, "shell and divisibility of k~_N", ok,
                     f"{len(kernels)} kernels, {sum(len(k.k_tilde) for k in kernels)} support points")


def kronecker_scan(restrict: bool = False, seed: int = 11) -> Criterion:
    rng = np.random.default_rng(seed)
    runs = fails = 0
    for m, eps, N in itertools.product((1, 2, 3), (0.5, 0.1), (50, 200)):
        for _ in range(1000):
            alpha = rng.uniform(-5, 5, size=m)
            runs += 1
            try:
                res = simultaneous_approx(alpha, eps, N)
                lo, hi = res.window
                if not (lo <= res.q <= hi and res.verify(alpha, eps)):
                    fails += 1
            except Exception:
                fails += 1
    return Criterion(8, "simultaneous approximation in window", fails == 0, f"{runs} runs, {fails} failures")


def fourier_decay(restrict: bool = False) -> Criterion:
    grid = QuadratureGrid(2, 2048)
    ks = np.arange(1, 11)
    mags = np.array([abs(fourier_decay_probe((k, -k), (0, 0), grid, 2)) for k in ks])
    calib = abs(fourier_decay_probe((0, 0), (0, 0), grid, 2) - 1)
    slope, intercept = np.polyfit(ks, np.log(mags), 1)
    fit = intercept + slope * ks
    resid = np.log(mags) - fit
    r2 = 1 - np.sum(resid**2) / np.sum((np.log(mags) - np.log(mags).mean()) ** 2)
    ratio = math.exp(slope)
    ok = ratio < 1 and r2 >= 0.99 and calib <= 1e-12
    return Criterion(9, "Fourier decay probe", ok, f"ratio {ratio:.6f}, R^2 {r2:.6f}")


def _random_pmatrix(rng, n: int, p: int) -> PMatrix:
    g = PMatrix.identity(n, p)
    for _ in range(int(rng.integers(1, 4))):
        i, j = rng.choice(n, size=2, replace=False)
        a = Fraction(int(rng.integers(1, p * p))) * Fraction(p) ** int(rng.integers(-3, 4))
        e = [[Fraction(int(r == c)) for c in range(n)] for r in range(n)]
        e[i][j] = a
        g = g @ PMatrix(e, p, check=False)
    k = rng.integers(-2, 3, size=n - 1)
    exps = list(k) + [-int(k.sum())]
    return PMatrix.diag(exps, p) @ g


def property_suites(restrict: bool = False, seed: int = 3, per_family: int = 2000) -> Criterion:
    rng = np.random.default_rng(seed)
    failures: dict[str, int] = {}
    counts: dict[str, int] = {}

    def record(name: str, ok: bool) -> None:
        counts[name] = counts.get(name, 0) + 1
        if not ok:
            failures[name] = failures.get(name, 0) + 1

    def rand_cw(n: int, r: int = 6) -> Coweight:
        return from_m_coords(rng.integers(-r, r + 1, size=n - 1))

    for _ in range(per_family):
        n = int(rng.choice([2, 3, 4]))
        s = SpectralParameter.from_theta(rng.random(n - 1))
        w = weyl_group(n)[int(rng.integers(math.factorial(n)))]
        t0 = Coweight(sorted(rand_cw(n, 3), reverse=True))
        p = int(rng.choice([2, 3, 5]))
        a, b = spherical_value(s.act(w), t0, p), spherical_value(s, t0, p)
        da, db = plancherel_density(s.act(w), p), plancherel_density(s, p)
        record("weyl-invariance", abs(a - b) <= 1e-10 and abs(da - db) <= 1e-12 * max(1.0, db)
               and abs(b) <= 1 + 1e-10)

    for _ in range(per_family):
        n = int(rng.choice([2, 3, 4]))
        x, y, z, u = (rand_cw(n) for _ in range(4))
        ok = compare(x, y) == -compare(y, x)
        ok &= (compare(x, y) == 0) == (x == y)
        if compare(x, y) <= 0 and compare(y, z) <= 0:
            ok &= compare(x, z) <= 0
        ok &= compare(x + u, y + u) == compare(x, y)
        record("total-order", bool(ok))

    for _ in range(per_family):
        n = int(rng.choice([2, 3]))
        p = int(rng.choice([2, 3]))
        g, h = _random_pmatrix(rng, n, p), _random_pmatrix(rng, n, p)
        dg, dh = denominator(g), denominator(h)
        l = n - 1
        ok = denominator(g @ h) <= dg * dh and denominator(g.inverse()) <= dg**l
        t = cartan(g)
        logd = -t[-1]
        ok &= norm(t) / ((n - 1) * math.sqrt(n)) <= logd + 1e-12 and logd <= norm(t) + 1e-12
        record("denominator-bounds", bool(ok))

    pool = {(2, 2): _labels_up_to(2, 3), (2, 3): _labels_up_to(2, 3), (3, 2): _labels_up_to(3, 3)[:3]}
    keys = list(pool)
    for _ in range(per_family):
        n, p = keys[int(rng.integers(len(keys)))]
        lam = pool[(n, p)][int(rng.integers(len(pool[(n, p)])))]
        ok = adjoint(satake_chi(lam, p)) == satake_chi(dual(lam), p)
        support = [rand_cw(n, 3) for _ in range(3)]
        f = TorusFunction({t: complex(*rng.normal(size=2)) for t in support}, n=n)
        ok &= adjoint(adjoint(f)) == f
        record("adjoint", bool(ok))

    for _ in range(per_family):
        n = int(rng.choice([2, 3]))
        t1 = Coweight(sorted(rand_cw(n, 2), reverse=True))
        t2 = Coweight(sorted(rand_cw(n, 2), reverse=True))
        if height(t1) > 3 or height(t2) > 3:
            t1 = Coweight(sorted(rand_cw(n, 1), reverse=True))
            t2 = Coweight(sorted(rand_cw(n, 1), reverse=True))
        coeffs = to_monomial(convolve(monomial(t1), monomial(t2)))
        top = t1 + t2
        ok = coeffs.get(top) == 1
        ok &= all(compare(t, top) < 0 for t in coeffs if t != top)
        record("monomial-triangularity", bool(ok))

    total = sum(counts.values())
    ok = not failures and total >= 10_000
    return Criterion(10, "property suites", ok, f"{total} cases, failures {failures or 0}")


CRITERIA: list[Callable[..., Criterion]] = [
    satake_homomorphism,
    coset_count_check,
    plancherel_isometry,
    plancherel_inversion,
    eigenfunction_identity,
    amplifier_properties,
    shell_structure,
    kronecker_scan,
    fourier_decay,
    property_suites,
]


def run_all(restrict: bool = False, echo: Callable[[str], None] | None = None) -> list[Criterion]:
    results = []
    for fn in CRITERIA:
        start = time.perf_counter()
        try:
            res = fn(restrict=restrict)
        except Exception as exc:  # a crash is a failed criterion, not a crashed suite
            number = CRITERIA.index(fn) + 1
            res = Criterion(number, fn.__name__.replace("_", " "), False, f"raised {exc!r}")
        res.seconds = time.perf_counter() - start
        results.append(res)
        if echo:
            echo(res.line())
    return results
