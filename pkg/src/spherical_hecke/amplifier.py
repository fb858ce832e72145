"""Amplifier kernels: a Hecke-algebra element with one large eigenvalue.

Construction, for a spectral parameter s and scale N:

* ``g_{L,q}`` on Z is the coefficient sequence of ``D_L(q z)``, with
  ``D_L(z) = sum_{|k|<=L} e^{kz}``; on T it is the product over
  m-coordinates.
* ``f~ = (1/|W_0|) sum_w g(w t) - g(0) delta_0`` (W_0-average, origin removed).
* q = (q1, 0, ..., 0) with q1 in a window ``[N/(c L), N/L]`` chosen so that
  ``|hat-omega_s(f~)| >= L^l``.
* ``k~_N = f~ * f~^* - (f~ * f~^*)(0) delta_0`` and ``K_N = k~_N / (f~ * f~^*)(0)``.

Then ``hat-omega_{s'}(K_N) + 1 = |hat-omega_{s'}(f~)|^2 / normalizer >= 0`` for
every unitary s', and at s the eigenvalue is large once L is.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .kronecker import WindowExhausted, scan_window
from .lattice import (
    Coweight,
    convert_coords,
    from_m_coords,
    weyl_act,
    weyl_group,
)
from .satake import TorusFunction, adjoint, convolve, spectral_eval, torus_from_json, torus_to_json
from .spectral import QuadratureGrid, SpectralParameter, exact_group_values, inverse_transform

log = logging.getLogger(__name__)

__all__ = [
    "NoAdmissibleQ1",
    "AmplifierError",
    "AmplifierKernel",
    "VerificationReport",
    "dirichlet_g",
    "dirichlet_kernel",
    "g_tuple",
    "f_tilde",
    "closed_form_eigenvalue",
    "phase_vector",
    "q1_window",
    "kronecker_candidate",
    "choose_q1",
    "build_kernel",
    "shell_constants",
    "shell_check",
    "coefficient_bound_check",
    "positivity_identity_check",
    "verify_kernel",
    "verify_sweep",
    "eigenvalue_lower_bound_check",
]


class NoAdmissibleQ1(RuntimeError):
    """No q1 in the window reaches |hat-omega_s(f~)| >= L^l."""

    def __init__(self, L: int, N: int, window: tuple[int, int], best_q1: int | None, best_value: float):
        super().__init__(
            f"L={L}, N={N}: no admissible q1 in {list(window)} "
            f"(best q1={best_q1}, |value|={best_value:.4g}, target {L}^l)"
        )
        self.L, self.N, self.window = L, N, window
        self.best_q1, self.best_value = best_q1, best_value


class AmplifierError(RuntimeError):
    """L escalation reached L_max without the eigenvalue target."""


# ---------------------------------------------------------------------------
# Coefficients.


def dirichlet_g(L: int, q: int, k: int) -> int:
    if L < 1 or q < 0:
        raise ValueError("need L >= 1 and q >= 0")
    if q == 0:
        return 2 * L + 1 if k == 0 else 0
    return int(k % q == 0 and abs(k) <= q * L)


def dirichlet_kernel(L: int, z: complex) -> complex:
    return complex(sum(np.exp(k * z) for k in range(-L, L + 1)))


def g_tuple(L: int, q: Sequence[int], m: Sequence[int]) -> int:
    out = 1
    for qi, mi in zip(q, m):
        out *= dirichlet_g(L, qi, mi)
    return out


def _g_support(L: int, q: Sequence[int]):
    axes = []
    for qi in q:
        axes.append([0] if qi == 0 else [qi * y for y in range(-L, L + 1)])
    grids = np.meshgrid(*axes, indexing="ij")
    return [tuple(int(x) for x in row) for row in np.stack([g.reshape(-1) for g in grids], axis=1)]


def f_tilde(L: int, q: Sequence[int]) -> TorusFunction:
    """W_0-averaged ``g_{L,q}`` with the origin removed (exact rationals)."""
    q = tuple(int(x) for x in q)
    n = len(q) + 1
    ws = weyl_group(n)
    acc: dict[Coweight, Fraction] = {}
    for m in _g_support(L, q):
        value = g_tuple(L, q, m)
        if not value:
            continue
        u = from_m_coords(m)
        for w in ws:
            t = weyl_act(w, u)
            acc[t] = acc.get(t, 0) + Fraction(value, len(ws))
    zero = Coweight.zero(n)
    acc[zero] = acc.get(zero, 0) - g_tuple(L, q, (0,) * len(q))
    return TorusFunction(acc, n=n, weyl_invariant=True)


def _unit_translation(n: int) -> Coweight:
    return from_m_coords((1,) + (0,) * (n - 2))


def closed_form_eigenvalue(L: int, q1: int, s: SpectralParameter) -> complex:
    """(2L+1)^{l-1} ((1/|W_0|) sum_w D_L(q1 z_w) - 1), z_w the m_1-exponent of w s."""
    n = s.n
    e = np.asarray(_unit_translation(n), dtype=float)
    ws = weyl_group(n)
    total = 0j
    for w in ws:
        z = complex(np.dot(e, s.log_xi[list(w.inverse())]))
        total += dirichlet_kernel(L, q1 * z)
    return (2 * L + 1) ** (n - 2) * (total / len(ws) - 1)


def phase_vector(s: SpectralParameter) -> np.ndarray:
    """alpha_w = y_w / 2 pi for every w (y_w the imaginary part of z_w)."""
    e = np.asarray(_unit_translation(s.n), dtype=float)
    return np.array([np.dot(e, s.log_xi[list(w.inverse())]).imag / (2 * np.pi)
                     for w in weyl_group(s.n)])


def q1_window(L: int, N: int, factor: float = 4.0) -> tuple[int, int]:
    """[ceil(N / (factor L)), floor(N / L)]."""
    return max(1, math.ceil(N / (factor * L))), N // L


def kronecker_candidate(L: int, N: int, s: SpectralParameter, factor: float = 4.0) -> int | None:
    """First q1 in the window with ``|e^{i q1 k y_w} - 1| <= 1/2`` for all |k| <= L, w.

    Uses ``||q1 alpha_w|| < 1/(4 pi L)``, which implies the phase condition.
    """
    lo, hi = q1_window(L, N, factor)
    if lo > hi:
        return None
    try:
        return scan_window(phase_vector(s), 1 / (4 * np.pi * L), lo, hi).q
    except WindowExhausted:
        return None


def choose_q1(L: int, N: int, s: SpectralParameter, factor: float = 4.0) -> int:
    """Smallest q1 in the window with ``|hat-omega_s(f~_{L,(q1,0,..)})| >= L^l``."""
    lo, hi = q1_window(L, N, factor)
    target = L ** (s.n - 1)
    best_q1, best = None, -math.inf
    for q1 in range(lo, hi + 1):
        value = abs(closed_form_eigenvalue(L, q1, s))
        if value >= target * (1 - 1e-12):
            return q1
        if value > best:
            best_q1, best = q1, value
    raise NoAdmissibleQ1(L, N, (lo, hi), best_q1, best)


# ---------------------------------------------------------------------------
# Kernel.


@dataclass
class AmplifierKernel:
    k_tilde: TorusFunction
    normalizer: Fraction
    L: int
    N: int
    q1: int
    s: SpectralParameter
    epsilon: float
    p: int
    f: TorusFunction = field(repr=False)
    candidate: int | None = None

    @property
    def n(self) -> int:
        return self.k_tilde.n

    @property
    def K(self) -> TorusFunction:
        """The normalized kernel K_N."""
        return self.k_tilde / self.normalizer

    @property
    def eigenvalue(self) -> float:
        return complex(spectral_eval(self.K, self.s)).real

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "p": self.p,
            "params": {
                "L": self.L,
                "N": self.N,
                "q1": self.q1,
                "epsilon": self.epsilon,
                "theta": [float(x) for x in self.s.theta] if self.s.is_unitary else None,
                "zeta_re": [float(z.real) for z in self.s.zeta],
                "zeta_im": [float(z.imag) for z in self.s.zeta],
                "kronecker_candidate": self.candidate,
            },
            "normalizer": str(self.normalizer),
            "k_tilde": torus_to_json(self.k_tilde),
            "f_tilde": torus_to_json(self.f),
        }

    @classmethod
    def from_json(cls, data: dict) -> "AmplifierKernel":
        params = data["params"]
        zeta = np.array(params["zeta_re"]) + 1j * np.array(params["zeta_im"])
        return cls(
            k_tilde=torus_from_json(data["k_tilde"]),
            normalizer=Fraction(data["normalizer"]),
            L=int(params["L"]),
            N=int(params["N"]),
            q1=int(params["q1"]),
            s=SpectralParameter.from_zeta(zeta),
            epsilon=float(params["epsilon"]),
            p=int(data["p"]),
            f=torus_from_json(data["f_tilde"]),
            candidate=params.get("kronecker_candidate"),
        )

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


def _assemble(L: int, q1: int, n: int) -> tuple[TorusFunction, TorusFunction, Fraction]:
    f = f_tilde(L, (q1,) + (0,) * (n - 2))
    ff = convolve(f, adjoint(f))
    zero = Coweight.zero(n)
    normalizer = Fraction(ff[zero])
    k = ff - TorusFunction.delta(zero, normalizer)
    return f, k, normalizer


def build_kernel(L: int, N: int, s: SpectralParameter, epsilon: float = 0.5, p: int = 2,
                 L_max: int = 8, factor: float = 4.0) -> AmplifierKernel:
    """Assemble k~_N, raising L until hat-omega_s(K_N) >= 1/epsilon."""
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    last_error: Exception | None = None
    for LL in range(L, L_max + 1):
        try:
            q1 = choose_q1(LL, N, s, factor)
        except NoAdmissibleQ1 as exc:
            log.info("%s; raising L", exc)
            last_error = exc
            continue
        f, k, normalizer = _assemble(LL, q1, s.n)
        kernel = AmplifierKernel(k, normalizer, LL, N, q1, s, epsilon, p, f,
                                 kronecker_candidate(LL, N, s, factor))
        shell = shell_check(kernel)
        if not shell["pass"]:
            raise AmplifierError(f"shell structure violated: {shell['violations']}")
        if kernel.eigenvalue >= 1 / epsilon:
            return kernel
        log.info("L=%d q1=%d: eigenvalue %.4g below %.4g; raising L", LL, q1, kernel.eigenvalue, 1 / epsilon)
        last_error = AmplifierError(
            f"eigenvalue below 1/epsilon for every L in [{L}, {L_max}] (last {kernel.eigenvalue:.4g})"
        )
    if isinstance(last_error, NoAdmissibleQ1):
        raise last_error
    raise last_error or AmplifierError("empty L range")


# ---------------------------------------------------------------------------
# Exact structural checks.


def shell_constants(n: int) -> tuple[float, float]:
    """(c, c') with ``c ||m||_inf <= ||t|| <= c' ||m||_inf`` on T."""
    return 2 / math.sqrt(n), 2 * math.sqrt(n)


def shell_check(kernel: AmplifierKernel) -> dict:
    """Divisibility by q1 and the norm shell, with squared norms compared exactly.

    Partial sums of a zero-sum vector are at most half its l1 norm, so
    ``||m||_inf <= sqrt(n) ||t|| / 2``; and ``|n_i| <= 2 ||m||_inf`` bounds
    ``||t||`` by ``2 sqrt(n) ||m||_inf``.
    """
    n, q1, L = kernel.n, kernel.q1, kernel.L
    c, c2 = shell_constants(n)
    bad_div, bad_low, bad_high = [], [], []
    for t in kernel.k_tilde.support():
        m = convert_coords(t)
        sq = sum(x * x for x in t)
        if any(x % q1 for x in m):
            bad_div.append(list(t))
        if n * sq < 4 * q1 * q1:
            bad_low.append(list(t))
        if sq > 4 * n * (2 * q1 * L) ** 2:
            bad_high.append(list(t))
    norms = [math.sqrt(sum(x * x for x in t)) for t in kernel.k_tilde.support()]
    return {
        "q1": q1,
        "c": c,
        "c_prime": c2,
        "norm_low": q1 * c,
        "norm_high": 2 * q1 * L * c2,
        "observed_min": min(norms, default=0.0),
        "observed_max": max(norms, default=0.0),
        "violations": {"divisibility": bad_div, "low": bad_low, "high": bad_high},
        "pass": not (bad_div or bad_low or bad_high),
    }


def coefficient_bound_check(kernel: AmplifierKernel) -> dict:
    """max |k~| <= |W_0| 2L (max |f~|)^2 and |supp f~| <= |W_0| 2L."""
    W = math.factorial(kernel.n)
    fmax = max((abs(v) for v in kernel.f.terms.values()), default=0)
    kmax = max((abs(v) for v in kernel.k_tilde.terms.values()), default=0)
    bound = W * 2 * kernel.L * fmax * fmax
    return {
        "max_k": float(kmax),
        "bound": float(bound),
        "support_f": len(kernel.f),
        "support_bound": W * 2 * kernel.L,
        "normalizer_direct": float(kernel.f.l2_squared()),
        "pass": kmax <= bound and len(kernel.f) <= W * 2 * kernel.L
        and kernel.f.l2_squared() == kernel.normalizer,
    }


def _exact_sign_character(theta_halves: Sequence[int]):
    """s with theta in {0, 1/2}^l, evaluated exactly as +-1."""

    def s(t):
        return (-1) ** (sum(a * b for a, b in zip(convert_coords(t), theta_halves)) % 2)

    return s


def positivity_identity_check(kernel: AmplifierKernel, grid: QuadratureGrid, tol: float = 1e-9) -> dict:
    """hat-omega(k~) + normalizer == |hat-omega(f~)|^2: exact at theta in {0,1/2}^l, numeric on the grid."""
    import itertools

    exact_ok = True
    for halves in itertools.product((0, 1), repeat=kernel.n - 1):
        s = _exact_sign_character(halves)
        lhs = spectral_eval(kernel.k_tilde, s) + kernel.normalizer
        rhs = spectral_eval(kernel.f, s) ** 2
        exact_ok &= lhs == rhs
    kt = grid.transform(kernel.k_tilde)
    ft = grid.transform(kernel.f)
    err = float(np.max(np.abs(kt + float(kernel.normalizer) - np.abs(ft) ** 2)))
    scale = float(kernel.normalizer)
    return {"exact": bool(exact_ok), "grid_max_error": err, "pass": bool(exact_ok and err <= tol * scale)}


# ---------------------------------------------------------------------------
# Verification.


@dataclass
class VerificationReport:
    N: int
    L: int
    q1: int
    chi_support: list
    max_log_denominator: int
    support_r: float
    supnorm_exact: float
    supnorm_quadrature: float
    quadrature_agreement: float
    supnorm_delta_fit: float
    eigenvalue: float
    min_spectral: float
    shell: dict
    coefficients: dict
    positivity: dict
    passes: dict
    failures: list

    @property
    def ok(self) -> bool:
        return all(self.passes.values())

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "L": self.L,
            "q1": self.q1,
            "support_r": self.support_r,
            "max_log_denominator": self.max_log_denominator,
            "chi_support": self.chi_support,
            "supnorm_exact": self.supnorm_exact,
            "supnorm_quadrature": self.supnorm_quadrature,
            "quadrature_agreement": self.quadrature_agreement,
            "supnorm_delta_fit": self.supnorm_delta_fit,
            "eigenvalue": self.eigenvalue,
            "min_spectral": self.min_spectral,
            "shell": self.shell,
            "coefficients": self.coefficients,
            "positivity": self.positivity,
            "pass": self.passes,
            "failures": self.failures,
        }


def verify_kernel(kernel: AmplifierKernel, grid: QuadratureGrid, sample_size: int = 16,
                  quadrature_tol: float = 1e-6, positivity_slack: float = 1e-8,
                  seed: int = 0) -> VerificationReport:
    """Check the four kernel properties; failures are recorded, not raised."""
    failures = []
    passes = {}
    p, N = kernel.p, kernel.N
    norm = kernel.normalizer

    # (1) chi-basis expansion: group-side values of K_N, exact.
    values = {nu: v / norm for nu, v in exact_group_values(kernel.k_tilde, p).items()}
    support = [nu for nu, v in values.items() if v != 0]
    max_den = max((-nu[-1] for nu in support), default=0)
    passes["support"] = bool(support)
    if not support:
        failures.append("chi-basis support is empty")

    # (2) sup norm, exact and by quadrature on a sample of double cosets.
    sup_exact = max((abs(float(v)) for v in values.values()), default=0.0)
    ranked = sorted(support, key=lambda nu: -abs(values[nu]))
    rest = [nu for nu in values if nu not in set(ranked[: sample_size // 2])]
    rng = np.random.default_rng(seed)
    extra = [rest[i] for i in rng.permutation(len(rest))[: sample_size - len(ranked[: sample_size // 2])]]
    sample = ranked[: sample_size // 2] + extra
    quad = {nu: inverse_transform(kernel.k_tilde, nu, grid, p) / float(norm) for nu in sample}
    sup_quad = max((abs(v) for v in quad.values()), default=0.0)
    agreement = max((abs(quad[nu] - float(values[nu])) for nu in sample), default=0.0)
    passes["supnorm"] = sup_exact < 1 and agreement <= quadrature_tol
    if not passes["supnorm"]:
        failures.append(f"sup-norm check: exact {sup_exact:.3g}, quadrature disagreement {agreement:.3g}")
    delta_single = -math.log(sup_exact) / N if sup_exact > 0 else math.inf

    # (3) eigenvalue at the construction parameter.
    eig = kernel.eigenvalue
    passes["eigenvalue"] = eig >= 1 / kernel.epsilon
    if not passes["eigenvalue"]:
        failures.append(f"eigenvalue {eig:.6g} < {1 / kernel.epsilon:.6g}")

    # (4) spectral lower bound over the unitary grid.
    spectrum = grid.transform(kernel.K).real
    min_spec = float(spectrum.min())
    passes["positivity"] = min_spec >= -1 - positivity_slack
    if not passes["positivity"]:
        failures.append(f"min spectral value {min_spec:.12g} < -1")

    shell = shell_check(kernel)
    coeffs = coefficient_bound_check(kernel)
    ident = positivity_identity_check(kernel, grid)
    passes["shell"] = shell["pass"]
    passes["coefficients"] = coeffs["pass"]
    passes["positivity_identity"] = ident["pass"]
    for name, entry in (("shell", shell), ("coefficients", coeffs), ("positivity_identity", ident)):
        if not entry["pass"]:
            failures.append(f"{name} check failed")

    return VerificationReport(
        N=N, L=kernel.L, q1=kernel.q1,
        chi_support=[[list(nu), str(values[nu])] for nu in support],
        max_log_denominator=max_den,
        support_r=max_den / N,
        supnorm_exact=sup_exact,
        supnorm_quadrature=float(sup_quad),
        quadrature_agreement=float(agreement),
        supnorm_delta_fit=delta_single,
        eigenvalue=eig,
        min_spectral=min_spec,
        shell=shell,
        coefficients=coeffs,
        positivity=ident,
        passes={k: bool(v) for k, v in passes.items()},
        failures=failures,
    )


def verify_sweep(Ns: Sequence[int], s: SpectralParameter, L: int = 3, p: int = 2,
                 epsilon: float = 0.5, resolution: int = 4096, sample_size: int = 16,
                 L_max: int = 8, factor: float = 4.0, r_spread: float = 2.0) -> dict:
    """Build and verify kernels over an N-sweep; fit the sup-norm decay rate.

    The decay exponent is the least-squares slope of ``-log sup|K_N|``
    against N.  The support ratio r counts as stable when
    ``max r / min r <= r_spread``.
    """
    grid = QuadratureGrid(s.n, resolution)
    reports = []
    for N in Ns:
        kernel = build_kernel(L, N, s, epsilon, p, L_max, factor)
        reports.append(verify_kernel(kernel, grid, sample_size))
    Ns_arr = np.array([r.N for r in reports], dtype=float)
    logs = np.array([math.log(r.supnorm_exact) for r in reports])
    slope, intercept = np.polyfit(Ns_arr, logs, 1)
    sups = [r.supnorm_exact for r in reports]
    rs = [r.support_r for r in reports]
    monotone = all(b < a for a, b in zip(sups, sups[1:]))
    stable = min(rs) > 0 and max(rs) / min(rs) <= r_spread
    return {
        "reports": [r.to_json() for r in reports],
        "supnorm_delta_fit": float(-slope),
        "supnorm_intercept": float(intercept),
        "supnorm_monotone": monotone,
        "support_r": rs,
        "support_r_stable": stable,
        "pass": {
            "delta_positive": bool(-slope > 0),
            "monotone": monotone,
            "r_stable": stable,
            "kernels": all(r.ok for r in reports),
        },
    }


def eigenvalue_lower_bound_check(L: int, kernel: AmplifierKernel,
                                 low: float = 0.1, high: float = 10.0) -> dict:
    """The ratios hat-omega_s(k~)/L^{2l} and normalizer/L^{2l-1}."""
    l = kernel.n - 1
    eig = complex(spectral_eval(kernel.k_tilde, kernel.s)).real
    first = eig / L ** (2 * l)
    second = float(kernel.normalizer) / L ** (2 * l - 1)
    return {
        "L": L,
        "eigenvalue_ratio": first,
        "normalizer_ratio": second,
        "pass": bool(first >= low and second <= high),
    }
