"""Simultaneous Diophantine approximation by windowed scanning.

For alpha in R^m and a scale N we look for q in a window ``[c' N, c N]``
with ``||q alpha|| < eps`` (distance to the nearest integer, maximised over
coordinates).  The window constants grow with the dimension the way the
inductive existence argument does: the one-dimensional Dirichlet window is
widened by a factor ``ceil(4/eps)`` for every extra coordinate.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = [
    "ApproxResult",
    "WindowExhausted",
    "window_constants",
    "distance_to_integers",
    "scan_window",
    "simultaneous_approx",
    "equidistribution_defect",
]

_CHUNK = 1 << 16


def distance_to_integers(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return np.abs(x - np.rint(x))


def _norm_q_alpha(q: int, alpha: np.ndarray) -> float:
    if alpha.size == 0:
        return 0.0
    return float(distance_to_integers(q * alpha).max())


@dataclass(frozen=True)
class ApproxResult:
    q: int
    achieved: float
    window: tuple[int, int]

    def __post_init__(self):
        lo, hi = self.window
        if not lo <= self.q <= hi:
            raise ValueError(f"q={self.q} outside window {self.window}")

    def verify(self, alpha: Sequence[float], eps: float) -> bool:
        """Recompute ||q alpha|| and check it against the stored value and eps."""
        value = _norm_q_alpha(self.q, np.asarray(alpha, dtype=float).reshape(-1))
        return value == self.achieved and value < eps

    def to_json(self) -> dict:
        return {"q": self.q, "achieved": self.achieved, "window": list(self.window)}


class WindowExhausted(RuntimeError):
    """No admissible q in the window; carries the best q seen."""

    def __init__(self, best: ApproxResult, eps: float):
        super().__init__(
            f"no q in {list(best.window)} with ||q alpha|| < {eps}; best q={best.q} "
            f"achieves {best.achieved:.3g}"
        )
        self.best = best
        self.eps = eps


def window_constants(m: int, eps: float) -> tuple[float, float]:
    """(c', c) with c'(1) = eps/4, c(1) = 2/eps and c(m) = c(1) * ceil(4/eps)**(m-1)."""
    if m < 1:
        raise ValueError("dimension must be positive")
    widen = math.ceil(4 / eps)
    return eps / 4, (2 / eps) * widen ** (m - 1)


def scan_window(alpha: Sequence[float], eps: float, lo: int, hi: int,
                mode: str = "first") -> ApproxResult:
    """Scan q = lo..hi.

    ``mode="first"`` returns the smallest q with ``||q alpha|| < eps``;
    ``mode="best"`` returns the minimiser of ``||q alpha||`` (smallest q on
    ties).  Raises WindowExhausted when nothing qualifies.
    """
    alpha = np.asarray(alpha, dtype=float).reshape(-1)
    if mode not in ("first", "best"):
        raise ValueError(f"unknown mode {mode!r}")
    if lo > hi:
        raise ValueError(f"empty window [{lo}, {hi}]")
    best_q, best_val = lo, math.inf
    start, chunk = lo, 256
    while start <= hi:
        qs = np.arange(start, min(start + chunk, hi + 1), dtype=np.int64)
        start += chunk
        chunk = min(2 * chunk, _CHUNK)
        if alpha.size:
            vals = distance_to_integers(np.outer(qs, alpha)).max(axis=1)
        else:
            vals = np.zeros(qs.size)
        if mode == "first":
            hits = np.flatnonzero(vals < eps)
            if hits.size:
                q = int(qs[hits[0]])
                return ApproxResult(q, _norm_q_alpha(q, alpha), (lo, hi))
        k = int(np.argmin(vals))
        if vals[k] < best_val:
            best_q, best_val = int(qs[k]), float(vals[k])
    best = ApproxResult(best_q, _norm_q_alpha(best_q, alpha), (lo, hi))
    if mode == "best" and best.achieved < eps:
        return best
    raise WindowExhausted(best, eps)


def simultaneous_approx(alpha: Sequence[float], eps: float, N: int,
                        mode: str = "first") -> ApproxResult:
    """q in ``[ceil(c' N), floor(c N)]`` with ``||q alpha|| < eps``."""
    alpha = np.asarray(alpha, dtype=float).reshape(-1)
    if alpha.size < 1:
        raise ValueError("alpha must have at least one coordinate")
    if not 0 < eps <= 0.5:
        raise ValueError("eps must lie in (0, 1/2]")
    if N < 1:
        raise ValueError("N must be positive")
    c_lo, c_hi = window_constants(alpha.size, eps)
    lo = max(1, math.ceil(c_lo * N))
    hi = math.floor(c_hi * N)
    result = scan_window(alpha, eps, lo, hi, mode=mode)
    if not result.verify(alpha, eps):
        raise AssertionError("scan result failed recomputation")
    return result


def equidistribution_defect(alpha: Sequence[float], N: int, K: int) -> float:
    """max over 0 < ||k||_inf <= K of |N^{-1} sum_{n=1}^N e(n k.alpha)|."""
    alpha = np.asarray(alpha, dtype=float).reshape(-1)
    if K < 1 or N < 1:
        raise ValueError("N and K must be positive")
    ks = np.array([k for k in itertools.product(range(-K, K + 1), repeat=alpha.size) if any(k)])
    beta = ks @ alpha
    frac = beta - np.rint(beta)
    out = np.ones(beta.size)
    generic = np.abs(frac) > 1e-12
    x = frac[generic]
    out[generic] = np.abs(np.sin(np.pi * N * x) / (N * np.sin(np.pi * x)))
    return float(out.max())
