import math

import numpy as np
import pytest

from spherical_hecke.kronecker import (
    ApproxResult,
    WindowExhausted,
    distance_to_integers,
    equidistribution_defect,
    scan_window,
    simultaneous_approx,
    window_constants,
)

GOLDEN = (1 + math.sqrt(5)) / 2


def test_window_constants():
    assert window_constants(1, 0.1) == (0.025, 20.0)
    assert window_constants(2, 0.1) == (0.025, 800.0)
    assert window_constants(3, 0.5) == (0.125, 256.0)
    with pytest.raises(ValueError):
        window_constants(0, 0.1)


def test_zero_vector_gives_window_minimum():
    res = simultaneous_approx([0.0], 0.1, 50)
    assert res.q == res.window[0] == 2 and res.achieved == 0


def test_golden_ratio():
    res = simultaneous_approx([GOLDEN], 0.1, 50)
    assert res.q == 5
    assert res.achieved == pytest.approx(abs(5 * GOLDEN - 8))
    assert res.verify([GOLDEN], 0.1)


def test_sqrt2_sqrt3():
    alpha = [math.sqrt(2), math.sqrt(3)]
    res = simultaneous_approx(alpha, 0.1, 200)
    lo, hi = res.window
    assert lo <= res.q <= hi
    assert float(distance_to_integers(res.q * np.array(alpha)).max()) == res.achieved < 0.1
    assert res.q == 41


def test_input_validation():
    with pytest.raises(ValueError):
        simultaneous_approx([], 0.1, 10)
    with pytest.raises(ValueError):
        simultaneous_approx([0.3], 0.6, 10)
    with pytest.raises(ValueError):
        simultaneous_approx([0.3], 0.1, 0)
    with pytest.raises(ValueError):
        scan_window([0.3], 0.1, 1, 10, mode="fast")
    with pytest.raises(ValueError):
        scan_window([0.3], 0.1, 5, 4)


def test_window_exhausted_reports_best():
    with pytest.raises(WindowExhausted) as info:
        scan_window([0.5], 0.1, 1, 1)
    assert info.value.best.q == 1 and info.value.best.achieved == pytest.approx(0.5)


def test_result_json():
    res = ApproxResult(3, 0.01, (1, 10))
    assert res.to_json() == {"q": 3, "achieved": 0.01, "window": [1, 10]}


def test_best_mode_is_monotone():
    rng = np.random.default_rng(0)
    for _ in range(200):
        alpha = rng.random(2)
        prev = math.inf
        for hi in (50, 100, 400, 1600):
            res = scan_window(alpha, 0.5, 1, hi, mode="best")
            assert res.achieved <= prev
            prev = res.achieved


@pytest.mark.parametrize("eps", [0.5, 0.2, 0.1])
def test_dirichlet_agreement(eps):
    rng = np.random.default_rng(int(eps * 100))
    bound = math.ceil(1 / eps)
    for _ in range(1000):
        alpha = [rng.uniform(-3, 3)]
        res = scan_window(alpha, eps, 1, bound)
        assert 1 <= res.q <= bound and res.achieved < eps
        full = simultaneous_approx(alpha, eps, bound)
        assert full.verify(alpha, eps)


def test_defect_examples():
    assert equidistribution_defect([1 / 3], 100, 3) == 1.0
    assert equidistribution_defect([0.25, 0.5], 37, 4) == 1.0
    assert equidistribution_defect([0.0, 0.0], 10, 1) == 1.0
    assert equidistribution_defect([math.sqrt(2), math.sqrt(3)], 10**4, 5) < 0.05
    with pytest.raises(ValueError):
        equidistribution_defect([0.1], 10, 0)


def test_defect_matches_direct_sum():
    alpha = np.array([0.1234, 0.777])
    N, K = 500, 2
    ns = np.arange(1, N + 1)
    best = 0.0
    for k1 in range(-K, K + 1):
        for k2 in range(-K, K + 1):
            if (k1, k2) == (0, 0):
                continue
            val = abs(np.exp(2j * np.pi * ns * (k1 * alpha[0] + k2 * alpha[1])).mean())
            best = max(best, val)
    assert equidistribution_defect(alpha, N, K) == pytest.approx(best, abs=1e-12)
