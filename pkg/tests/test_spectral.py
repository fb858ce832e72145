import cmath
import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from spherical_hecke.cartan import PMatrix, coset_count, double_coset_reps
from spherical_hecke.lattice import Coweight, dominant_coweights, weyl_group
from spherical_hecke.satake import TorusFunction, dual, satake_chi, spectral_eval
from spherical_hecke.spectral import (
    QuadratureGrid,
    SingularParameter,
    SpectralParameter,
    c_function,
    calibration_constant,
    density_csv,
    exact_group_value,
    exact_group_values,
    fourier_decay_probe,
    inverse_transform,
    macdonald_constant,
    partition_function,
    plancherel_density,
    plancherel_pair,
    spherical_csv,
    spherical_function,
    spherical_value,
)


def test_parameter_round_trip():
    s = SpectralParameter.from_theta([0.2, 0.7])
    assert np.allclose(s.theta, [0.2, 0.7])
    assert np.allclose(np.abs(s.xi), 1) and s.is_unitary
    assert abs(np.prod(s.xi) - 1) < 1e-12
    for i, th in enumerate([0.2, 0.7]):
        assert s.xi[i] / s.xi[i + 1] == pytest.approx(cmath.exp(2j * math.pi * th))
    assert not SpectralParameter.from_zeta([0.5 + 1j]).is_unitary


@pytest.mark.parametrize("p", [2, 3, 5])
def test_c_function_examples(p):
    half = SpectralParameter.from_theta([0.5])
    assert c_function(half, p) == pytest.approx((1 + 1 / p) / 2)
    with pytest.raises(SingularParameter):
        c_function(SpectralParameter.from_theta([0.0]), p)
    s = SpectralParameter.from_theta([0.25])
    x0, x1 = s.xi
    assert c_function(s, p) == pytest.approx((x0 - x1 / p) / (x0 - x1))


@pytest.mark.parametrize("p", [2, 3, 5])
def test_density_examples(p):
    assert plancherel_density(SpectralParameter.from_theta([0.0]), p) == 0
    assert plancherel_density(SpectralParameter.from_theta([0.5]), p) == pytest.approx(4 / (1 + 1 / p) ** 2)
    grid = QuadratureGrid(3, 32)
    assert np.all(grid.density(p) >= 0)


def test_density_and_spherical_are_weyl_invariant():
    rng = np.random.default_rng(0)
    for _ in range(30):
        s = SpectralParameter.from_theta(rng.random(2))
        for w in weyl_group(3):
            ws = s.act(w)
            assert plancherel_density(ws, 3) == pytest.approx(plancherel_density(s, 3), abs=1e-12)
            for t0 in [(1, 0, -1), (2, -1, -1), (2, 0, -2)]:
                assert abs(spherical_value(ws, t0, 3) - spherical_value(s, t0, 3)) < 1e-10


@pytest.mark.parametrize("p", [2, 3, 5])
def test_spherical_value_examples(p):
    half = SpectralParameter.from_theta([0.5])
    assert spherical_value(half, (0, 0), p) == 1
    assert spherical_value(half, (1, -1), p) == pytest.approx(-1 / p, abs=1e-14)
    # trivial character: chi~(1) / mass = (3p - 1) / (p^2 + p)
    triv = SpectralParameter.trivial(2)
    assert spherical_value(triv, (1, -1), p) == pytest.approx((3 * p - 1) / (p * p + p), abs=1e-12)


def test_singular_limit_is_continuous():
    for theta in ([0.0], [1e-4], [1e-3 / 2], [0.9995]):
        s = SpectralParameter.from_theta(theta)
        near = SpectralParameter.from_theta([theta[0] + 2e-3])
        assert abs(spherical_value(s, (2, -2), 2) - spherical_value(near, (2, -2), 2)) < 1e-3
    s3 = SpectralParameter.from_theta([0.0, 0.0])
    expected = spectral_eval(satake_chi((1, 0, -1), 2), s3) / coset_count((1, 0, -1), 2)
    assert spherical_value(s3, (1, 0, -1), 2) == pytest.approx(expected, abs=1e-9)


def test_boundedness_on_grid():
    grid = QuadratureGrid(2, 64)
    for theta in grid.nodes:
        s = SpectralParameter.from_theta(theta)
        for t0 in [(1, -1), (2, -2), (5, -5)]:
            assert abs(spherical_value(s, t0, 2)) <= 1 + 1e-9
    rng = np.random.default_rng(1)
    for _ in range(40):
        s = SpectralParameter.from_theta(rng.random(2))
        for t0 in [(1, 0, -1), (2, -1, -1), (3, 0, -3)]:
            assert abs(spherical_value(s, t0, 3)) <= 1 + 1e-9


@pytest.mark.parametrize("n, p", [(2, 2), (2, 3), (3, 2), (4, 3)])
def test_macdonald_constant(n, p):
    rng = np.random.default_rng(n * p)
    s = SpectralParameter.from_zeta(rng.normal(size=n - 1) + 1j * rng.normal(size=n - 1))
    total = sum(c_function(s.act(w), p) for w in weyl_group(n))
    assert total == pytest.approx(float(macdonald_constant(n, p)), rel=1e-10)
    assert macdonald_constant(2, p) == 1 + Fraction(1, p)


def test_calibration_constant():
    # mean of the density over the torus is |W_0| / W(1/p)
    for n, p in [(2, 2), (2, 3), (3, 2)]:
        grid = QuadratureGrid(n, 512 if n == 2 else 96)
        expected = float(macdonald_constant(n, p)) / math.factorial(n)
        assert calibration_constant(grid, p) == pytest.approx(expected, rel=1e-9)


@pytest.mark.parametrize("p", [2, 3])
def test_plancherel_examples(p):
    grid = QuadratureGrid(2, 2048)
    delta = TorusFunction.delta((0, 0))
    assert plancherel_pair(delta, delta, grid, p) == pytest.approx(1, abs=1e-12)
    chi = satake_chi((1, -1), p)
    assert plancherel_pair(chi, chi, grid, p) == pytest.approx(p * p + p, rel=1e-6)
    other = satake_chi((3, -3), p)
    assert abs(plancherel_pair(chi, other, grid, p)) < 1e-6


def test_isometry_sl3():
    grid = QuadratureGrid(3, 256)
    for p in (2, 3):
        labels = list(dominant_coweights(3, 2))
        chis = {lam: satake_chi(lam, p) for lam in labels}
        for a, b in itertools.product(labels, repeat=2):
            val = plancherel_pair(chis[a], chis[b], grid, p)
            if a == b:
                assert abs(val - coset_count(a, p)) / coset_count(a, p) <= 1e-6
            else:
                assert abs(val) <= 1e-6 * coset_count(a, p)


@pytest.mark.parametrize("p", [2, 3])
def test_inverse_transform_examples(p):
    grid = QuadratureGrid(2, 2048)
    assert inverse_transform(TorusFunction.delta((0, 0)), (0, 0), grid, p) == pytest.approx(1, abs=1e-12)
    chi = satake_chi((1, -1), p)
    assert inverse_transform(chi, (1, -1), grid, p) == pytest.approx(1, abs=1e-6)
    assert abs(inverse_transform(chi, (2, -2), grid, p)) < 1e-6


def test_inverse_transform_sl3_labels():
    grid = QuadratureGrid(3, 128)
    lam = Coweight((2, -1, -1))
    chi = satake_chi(lam, 2)
    for t0 in dominant_coweights(3, 3):
        assert abs(inverse_transform(chi, t0, grid, 2) - (t0 == lam)) < 1e-6


def test_quadrature_convergence():
    chi = satake_chi((3, -3), 2)
    errors = []
    for res in (8, 16, 32, 64):
        grid = QuadratureGrid(2, res)
        errors.append(abs(inverse_transform(chi, (3, -3), grid, 2) - 1))
    floor = 1e-13
    for a, b in zip(errors, errors[1:]):
        assert b <= a / 2 or b < floor


def test_grid_validation():
    with pytest.raises(ValueError):
        QuadratureGrid(2, 4)
    grid = QuadratureGrid(3, 16)
    assert grid.size == 256 and grid.weights.sum() == pytest.approx(1)
    with pytest.raises(ValueError):
        plancherel_pair(TorusFunction.delta((0, 0)), TorusFunction.delta((0, 0)), grid, 2)


def test_fourier_decay_probe():
    grid = QuadratureGrid(2, 2048)
    assert fourier_decay_probe((0, 0), (0, 0), grid, 2) == pytest.approx(1, abs=1e-12)
    mags = [abs(fourier_decay_probe((k, -k), (0, 0), grid, 2)) for k in range(1, 11)]
    assert all(b < a for a, b in zip(mags, mags[1:]))
    assert abs(fourier_decay_probe((25, -25), (0, 0), grid, 2)) < 1e-6
    # frozen: at p = 2 the magnitudes are exactly 2^{-(k+1)}
    assert mags[0] == pytest.approx(0.25, abs=1e-12)
    assert mags[3] == pytest.approx(1 / 32, abs=1e-12)


def test_partition_function():
    # n = 2: prod (1 - x) / (1 - x/p) = 1 + sum_k (1/p - 1) p^{1-k} x^k
    p = 3
    assert partition_function((0, 0), p) == 1
    for k in range(1, 6):
        assert partition_function((k, -k), p) == (Fraction(1, p) - 1) * Fraction(1, p) ** (k - 1)
    assert partition_function((-1, 1), p) == 0


@pytest.mark.parametrize("n, p, h", [(2, 2, 5), (2, 5, 3), (3, 2, 3), (3, 3, 2)])
def test_exact_inversion(n, p, h):
    for lam in dominant_coweights(n, h):
        chi = satake_chi(lam, p, None)
        values = exact_group_values(chi, p)
        assert {nu: v for nu, v in values.items() if v} == {lam: 1}
        assert exact_group_value(chi, lam, p) == 1


@pytest.mark.parametrize("n, p", [(2, 2), (2, 3), (3, 2)])
def test_eigenfunction_identity(n, p):
    lam = Coweight((1, -1)) if n == 2 else Coweight((2, -1, -1))
    table = double_coset_reps(lam, p)
    reps = [table.pmatrix(i) for i in range(len(table))]
    chi = satake_chi(dual(lam), p)
    rng = np.random.default_rng(n + p)
    for _ in range(6):
        s = SpectralParameter.from_theta(rng.random(n - 1))
        for x0 in list(dominant_coweights(n, 2))[:4]:
            x = PMatrix.from_coweight(x0, p)
            lhs = sum(spherical_function(s, x @ b) for b in reps)
            rhs = spectral_eval(chi, s) * spherical_function(s, x)
            assert abs(lhs - rhs) <= 1e-8 * max(1.0, abs(rhs))


def test_spherical_function_is_bi_invariant():
    s = SpectralParameter.from_theta([0.31, 0.77])
    k = PMatrix([[1, 2, 0], [0, 1, 0], [3, 0, 1]], 2)
    for t in [(1, 0, -1), (2, -1, -1), (0, 1, -1)]:
        z = PMatrix.from_coweight(t, 2)
        assert spherical_function(s, k @ z @ k.inverse()) == pytest.approx(spherical_function(s, z))


def test_csv_emitters():
    grid = QuadratureGrid(2, 8)
    lines = density_csv(grid, 2).strip().splitlines()
    assert lines[0] == "theta1,density" and len(lines) == 9
    assert float(lines[1].split(",")[1]) == 0.0
    text = spherical_csv(SpectralParameter.from_theta([0.5]), [(0, 0), (1, -1)], 2)
    rows = text.strip().splitlines()
    assert rows[0] == "t0,re,im"
    assert rows[2].startswith("1 -1,-0.5")
