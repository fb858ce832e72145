import math

import pytest

from spherical_hecke.lattice import (
    Coweight,
    WeylElement,
    compare,
    convert_coords,
    decompose,
    delta_exponent,
    dominant_coweights,
    dominant_rep,
    from_m_coords,
    height,
    hilbert_basis,
    is_dominant,
    norm,
    weyl_act,
    weyl_group,
    weyl_orbit,
)


@pytest.mark.parametrize("n_coords, m_coords", [
    ((1, -1), (1,)),
    ((0, 0, 0), (0, 0)),
    ((2, -1, -1), (2, 1)),
])
def test_convert_coords(n_coords, m_coords):
    assert convert_coords(n_coords) == m_coords
    assert from_m_coords(m_coords) == Coweight(n_coords)


def test_nonzero_sum_rejected():
    with pytest.raises(ValueError):
        Coweight((1, 1))
    with pytest.raises(ValueError):
        convert_coords((1, 0, 0))


def test_weyl_act():
    t = Coweight((1, -1))
    assert weyl_act(WeylElement.identity(2), t) == t
    assert weyl_act(WeylElement((1, 0)), t) == Coweight((-1, 1))
    assert weyl_act(WeylElement((2, 0, 1)), Coweight((1, 0, -1))) == Coweight((-1, 1, 0))


def test_weyl_group_axioms():
    ws = weyl_group(3)
    assert len(ws) == 6
    e = WeylElement.identity(3)
    for a in ws:
        assert a * a.inverse() == e
        for b in ws:
            assert a * b in ws
            t = Coweight((3, -1, -2))
            assert weyl_act(a * b, t) == weyl_act(a, weyl_act(b, t))


def test_dominant_rep():
    assert dominant_rep(Coweight((-1, 1))) == (Coweight((1, -1)), WeylElement((1, 0)))
    assert dominant_rep(Coweight((0, 0, 0))) == (Coweight((0, 0, 0)), WeylElement.identity(3))
    t = Coweight((-1, 2, -1))
    plus, w = dominant_rep(t)
    assert plus == Coweight((2, -1, -1))
    assert weyl_act(w, t) == plus
    # stable: the two -1 entries keep their relative order
    assert w == WeylElement((1, 0, 2))


def test_height_norm_delta():
    assert height(Coweight.zero(3)) == 0
    assert height(from_m_coords((1, 0))) == 1
    assert height(Coweight((2, -1, -1))) == 3
    assert norm(Coweight.zero(2)) == 0
    assert norm(Coweight((1, -1))) == pytest.approx(math.sqrt(2))
    assert norm(Coweight((1, 0, -1))) == pytest.approx(math.sqrt(2))
    assert delta_exponent(Coweight.zero(2)) == 0
    assert delta_exponent(Coweight((1, -1))) == 2
    assert delta_exponent(Coweight((1, 0, -1))) == 4


def test_compare_examples():
    t = Coweight((2, -1, -1))
    assert compare(t, t) == 0
    assert compare(from_m_coords((1, 0)), Coweight.zero(3)) == 1
    assert compare(from_m_coords((0, -1)), Coweight.zero(3)) == -1


def test_hilbert_basis():
    assert hilbert_basis(2) == (Coweight((1, -1)),)
    assert hilbert_basis(3) == (Coweight((1, 0, -1)), Coweight((1, 1, -2)), Coweight((2, -1, -1)))
    assert decompose(Coweight((3, -3))) == [Coweight((1, -1))] * 3
    with pytest.raises(ValueError):
        hilbert_basis(1)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_hilbert_basis_minimal(n):
    basis = hilbert_basis(n)
    bound = 2 * n
    seen = set(basis)
    for g in basis:
        assert is_dominant(g)
        for a in dominant_coweights(n, bound):
            b = Coweight(x - y for x, y in zip(g, a))
            if any(a) and any(b) and is_dominant(b):
                pytest.fail(f"{g} = {a} + {b}")
    assert len(seen) == len(basis)


@pytest.mark.parametrize("n", [2, 3])
def test_greedy_decomposition_length(n):
    gens = hilbert_basis(n)
    M = max(height(g) for g in gens)
    for t in dominant_coweights(n, 30 if n == 2 else 14):
        parts = decompose(t, gens)
        assert sum(parts, Coweight.zero(n)) == t
        ht = height(t)
        assert ht / M <= len(parts) <= ht


@pytest.mark.parametrize("n", [2, 3, 4])
def test_height_bounds_on_dominant(n):
    l = n - 1
    for t in dominant_coweights(n, 10):
        m1 = t.m[0]
        assert m1 <= height(t) <= l * (l + 1) // 2 * m1
        assert delta_exponent(t) >= 0
        assert delta_exponent(-t) == -delta_exponent(t)


def test_orbit_sizes():
    assert len(weyl_orbit(Coweight((1, 0, -1)))) == 6
    assert len(weyl_orbit(Coweight((1, 1, -2)))) == 3
    assert weyl_orbit(Coweight.zero(3)) == [Coweight.zero(3)]
