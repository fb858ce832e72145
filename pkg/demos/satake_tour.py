"""
A first look at the Satake transform on SL_3
============================================

Build a few characteristic functions, push them to the torus and check the
answers against Hall-Littlewood polynomials.
"""

from fractions import Fraction

import numpy as np

from spherical_hecke.cartan import PMatrix, cartan, coset_count_formula, double_coset_convolve
from spherical_hecke.lattice import Coweight, hilbert_basis
from spherical_hecke.satake import convolve, satake_chi, spectral_eval, to_chi
from spherical_hecke.spectral import SpectralParameter

p = 2

# the Cartan label of an integer matrix: p-adic elementary divisors
g = PMatrix([[4, 2, 0], [0, 1, 0], [0, 0, Fraction(1, 4)]], p)
print("cartan label of g:", cartan(g))

# dominant coweights are generated by a small Hilbert basis
basis = hilbert_basis(3)
print("hilbert basis:", [tuple(b) for b in basis])

# image of each generator; coefficients are exact rationals
for lam in basis:
    chi = satake_chi(lam, p)
    print(tuple(lam), "->", {tuple(t): str(c) for t, c in sorted(chi.terms.items(), key=lambda kv: tuple(kv[0]))})

# evaluating at the half-delta point counts the cosets
lam = Coweight((1, 0, -1))
rho = SpectralParameter.half_delta(3, p)
print("count:", coset_count_formula(lam, p), " image at rho:", complex(spectral_eval(satake_chi(lam, p), rho)).real)

# the transform is multiplicative: convolve on the group, multiply on the torus
mu = Coweight((1, 1, -2))
table = double_coset_convolve(lam, mu, p)
print("structure constants:", {tuple(k): v for k, v in sorted(table.items(), key=lambda kv: tuple(kv[0]))})
prod = convolve(satake_chi(lam, p), satake_chi(mu, p))
print("expansion of the product in chi:", {tuple(k): str(v) for k, v in sorted(to_chi(prod, p, budget=None).items(), key=lambda kv: tuple(kv[0]))})

# evaluate at a random unitary point
rng = np.random.default_rng(1)
s = SpectralParameter.from_theta(rng.random(2))
lhs = spectral_eval(prod, s)
rhs = sum(Fraction(c) * spectral_eval(satake_chi(nu, p, budget=None), s) for nu, c in table.items())
print("|lhs - rhs| =", abs(complex(lhs) - complex(rhs)))
