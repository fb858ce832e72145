"""
Spherical functions and the Plancherel measure on SL_2
======================================================

Quadrature on the unitary dual, inversion back to the group and the rate at
which the transform of a double coset decays.
"""

import numpy as np

from spherical_hecke.satake import satake_chi
from spherical_hecke.spectral import (
    QuadratureGrid,
    SpectralParameter,
    calibration_constant,
    fourier_decay_probe,
    inverse_transform,
    plancherel_density,
    plancherel_pair,
    spherical_value,
)

p = 3

# spherical function on the tempered line, height one shell
for theta in (0.0, 0.25, 0.5):
    s = SpectralParameter.from_theta([theta])
    print(f"theta={theta:4}: omega = {spherical_value(s, (1, -1), p).real:+.6f}")

# density vanishes at the walls of the torus
thetas = np.linspace(0.01, 0.99, 9)
print("density:", np.round([plancherel_density(SpectralParameter.from_theta([t]), p) for t in thetas], 4))

grid = QuadratureGrid(2, 1024)
print("calibration:", calibration_constant(grid, p))

# the transform is an isometry up to the coset count
for k in range(3):
    chi = satake_chi((k, -k), p)
    print(f"||chi_{k}||^2 =", round(plancherel_pair(chi, chi, grid, p).real, 8))

# recover group values of a product from its image
prod = satake_chi((1, -1), p) * satake_chi((1, -1), p)
for k in range(3):
    print(f"value on shell {k}:", round(inverse_transform(prod, (k, -k), grid, p).real, 8))

# off-diagonal Fourier coefficients decay like p^(-height)
for k in range(1, 6):
    print(k, abs(fourier_decay_probe((k, -k), (0, 0), grid, p)))
