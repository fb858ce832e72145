"""
Simultaneous approximation in a window
======================================

Find q with every q*alpha_i near an integer, and measure how evenly n*alpha
fills the torus.
"""

import math

import numpy as np

from spherical_hecke.kronecker import equidistribution_defect, scan_window, simultaneous_approx, window_constants

golden = (1 + math.sqrt(5)) / 2
res = simultaneous_approx([golden], 0.1, 50)
print("golden ratio:", res.to_json())

alpha = [math.sqrt(2), math.sqrt(3)]
print("window constants, m=2:", window_constants(2, 0.1))
res = simultaneous_approx(alpha, 0.1, 200)
print("sqrt2, sqrt3:", res.to_json(), " check:", res.verify(alpha, 0.1))

# best achievable distance only shrinks as the window widens
rng = np.random.default_rng(7)
beta = rng.random(3)
for hi in (10, 100, 1000, 10000):
    print(hi, round(scan_window(beta, 0.5, 1, hi, mode="best").achieved, 5))

# Weyl sums: rational vectors never equidistribute, irrational ones do
for N in (10**2, 10**3, 10**4):
    print(N, equidistribution_defect(alpha, N, 5), equidistribution_defect([0.25, 0.5], N, 4))
