"""
Building an amplifier near a tempered point
===========================================

Pick q1, assemble a kernel, then watch the verification numbers as N grows.
"""

from spherical_hecke.amplifier import build_kernel, choose_q1, closed_form_eigenvalue, q1_window, verify_sweep
from spherical_hecke.spectral import SpectralParameter

p = 2
s = SpectralParameter.from_theta([0.1])

# the window for q1 and the eigenvalue across it
L, N = 3, 200
lo, hi = q1_window(L, N)
print("window:", (lo, hi))
print("eigenvalues:", [round(abs(closed_form_eigenvalue(L, q, s)), 3) for q in range(lo, hi + 1)])
print("chosen q1:", choose_q1(L, N, s))

kernel = build_kernel(L, N, s, 0.5, p)
print("kernel L, q1:", kernel.L, kernel.q1, " eigenvalue:", round(kernel.eigenvalue, 4))
print("support size:", len(kernel.k_tilde), " normalizer:", kernel.normalizer)

# support grows linearly in N, the sup norm decays like a power of N
sweep = verify_sweep((100, 200, 400, 800), s, L, p, 0.5, resolution=1024)
for r in sweep["reports"]:
    print(r["N"], r["q1"], r["support_r"], round(r["eigenvalue"], 3))
print("fitted decay exponent:", round(sweep["supnorm_delta_fit"], 3))
print("checks:", sweep["pass"])

# smaller epsilon forces a longer Dirichlet kernel
s = SpectralParameter.from_theta([0.01])
for eps in (0.5, 0.3, 0.2, 0.15):
    print(f"eps={eps}: L={build_kernel(1, 50, s, eps, p).L}")
