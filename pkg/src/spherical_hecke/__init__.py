"""Spherical Hecke algebra of SL_n(Q_p): Satake transform, Plancherel side, amplifier kernels."""
