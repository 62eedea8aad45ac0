"""The boundary convolution kernels: how they are built and how they differ.

    python demos/kernels.py
"""
import numpy as np

from schrotbc import (admissibility, divergence_bound, dtbc_parameters, kernel_legendre_oracle, kernel_table,
                      sdtbc_parameters)
from schrotbc.harness.experiments import kernel_difference
from schrotbc.harness.presets import BASE

phys = BASE.replace(J=800, M=6000).scheme().phys
h, tau = 1.5 / 800, 1e-6

# For the multi-symplectic member theta = 1/4 the discrete kernel does not depend
# on h and equals the semi-discrete one.  With V = 0 the odd entries vanish.
q = dtbc_parameters(0.25, h, tau, phys)
print("theta=1/4:", q, "same as semi-discrete:", q == sdtbc_parameters(tau, phys))
print("first entries:", kernel_table(q, 8).R.real)

# The Numerov member has a genuinely different kernel.
p = dtbc_parameters(1 / 12, h, tau, phys)
t = kernel_table(p, 6000)
print(f"\ntheta=1/12: c0={p.c0:.4f} kappa={p.kappa:.4f} mu={p.mu:.6f}")
for m in (1, 10, 100, 1000, 6000):
    print(f"  m={m:5d}  recurrence {t.R[m]: .6e}  Legendre form {kernel_legendre_oracle(p.kappa, p.mu, m): .6e}")

# The difference between c0 R^m for theta and the semi-discrete kernel is bounded,
# and for admissible (h, tau) it scales like h^2.
print("\nsup_m |difference| vs bound, theta=1/12, tau=1e-6")
for J in (200, 400, 800, 1600, 3200):
    hh = 1.5 / J
    d = kernel_difference(1 / 12, hh, tau, phys, 10_000)
    b = divergence_bound(1 / 12, hh, tau, phys, np.arange(10_001))
    adm = admissibility(1 / 12, hh, tau, phys)
    print(f"  J={J:5d}  sup diff {d.max():.4e}  min bound/diff {np.min(b[d > 0] / d[d > 0]):6.2f}  cond2 {adm.cond2:.3f}")
