"""A Gaussian packet leaving [0, 1.5] through a transparent boundary.

Runs the Numerov member (theta = 1/12) of the scheme family with the discrete
and with the semi-discrete boundary kernel, then prints how the norms drop once
the packet has passed x = 1.5 and how far each run is from the exact solution.

    python demos/packet_run.py
"""
import numpy as np

from schrotbc import GaussianParams, error_report, gaussian_exact, run
from schrotbc.harness.presets import BASE

gp = GaussianParams(k=100.0, alpha=1 / 120, x0=0.8)
cfg = BASE.replace(J=800, M=3000)

for boundary in ("dtbc", "sdtbc", "isdtbc"):
    scheme = cfg.replace(boundary=boundary).scheme()
    psi0 = gaussian_exact(scheme.mesh.nodes, 0.0, gp)
    traj = run(scheme, psi0, store="all")
    rep = error_report({m: f for m, f in traj.snapshots.items() if m}, gp, scheme.mesh, scheme.grid)

    print(f"--- {boundary}  (J={cfg.J}, M={cfg.M}, run took {traj.wall_time:.2f}s)")
    for m in np.linspace(0, cfg.M, 7).astype(int):
        print(f"  t={traj.times[m]:.4f}  L2={traj.l2[m]:.4e}  C={traj.c[m]:.4e}")
    print(f"  final L2 / max L2 = {traj.l2[-1] / traj.l2.max():.4f}")
    print(f"  E_L2={rep.l2:.3e}  E_C={rep.c:.3e}  E_L2,rel={rep.l2_rel:.3e}  E_C,rel={rep.c_rel:.3e}")

# The semi-discrete kernel lets part of the packet reflect.  Absolute errors stay
# small, but once most of the packet has left, the reflected part dominates what
# remains in the domain, so the relative errors become large.
