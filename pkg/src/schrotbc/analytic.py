"""Gaussian wave packet reference solution and error metrics."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .meshops import SpaceMesh, TimeGrid, norm_weights


@dataclass(frozen=True)
class GaussianParams:
    k: float = 100.0
    alpha: float = 1 / 120
    x0: float = 0.8

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")


def gaussian_exact(x, t, gp: GaussianParams):
    """Free Gaussian packet for ``i psi_t = -psi_xx`` (rho=1, B=2, V=0, hbar=1)."""
    if not gp.alpha > 0:
        raise ValueError("alpha must be positive")
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    s = x - gp.x0
    z = gp.alpha + 1j * t
    return np.exp(1j * gp.k * (s - gp.k * t) - (s - 2 * gp.k * t) ** 2 / (4 * z)) / np.sqrt(1 + 1j * t / gp.alpha)


# Central-difference weights (order 6) for first and second derivatives.
_D1 = np.array([-1, 9, -45, 0, 45, -9, 1]) / 60.0
_D2 = np.array([2, -27, 270, -490, 270, -27, 2]) / 180.0
_OFF = np.arange(-3, 4)


def residual_check(gp: GaussianParams, x: float, t: float, dx: float = 2e-4, dt: float = 2e-6,
                   hbar: float = 1.0, rho: float = 1.0, B: float = 2.0) -> complex:
    """PDE residual ``i hbar rho psi_t + (hbar^2 B/2) psi_xx`` by 6th-order differences.

    Defaults for the steps sit on the truncation/round-off plateau for the
    default packet; ``t`` must be at least ``3 dt``.
    """
    if t < 3 * dt:
        raise ValueError("t too close to 0 for the centred time difference")
    pt = np.dot(_D1, gaussian_exact(x, t + _OFF * dt, gp)) / dt
    pxx = np.dot(_D2, gaussian_exact(x + _OFF * dx, t, gp)) / dx**2
    return complex(1j * hbar * rho * pt + 0.5 * hbar**2 * B * pxx)


@dataclass
class ErrorReport:
    l2: float
    c: float
    l2_rel: float
    c_rel: float
    series: dict = field(default_factory=dict, repr=False)
    excluded: list = field(default_factory=list, repr=False)

    def as_tuple(self):
        return (self.l2, self.c, self.l2_rel, self.c_rel)


class ErrorAccumulator:
    """Observer for ``solver.run`` collecting per-level errors against the packet.

    Level 0 is skipped; levels whose exact norm vanishes are excluded from the
    relative maxima and listed in ``excluded``.
    """

    def __init__(self, gp: GaussianParams, mesh: SpaceMesh, grid: TimeGrid):
        self.gp, self.mesh, self.grid = gp, mesh, grid
        self.w = norm_weights(mesh)
        n = grid.M + 1
        self.err_l2 = np.full(n, np.nan)
        self.err_c = np.full(n, np.nan)
        self.ex_l2 = np.full(n, np.nan)
        self.ex_c = np.full(n, np.nan)

    def __call__(self, m, field):
        if m == 0:
            return
        ex = gaussian_exact(self.mesh.nodes, m * self.grid.tau, self.gp)
        d = field - ex
        d2 = d.real**2 + d.imag**2
        e2 = ex.real**2 + ex.imag**2
        self.err_l2[m] = np.sqrt(np.dot(self.w, d2))
        self.err_c[m] = np.sqrt(d2.max())
        self.ex_l2[m] = np.sqrt(np.dot(self.w, e2))
        self.ex_c[m] = np.sqrt(e2.max())

    def report(self) -> ErrorReport:
        sl = slice(1, None)
        el2, ec = self.err_l2[sl], self.err_c[sl]
        xl2, xc = self.ex_l2[sl], self.ex_c[sl]
        if np.any(np.isnan(el2)):
            raise ValueError("errors missing for some levels 1..M")
        ok = (xl2 > 0) & (xc > 0)
        excluded = [int(m) for m in np.flatnonzero(~ok) + 1]
        rl2 = np.where(ok, el2 / np.where(ok, xl2, 1.0), np.nan)
        rc = np.where(ok, ec / np.where(ok, xc, 1.0), np.nan)
        series = {"l2": el2, "c": ec, "l2_rel": rl2, "c_rel": rc, "exact_l2": xl2, "exact_c": xc}
        if el2.size == 0:
            return ErrorReport(0.0, 0.0, 0.0, 0.0, series, excluded)
        return ErrorReport(float(el2.max()), float(ec.max()),
                           float(np.nanmax(rl2)) if ok.any() else 0.0,
                           float(np.nanmax(rc)) if ok.any() else 0.0,
                           series, excluded)


def error_report(fields, gp: GaussianParams, mesh: SpaceMesh, grid: TimeGrid) -> ErrorReport:
    """Errors of stored fields against the packet.

    ``fields`` is a mapping ``m -> field`` (e.g. ``Trajectory.snapshots``) or an
    iterable of ``(m, field)`` pairs and must cover levels ``1..M``.
    """
    acc = ErrorAccumulator(gp, mesh, grid)
    items = fields.items() if hasattr(fields, "items") else fields
    for m, f in items:
        acc(int(m), np.asarray(f))
    return acc.report()


KINDS = ("l2", "c", "l2_rel", "c_rel")


def convergence_ratios(reports):
    """``E(n-1)/E(n)`` for each error kind; entry 0 is ``None``."""
    reports = list(reports)
    if len(reports) < 2:
        raise ValueError("need at least two reports")
    out = {k: [None] for k in KINDS}
    for prev, cur in zip(reports, reports[1:]):
        for k in KINDS:
            den = getattr(cur, k)
            if den == 0:
                raise ZeroDivisionError(f"zero {k} error in refinement sequence")
            out[k].append(getattr(prev, k) / den)
    return out
