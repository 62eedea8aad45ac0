"""Two-level theta-family Crank-Nicolson scheme with a transparent boundary row.

Interior nodes ``1..J-1`` carry

    (i hbar/tau) C_theta[rho](U - W) + (hbar^2/4) flux(U + W) - (1/2) C_theta[V](U + W) = 0,

node 0 is homogeneous Dirichlet and node ``J`` carries the discrete TBC with a
flux weight ``theta_f`` and a convolution kernel that is either the discrete one
for some ``theta_0 <= 1/4`` or the semi-discrete one.
"""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np
from numba import njit

from .kernels import KernelTable, dtbc_parameters, kernel_table, sdtbc_parameters
from .meshops import PhysicalParams, SpaceMesh, TimeGrid, c_theta_bands, flux_bands, norm_weights

log = logging.getLogger(__name__)

RESIDUAL_TOL = 1e-10


class NumericalFailure(ArithmeticError):
    """Zero pivot or residual blow-up in the tridiagonal solve."""


@dataclass(frozen=True)
class BoundaryConfig:
    """Boundary row: flux weight ``theta_flux`` and kernel (``kernel_theta=None`` means semi-discrete)."""

    theta_flux: float
    kernel_theta: float | None = None

    def __post_init__(self):
        if self.theta_flux > 0.25:
            raise ValueError("boundary flux theta must be <= 1/4")
        if self.kernel_theta is not None and self.kernel_theta > 0.25:
            raise ValueError("kernel theta must be <= 1/4")

    @classmethod
    def dtbc(cls, theta):
        return cls(theta, theta)

    @classmethod
    def sdtbc(cls, theta):
        return cls(theta, None)

    @classmethod
    def isdtbc(cls):
        return cls(1 / 6, None)

    @property
    def semi_discrete(self) -> bool:
        return self.kernel_theta is None


@dataclass(frozen=True)
class SchemeConfig:
    theta: float
    boundary: BoundaryConfig
    mesh: SpaceMesh
    grid: TimeGrid
    phys: PhysicalParams

    def __post_init__(self):
        if self.theta > 0.25:
            raise ValueError("interior theta must be <= 1/4")
        if self.phys.mesh is not self.mesh and not np.array_equal(self.phys.mesh.nodes, self.mesh.nodes):
            raise ValueError("physical parameters were sampled on a different mesh")


def boundary_kernel(config: SchemeConfig, M: int | None = None) -> KernelTable:
    M = config.grid.M if M is None else M
    b, tau, phys = config.boundary, config.grid.tau, config.phys
    if b.semi_discrete:
        params = sdtbc_parameters(tau, phys)
    else:
        params = dtbc_parameters(b.kernel_theta, config.mesh.h, tau, phys)
    return kernel_table(params, M)


@dataclass
class TridiagonalSystem:
    """``sub[i] u[i-1] + diag[i] u[i] + sup[i] u[i+1] = rhs[i]``; ``sub[0]``, ``sup[-1]`` unused."""

    sub: np.ndarray
    diag: np.ndarray
    sup: np.ndarray
    rhs: np.ndarray

    def matvec(self, u):
        out = self.diag * u
        out[1:] += self.sub[1:] * u[:-1]
        out[:-1] += self.sup[:-1] * u[1:]
        return out

    def dense(self):
        n = self.diag.size
        A = np.zeros((n, n), dtype=complex)
        A[np.arange(n), np.arange(n)] = self.diag
        A[np.arange(1, n), np.arange(n - 1)] = self.sub[1:]
        A[np.arange(n - 1), np.arange(1, n)] = self.sup[:-1]
        return A


@njit(cache=True, nogil=True)
def _factor(sub, diag, sup, cp, inv):
    n = diag.size
    for i in range(n):
        d = diag[i]
        if i > 0:
            d = d - sub[i] * cp[i - 1]
        if d == 0:
            return i
        inv[i] = 1.0 / d
        cp[i] = sup[i] * inv[i] if i < n - 1 else 0.0
    return -1


@njit(cache=True, nogil=True)
def _substitute(sub, cp, inv, rhs, out):
    n = rhs.size
    out[0] = rhs[0] * inv[0]
    for i in range(1, n):
        out[i] = (rhs[i] - sub[i] * out[i - 1]) * inv[i]
    for i in range(n - 2, -1, -1):
        out[i] = out[i] - cp[i] * out[i + 1]


class ThomasFactorization:
    """Forward-elimination multipliers of a tridiagonal matrix (no pivoting)."""

    def __init__(self, sub, diag, sup):
        self.sub = np.ascontiguousarray(sub, dtype=complex)
        self.diag = np.ascontiguousarray(diag, dtype=complex)
        self.sup = np.ascontiguousarray(sup, dtype=complex)
        n = self.diag.size
        if n < 2:
            raise ValueError("tridiagonal system needs size >= 2")
        self.cp = np.empty(n, dtype=complex)
        self.inv = np.empty(n, dtype=complex)
        bad = _factor(self.sub, self.diag, self.sup, self.cp, self.inv)
        if bad >= 0:
            raise NumericalFailure(f"zero pivot in Thomas elimination at row {bad}")

    def solve(self, rhs, out=None):
        rhs = np.ascontiguousarray(rhs, dtype=complex)
        if out is None:
            out = np.empty_like(rhs)
        _substitute(self.sub, self.cp, self.inv, rhs, out)
        return out

    def residual(self, u, rhs) -> float:
        """``||A u - b||_inf / ||b||_inf`` (absolute when ``b == 0``)."""
        r = self.diag * u - rhs
        r[1:] += self.sub[1:] * u[:-1]
        r[:-1] += self.sup[:-1] * u[1:]
        num = np.max(np.abs(r))
        den = np.max(np.abs(rhs))
        return float(num / den) if den > 0 else float(num)


def thomas_solve(system: TridiagonalSystem):
    """Solve the system; returns ``(u, relative_residual)``."""
    f = ThomasFactorization(system.sub, system.diag, system.sup)
    u = f.solve(system.rhs)
    return u, f.residual(u, np.asarray(system.rhs, dtype=complex))


class _Operator:
    """Time-independent bands of the step matrix ``A`` and the explicit part ``P``."""

    def __init__(self, config: SchemeConfig, table: KernelTable):
        mesh, phys, th = config.mesh, config.phys, config.theta
        J, tau, hbar = mesh.J, config.grid.tau, phys.hbar
        n = J + 1
        ms, md, mp = c_theta_bands(phys.rho, th, mesh)
        vs, vd, vp = c_theta_bands(phys.V, th, mesh)
        fs, fd, fp = flux_bands(phys.B, mesh)
        iw = 1j * hbar / tau
        k = [0.25 * hbar**2 * f - 0.5 * v for f, v in ((fs, vs), (fd, vd), (fp, vp))]
        m = [ms, md, mp]
        A = [np.zeros(n, dtype=complex) for _ in range(3)]
        P = [np.zeros(n, dtype=complex) for _ in range(3)]
        for b in range(3):
            A[b][1:J] = iw * m[b] + k[b]
            P[b][1:J] = iw * m[b] - k[b]
        A[1][0] = 1.0

        h = mesh.h
        tf = config.boundary.theta_flux
        g = 0.5 * hbar**2 * phys.B_inf
        p = 1j * hbar * phys.rho_inf / tau
        q = 0.5 * phys.V_inf
        A[0][J] = -g / (2 * h) - h * tf * (p - q)
        A[1][J] = g / (2 * h) - h * (0.5 - tf) * (p - q) - g * table.c0
        P[0][J] = g / (2 * h) - h * tf * (p + q)
        P[1][J] = -g / (2 * h) - h * (0.5 - tf) * (p + q)

        self.A, self.P = A, P
        self.g = g
        self.J = J

    def explicit(self, W):
        sub, diag, sup = self.P
        out = diag * W
        out[1:] += sub[1:] * W[:-1]
        out[:-1] += sup[:-1] * W[1:]
        return out


@dataclass
class SolverState:
    """Level ``m`` of a run. ``history[k]`` holds the boundary value at level ``k``; ``history[0]`` is 0."""

    m: int
    field: np.ndarray
    history: np.ndarray
    table: KernelTable
    residual: float = 0.0
    _op: _Operator | None = field(default=None, repr=False)
    _factor: ThomasFactorization | None = field(default=None, repr=False)


def init_state(config: SchemeConfig, initial, table: KernelTable | None = None) -> SolverState:
    initial = np.asarray(initial, dtype=complex)
    if initial.shape != (config.mesh.J + 1,):
        raise ValueError("initial field must have J+1 entries")
    if table is None:
        table = boundary_kernel(config)
    elif table.M < config.grid.M:
        raise ValueError("kernel table too short")
    op = _Operator(config, table)
    fac = ThomasFactorization(*op.A)
    history = np.zeros(config.grid.M + 1, dtype=complex)
    return SolverState(0, initial.copy(), history, table, 0.0, op, fac)


def _history_sum(state: SolverState, m: int) -> complex:
    # sum_{l=1}^{m-1} R^l Psi_J^{m-l}; level 0 counts as zero.
    if m < 2:
        return 0j
    return complex(np.dot(state.table.R[1:m], state.history[m - 1:0:-1]))


def assemble_step(state: SolverState, config: SchemeConfig) -> TridiagonalSystem:
    """Tridiagonal system for advancing ``state`` from level ``m-1`` to ``m``."""
    if state._op is None:
        state._op = _Operator(config, state.table)
    op = state._op
    m = state.m + 1
    if m > state.table.M:
        raise ValueError("kernel table too short")
    rhs = op.explicit(state.field)
    rhs[0] = 0.0
    rhs[-1] += op.g * state.table.c0 * _history_sum(state, m)
    return TridiagonalSystem(op.A[0].copy(), op.A[1].copy(), op.A[2].copy(), rhs)


def step(state: SolverState, config: SchemeConfig) -> SolverState:
    """Advance ``state`` one level in place and return it."""
    if state.m >= config.grid.M:
        raise ValueError("already at the final level")
    system = assemble_step(state, config)
    if state._factor is None:
        state._factor = ThomasFactorization(system.sub, system.diag, system.sup)
    u = state._factor.solve(system.rhs)
    res = state._factor.residual(u, system.rhs)
    if not res <= RESIDUAL_TOL:
        raise NumericalFailure(f"tridiagonal residual {res:.3e} at level {state.m + 1}")
    u[0] = 0.0
    state.m += 1
    state.field = u
    state.history[state.m] = u[-1]
    state.residual = res
    return state


def iterate(config: SchemeConfig, initial, table: KernelTable | None = None) -> Iterator[SolverState]:
    """Yield the state at levels ``0..M`` (the same object, advanced in place)."""
    state = init_state(config, initial, table)
    yield state
    for _ in range(config.grid.M):
        yield step(state, config)


@dataclass
class Trajectory:
    times: np.ndarray
    l2: np.ndarray
    c: np.ndarray
    boundary: np.ndarray
    snapshots: dict = field(default_factory=dict)
    wall_time: float = 0.0

    @property
    def levels(self) -> np.ndarray:
        return np.arange(self.times.size)


def _store_set(store, M):
    if store is None:
        return frozenset()
    if isinstance(store, str):
        if store != "all":
            raise ValueError(f"unknown store selector {store!r}")
        return frozenset(range(M + 1))
    return frozenset(int(m) for m in store)


def run(config: SchemeConfig, initial, store: str | Iterable[int] | None = None,
        observers=(), table: KernelTable | None = None) -> Trajectory:
    """Run all ``M`` levels; ``observers`` are called as ``f(m, field)`` at each level."""
    M = config.grid.M
    keep = _store_set(store, M)
    w = norm_weights(config.mesh)
    l2 = np.empty(M + 1)
    cn = np.empty(M + 1)
    bnd = np.empty(M + 1, dtype=complex)
    snaps = {}
    t0 = time.perf_counter()
    for s in iterate(config, initial, table):
        u = s.field
        a2 = u.real**2 + u.imag**2
        l2[s.m] = np.sqrt(np.dot(w, a2))
        cn[s.m] = np.sqrt(a2.max())
        bnd[s.m] = u[-1]
        if s.m in keep:
            snaps[s.m] = u.copy()
        for f in observers:
            f(s.m, u)
    wall = time.perf_counter() - t0
    log.info("run J=%d M=%d finished in %.2fs", config.mesh.J, M, wall)
    return Trajectory(config.grid.t(np.arange(M + 1)), l2, cn, bnd, snaps, wall)
