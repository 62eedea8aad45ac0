"""Space/time meshes, three-point averaging operators and discrete norms.

Coefficients of the equation are stored as *interval samples*: entry ``j-1`` of
a sample array holds the value on the interval ``(x_{j-1}, x_j)`` for
``j = 1..J``.  All functions below use that 0-based storage.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class SpaceMesh:
    """Nodes ``0 = x_0 < x_1 < ... < x_J = X`` with equal last two steps."""

    nodes: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.nodes, dtype=float)
        if x.ndim != 1 or x.size < 3:
            raise ValueError("mesh needs at least J = 2 intervals")
        if x[0] != 0.0:
            raise ValueError("mesh must start at x_0 = 0")
        steps = np.diff(x)
        if np.any(steps <= 0):
            raise ValueError("mesh nodes must be strictly increasing")
        if not np.isclose(steps[-1], steps[-2], rtol=1e-12, atol=0.0):
            raise ValueError("last two mesh steps must be equal")
        x.setflags(write=False)
        object.__setattr__(self, "nodes", x)

    @classmethod
    def uniform(cls, X: float, J: int) -> "SpaceMesh":
        return cls(np.arange(J + 1) * (X / J))

    @property
    def J(self) -> int:
        return self.nodes.size - 1

    @property
    def X(self) -> float:
        return float(self.nodes[-1])

    @property
    def steps(self) -> np.ndarray:
        """``h_1..h_J`` stored 0-based (``steps[j-1] == h_j``)."""
        return np.diff(self.nodes)

    @property
    def h(self) -> float:
        """Tail step ``h_J``."""
        return float(self.nodes[-1] - self.nodes[-2])

    @property
    def midpoints(self) -> np.ndarray:
        return 0.5 * (self.nodes[1:] + self.nodes[:-1])

    def half_steps(self) -> np.ndarray:
        """``h_{j+1/2}`` for ``j = 1..J-1`` (length ``J-1``)."""
        s = self.steps
        return 0.5 * (s[:-1] + s[1:])


@dataclass(frozen=True)
class TimeGrid:
    tau: float
    M: int

    def __post_init__(self):
        if not self.tau > 0:
            raise ValueError("time step must be positive")
        if self.M < 0:
            raise ValueError("level count must be non-negative")

    @classmethod
    def from_horizon(cls, T: float, M: int) -> "TimeGrid":
        return cls(T / M, M)

    @property
    def T(self) -> float:
        return self.M * self.tau

    def t(self, m) -> np.ndarray | float:
        return np.asarray(m) * self.tau


@dataclass(frozen=True)
class PhysicalParams:
    """Coefficients of the generalized Schrodinger equation on a mesh.

    ``rho``, ``B`` and ``V`` are interval samples (length ``J``); the tail
    constants describe the coefficients for ``x >= X0``.
    """

    hbar: float
    rho: np.ndarray
    B: np.ndarray
    V: np.ndarray
    rho_inf: float
    B_inf: float
    V_inf: float
    X0: float
    mesh: SpaceMesh = field(repr=False)

    def __post_init__(self):
        if not self.hbar > 0:
            raise ValueError("hbar must be positive")
        if not (self.rho_inf > 0 and self.B_inf > 0):
            raise ValueError("rho_inf and B_inf must be positive")
        J = self.mesh.J
        arrays = {}
        for name in ("rho", "B", "V"):
            a = np.asarray(getattr(self, name), dtype=float)
            if a.shape != (J,):
                raise ValueError(f"{name} must hold J={J} interval samples")
            a.setflags(write=False)
            arrays[name] = a
            object.__setattr__(self, name, a)
        if np.any(arrays["rho"] <= 0) or np.any(arrays["B"] <= 0):
            raise ValueError("rho and B samples must be positive")
        x = self.mesh.nodes
        if not self.X0 < self.mesh.X:
            raise ValueError("tail start X0 must lie inside the domain")
        if x[-2] < self.X0:
            raise ValueError("x_{J-1} must not be left of X0")
        tail = x[:-1] >= self.X0
        for name, inf in (("rho", self.rho_inf), ("B", self.B_inf), ("V", self.V_inf)):
            if np.any(arrays[name][tail] != inf):
                raise ValueError(f"{name} must equal its tail constant for x >= X0")

    @classmethod
    def constant(cls, mesh: SpaceMesh, hbar=1.0, rho=1.0, B=2.0, V=0.0, X0=None):
        J = mesh.J
        if X0 is None:
            X0 = mesh.X - 2 * mesh.h
        return cls(hbar, np.full(J, float(rho)), np.full(J, float(B)), np.full(J, float(V)),
                   float(rho), float(B), float(V), float(X0), mesh)

    @classmethod
    def from_functions(cls, mesh: SpaceMesh, rho: Callable, B: Callable, V: Callable,
                       X0: float, hbar: float = 1.0) -> "PhysicalParams":
        """Sample coefficient functions at interval midpoints ``x_{j-1/2}``."""
        xm = mesh.midpoints

        def sample(f):
            return np.broadcast_to(np.asarray(f(xm), dtype=float), xm.shape).copy()

        return cls(hbar, sample(rho), sample(B), sample(V),
                   float(rho(mesh.X)), float(B(mesh.X)), float(V(mesh.X)), X0, mesh)


def _check_node(j, J):
    if not 1 <= j <= J - 1:
        raise IndexError(f"node index {j} outside 1..{J - 1}")


def apply_c_theta(samples, theta: float, W, j: int, mesh: SpaceMesh) -> complex:
    """Three-point averaged multiplication ``C_theta[kappa] W`` at node ``j``."""
    W = np.asarray(W)
    _check_node(j, mesh.J)
    h = mesh.steps
    k = np.asarray(samples, dtype=float)
    hj, hj1 = h[j - 1], h[j]
    kj, kj1 = k[j - 1], k[j + 1 - 1]
    hh = 0.5 * (hj + hj1)
    s_hat = (hj * kj + hj1 * kj1) / (2 * hh)
    return (theta * hj / hh * kj * W[j - 1]
            + (1 - 2 * theta) * s_hat * W[j]
            + theta * hj1 / hh * kj1 * W[j + 1])


def second_difference_flux(B, mesh: SpaceMesh, W, j: int) -> complex:
    """``d^_x (B d-_x W)`` at node ``j``."""
    W = np.asarray(W)
    _check_node(j, mesh.J)
    h = mesh.steps
    B = np.asarray(B, dtype=float)
    hj, hj1 = h[j - 1], h[j]
    hh = 0.5 * (hj + hj1)
    return (B[j] * (W[j + 1] - W[j]) / hj1 - B[j - 1] * (W[j] - W[j - 1]) / hj) / hh


def c_theta_bands(samples, theta: float, mesh: SpaceMesh):
    """Bands ``(sub, diag, sup)`` of ``C_theta[kappa]`` on interior nodes 1..J-1."""
    h = mesh.steps
    k = np.asarray(samples, dtype=float)
    hh = mesh.half_steps()
    hl, hr = h[:-1], h[1:]
    kl, kr = k[:-1], k[1:]
    sub = theta * hl / hh * kl
    sup = theta * hr / hh * kr
    diag = (1 - 2 * theta) * (hl * kl + hr * kr) / (2 * hh)
    return sub, diag, sup


def flux_bands(B, mesh: SpaceMesh):
    """Bands of the second-difference flux operator on interior nodes 1..J-1."""
    h = mesh.steps
    B = np.asarray(B, dtype=float)
    hh = mesh.half_steps()
    left = B[:-1] / h[:-1] / hh
    right = B[1:] / h[1:] / hh
    return left, -(left + right), right


def norm_weights(mesh: SpaceMesh) -> np.ndarray:
    """Node weights of the mesh L2 norm.

    Interior nodes get ``h_{j+1/2}``, the end nodes get the full adjacent step,
    so on a uniform mesh every weight is ``h`` (plain Riemann sum).  The
    published error tables are reproduced with these weights; trapezoidal
    end weights shift the late-time relative errors by several percent.
    """
    h = mesh.steps
    w = np.empty(mesh.J + 1)
    w[0] = h[0]
    w[-1] = h[-1]
    w[1:-1] = mesh.half_steps()
    return w


def l2_norm(W, mesh: SpaceMesh, weights=None) -> float:
    W = np.asarray(W)
    w = norm_weights(mesh) if weights is None else weights
    return float(np.sqrt(np.sum(w * (W.real**2 + W.imag**2))))


def c_norm(W) -> float:
    W = np.asarray(W)
    if W.size == 0:
        return 0.0
    return float(np.max(np.abs(W)))
