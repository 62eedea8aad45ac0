"""Convolution kernels of the discrete and semi-discrete transparent boundary conditions.

The boundary operator acting on the boundary history ``Phi^1..Phi^m`` is
``c0 * sum_l R^l Phi^{m-l}`` with ``R^m = -kappa^m (P_m(mu) - P_{m-2}(mu)) / (2m - 1)``.
The scheme-dependent parameters follow from the complex constant
``a_hat = V_inf/(hbar^2 B_inf) + 2i rho_inf/(tau hbar B_inf)`` and
``alpha_tilde = 2 + (1 - 4 theta) h^2 a_hat``.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi


def arg0(z: complex) -> float:
    """Argument of ``z`` in ``[0, 2 pi)``."""
    if z == 0:
        raise ValueError("arg0 undefined at 0")
    a = math.atan2(z.imag, z.real)
    return a + TWO_PI if a < 0 else a


@dataclass(frozen=True)
class HatA:
    a0: float
    a1: float

    @property
    def value(self) -> complex:
        return complex(self.a0, self.a1)


@dataclass(frozen=True)
class KernelParams:
    c0: complex
    kappa: complex
    mu: float


@dataclass(frozen=True)
class AlphaDecomposition:
    alpha_tilde: complex
    alpha_hat: complex
    beta_hat: float


@dataclass(frozen=True)
class KernelTable:
    R: np.ndarray
    kappa: complex
    mu: float
    c0: complex

    def __len__(self):
        return self.R.size

    @property
    def M(self) -> int:
        return self.R.size - 1


@dataclass(frozen=True)
class AdmissibilityReport:
    cond1: float
    cond2: float
    mu_margin: float
    passed: bool


def _tail(phys):
    """Accept a ``PhysicalParams`` or any object exposing the tail constants."""
    return phys.hbar, phys.rho_inf, phys.B_inf, phys.V_inf


def hat_a(phys, tau: float) -> HatA:
    hbar, rho, B, V = _tail(phys)
    if not tau > 0:
        raise ValueError("tau must be positive")
    if not (hbar > 0 and rho > 0 and B > 0):
        raise ValueError("hbar, rho_inf and B_inf must be positive")
    return HatA(V / (hbar**2 * B), 2 * rho / (tau * hbar * B))


def _check_theta(theta):
    if theta > 0.25:
        raise ValueError(f"theta={theta} exceeds 1/4: outside the stability region")


def alpha_decomposition(theta: float, h: float, tau: float, phys) -> AlphaDecomposition:
    a = hat_a(phys, tau).value
    w = (1 - 4 * theta) * h * h
    at = 2 + w * a
    return AlphaDecomposition(at, a * at, 2 * a.real + w * abs(a) ** 2)


def _params(a: complex, alpha_tilde: complex) -> KernelParams:
    # Phases are built from a_hat and alpha_tilde separately; the product
    # alpha_hat is never fed to an argument function.
    abs_a, abs_t = abs(a), abs(alpha_tilde)
    arg_sum = arg0(a) + arg0(alpha_tilde)
    c0 = -0.5 * math.sqrt(abs_a * abs_t) * complex(math.cos(-0.5 * arg_sum), math.sin(-0.5 * arg_sum))
    kappa = -(a / abs_a) * (alpha_tilde / abs_t)
    mu = (a * alpha_tilde.conjugate()).real / (abs_a * abs_t)
    if not -1 < mu < 1:
        raise ValueError(f"degenerate kernel: mu={mu}")
    return KernelParams(c0, kappa, mu)


def dtbc_parameters(theta: float, h: float, tau: float, phys) -> KernelParams:
    """Kernel parameters of the discrete TBC for the scheme with weight ``theta``."""
    _check_theta(theta)
    if not h > 0:
        raise ValueError("h must be positive")
    a = hat_a(phys, tau).value
    at = 2 + ((1 - 4 * theta) * h * h) * a
    if a * at == 0:
        raise ValueError("alpha_hat vanishes")
    return _params(a, at)


def sdtbc_parameters(tau: float, phys) -> KernelParams:
    """Semi-discrete TBC parameters; identical to the discrete ones at theta = 1/4."""
    a = hat_a(phys, tau).value
    return _params(a, 2 + 0.0 * a)


def kernel_table(params: KernelParams, M: int) -> KernelTable:
    """``R^0..R^M`` by the three-term recurrence."""
    if M < 0:
        raise ValueError("M must be non-negative")
    if not abs(params.mu) < 1:
        raise ValueError("|mu| must be < 1")
    kappa, mu = params.kappa, params.mu
    km = kappa * mu
    k2 = kappa * kappa
    R = np.empty(M + 1, dtype=complex)
    R[0] = 1.0
    if M >= 1:
        R[1] = -km
    for m in range(2, M + 1):
        R[m] = ((2 * m - 3) / m) * km * R[m - 1] - ((m - 3) / m) * k2 * R[m - 2]
    R.setflags(write=False)
    return KernelTable(R, kappa, mu, params.c0)


def legendre(m: int, x: float) -> float:
    """``P_m(x)`` by Bonnet's recurrence, with ``P_m = 0`` for ``m < 0``."""
    if m < 0:
        return 0.0
    p_prev, p = 1.0, x
    if m == 0:
        return p_prev
    for n in range(1, m):
        p_prev, p = p, ((2 * n + 1) * x * p - n * p_prev) / (n + 1)
    return p


def kernel_legendre_oracle(kappa: complex, mu: float, m: int) -> complex:
    """Closed Legendre form of ``R^m``; independent of the recurrence in ``kernel_table``."""
    if m < 0:
        raise ValueError("m must be non-negative")
    diff = legendre(m, mu) - legendre(m - 2, mu)
    return -(kappa**m) * diff / (2 * m - 1)


def legendre_all(M: int, x: float) -> np.ndarray:
    """``P_0(x)..P_M(x)`` in one pass of Bonnet's recurrence."""
    P = np.empty(M + 1)
    P[0] = 1.0
    if M >= 1:
        P[1] = x
    for n in range(1, M):
        P[n + 1] = ((2 * n + 1) * x * P[n] - n * P[n - 1]) / (n + 1)
    return P


def kernel_legendre_values(kappa: complex, mu: float, M: int) -> np.ndarray:
    """Vector form of ``kernel_legendre_oracle`` for ``m = 0..M``."""
    P = legendre_all(M, mu)
    Pm2 = np.concatenate([[0.0, 0.0], P[:-2]])[: M + 1]
    m = np.arange(M + 1)
    return -(kappa ** m) * (P - Pm2) / (2 * m - 1)


def kernel_asymptotic(a_hat: complex, alpha_tilde: complex, m, min_margin: float = 1e-3):
    """Leading large-``m`` term of ``R^m``; error is ``O(m^{-5/2})``."""
    m = np.asarray(m, dtype=float)
    if np.any(m < 1):
        raise ValueError("asymptotics need m >= 1")
    pa, pt = arg0(a_hat), arg0(alpha_tilde)
    if 1 - abs(math.cos(pa - pt)) < min_margin:
        raise ValueError("|mu| too close to 1 for the asymptotic formula")
    # From P_m(cos f) ~ sqrt(2/(pi m sin f)) cos((m + 1/2) f - pi/4) applied to
    # P_m - P_{m-2}; the phase offset is -3pi/4 (with +3pi/4 the residual is O(m^{-3/2})).
    amp = np.sqrt(2 / math.pi * math.sin(pa - pt))
    sign = np.where(m % 2 == 0, 1.0, -1.0)
    return (sign / m**1.5 * amp * np.exp(1j * m * (pa + pt))
            * np.cos((m - 0.5) * (pa - pt) - 0.75 * math.pi))


def admissibility(theta: float, h: float, tau: float, phys, A: float = 1.0) -> AdmissibilityReport:
    hbar, rho, B, V = _tail(phys)
    cond1 = tau * abs(V) / (hbar * rho)
    cond2 = (1 - 4 * theta) * (rho / (hbar * B)) * h * h / tau
    dec = alpha_decomposition(theta, h, tau, phys)
    a = hat_a(phys, tau).value
    mu = (a * dec.alpha_tilde.conjugate()).real / (abs(a) * abs(dec.alpha_tilde))
    return AdmissibilityReport(cond1, cond2, 1 - abs(mu), cond1 <= A and cond2 <= A)


def delta_theta(theta: float, h: float, tau: float, phys) -> float:
    """Sign-selector ``2 arg0(1 - 2 theta h^2 a) - arg0(alpha_hat)``."""
    _check_theta(theta)
    a = hat_a(phys, tau).value
    at = 2 + ((1 - 4 * theta) * h * h) * a
    return 2 * arg0(1 - 2 * theta * h * h * a) - (arg0(a) + arg0(at))


def check_delta_window(theta: float, delta: float) -> None:
    """Raise if ``delta`` lies outside the window that fixes the minus sign of c0."""
    lo, hi = (-TWO_PI, 0.0) if theta <= 0 else (TWO_PI, 2 * TWO_PI)
    if not lo < delta < hi:
        raise ArithmeticError(f"delta_theta={delta} outside ({lo}, {hi}) for theta={theta}")


def divergence_bound(theta: float, h: float, tau: float, phys, m) -> np.ndarray | float:
    """Upper bound for ``|c0_theta R^m_theta - c0_D R^m_D|``."""
    _check_theta(theta)
    a = hat_a(phys, tau).value
    w = (1 - 4 * theta) * h * h
    at = abs(2 + w * a)
    m = np.asarray(m, dtype=float)
    out = (3 * math.sqrt(2) / at + 1 / (np.abs(2 * m - 1) * (math.sqrt(at) + math.sqrt(2)))) * w * abs(a) ** 1.5
    return float(out) if out.ndim == 0 else out


def convolve(c0: complex, table: KernelTable, history, m: int) -> complex:
    """``c0 * sum_{l=0}^{m-1} R^l Phi^{m-l}`` with ``history[k-1] == Phi^k``."""
    history = np.asarray(history)
    if m > table.M:
        raise ValueError("kernel table too short")
    if history.size < m:
        raise ValueError("history shorter than m")
    if m == 0:
        return 0j
    return c0 * np.dot(table.R[:m], history[m - 1::-1])


def write_kernel_csv(path, table: KernelTable) -> None:
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["m", "re_R", "im_R", "abs_c0R"])
        for m, r in enumerate(table.R):
            wr.writerow([m, repr(float(r.real)), repr(float(r.imag)), repr(float(abs(table.c0 * r)))])
