"""Crank-Nicolson theta-family solver for the 1D Schrodinger equation on the
half-axis with discrete and semi-discrete transparent boundary conditions."""

from .analytic import ErrorReport, GaussianParams, convergence_ratios, error_report, gaussian_exact
from .kernels import (
    HatA,
    KernelParams,
    KernelTable,
    admissibility,
    convolve,
    delta_theta,
    divergence_bound,
    dtbc_parameters,
    hat_a,
    kernel_asymptotic,
    kernel_legendre_oracle,
    kernel_table,
    sdtbc_parameters,
)
from .meshops import PhysicalParams, SpaceMesh, TimeGrid, apply_c_theta, c_norm, l2_norm, second_difference_flux
from .solver import BoundaryConfig, NumericalFailure, SchemeConfig, Trajectory, run, step, thomas_solve

__version__ = "0.1.0"
