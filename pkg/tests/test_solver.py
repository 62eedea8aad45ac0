import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from schrotbc.analytic import GaussianParams, gaussian_exact
from schrotbc.meshops import (PhysicalParams, SpaceMesh, TimeGrid, apply_c_theta, c_norm, l2_norm,
                              second_difference_flux)
from schrotbc.solver import (BoundaryConfig, NumericalFailure, SchemeConfig, ThomasFactorization,
                             TridiagonalSystem, assemble_step, boundary_kernel, init_state, iterate, run, step,
                             thomas_solve)


def packet_config(J=800, M=6000, theta=1 / 12, boundary=None, T=0.006):
    mesh = SpaceMesh.uniform(1.5, J)
    boundary = boundary or BoundaryConfig.dtbc(theta)
    return SchemeConfig(theta, boundary, mesh, TimeGrid.from_horizon(T, M), PhysicalParams.constant(mesh))


def variable_config(theta=0.1, boundary=None, M=12, J=14, seed=5):
    """Non-uniform mesh with variable coefficients and a constant tail (V_inf != 0)."""
    rng = np.random.default_rng(seed)
    h = rng.uniform(0.05, 0.12, J)
    h[-2:] = 0.08
    mesh = SpaceMesh(np.concatenate([[0.0], np.cumsum(h)]))
    X0 = mesh.nodes[-3]
    xm = mesh.midpoints
    tail = xm >= X0
    rho = np.where(tail, 1.3, rng.uniform(0.8, 1.6, J))
    B = np.where(tail, 1.7, rng.uniform(1.0, 2.5, J))
    V = np.where(tail, 4.0, rng.uniform(-5, 5, J))
    phys = PhysicalParams(0.9, rho, B, V, 1.3, 1.7, 4.0, X0, mesh)
    boundary = boundary or BoundaryConfig.dtbc(theta)
    return SchemeConfig(theta, boundary, mesh, TimeGrid(2e-3, M), phys)


# ---------------------------------------------------------------- dense oracle

def dense_residual(cfg, c0, R, U, W, hist, m):
    """Equations of one step written out node by node, as residuals F(U)."""
    mesh, ph, th = cfg.mesh, cfg.phys, cfg.theta
    J, tau, hb = mesh.J, cfg.grid.tau, ph.hbar
    F = np.zeros(J + 1, dtype=complex)
    F[0] = U[0]
    for j in range(1, J):
        F[j] = (1j * hb / tau * apply_c_theta(ph.rho, th, U - W, j, mesh)
                + hb**2 / 4 * second_difference_flux(ph.B, mesh, U + W, j)
                - 0.5 * apply_c_theta(ph.V, th, U + W, j, mesh))
    h, tf, g = mesh.h, cfg.boundary.theta_flux, hb**2 * ph.B_inf / 2

    def G(j):
        return 1j * hb * ph.rho_inf * (U[j] - W[j]) / tau - ph.V_inf * (U[j] + W[j]) / 2

    conv = sum(R[l] * hist[m - l] for l in range(1, m))
    F[J] = (g * ((U[J] + W[J]) - (U[J - 1] + W[J - 1])) / (2 * h)
            - h * (tf * G(J - 1) + (0.5 - tf) * G(J)) - g * c0 * U[J] - g * c0 * conv)
    return F


def dense_step(cfg, c0, R, W, hist, m):
    n = cfg.mesh.J + 1
    F0 = dense_residual(cfg, c0, R, np.zeros(n, complex), W, hist, m)
    A = np.empty((n, n), dtype=complex)
    for k in range(n):
        e = np.zeros(n, complex)
        e[k] = 1
        A[:, k] = dense_residual(cfg, c0, R, e, W, hist, m) - F0
    return np.linalg.solve(A, -F0), A, -F0


def dense_run(cfg, initial, steps):
    t = boundary_kernel(cfg)
    hist = np.zeros(cfg.grid.M + 1, complex)
    W = np.asarray(initial, complex)
    for m in range(1, steps + 1):
        W, _, _ = dense_step(cfg, t.c0, t.R, W, hist, m)
        hist[m] = W[-1]
    return W


# ---------------------------------------------------------------- assembly

def test_hand_assembled_two_interval_system():
    mesh = SpaceMesh.uniform(2.0, 2)  # h = 1
    cfg = SchemeConfig(0.0, BoundaryConfig.dtbc(0.0), mesh, TimeGrid(1.0, 3), PhysicalParams.constant(mesh))
    W = np.array([0.3 - 0.1j, 1.0 + 2.0j, -0.5 + 0.25j])
    st_ = init_state(cfg, W)
    sysm = assemble_step(st_, cfg)
    c0 = -(5 ** 0.25 / 2) * cmath.exp(-0.5j * (math.pi - math.atan(2)))
    A = np.array([[1, 0, 0],
                  [0.5, 1j - 1, 0.5],
                  [0, -0.5, 0.5 - 0.5j - c0]])
    np.testing.assert_allclose(sysm.dense(), A, rtol=0, atol=1e-14)
    rhs = np.array([0, -0.5 * W[0] + (1 + 1j) * W[1] - 0.5 * W[2], 0.5 * W[1] - (0.5 + 0.5j) * W[2]])
    np.testing.assert_allclose(sysm.rhs, rhs, rtol=0, atol=1e-14)


@pytest.mark.parametrize("boundary", [BoundaryConfig.dtbc(0.1), BoundaryConfig.sdtbc(0.1),
                                      BoundaryConfig.isdtbc(), BoundaryConfig(0.0, -0.3)])
def test_assembly_matches_dense_oracle(boundary):
    cfg = variable_config(boundary=boundary)
    rng = np.random.default_rng(1)
    J = cfg.mesh.J
    W = rng.normal(size=J + 1) + 1j * rng.normal(size=J + 1)
    st_ = init_state(cfg, W)
    st_.history[1:6] = rng.normal(size=5) + 1j * rng.normal(size=5)
    st_.m = 5
    sysm = assemble_step(st_, cfg)
    _, A, b = dense_step(cfg, st_.table.c0, st_.table.R, W, st_.history, 6)
    np.testing.assert_allclose(sysm.dense(), A, rtol=1e-13, atol=1e-10)
    np.testing.assert_allclose(sysm.rhs, b, rtol=1e-13, atol=1e-10)


def test_first_step_boundary_row_has_no_history():
    cfg = packet_config(J=50, M=10)
    st_ = init_state(cfg, np.zeros(51))
    sysm = assemble_step(st_, cfg)
    assert sysm.rhs[-1] == 0
    g = 0.5 * 1.0**2 * 2.0
    h = cfg.mesh.h
    p = 1j / cfg.grid.tau
    want = g / (2 * h) - h * (0.5 - 1 / 12) * p - g * st_.table.c0
    assert sysm.diag[-1] == pytest.approx(want, rel=1e-14)


def test_short_table_rejected():
    cfg = packet_config(J=50, M=10)
    short = boundary_kernel(cfg, 5)
    with pytest.raises(ValueError, match="short"):
        init_state(cfg, np.zeros(51), short)


# ---------------------------------------------------------------- Thomas

def test_thomas_identity_and_small():
    n = 5
    b = np.arange(n) + 1j
    u, r = thomas_solve(TridiagonalSystem(np.zeros(n), np.ones(n), np.zeros(n), b))
    np.testing.assert_array_equal(u, b)
    assert r == 0
    # [[2,1,0],[1,2,1],[0,1,2]] has inverse [[3,-2,1],[-2,4,-2],[1,-2,3]]/4
    sysm = TridiagonalSystem(np.ones(3), 2 * np.ones(3), np.ones(3), np.array([1.0, 0, 1j]))
    u, _ = thomas_solve(sysm)
    inv = np.array([[3, -2, 1], [-2, 4, -2], [1, -2, 3]]) / 4
    np.testing.assert_allclose(u, inv @ sysm.rhs, atol=1e-15)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_thomas_against_dense(seed):
    rng = np.random.default_rng(seed)
    n = 100
    sub = rng.normal(size=n) + 1j * rng.normal(size=n)
    sup = rng.normal(size=n) + 1j * rng.normal(size=n)
    diag = (np.abs(sub) + np.abs(sup) + 1) * np.exp(1j * rng.uniform(0, 2 * np.pi, n))
    b = rng.normal(size=n) + 1j * rng.normal(size=n)
    sysm = TridiagonalSystem(sub, diag, sup, b)
    u, res = thomas_solve(sysm)
    ref = np.linalg.solve(sysm.dense(), b)
    assert np.linalg.norm(u - ref) <= 1e-10 * np.linalg.norm(ref)
    assert res <= 1e-13
    np.testing.assert_allclose(sysm.matvec(u), b, atol=1e-12)


def test_thomas_zero_pivot():
    with pytest.raises(NumericalFailure, match="row 0"):
        ThomasFactorization(np.ones(3), np.array([0.0, 1, 1]), np.ones(3))
    with pytest.raises(NumericalFailure, match="row 1"):
        ThomasFactorization(np.ones(3), np.array([1.0, 1, 1]), np.ones(3))
    with pytest.raises(ValueError):
        ThomasFactorization(np.ones(1), np.ones(1), np.ones(1))


# ---------------------------------------------------------------- stepping

def test_zero_field_stays_zero():
    cfg = packet_config(J=100, M=50)
    traj = run(cfg, np.zeros(101), store="all")
    assert all(np.all(f == 0) for f in traj.snapshots.values())
    assert np.all(traj.l2 == 0)


def test_one_packet_step_against_dense():
    cfg = packet_config()
    psi0 = gaussian_exact(cfg.mesh.nodes, 0.0, GaussianParams())
    st_ = step(init_state(cfg, psi0), cfg)
    ref = dense_run(cfg, psi0, 1)
    assert np.max(np.abs(st_.field - ref)) <= 1e-12 * np.max(np.abs(ref))


@pytest.mark.parametrize("boundary", [BoundaryConfig.dtbc(0.1), BoundaryConfig.isdtbc()])
def test_several_steps_against_dense(boundary):
    cfg = variable_config(boundary=boundary)
    rng = np.random.default_rng(2)
    psi0 = rng.normal(size=cfg.mesh.J + 1) + 1j * rng.normal(size=cfg.mesh.J + 1)
    psi0[0] = 0
    states = list(s.field.copy() for s in iterate(cfg, psi0))
    ref = dense_run(cfg, psi0, cfg.grid.M)
    assert np.max(np.abs(states[-1] - ref)) <= 1e-12 * np.max(np.abs(ref))


def test_step_past_end_and_bad_initial():
    cfg = packet_config(J=20, M=1)
    s = init_state(cfg, np.zeros(21))
    step(s, cfg)
    with pytest.raises(ValueError):
        step(s, cfg)
    with pytest.raises(ValueError):
        init_state(cfg, np.zeros(20))


def test_history_ignores_initial_boundary_value():
    cfg = packet_config(J=30, M=4)
    a = np.zeros(31, complex)
    b = a.copy()
    b[-1] = 1e-3  # only the boundary node differs at level 0
    sa, sb = init_state(cfg, a), init_state(cfg, b)
    assert sa.history[0] == sb.history[0] == 0


def test_dirichlet_and_determinism():
    cfg = packet_config(J=200, M=400)
    psi0 = gaussian_exact(cfg.mesh.nodes, 0.0, GaussianParams())
    psi0[0] = 0.5  # nonzero initial value at x = 0 is overwritten from level 1 on
    t1 = run(cfg, psi0, store="all")
    t2 = run(cfg, psi0, store="all")
    for m in range(1, 401):
        assert t1.snapshots[m][0] == 0
        assert np.array_equal(t1.snapshots[m], t2.snapshots[m])
    assert np.array_equal(t1.l2, t2.l2) and np.array_equal(t1.boundary, t2.boundary)


def test_run_m0_and_store_options():
    mesh = SpaceMesh.uniform(1.5, 40)
    cfg = SchemeConfig(1 / 12, BoundaryConfig.dtbc(1 / 12), mesh, TimeGrid(1e-4, 0), PhysicalParams.constant(mesh))
    psi0 = gaussian_exact(mesh.nodes, 0.0, GaussianParams())
    traj = run(cfg, psi0, store="all")
    assert traj.times.size == 1 and list(traj.snapshots) == [0]
    np.testing.assert_array_equal(traj.snapshots[0], psi0)
    assert traj.l2[0] == pytest.approx(l2_norm(psi0, mesh))
    assert traj.c[0] == pytest.approx(c_norm(psi0), rel=1e-15)
    with pytest.raises(ValueError):
        run(cfg, psi0, store="some")
    traj = run(packet_config(J=40, M=10), psi0, store=[3, 7])
    assert sorted(traj.snapshots) == [3, 7]


def test_quarter_dtbc_sdtbc_identical():
    psi0 = gaussian_exact(SpaceMesh.uniform(1.5, 400).nodes, 0.0, GaussianParams())
    a = run(packet_config(J=400, M=1500, theta=0.25), psi0, store="all")
    b = run(packet_config(J=400, M=1500, theta=0.25, boundary=BoundaryConfig.sdtbc(0.25)), psi0, store="all")
    for m in a.snapshots:
        assert np.array_equal(a.snapshots[m], b.snapshots[m])


def test_residuals_stay_small():
    cfg = packet_config(J=400, M=600)
    psi0 = gaussian_exact(cfg.mesh.nodes, 0.0, GaussianParams())
    assert max(s.residual for s in iterate(cfg, psi0)) <= 1e-10


def test_config_invariants():
    mesh = SpaceMesh.uniform(1.5, 40)
    phys = PhysicalParams.constant(mesh)
    with pytest.raises(ValueError):
        SchemeConfig(0.3, BoundaryConfig.dtbc(0.2), mesh, TimeGrid(1e-4, 2), phys)
    with pytest.raises(ValueError):
        BoundaryConfig(0.3)
    with pytest.raises(ValueError):
        BoundaryConfig(0.1, 0.5)
    other = SpaceMesh.uniform(1.5, 41)
    with pytest.raises(ValueError):
        SchemeConfig(0.1, BoundaryConfig.dtbc(0.1), other, TimeGrid(1e-4, 2), phys)
    assert BoundaryConfig.isdtbc() == BoundaryConfig(1 / 6, None)
    assert BoundaryConfig.isdtbc().semi_discrete


def test_norms_drop_after_exit():
    cfg = packet_config(J=800, M=3000)
    psi0 = gaussian_exact(cfg.mesh.nodes, 0.0, GaussianParams())
    traj = run(cfg, psi0)
    assert traj.l2[-1] < 0.2 * traj.l2.max()
    assert traj.c[-1] < 0.2 * traj.c.max()
