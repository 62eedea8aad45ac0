"""Experiment drivers behind the command line: single runs, error tables,
kernel dumps, bound sweeps and boundary-condition comparisons."""
from __future__ import annotations

import csv
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..analytic import KINDS, ErrorAccumulator, ErrorReport, convergence_ratios, gaussian_exact
from ..kernels import divergence_bound, dtbc_parameters, kernel_table, sdtbc_parameters
from ..meshops import PhysicalParams, SpaceMesh, c_norm, l2_norm, norm_weights
from ..solver import SchemeConfig, Trajectory, iterate, run
from .config import RunConfig

log = logging.getLogger(__name__)


def _f(x) -> str:
    # round-trip formatting keeps CSVs byte-stable
    return repr(float(x))


def _write_csv(path, header, rows):
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(header)
        wr.writerows(rows)


@dataclass
class SolveResult:
    config: RunConfig
    trajectory: Trajectory
    report: ErrorReport | None


def solve(cfg: RunConfig, with_errors: bool = True) -> SolveResult:
    scheme = cfg.scheme()
    gp = cfg.gaussian()
    initial = gaussian_exact(scheme.mesh.nodes, 0.0, gp)
    acc = ErrorAccumulator(gp, scheme.mesh, scheme.grid) if with_errors else None
    traj = run(scheme, initial, store=cfg.snapshots, observers=[acc] if acc else [])
    log.info("%s J=%d M=%d theta=%.6g wall %.2fs", cfg.boundary, cfg.J, cfg.M, cfg.theta, traj.wall_time)
    return SolveResult(cfg, traj, acc.report() if acc else None)


def write_solve_outputs(res: SolveResult, out: str) -> list:
    traj, mesh = res.trajectory, res.config.scheme().mesh
    paths = []
    p = os.path.join(out, "trajectory.csv")
    _write_csv(p, ["m", "t", "l2_norm", "c_norm", "re_psi_J", "im_psi_J"],
               [[m, _f(t), _f(a), _f(b), _f(z.real), _f(z.imag)]
                for m, (t, a, b, z) in enumerate(zip(traj.times, traj.l2, traj.c, traj.boundary))])
    paths.append(p)
    for m, fld in sorted(traj.snapshots.items()):
        p = os.path.join(out, f"snapshot_m{m}.csv")
        _write_csv(p, ["j", "x", "re_psi", "im_psi"],
                   [[j, _f(x), _f(z.real), _f(z.imag)] for j, (x, z) in enumerate(zip(mesh.nodes, fld))])
        paths.append(p)
    if res.report is not None:
        rep, s = res.report, res.report.series
        p = os.path.join(out, "errors.csv")
        rows = [[m, _f(traj.times[m])] + [_f(s[k][m - 1]) for k in KINDS] for m in range(1, traj.times.size)]
        _write_csv(p, ["m", "t", "err_l2", "err_c", "rel_l2", "rel_c"], rows)
        paths.append(p)
        p = os.path.join(out, "errors_summary.csv")
        _write_csv(p, ["E_L2", "E_C", "E_L2_rel", "E_C_rel"], [[_f(v) for v in rep.as_tuple()]])
        paths.append(p)
    return paths


# ----------------------------------------------------------------------------- tables

@dataclass(frozen=True)
class Variant:
    label: str
    theta: float
    boundary: str


@dataclass(frozen=True)
class TableSpec:
    """Error table over a doubling sweep of ``J`` (fixed ``M``) or ``M`` (fixed ``J``)."""

    axis: str
    values: tuple
    fixed: int
    variants: tuple
    base: RunConfig = RunConfig()

    def __post_init__(self):
        if self.axis not in ("J", "M"):
            raise ValueError("axis must be 'J' or 'M'")
        v = list(self.values)
        if not v:
            raise ValueError("empty sweep")
        if any(b != 2 * a for a, b in zip(v, v[1:])):
            raise ValueError("sweep values must double")

    def configs(self, variant: Variant):
        other = "M" if self.axis == "J" else "J"
        for v in self.values:
            yield self.base.replace(theta=variant.theta, boundary=variant.boundary,
                                    **{self.axis: v, other: self.fixed})


def _map(fn, items, threads):
    if threads and threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            return list(ex.map(fn, items))
    return [fn(i) for i in items]


def error_table(spec: TableSpec, threads: int = 1) -> dict:
    """``label -> list of row dicts`` with errors and ratios (ratio ``None`` on the first row)."""
    jobs = [(var, cfg) for var in spec.variants for cfg in spec.configs(var)]
    reports = _map(lambda job: solve(job[1]).report, jobs, threads)
    out = {}
    n = len(spec.values)
    for i, var in enumerate(spec.variants):
        reps = reports[i * n:(i + 1) * n]
        ratios = convergence_ratios(reps) if n > 1 else {k: [None] for k in KINDS}
        out[var.label] = [
            {"axis": v, **{f"E_{k}": getattr(r, k) for k in KINDS}, **{f"R_{k}": ratios[k][j] for k in KINDS}}
            for j, (v, r) in enumerate(zip(spec.values, reps))
        ]
    return out


TABLE_COLUMNS = ["E_l2", "R_l2", "E_c", "R_c", "E_l2_rel", "R_l2_rel", "E_c_rel", "R_c_rel"]


def _sig3(v):
    if v is None:
        return "--"
    return f"{v:.2e}" if (abs(v) < 1e-2 or abs(v) >= 1e3) else f"{v:#.3g}"


def format_table(axis: str, rows: list) -> str:
    header = [axis] + TABLE_COLUMNS
    body = [[str(r["axis"])] + [_sig3(r[c]) for c in TABLE_COLUMNS] for r in rows]
    widths = [max(len(x) for x in col) for col in zip(header, *body)]
    lines = ["  ".join(s.rjust(w) for s, w in zip(line, widths)) for line in [header] + body]
    return "\n".join(lines)


def write_table_outputs(axis: str, table: dict, out: str, stem: str) -> list:
    paths = []
    texts = []
    for label, rows in table.items():
        p = os.path.join(out, f"{stem}_{label}.csv")
        _write_csv(p, [axis] + TABLE_COLUMNS,
                   [[r["axis"]] + ["" if r[c] is None else _f(r[c]) for c in TABLE_COLUMNS] for r in rows])
        paths.append(p)
        texts.append(f"== {label} ==\n{format_table(axis, rows)}\n")
    p = os.path.join(out, f"{stem}.txt")
    os.makedirs(out, exist_ok=True)
    with open(p, "w") as fh:
        fh.write("\n".join(texts))
    paths.append(p)
    return paths


# ----------------------------------------------------------------------------- kernels

def kernel_rows(cfg: RunConfig, theta: float, M: int | None = None):
    """Rows ``(label, m, |c0 R^m|, Re R^m, Im R^m)`` for ``theta`` and for ``1/4``."""
    scheme = cfg.scheme()
    M = scheme.grid.M if M is None else M
    rows = []
    tables = {}
    for label, th in (("theta", theta), ("quarter", 0.25)):
        p = dtbc_parameters(th, scheme.mesh.h, scheme.grid.tau, scheme.phys)
        t = kernel_table(p, M)
        tables[label] = t
        for m, r in enumerate(t.R):
            rows.append((label, th, m, abs(t.c0 * r), r.real, r.imag))
    gap = float(np.max(np.abs(np.abs(tables["theta"].c0 * tables["theta"].R)
                              - np.abs(tables["quarter"].c0 * tables["quarter"].R))))
    return rows, gap


def write_kernel_outputs(rows, out: str) -> str:
    p = os.path.join(out, "kernel.csv")
    _write_csv(p, ["kernel", "theta", "m", "abs_c0R", "re_R", "im_R"],
               [[lab, _f(th), m, _f(a), _f(re), _f(im)] for lab, th, m, a, re, im in rows])
    return p


# ----------------------------------------------------------------------------- bound

def kernel_difference(theta: float, h: float, tau: float, phys, M: int) -> np.ndarray:
    """``|c0_theta R^m_theta - c0_D R^m_D|`` for ``m = 0..M``."""
    pt = dtbc_parameters(theta, h, tau, phys)
    pd = sdtbc_parameters(tau, phys)
    return np.abs(pt.c0 * kernel_table(pt, M).R - pd.c0 * kernel_table(pd, M).R)


def bound_sweep(thetas, pairs, phys, m_max: int):
    """Per ``(theta, h, tau)``: measured differences, bound values and pass flags for ``m <= m_max``."""
    results = []
    m = np.arange(m_max + 1)
    for th in thetas:
        for h, tau in pairs:
            diff = kernel_difference(th, h, tau, phys, m_max)
            bnd = divergence_bound(th, h, tau, phys, m)
            results.append({"theta": th, "h": h, "tau": tau, "measured": diff, "bound": bnd,
                            "passed": bool(np.all(diff <= bnd))})
    return results


def halving_ratios(theta: float, h: float, tau: float, phys, m_max: int, halvings: int = 3):
    """``sup_m`` difference ratios when ``h`` is halved repeatedly at fixed ``tau``."""
    sups = [kernel_difference(theta, h / 2**i, tau, phys, m_max).max() for i in range(halvings + 1)]
    return [a / b for a, b in zip(sups, sups[1:])]


def write_bound_outputs(results, out: str) -> list:
    p1 = os.path.join(out, "bound.csv")
    rows = []
    for r in results:
        for m, (d, b) in enumerate(zip(r["measured"], r["bound"])):
            rows.append([_f(r["theta"]), _f(r["h"]), _f(r["tau"]), m, _f(d), _f(b), int(d <= b)])
    _write_csv(p1, ["theta", "h", "tau", "m", "measured", "bound", "pass"], rows)
    p2 = os.path.join(out, "bound_summary.csv")
    _write_csv(p2, ["theta", "h", "tau", "sup_measured", "bound_at_sup", "pass"],
               [[_f(r["theta"]), _f(r["h"]), _f(r["tau"]), _f(r["measured"].max()),
                 _f(r["bound"][int(np.argmax(r["measured"]))]), int(r["passed"])] for r in results])
    return [p1, p2]


# ----------------------------------------------------------------------------- compare

@dataclass
class Comparison:
    times: np.ndarray
    l2: np.ndarray
    c: np.ndarray

    @property
    def max_l2(self) -> float:
        return float(self.l2.max()) if self.l2.size else 0.0

    @property
    def max_c(self) -> float:
        return float(self.c.max()) if self.c.size else 0.0


def compare(a: SchemeConfig, b: SchemeConfig, initial) -> Comparison:
    """Per-level ``L2`` and ``C`` norms of the difference of two runs."""
    if not np.array_equal(a.mesh.nodes, b.mesh.nodes) or a.grid != b.grid:
        raise ValueError("configs must share mesh and time grid")
    w = norm_weights(a.mesh)
    M = a.grid.M
    l2 = np.empty(M + 1)
    c = np.empty(M + 1)
    for sa, sb in zip(iterate(a, initial), iterate(b, initial)):
        d = sa.field - sb.field
        l2[sa.m] = l2_norm(d, a.mesh, w)
        c[sa.m] = c_norm(d)
    return Comparison(a.grid.t(np.arange(M + 1)), l2, c)


def compare_configs(cfg: RunConfig, boundary_a: str, boundary_b: str) -> Comparison:
    a = cfg.replace(boundary=boundary_a).scheme()
    b = cfg.replace(boundary=boundary_b).scheme()
    initial = gaussian_exact(a.mesh.nodes, 0.0, cfg.gaussian())
    return compare(a, b, initial)


def write_compare_outputs(cmp: Comparison, out: str, stem: str = "compare") -> str:
    p = os.path.join(out, f"{stem}.csv")
    _write_csv(p, ["m", "t", "l2_diff", "c_diff"],
               [[m, _f(t), _f(x), _f(y)] for m, (t, x, y) in enumerate(zip(cmp.times, cmp.l2, cmp.c))])
    return p
