"""Command line: ``schrotbc {solve,table,kernel,bound,compare,list-presets}``.

Exit status is 0 on success, 2 on invalid input and 1 on numerical failure.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys

from ..solver import NumericalFailure
from . import experiments as ex
from . import presets
from .config import ConfigError, RunConfig, load_config, parse_int_list

log = logging.getLogger("schrotbc")


def _run_config(args, default_preset=None) -> tuple:
    preset = None
    name = args.preset or default_preset
    if name:
        preset = presets.get(name)
    cfg = preset.config if preset else presets.BASE
    if args.config:
        cfg = load_config(args.config, cfg)
    if getattr(args, "snapshots", None):
        cfg = cfg.replace(snapshots=parse_int_list(args.snapshots))
    return preset, cfg


def cmd_solve(args):
    preset, cfg = _run_config(args)
    if preset and preset.kind != "solve":
        raise ConfigError(f"preset {preset.name!r} is a {preset.kind} preset")
    res = ex.solve(cfg)
    for p in ex.write_solve_outputs(res, args.out):
        print(p)
    r = res.report
    print(f"E_L2={r.l2:.4e} E_C={r.c:.4e} E_L2_rel={r.l2_rel:.4e} E_C_rel={r.c_rel:.4e}")


def cmd_table(args):
    preset = presets.get(args.preset or "table1")
    if preset.kind != "table":
        raise ConfigError(f"preset {preset.name!r} is not a table preset")
    spec = preset.table
    if args.config:
        spec = ex.TableSpec(spec.axis, spec.values, spec.fixed, spec.variants, load_config(args.config, spec.base))
    table = ex.error_table(spec, threads=args.threads)
    for p in ex.write_table_outputs(spec.axis, table, args.out, preset.name):
        print(p)
    for label, rows in table.items():
        print(f"== {label} ==")
        print(ex.format_table(spec.axis, rows))


def cmd_kernel(args):
    preset, cfg = _run_config(args, "fig3-kernels")
    theta = args.theta if args.theta is not None else preset.extra.get("theta", cfg.theta)
    rows, gap = ex.kernel_rows(cfg, theta)
    print(ex.write_kernel_outputs(rows, args.out))
    print(f"max | |c0 R^m|_theta - |c0 R^m|_1/4 | = {gap:.6e}")


def cmd_bound(args):
    preset = presets.get(args.preset or "bound")
    thetas = preset.extra["thetas"]
    m_max = args.m_max or preset.extra["m_max"]
    cfg = presets.BASE.replace(J=3200)
    phys = cfg.scheme().phys
    results = ex.bound_sweep(thetas, presets.bound_pairs(), phys, m_max)
    for p in ex.write_bound_outputs(results, args.out):
        print(p)
    ok = all(r["passed"] for r in results)
    print(f"bound holds on all {len(results)} parameter sets: {ok}")
    for th in thetas:
        if th < 0.25:
            rat = ex.halving_ratios(th, presets.BASE.X / 800, presets.BASE.T / 6000, phys, min(m_max, 2000))
            print(f"theta={th:.6g}: sup-difference ratios under h-halving " + ", ".join(f"{r:.3f}" for r in rat))


def cmd_compare(args):
    preset, cfg = _run_config(args, "compare-table2")
    a = args.a or preset.extra.get("a", "dtbc")
    b = args.b or preset.extra.get("b", "sdtbc")
    Ms = preset.extra.get("M", (cfg.M,)) if not args.config else (cfg.M,)
    for M in Ms:
        cmp = ex.compare_configs(cfg.replace(M=M), a, b)
        print(ex.write_compare_outputs(cmp, args.out, f"compare_M{M}"))
        print(f"M={M}: max L2 diff {cmp.max_l2:.4e}, max C diff {cmp.max_c:.4e}")


def cmd_list(args):
    for name, p in presets.PRESETS.items():
        print(f"{name:24s} {p.kind:8s} {p.description}")


def build_parser():
    ap = argparse.ArgumentParser(prog="schrotbc", description=__doc__.splitlines()[0])
    ap.add_argument("--list-presets", action="store_true", help="list presets and exit")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command")

    def common(p):
        p.add_argument("--config", help="key = value config file")
        p.add_argument("--preset", help="preset name (see list-presets)")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--threads", type=int, default=1)
        return p

    p = common(sub.add_parser("solve", help="single run with errors vs the exact packet"))
    p.add_argument("--snapshots", help="comma-separated levels to store full fields")
    p.set_defaults(func=cmd_solve)
    common(sub.add_parser("table", help="error/ratio table over a J or M sweep")).set_defaults(func=cmd_table)
    p = common(sub.add_parser("kernel", help="dump convolution kernels"))
    p.add_argument("--theta", type=float)
    p.set_defaults(func=cmd_kernel)
    p = common(sub.add_parser("bound", help="verify the kernel-difference bound"))
    p.add_argument("--m-max", type=int)
    p.set_defaults(func=cmd_bound)
    p = common(sub.add_parser("compare", help="difference of two boundary conditions"))
    p.add_argument("--a")
    p.add_argument("--b")
    p.set_defaults(func=cmd_compare)
    sub.add_parser("list-presets").set_defaults(func=cmd_list)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.list_presets:
        cmd_list(args)
        return 0
    if not args.command:
        ap.print_help()
        return 2
    try:
        if hasattr(args, "out"):
            os.makedirs(args.out, exist_ok=True)
        args.func(args)
    except (ConfigError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (NumericalFailure, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
