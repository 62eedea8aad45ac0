"""Named experiments for the Gaussian-packet benchmark on ``[0, 1.5] x [0, 0.006]``."""
from __future__ import annotations

from dataclasses import dataclass, field

from .config import RunConfig
from .experiments import TableSpec, Variant

J_SWEEP = (200, 400, 800, 1600, 3200)
M_SWEEP = (375, 750, 1500, 3000, 6000)
NUMEROV = 1 / 12

BASE = RunConfig(theta=NUMEROV, X=1.5, T=0.006, hbar=1.0, rho=1.0, B=2.0, V=0.0,
                 k=100.0, alpha=1 / 120, x0=0.8)

TBC_VARIANTS = (Variant("dtbc", NUMEROV, "dtbc"), Variant("sdtbc", NUMEROV, "sdtbc"),
                Variant("isdtbc", NUMEROV, "isdtbc"))

# theta sweep at M=3000 (absolute/relative error curves vs J)
THETA_VARIANTS = tuple(
    Variant(f"{kind}_theta{name}", th, kind)
    for kind in ("dtbc", "sdtbc")
    for name, th in (("0", 0.0), ("1_12", NUMEROV), ("1_6", 1 / 6), ("1_4", 0.25))
) + (Variant("isdtbc_theta1_12", NUMEROV, "isdtbc"),)


@dataclass(frozen=True)
class Preset:
    name: str
    kind: str                      # solve | table | kernel | bound | compare
    description: str
    config: RunConfig = BASE
    table: TableSpec | None = None
    extra: dict = field(default_factory=dict)


def _presets():
    p = []
    p.append(Preset("table1", "table", "errors vs J for DTBC/SDTBC/ISDTBC, theta=1/12, M=6000",
                    table=TableSpec("J", J_SWEEP, 6000, TBC_VARIANTS, BASE)))
    p.append(Preset("table2", "table", "errors vs M for DTBC/SDTBC/ISDTBC, theta=1/12, J=3200",
                    table=TableSpec("M", M_SWEEP, 3200, TBC_VARIANTS, BASE)))
    for var in TBC_VARIANTS:
        p.append(Preset(f"table1-{var.label}", "table", f"errors vs J, {var.label} only, M=6000",
                        table=TableSpec("J", J_SWEEP, 6000, (var,), BASE)))
        p.append(Preset(f"table2-{var.label}", "table", f"errors vs M, {var.label} only, J=3200",
                        table=TableSpec("M", M_SWEEP, 3200, (var,), BASE)))
        for J in J_SWEEP:
            p.append(Preset(f"table1-{var.label}-J{J}", "solve", f"single run {var.label}, J={J}, M=6000",
                            config=BASE.replace(boundary=var.boundary, J=J, M=6000)))
    p.append(Preset("fig1-norms", "solve", "DTBC theta=1/12 run with initial/final snapshots and norms, J=800, M=3000",
                    config=BASE.replace(J=800, M=3000, snapshots=(0, 3000))))
    p.append(Preset("fig2-dtbc", "solve", "DTBC error history, theta=1/12, J=800, M=3000",
                    config=BASE.replace(J=800, M=3000)))
    p.append(Preset("fig2-sdtbc", "solve", "SDTBC error history, theta=1/12, J=800, M=3000",
                    config=BASE.replace(boundary="sdtbc", J=800, M=3000)))
    p.append(Preset("fig3-kernels", "kernel", "kernel moduli for theta=1/12 and 1/4, J=800, M=3000",
                    config=BASE.replace(J=800, M=3000), extra={"theta": NUMEROV}))
    p.append(Preset("fig4-fig5", "table", "abs/rel errors vs J for theta in {0,1/12,1/6,1/4} and ISDTBC, M=3000",
                    table=TableSpec("J", J_SWEEP, 3000, THETA_VARIANTS, BASE)))
    p.append(Preset("bound", "bound", "kernel-difference bound over the table (h, tau) grid",
                    extra={"thetas": (0.0, NUMEROV, 1 / 6, 0.25), "m_max": 10000}))
    p.append(Preset("compare-table2", "compare", "DTBC vs SDTBC difference, theta=1/12, J=3200, all M of the M sweep",
                    config=BASE.replace(J=3200), extra={"M": M_SWEEP, "a": "dtbc", "b": "sdtbc"}))
    return {x.name: x for x in p}


PRESETS = _presets()


def bound_pairs():
    """``(h, tau)`` pairs used by both error tables."""
    pairs = [(BASE.X / J, BASE.T / 6000) for J in J_SWEEP]
    pairs += [(BASE.X / 3200, BASE.T / M) for M in M_SWEEP if M != 6000]
    return pairs


def get(name: str) -> Preset:
    try:
        return PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; see list-presets") from None
