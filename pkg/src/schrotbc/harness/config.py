"""Line-oriented ``key = value`` run configuration with sections.

Example::

    [scheme]
    theta = 1/12
    boundary = dtbc

    [mesh]
    X = 1.5
    J = 800

    [time]
    T = 0.006
    M = 6000

Values accept fractions (``1/12``). Complex values are written ``re,im``.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from fractions import Fraction

from ..analytic import GaussianParams
from ..meshops import PhysicalParams, SpaceMesh, TimeGrid
from ..solver import BoundaryConfig, SchemeConfig


class ConfigError(ValueError):
    """Invalid configuration; ``line`` is 1-based when known."""

    def __init__(self, msg, line=None):
        self.line = line
        super().__init__(f"line {line}: {msg}" if line else msg)


def parse_number(text: str) -> float:
    text = text.strip()
    try:
        return float(Fraction(text)) if "/" in text else float(text)
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"not a number: {text!r}") from None


def parse_complex(text: str) -> complex:
    parts = text.split(",")
    if len(parts) != 2:
        raise ValueError(f"complex value must be 're,im': {text!r}")
    return complex(parse_number(parts[0]), parse_number(parts[1]))


def parse_int_list(text: str) -> tuple:
    text = text.strip()
    if not text:
        return ()
    return tuple(int(v) for v in text.split(","))


BOUNDARY_KINDS = ("dtbc", "sdtbc", "isdtbc", "custom")


@dataclass(frozen=True)
class RunConfig:
    theta: float = 1 / 12
    boundary: str = "dtbc"
    theta_flux: float | None = None
    kernel_theta: float | None = None
    X: float = 1.5
    J: int = 800
    T: float = 0.006
    M: int = 6000
    hbar: float = 1.0
    rho: float = 1.0
    B: float = 2.0
    V: float = 0.0
    X0: float | None = None
    k: float = 100.0
    alpha: float = 1 / 120
    x0: float = 0.8
    out: str = "out"
    snapshots: tuple = field(default_factory=tuple)
    preset: str | None = None

    def __post_init__(self):
        if self.boundary not in BOUNDARY_KINDS:
            raise ConfigError(f"boundary must be one of {BOUNDARY_KINDS}, got {self.boundary!r}")
        if self.boundary == "custom" and self.theta_flux is None:
            raise ConfigError("custom boundary needs theta_flux")
        if self.J < 2:
            raise ConfigError("J must be >= 2")
        if self.M < 0:
            raise ConfigError("M must be >= 0")
        if self.theta > 0.25:
            raise ConfigError("theta must be <= 1/4")

    def boundary_config(self) -> BoundaryConfig:
        if self.boundary == "dtbc":
            return BoundaryConfig.dtbc(self.theta)
        if self.boundary == "sdtbc":
            return BoundaryConfig.sdtbc(self.theta)
        if self.boundary == "isdtbc":
            return BoundaryConfig.isdtbc()
        return BoundaryConfig(self.theta_flux, self.kernel_theta)

    def gaussian(self) -> GaussianParams:
        return GaussianParams(self.k, self.alpha, self.x0)

    def scheme(self) -> SchemeConfig:
        mesh = SpaceMesh.uniform(self.X, self.J)
        # M = 0 keeps tau = T so that kernel parameters stay defined.
        grid = TimeGrid(self.T / self.M, self.M) if self.M else TimeGrid(self.T, 0)
        phys = PhysicalParams.constant(mesh, self.hbar, self.rho, self.B, self.V, self.X0)
        return SchemeConfig(self.theta, self.boundary_config(), mesh, grid, phys)

    def replace(self, **kw) -> "RunConfig":
        return dataclasses.replace(self, **kw)


# section -> key -> (field name, parser)
_SCHEMA = {
    "scheme": {"theta": ("theta", parse_number), "boundary": ("boundary", str),
               "theta_flux": ("theta_flux", parse_number), "kernel_theta": ("kernel_theta", parse_number)},
    "mesh": {"X": ("X", parse_number), "J": ("J", int)},
    "time": {"T": ("T", parse_number), "M": ("M", int)},
    "physics": {"hbar": ("hbar", parse_number), "rho": ("rho", parse_number), "B": ("B", parse_number),
                "V": ("V", parse_number), "X0": ("X0", parse_number)},
    "packet": {"k": ("k", parse_number), "alpha": ("alpha", parse_number), "x0": ("x0", parse_number)},
    "output": {"out": ("out", str), "snapshots": ("snapshots", parse_int_list)},
    "run": {"preset": ("preset", str)},
}


def parse_config(text: str, base: RunConfig | None = None) -> RunConfig:
    """Parse config text; unspecified keys come from ``base`` (or defaults)."""
    values = {}
    section = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].split(";", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigError(f"malformed section header {raw.strip()!r}", lineno)
            section = line[1:-1].strip()
            if section not in _SCHEMA:
                raise ConfigError(f"unknown section [{section}]", lineno)
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", lineno)
        if section is None:
            raise ConfigError("key outside of any section", lineno)
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in _SCHEMA[section]:
            raise ConfigError(f"unknown key {key!r} in section [{section}]", lineno)
        name, conv = _SCHEMA[section][key]
        try:
            values[name] = conv(val)
        except ValueError as exc:
            raise ConfigError(f"bad value for {key!r}: {exc}", lineno) from None
    base = base or RunConfig()
    try:
        return base.replace(**values)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def load_config(path, base: RunConfig | None = None) -> RunConfig:
    with open(path) as fh:
        return parse_config(fh.read(), base)


def _fmt(v):
    if v is None:
        return None
    if isinstance(v, tuple):
        return ",".join(str(i) for i in v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def dump_config(cfg: RunConfig) -> str:
    lines = []
    for section, keys in _SCHEMA.items():
        body = []
        for key, (name, _) in keys.items():
            s = _fmt(getattr(cfg, name))
            if s is not None:
                body.append(f"{key} = {s}")
        if body:
            lines.append(f"[{section}]")
            lines.extend(body)
            lines.append("")
    return "\n".join(lines)
