"""Run configuration for the command-line front end.

Every sweepable quantity is stored as a tuple of values so single runs and
sweeps share one code path; single commands just require one value per axis.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, fields, replace

import numpy as np

from .errors import ConfigError
from .fockalg import DeformationFamily
from .landau import AnisotropyParams, strain_to_params

COMMANDS = (
    "levels",
    "eigen-density",
    "maxima",
    "nlcs-density",
    "uncertainty",
    "energy",
    "occupation",
)
FAMILIES = ("identity", "shifted1", "shifted2")
FORMATS = ("csv", "json")

# axes that define a sweep cell, in output order
AXES = {
    "levels": ("params",),
    "eigen-density": ("params", "n"),
    "maxima": ("params", "n"),
    "nlcs-density": ("family", "alpha_abs", "alpha_phase", "params"),
    "uncertainty": ("family", "alpha_abs", "alpha_phase"),
    "energy": ("family", "alpha_abs", "alpha_phase", "params"),
    "occupation": ("family", "alpha_abs", "alpha_phase"),
}

# knobs that never change the data and are left out of the echoed config
RUNTIME_ONLY = ("output", "jobs", "plot")


def parse_range(text, name, integer=False):
    """Parse 'v', 'a,b,c' or inclusive 'min:max:count' into a tuple of values."""
    cast = int if integer else float
    text = str(text).strip()
    try:
        if ":" in text:
            parts = text.split(":")
            if len(parts) != 3:
                raise ValueError
            lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
            if count < 1 or (count > 1 and hi < lo):
                raise ValueError
            values = np.linspace(lo, hi, count).tolist() if count > 1 else [lo]
            if integer:
                if any(v != round(v) for v in values):
                    raise ValueError
                values = [int(round(v)) for v in values]
            return tuple(values)
        values = tuple(cast(v) for v in text.split(",") if v.strip())
        if not values:
            raise ValueError
        return values
    except ValueError:
        kind = "integers" if integer else "numbers"
        raise ConfigError(
            f"{name}: cannot parse {text!r}; expected a value, a comma list of {kind} "
            "or an inclusive range 'min:max:count'"
        ) from None


def parse_grid(text, name="--grid"):
    parts = str(text).split(":")
    try:
        if len(parts) != 3:
            raise ValueError
        grid = (float(parts[0]), float(parts[1]), int(parts[2]))
    except ValueError:
        raise ConfigError(f"{name}: expected 'min:max:points', got {text!r}") from None
    return grid


@dataclass(frozen=True)
class StrainBlock:
    direction: tuple = ("x",)
    epsilon: float = 0.21
    nu: float = 0.15
    beta: float = 2.0


@dataclass(frozen=True)
class RunConfig:
    command: str
    sweep: bool = False
    family: tuple = ("identity",)
    alpha_abs: tuple = (1.0,)
    alpha_phase: tuple = (0.0,)
    delta: float = 0.0
    zeta: tuple | None = (1.0,)
    strain: StrainBlock | None = None
    B0: tuple = (0.5,)
    k: float = 1.0
    n: tuple = (0,)
    grid: tuple | None = None
    tol: float = 1e-12
    output: str | None = None
    format: str = "csv"
    jobs: int = 1
    plot: bool = False

    def __post_init__(self):
        self.validate()

    # -- validation ---------------------------------------------------------

    def validate(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"command: unknown {self.command!r}; choose from {', '.join(COMMANDS)}")
        if (self.zeta is None) == (self.strain is None):
            raise ConfigError("zeta/strain: give exactly one of --zeta or the strain block")
        for name in ("alpha_abs", "alpha_phase", "B0", "n", "family"):
            if len(getattr(self, name)) == 0:
                raise ConfigError(f"{name}: at least one value is required")
        for fam in self.family:
            if fam not in FAMILIES:
                raise ConfigError(f"family: unknown {fam!r}; choose from {', '.join(FAMILIES)}")
        if any(not (math.isfinite(a) and a >= 0) for a in self.alpha_abs):
            raise ConfigError("alpha_abs: values must be finite and >= 0")
        if any(not math.isfinite(a) for a in self.alpha_phase + (self.delta, self.k)):
            raise ConfigError("alpha_phase/delta/k: values must be finite")
        if any(not (math.isfinite(b) and b > 0) for b in self.B0):
            raise ConfigError("B0: values must be positive")
        if self.zeta is not None and any(not (math.isfinite(z) and z > 0) for z in self.zeta):
            raise ConfigError("zeta: values must be positive")
        if any(int(n) != n or n < 0 for n in self.n):
            raise ConfigError("n: levels must be non-negative integers")
        if self.strain is not None:
            for d in self.strain.direction:
                if d not in ("x", "y"):
                    raise ConfigError(f"strain.direction: expected 'x' or 'y', got {d!r}")
            try:
                strain_to_params(self.strain.direction[0], self.strain.epsilon, self.strain.nu, self.strain.beta)
            except ValueError as exc:
                raise ConfigError(f"strain: {exc}") from None
        if self.grid is not None:
            lo, hi, pts = self.grid
            if not (math.isfinite(lo) and math.isfinite(hi)) or not lo < hi:
                raise ConfigError(f"grid: need min < max, got {lo}:{hi}")
            if int(pts) != pts or pts < 2:
                raise ConfigError(f"grid: need at least 2 points, got {pts}")
        if not 0 < self.tol <= 1e-4:
            raise ConfigError(f"tol: must lie in (0, 1e-4], got {self.tol}")
        if self.format not in FORMATS:
            raise ConfigError(f"format: expected csv or json, got {self.format!r}")
        if int(self.jobs) != self.jobs or self.jobs < 1:
            raise ConfigError(f"jobs: must be a positive integer, got {self.jobs}")
        if not self.sweep:
            multi = [
                axis for axis in self.axis_names() if len(self.axis_values(axis)) > 1
            ]
            if multi:
                raise ConfigError(
                    f"{', '.join(multi)}: several values given; use 'sweep {self.command}' for ranges"
                )
        if self.command == "levels" and len(self.n) != 1:
            raise ConfigError("n: 'levels' takes a single maximum level")

    # -- cells ---------------------------------------------------------------

    def axis_names(self):
        return AXES[self.command]

    def param_sets(self):
        """AnisotropyParams for every (zeta or strain direction, B0) combination."""
        out = []
        if self.strain is not None:
            for d in self.strain.direction:
                for b in self.B0:
                    p = strain_to_params(d, self.strain.epsilon, self.strain.nu, self.strain.beta, b, self.k, self.delta)
                    out.append((d, p))
        else:
            for z in self.zeta:
                for b in self.B0:
                    out.append((None, AnisotropyParams.from_zeta(z, b, self.k, self.delta)))
        return out

    def axis_values(self, axis):
        if axis == "params":
            return self.param_sets()
        return getattr(self, axis)

    def families(self):
        return {name: DeformationFamily(name) for name in self.family}

    # -- serialization -------------------------------------------------------

    def to_dict(self, data_only=False):
        d = asdict(self)
        if data_only:
            for key in RUNTIME_ONLY:
                d.pop(key)
        for key, value in d.items():
            if isinstance(value, tuple):
                d[key] = list(value)
        if d["strain"] is not None:
            d["strain"]["direction"] = list(d["strain"]["direction"])
        return d

    def to_json(self, **kw):
        return json.dumps(self.to_dict(**kw), sort_keys=True)

    @classmethod
    def from_dict(cls, data):
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"config: unknown field(s) {', '.join(sorted(unknown))}")
        if "command" not in data:
            raise ConfigError("config: field 'command' is required")
        kw = {}
        for key, value in data.items():
            if key == "strain" and value is not None:
                if not isinstance(value, dict):
                    raise ConfigError("strain: expected an object")
                value = dict(value)
                value["direction"] = tuple(value.get("direction", ("x",)))
                try:
                    value = StrainBlock(**value)
                except TypeError as exc:
                    raise ConfigError(f"strain: {exc}") from None
            elif key == "n" and isinstance(value, list):
                value = tuple(int(v) for v in value)
            elif key in ("family",) and isinstance(value, list):
                value = tuple(value)
            elif key in ("alpha_abs", "alpha_phase", "B0", "zeta") and isinstance(value, list):
                value = tuple(float(v) for v in value)
            elif key == "grid" and value is not None:
                if not isinstance(value, list) or len(value) != 3:
                    raise ConfigError("grid: expected [min, max, points]")
                value = (float(value[0]), float(value[1]), int(value[2]))
            kw[key] = value
        return cls(**kw)

    @classmethod
    def from_json(cls, text):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
        if not isinstance(data, dict):
            raise ConfigError("config: top level must be an object")
        return cls.from_dict(data)

    def with_(self, **changes):
        return replace(self, **changes)


def resolved_header(config):
    """Config echo including the derived field parameters of every parameter set."""
    derived = []
    for direction, p in config.param_sets():
        item = p.as_dict()
        if direction is not None:
            item["strain_direction"] = direction
        derived.append(item)
    return {"config": config.to_dict(data_only=True), "derived": derived}


__all__ = [
    "COMMANDS",
    "FAMILIES",
    "RunConfig",
    "StrainBlock",
    "parse_range",
    "parse_grid",
    "resolved_header",
]
