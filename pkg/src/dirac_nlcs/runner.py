"""Execute a RunConfig: enumerate sweep cells, compute rows, write artifacts."""

from __future__ import annotations

import cmath
import io
import itertools
import json
import math
import os
import tempfile
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .config import RunConfig, StrainBlock, resolved_header
from .errors import ConfigError
from .landau import default_grid, density_maxima, spectrum, spinor_state
from .nlcs import build_state, occupation_distribution
from .observables import density, uncertainty

OUTPUT_DIR_ENV = "DIRAC_NLCS_OUTPUT_DIR"

RESULT_COLUMNS = {
    "levels": ("n", "eps", "energy"),
    "eigen-density": ("x", "upper_sq", "lower_sq", "density"),
    "maxima": ("x0", "x_minus", "x_plus", "separation"),
    "nlcs-density": ("x", "upper_sq", "lower_sq", "density"),
    "uncertainty": ("mean_xi", "mean_p", "var_xi", "var_p", "sigma_xi", "sigma_p", "hur"),
    "energy": ("v_xx", "v_yy", "pristine", "aniso"),
    "occupation": ("n", "P", "poisson"),
}


def _axis_columns(config):
    cols = []
    for axis in config.axis_names():
        if axis == "params":
            if config.strain is not None:
                cols.append("strain_dir")
            cols.extend(("zeta", "B0"))
        else:
            cols.append(axis)
    return cols


def _axis_cells(config):
    return list(itertools.product(*(config.axis_values(a) for a in config.axis_names())))


def _cell_prefix(config, cell):
    out = []
    for axis, value in zip(config.axis_names(), cell):
        if axis == "params":
            direction, p = value
            if config.strain is not None:
                out.append(direction)
            out.extend((p.zeta, p.B0))
        else:
            out.append(value)
    return out


def _grid(config, fallback):
    if config.grid is None:
        return fallback()
    lo, hi, pts = config.grid
    return np.linspace(lo, hi, int(pts))


def _nlcs_grid(state, params):
    half_xi = math.sqrt(2.0) * abs(state.alpha_tilde) + math.sqrt(2 * state.lowest_level + 1) + 8.0
    half = half_xi / math.sqrt(params.omega_zeta / 2.0)
    return np.linspace(params.x0 - half, params.x0 + half, 2001)


def _compute_cell(config, cell):
    values = dict(zip(config.axis_names(), cell))
    cmd = config.command
    if "params" in values:
        params = values["params"][1]
    if "family" in values:
        family = config.families()[values["family"]]
        alpha = values["alpha_abs"] * cmath.exp(1j * values["alpha_phase"])
        state = build_state(family, alpha, config.delta, config.tol)

    if cmd == "levels":
        return [(lv.n, lv.eps, lv.energy) for lv in spectrum(params, config.n[0])]
    if cmd == "eigen-density":
        n = values["n"]
        x = _grid(config, lambda: default_grid(params, n))
        prof = spinor_state(params, n, x)
        return list(zip(x, np.abs(prof.upper) ** 2, np.abs(prof.lower) ** 2, prof.density))
    if cmd == "maxima":
        lo, hi = density_maxima(params, values["n"])
        return [(params.x0, lo, hi, hi - lo)]
    if cmd == "nlcs-density":
        x = _grid(config, lambda: _nlcs_grid(state, params))
        prof = density(state, params, x)
        return list(zip(x, np.abs(prof.upper) ** 2, np.abs(prof.lower) ** 2, prof.density))
    if cmd == "uncertainty":
        r = uncertainty(state)
        return [(r.mean_xi, r.mean_p, r.var_xi, r.var_p, r.sigma_xi, r.sigma_p, r.hur)]
    if cmd == "energy":
        r = uncertainty(state, params)
        return [(params.v_xx, params.v_yy, r.mean_energy_pristine, r.mean_energy_aniso)]
    if cmd == "occupation":
        occ = occupation_distribution(state)
        return list(zip(occ.levels, occ.probabilities, occ.poisson))
    raise ConfigError(f"command: unknown {cmd!r}")


def compute(config):
    """(columns, rows) for a configuration; rows come out in axis order regardless of `jobs`."""
    cells = _axis_cells(config)
    if config.jobs > 1 and len(cells) > 1:
        with ThreadPoolExecutor(max_workers=config.jobs) as pool:
            results = list(pool.map(lambda c: _compute_cell(config, c), cells))
    else:
        results = [_compute_cell(config, c) for c in cells]

    columns = list(RESULT_COLUMNS[config.command])
    if config.sweep:
        columns = _axis_columns(config) + columns
    rows = []
    for cell, cell_rows in zip(cells, results):
        prefix = _cell_prefix(config, cell) if config.sweep else []
        rows.extend(tuple(prefix) + tuple(r) for r in cell_rows)
    return columns, rows


def _fmt(value):
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    return format(float(value), ".17g")


def render(config, columns, rows):
    """Serialize to the configured format. Deterministic: no timestamps, sorted keys."""
    header = resolved_header(config)
    if config.format == "json":
        def plain(v):
            if isinstance(v, str):
                return v
            if isinstance(v, (int, np.integer)):
                return int(v)
            return float(v)

        doc = dict(header, columns=columns, rows=[[plain(v) for v in r] for r in rows])
        return json.dumps(doc, sort_keys=True, indent=1) + "\n"
    buf = io.StringIO()
    buf.write("# " + json.dumps(header, sort_keys=True) + "\n")
    buf.write(",".join(columns) + "\n")
    for r in rows:
        buf.write(",".join(_fmt(v) for v in r) + "\n")
    return buf.getvalue()


def output_path(config, default_name):
    if config.output:
        return Path(config.output)
    env = os.environ.get(OUTPUT_DIR_ENV)
    if env:
        return Path(env) / f"{default_name}.{config.format}"
    return None


def write_atomic(path, text):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    umask = os.umask(0)
    os.umask(umask)
    try:
        os.chmod(tmp, 0o666 & ~umask)
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def run(config, stdout=None, name=None):
    """Compute and emit one configuration. Returns the output path (None for stdout)."""
    columns, rows = compute(config)
    text = render(config, columns, rows)
    path = output_path(config, name or config.command)
    if path is None:
        if config.plot:
            raise ConfigError("plot: figures are written next to a file; give --output")
        (stdout or _stdout()).write(text)
        return None
    write_atomic(path, text)
    if config.plot:
        from .plotting import render_figure

        render_figure(config, columns, rows, path.with_suffix(".png"))
    return path


def _stdout():
    import sys

    return sys.stdout


# -- figure presets ------------------------------------------------------------

TWO_PI = 2.0 * math.pi
_HUR_GRID = dict(alpha_abs=tuple(np.linspace(0.0, 5.0, 51).tolist()), alpha_phase=tuple(np.linspace(0.0, TWO_PI, 33).tolist()))
_PHASES = (math.pi / 4, math.pi / 2, 3 * math.pi / 4)
_ZETA_SWEEP = tuple(np.linspace(0.5, 1.5, 21).tolist())


def _density_at_six(family):
    return RunConfig(
        "nlcs-density",
        sweep=True,
        family=(family,),
        alpha_abs=(6.0,),
        alpha_phase=tuple(np.linspace(0.0, TWO_PI, 33).tolist()),
        zeta=(0.5, 1.5),
        grid=(-30.0, 26.0, 561),
    )


def _density_vs_zeta(family):
    return RunConfig(
        "nlcs-density",
        sweep=True,
        family=(family,),
        alpha_abs=(1.0, 5.0),
        alpha_phase=_PHASES,
        zeta=_ZETA_SWEEP,
        grid=(-22.0, 18.0, 401),
    )


def _hur(family):
    return RunConfig("uncertainty", sweep=True, family=(family,), **_HUR_GRID)


_RECIPES = {
    "fig2": lambda: RunConfig("eigen-density", sweep=True, zeta=_ZETA_SWEEP, n=(0, 1, 3, 5), grid=(-12.0, 8.0, 801)),
    "fig3": lambda: _density_at_six("identity"),
    "fig4": lambda: _density_vs_zeta("identity"),
    "fig5": lambda: _hur("identity"),
    "fig6": lambda: _density_at_six("shifted1"),
    "fig7": lambda: _density_vs_zeta("shifted1"),
    "fig8": lambda: _hur("shifted1"),
    "fig9": lambda: _density_at_six("shifted2"),
    "fig10": lambda: _density_vs_zeta("shifted2"),
    "fig11": lambda: _hur("shifted2"),
    "fig12": lambda: RunConfig(
        "occupation", sweep=True, family=("identity", "shifted1", "shifted2"), alpha_abs=(1.0, 2.0, 3.0, 4.0)
    ),
    "energy-strain": lambda: RunConfig(
        "energy",
        sweep=True,
        family=("identity", "shifted1", "shifted2"),
        alpha_abs=tuple(np.linspace(0.0, 5.0, 51).tolist()),
        zeta=None,
        strain=StrainBlock(direction=("x", "y"), epsilon=0.21, nu=0.15, beta=2.0),
    ),
}

RECIPE_NOTES = {
    "fig2": "rho_n(x) of the spinor eigenstates vs zeta, n in {0,1,3,5}",
    "fig3": "identity family, |alpha|=6, phase sweep at zeta=1/2 and 3/2",
    "fig4": "identity family density vs zeta, |alpha| in {1,5}, phase in {pi/4,pi/2,3pi/4}",
    "fig5": "identity family uncertainty product over |alpha| and phase",
    "fig6": "shifted1 family, |alpha|=6, phase sweep at zeta=1/2 and 3/2",
    "fig7": "shifted1 family density vs zeta",
    "fig8": "shifted1 family uncertainty product",
    "fig9": "shifted2 family, |alpha|=6, phase sweep at zeta=1/2 and 3/2",
    "fig10": "shifted2 family density vs zeta",
    "fig11": "shifted2 family uncertainty product",
    "fig12": "occupation distributions of all families with the Poisson reference",
    "energy-strain": "mean energy of all families for x- and y-strained graphene",
}


def figure_recipe(name):
    try:
        return _RECIPES[name]()
    except KeyError:
        raise ConfigError(f"figure: unknown preset {name!r}; available: {', '.join(_RECIPES)}") from None


def recipe_names():
    return list(_RECIPES)
