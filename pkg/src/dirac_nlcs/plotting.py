"""Static figures rendered next to the CSV/JSON artifacts.

The data files are the product; these figures are a quick look. Everything
goes through the object-oriented matplotlib API on an Agg canvas so no GUI
backend is touched.
"""

from __future__ import annotations

import math
from collections import OrderedDict

import numpy as np
from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure

STYLE = {
    "font.size": 8,
    "axes.labelsize": 9,
    "axes.titlesize": 9,
    "legend.fontsize": 7,
    "lines.linewidth": 1.2,
    "image.cmap": "viridis",
}

LABELS = {
    "x": r"$x$",
    "zeta": r"$\zeta$",
    "alpha_abs": r"$|\alpha|$",
    "alpha_phase": r"$\varphi$",
    "n": r"$n$",
    "B0": r"$B_0$",
    "density": r"$\rho(x)$",
    "hur": r"$\sigma_\xi\sigma_p$",
    "aniso": r"$\langle H\rangle^\zeta_\alpha$",
    "separation": r"$x_+ - x_-$",
    "energy": r"$E_n$",
    "P": r"$P_\alpha(n)$",
}

MAX_PANELS = 12


def _new_figure(panels):
    import matplotlib as mpl

    cols = min(panels, 3)
    rows = math.ceil(panels / cols)
    with mpl.rc_context(STYLE):
        fig = Figure(figsize=(3.2 * cols, 2.6 * rows), constrained_layout=True)
        FigureCanvasAgg(fig)
        axes = [fig.add_subplot(rows, cols, i + 1) for i in range(panels)]
    return fig, axes


def _table(columns, rows):
    return {c: [r[i] for r in rows] for i, c in enumerate(columns)}


def _groups(table, keys):
    """Row indices grouped by the values of `keys`, in first-seen order."""
    out = OrderedDict()
    n = len(next(iter(table.values()))) if table else 0
    for i in range(n):
        out.setdefault(tuple(table[k][i] for k in keys), []).append(i)
    return out


def _varying(table, candidates):
    return [c for c in candidates if c in table and len(set(table[c])) > 1]


def _title(keys, values):
    parts = []
    for k, v in zip(keys, values):
        parts.append(f"{k}={v:.4g}" if isinstance(v, float) else f"{k}={v}")
    return ", ".join(parts)


def _heatmaps(table, scan, value, panel_keys):
    groups = list(_groups(table, panel_keys).items())[:MAX_PANELS]
    fig, axes = _new_figure(max(len(groups), 1))
    for ax, (key, idx) in zip(axes, groups):
        x = np.array([table["x"][i] for i in idx])
        s = np.array([table[scan][i] for i in idx])
        v = np.array([table[value][i] for i in idx])
        xs, ss = np.unique(x), np.unique(s)
        if len(xs) * len(ss) == len(v) and len(ss) > 1:
            grid = np.full((len(ss), len(xs)), np.nan)
            grid[np.searchsorted(ss, s), np.searchsorted(xs, x)] = v
            mesh = ax.pcolormesh(xs, ss, grid, shading="auto")
            fig.colorbar(mesh, ax=ax, label=LABELS.get(value, value))
            ax.set_ylabel(LABELS.get(scan, scan))
        else:
            # cells carry their own x grids; overlay profiles
            for sv in np.unique(s):
                m = s == sv
                ax.plot(x[m], v[m], label=f"{scan}={sv:.3g}")
            ax.set_ylabel(LABELS.get(value, value))
        ax.set_xlabel(LABELS["x"])
        if panel_keys:
            ax.set_title(_title(panel_keys, key))
    return fig


def _lines(table, xcol, ycol, series_keys, panel_keys=()):
    panels = list(_groups(table, list(panel_keys)).items())[:MAX_PANELS] if panel_keys else [((), None)]
    fig, axes = _new_figure(len(panels))
    for ax, (pkey, pidx) in zip(axes, panels):
        sub = table if pidx is None else {c: [vals[i] for i in pidx] for c, vals in table.items()}
        for skey, idx in _groups(sub, list(series_keys)).items():
            xs = [sub[xcol][i] for i in idx]
            ys = [sub[ycol][i] for i in idx]
            ax.plot(xs, ys, marker="." if len(xs) < 40 else None, label=_title(series_keys, skey) or None)
        ax.set_xlabel(LABELS.get(xcol, xcol))
        ax.set_ylabel(LABELS.get(ycol, ycol))
        if panel_keys:
            ax.set_title(_title(panel_keys, pkey))
        if series_keys:
            ax.legend(frameon=False)
    return fig


def _uncertainty(table):
    fams = list(dict.fromkeys(table.get("family", ["?"])))
    if "alpha_phase" in _varying(table, ["alpha_phase"]) and "alpha_abs" in _varying(table, ["alpha_abs"]):
        fig, axes = _new_figure(len(fams))
        for ax, fam in zip(axes, fams):
            idx = [i for i, f in enumerate(table["family"]) if f == fam]
            a = np.array([table["alpha_abs"][i] for i in idx])
            p = np.array([table["alpha_phase"][i] for i in idx])
            h = np.array([table["hur"][i] for i in idx])
            aa, pp = np.unique(a), np.unique(p)
            grid = np.full((len(pp), len(aa)), np.nan)
            grid[np.searchsorted(pp, p), np.searchsorted(aa, a)] = h
            mesh = ax.pcolormesh(aa, pp, grid, shading="auto")
            fig.colorbar(mesh, ax=ax, label=LABELS["hur"])
            ax.set_xlabel(LABELS["alpha_abs"])
            ax.set_ylabel(LABELS["alpha_phase"])
            ax.set_title(fam)
        return fig
    xcol = (_varying(table, ["alpha_abs", "alpha_phase"]) or ["alpha_abs"])[0]
    return _lines(table, xcol, "hur", _varying(table, ["family", "alpha_phase", "alpha_abs"]) and ["family"])


def _occupation(table):
    panel_keys = _varying(table, ["alpha_abs", "alpha_phase"])
    fig = _lines(table, "n", "P", ["family"], panel_keys)
    # Poisson reference once per panel
    groups = list(_groups(table, panel_keys).items())[:MAX_PANELS] if panel_keys else [((), None)]
    for ax, (_, idx) in zip(fig.axes, groups):
        idx = idx if idx is not None else range(len(table["n"]))
        ref = {}
        for i in idx:
            ref[table["n"][i]] = table["poisson"][i]
        ns = sorted(ref)
        ax.plot(ns, [ref[n] for n in ns], color="black", linestyle="-.", label="Poisson")
        ax.legend(frameon=False)
    return fig


def build_figure(config, columns, rows):
    table = _table(columns, rows)
    cmd = config.command
    if cmd in ("eigen-density", "nlcs-density"):
        axes = [c for c in columns if c in ("family", "alpha_abs", "alpha_phase", "zeta", "B0", "n", "strain_dir")]
        varying = _varying(table, axes)
        if not varying:
            return _lines(table, "x", "density", [])
        # scan along the axis with the most distinct values, panel over the rest
        scan = max(varying, key=lambda c: len(set(table[c])))
        panel_keys = [c for c in varying if c != scan]
        return _heatmaps(table, scan, "density", panel_keys)
    if cmd == "uncertainty":
        return _uncertainty(table)
    if cmd == "energy":
        return _lines(table, "alpha_abs", "aniso", _varying(table, ["family", "strain_dir", "zeta"]))
    if cmd == "occupation":
        return _occupation(table)
    if cmd == "maxima":
        xcol = (_varying(table, ["zeta", "B0"]) or ["zeta"])[0]
        return _lines(table, xcol, "separation", _varying(table, ["n"]))
    if cmd == "levels":
        return _lines(table, "n", "energy", _varying(table, ["zeta", "B0", "strain_dir"]))
    raise ValueError(f"no figure for command {cmd!r}")


def render_figure(config, columns, rows, path, dpi=150):
    fig = build_figure(config, columns, rows)
    fig.savefig(path, dpi=dpi, metadata={"Software": None})
    return path
