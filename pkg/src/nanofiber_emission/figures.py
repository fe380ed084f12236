"""Registry of the reproducible figure datasets and their static line plots.

Each figure is one or more sweeps (one per panel group) plus a list of
panels naming the table columns to draw. Datasets are written next to the
PNG as ``figN.csv`` or ``figN_a.csv``/``figN_b.csv``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .fiber import Family, FiberGeometry, cutoff_V
from .sweeps import SweepConfig, SweepError, SweepSpec, SweepTable, run_sweep, write_table

__all__ = ["Panel", "FigureDef", "FIGURES", "figure_names", "make_figure", "plot_figure"]

RADIAL = ("radial_distance", 400.0, 1200.0, 41)
RADIUS = ("fiber_radius", 100.0, 500.0, 81)
PHI_Q = ("phi_Q", 0.0, 2.0, 73)
THETA_Q = ("theta_Q", 0.0, 1.0, 37)
GUIDED_4 = ("HE11", "TE01", "TM01", "HE21")

AXIS_LABELS = {
    "radial_distance": "r / a",
    "fiber_radius": "fiber radius a (nm)",
    "phi_Q": r"$\varphi_Q / \pi$",
    "theta_Q": r"$\theta_Q / \pi$",
}


@dataclass(frozen=True)
class Panel:
    """One subplot: every per-sublevel column of each quantity, coloured by M'."""

    source: str  # key into FigureDef.sweeps
    quantities: tuple[str, ...]
    ylabel: str
    title: str = ""
    unity: bool = False


@dataclass(frozen=True)
class FigureDef:
    name: str
    description: str
    sweeps: dict[str, tuple]  # key -> (grid, SweepConfig overrides)
    panels: tuple[Panel, ...]
    radiation_heavy: bool = False

    def specs(self, coarse: bool = False) -> dict[str, SweepSpec]:
        out = {}
        for key, (grid, overrides) in self.sweeps.items():
            variable, start, stop, points = grid
            cfg = SweepConfig(coarse=coarse, **overrides)
            out[key] = SweepSpec(variable, start, stop, points, cfg)
        return out


def _mode_panels(quantity: str, label: str, modes=GUIDED_4, source: str = "") -> tuple[Panel, ...]:
    return tuple(Panel(source, (f"{quantity}_{m}",), label.format(mode=m), m) for m in modes)


def _rgt_panels(source: str = "", extra_guided: tuple[str, ...] = ()) -> tuple[Panel, ...]:
    return (
        Panel(source, ("gamma_g",) + extra_guided, r"$\gamma^{(g)}_e/\gamma_0$", "guided"),
        Panel(source, ("gamma_r",), r"$\gamma^{(r)}_e/\gamma_0$", "radiation", unity=True),
        Panel(source, ("gamma",), r"$\gamma_e/\gamma_0$", "total", unity=True),
    )


_Y = dict(theta_Q=0.5, phi_Q=0.5)
_X = dict(theta_Q=0.5, phi_Q=0.0)
_MODES_OUT = dict(outputs=("modes",))
_RGT_OUT = dict(outputs=("guided", "radiation", "total"))
_F0_OUT = dict(outputs=("modes", "guided", "radiation", "total"), F_excited=0)
_ETA_OUT = dict(outputs=("eta",))


def _build_registry() -> dict[str, FigureDef]:
    figs = {}

    def add(name, description, sweeps, panels, heavy=False):
        figs[name] = FigureDef(name, description, sweeps, tuple(panels), heavy)

    for grid, base in ((RADIAL, 2), (RADIUS, 7)):
        where = "versus r/a" if grid is RADIAL else "versus fiber radius, atom on surface"
        n = base
        add(f"fig{n}", f"per-mode guided rates, F'=3, {where}",
            {"": (grid, _MODES_OUT)}, _mode_panels("gamma", r"$\gamma^{{({mode})}}_e/\gamma_0$"))
        add(f"fig{n + 1}", f"guided, radiation and total rates, F'=3, {where}",
            {"": (grid, _RGT_OUT)}, _rgt_panels(), heavy=True)
        add(f"fig{n + 2}", f"per-mode fractional rates, F'=3, {where}",
            {"": (grid, dict(outputs=("eta_modes",)))},
            _mode_panels("eta", r"$\eta^{{({mode})}}_e$"), heavy=True)
        add(f"fig{n + 3}", f"fractional guided rate, F'=3, {where}",
            {"": (grid, _ETA_OUT)}, [Panel("", ("eta",), r"$\eta_e$")], heavy=True)
        add(f"fig{n + 4}", f"rates from F'=0 with per-mode guided parts, {where}",
            {"": (grid, _F0_OUT)},
            _rgt_panels(extra_guided=tuple(f"gamma_{m}" for m in GUIDED_4)), heavy=True)

    for n, grid in ((12, RADIAL), (13, RADIUS)):
        add(f"fig{n}", "fractional guided rate, z_Q along x (a) and y (b)",
            {"a": (grid, dict(_ETA_OUT, **_X)), "b": (grid, dict(_ETA_OUT, **_Y))},
            [Panel("a", ("eta",), r"$\eta_e$", "z_Q = x"), Panel("b", ("eta",), r"$\eta_e$", "z_Q = y")],
            heavy=True)
    add("fig14", "fractional guided rate versus phi_Q at theta_Q = pi/2",
        {"": (PHI_Q, dict(_ETA_OUT, theta_Q=0.5))}, [Panel("", ("eta",), r"$\eta_e$")], heavy=True)
    add("fig15", "fractional guided rate versus theta_Q, phi_Q = 0 (a) and pi/2 (b)",
        {"a": (THETA_Q, dict(_ETA_OUT, phi_Q=0.0)), "b": (THETA_Q, dict(_ETA_OUT, phi_Q=0.5))},
        [Panel("a", ("eta",), r"$\eta_e$", r"$\varphi_Q = 0$"),
         Panel("b", ("eta",), r"$\eta_e$", r"$\varphi_Q = \pi/2$")], heavy=True)
    for n, grid in ((16, RADIAL), (17, RADIUS)):
        add(f"fig{n}", "directional fractional guided rates, z_Q = y",
            {"": (grid, dict(outputs=("eta_directional",), **_Y))},
            [Panel("", ("eta+",), r"$\eta^{(+)}_e$", "f = +"), Panel("", ("eta-",), r"$\eta^{(-)}_e$", "f = -")],
            heavy=True)
    zeta = r"$\zeta^{{({mode})}}_e$"
    zeta_out = dict(outputs=("zeta_modes",))
    add("fig18", "per-mode asymmetry factors versus r/a, z_Q = y",
        {"": (RADIAL, dict(zeta_out, **_Y))}, _mode_panels("zeta", zeta))
    add("fig19", "per-mode asymmetry factors versus fiber radius, z_Q = y",
        {"": (RADIUS, dict(zeta_out, **_Y))}, _mode_panels("zeta", zeta))
    add("fig20", "per-mode asymmetry factors versus phi_Q at theta_Q = pi/2",
        {"": (PHI_Q, dict(zeta_out, theta_Q=0.5))}, _mode_panels("zeta", zeta))
    add("fig21", "per-mode asymmetry factors versus theta_Q at phi_Q = pi/2",
        {"": (THETA_Q, dict(zeta_out, phi_Q=0.5))}, _mode_panels("zeta", zeta))
    return dict(sorted(figs.items(), key=lambda kv: int(kv[0][3:])))


FIGURES = _build_registry()


def figure_names() -> list[str]:
    return list(FIGURES)


def _lookup(name: str) -> FigureDef:
    try:
        return FIGURES[name]
    except KeyError:
        raise SweepError(f"unknown figure {name!r}; choose from {', '.join(FIGURES)}") from None


def cutoff_markers(table: SweepTable) -> list[tuple[str, float]]:
    """Higher-order mode cutoffs (nm) inside a fiber-radius sweep."""
    meta = table.metadata
    wl, n1, n2 = (float(meta[k]) for k in ("wavelength", "n1", "n2"))
    lo, hi = table.column("fiber_radius").min(), table.column("fiber_radius").max()
    geom = FiberGeometry(1.0, n1, n2)
    marks = []
    for family in Family:
        for l in (range(1, 5) if family.hybrid else (0,)):
            for m in (1, 2):
                if family is Family.HE and (l, m) == (1, 1):
                    continue
                a = cutoff_V(geom, family, l, m) * wl / (2 * math.pi * geom.numerical_aperture)
                if lo <= a <= hi:
                    marks.append((f"{family.value}{l}{m}", a))
    # TE0m and TM0m share a cutoff; keep one marker per radius
    marks.sort(key=lambda x: x[1])
    merged: list[tuple[str, float]] = []
    for label, a in marks:
        if merged and abs(merged[-1][1] - a) < 1e-6:
            merged[-1] = (merged[-1][0] + "/" + label, a)
        else:
            merged.append((label, a))
    return merged


def make_figure(name: str, out_dir, coarse: bool = False, threads: int = 1, fmt: str = "csv",
                plot: bool = True, timestamp: str | None = None) -> dict[str, Path]:
    """Run a figure's sweeps, write the datasets and (optionally) the PNG.

    Returns the written paths keyed by ``"data"``/``"data_a"``/... and ``"image"``.
    """
    fig = _lookup(name)
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise SweepError(f"cannot create {out_dir}: {exc}") from None
    tables, paths = {}, {}
    for key, spec in fig.specs(coarse).items():
        suffix = f"_{key}" if key else ""
        table = run_sweep(spec, threads=threads, timestamp=timestamp)
        table = SweepTable({"figure": name, **table.metadata}, table.columns, table.rows)
        paths["data" + suffix] = write_table(table, out_dir / f"{name}{suffix}.{fmt}", fmt)
        tables[key] = table
    if plot:
        paths["image"] = plot_figure(fig, tables, out_dir / f"{name}.png")
    return paths


def _sublevel_label(column: str) -> str:
    return "M'=" + column.split("[")[1].rstrip("]")


def plot_figure(fig: FigureDef | str, tables: dict[str, SweepTable], path) -> Path:
    """Render the panels of ``fig`` from already computed tables."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    if isinstance(fig, str):
        fig = _lookup(fig)
    n = len(fig.panels)
    ncols = 2 if n == 4 else n
    nrows = math.ceil(n / ncols)
    figure, axes = plt.subplots(nrows, ncols, figsize=(4.2 * ncols, 3.3 * nrows), squeeze=False)
    for ax, panel in zip(axes.flat, fig.panels):
        table = tables[panel.source]
        variable = table.columns[0]
        x = table.column("r_over_a") if variable == "radial_distance" else table.column(variable)
        colours = plt.cm.viridis(np.linspace(0, 0.9, 7))
        for qi, quantity in enumerate(panel.quantities):
            cols = table.matching(quantity)
            style = "-" if qi == 0 else "--"
            for ci, col in enumerate(cols):
                label = _sublevel_label(col) if qi == 0 else None
                if quantity != panel.quantities[0] and ci == 0:
                    label = quantity.split("_", 1)[-1]
                ax.plot(x, table.column(col), style, color=colours[ci % 7], lw=1.2, label=label)
        if panel.unity:
            ax.axhline(1.0, color="k", ls=":", lw=0.8)
        if variable == "fiber_radius":
            for label, a in cutoff_markers(table):
                ax.axvline(a, color="grey", ls=":", lw=0.8)
        ax.set_xlabel(AXIS_LABELS[variable])
        ax.set_ylabel(panel.ylabel)
        if panel.title:
            ax.set_title(panel.title, fontsize=9)
        ax.legend(fontsize=6, frameon=False)
    for ax in list(axes.flat)[n:]:
        ax.set_visible(False)
    figure.suptitle(fig.description, fontsize=9)
    figure.tight_layout()
    path = Path(path)
    figure.savefig(path, dpi=120)
    plt.close(figure)
    return path
