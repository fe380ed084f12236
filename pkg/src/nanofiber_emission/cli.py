"""Command-line front end: ``nanofiber-emission {sweep,figure,modes}``.

Lengths are in nm, angles in units of pi and rates in units of gamma_0.
Values from ``--config`` are overridden by ``--set key=value`` and by the
explicit ``--var``/``--range``/``--format`` flags.
"""

from __future__ import annotations

import argparse
import math
import sys
import time
from pathlib import Path

from scipy.constants import c as C_LIGHT

from .fiber import FiberGeometry, cutoff_radius, solve_beta, supported_modes
from .sweeps import (OUTPUTS, VARIABLES, SweepError, SweepSpec, load_config,
                     parse_config_text, run_sweep)

__all__ = ["main", "build_parser"]


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--coarse", action="store_true",
                        help="looser radiation quadrature (rtol 1e-3) for fast previews")
    common.add_argument("--threads", type=_positive_int, default=1, metavar="N",
                        help="worker processes for sweep grid points")

    parser = argparse.ArgumentParser(
        prog="nanofiber-emission",
        description="Spontaneous-emission rates of 87Rb near an ultrathin optical fiber.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sw = sub.add_parser("sweep", parents=[common], help="run a parameter sweep")
    sw.add_argument("--config", type=Path, help="key = value file (see README)")
    sw.add_argument("--var", choices=VARIABLES, help="swept variable")
    sw.add_argument("--range", nargs=3, metavar=("START", "STOP", "POINTS"),
                    help="grid of the swept variable")
    sw.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                    help="override one configuration key (repeatable)")
    sw.add_argument("--outputs", help=f"comma list from: {', '.join(OUTPUTS)}")
    sw.add_argument("--format", choices=("csv", "json"))
    sw.add_argument("--out", type=Path, help="output file (default sweep.<format>)")

    fg = sub.add_parser("figure", parents=[common], help="reproduce one figure dataset and plot")
    fg.add_argument("name", help="fig2 ... fig21, or 'list'")
    fg.add_argument("--out", type=Path, default=Path("."), help="output directory")
    fg.add_argument("--format", choices=("csv", "json"), default="csv")
    fg.add_argument("--no-plot", action="store_true", help="write the dataset only")

    md = sub.add_parser("modes", help="list guided modes of a fiber")
    md.add_argument("--radius", type=float, required=True, help="fiber radius in nm")
    md.add_argument("--wavelength", type=float, default=780.0, help="nm")
    md.add_argument("--n1", type=float, default=1.4537)
    md.add_argument("--n2", type=float, default=1.0)
    return parser


def _sweep_values(args) -> dict:
    values = load_config(args.config) if args.config else {}
    overrides = "\n".join(args.set)
    if args.outputs:
        overrides += f"\noutputs = {args.outputs}"
    if args.var:
        overrides += f"\nvariable = {args.var}"
    if args.range:
        start, stop, points = args.range
        overrides += f"\nstart = {start}\nstop = {stop}\npoints = {points}"
    if args.format:
        overrides += f"\nformat = {args.format}"
    if args.coarse:
        overrides += "\ncoarse = true"
    try:
        values.update(parse_config_text(overrides))
    except ValueError as exc:
        raise SweepError(f"bad override: {exc}") from None
    return values


def _cmd_sweep(args) -> int:
    spec = SweepSpec.from_mapping(_sweep_values(args))
    out = args.out or Path(f"sweep.{spec.format}")
    t0 = time.perf_counter()
    table = run_sweep(spec, out, threads=args.threads)
    print(f"wrote {len(table.rows)} rows x {len(table.columns)} columns to {out} "
          f"({time.perf_counter() - t0:.1f} s)")
    return 0


def _cmd_figure(args) -> int:
    from .figures import FIGURES, make_figure

    if args.name == "list":
        for name, fig in FIGURES.items():
            tag = "  [radiation]" if fig.radiation_heavy else ""
            print(f"{name:6s} {fig.description}{tag}")
        return 0
    t0 = time.perf_counter()
    paths = make_figure(args.name, args.out, coarse=args.coarse, threads=args.threads,
                        fmt=args.format, plot=not args.no_plot)
    for key, path in paths.items():
        print(f"{key:7s} {path}")
    print(f"done in {time.perf_counter() - t0:.1f} s")
    return 0


def _cmd_modes(args) -> int:
    if args.radius <= 0 or args.wavelength <= 0:
        raise SweepError("radius and wavelength must be positive")
    nm = 1e-9
    geom = FiberGeometry(args.radius * nm, args.n1, args.n2)
    omega = 2 * math.pi * C_LIGHT / (args.wavelength * nm)
    V = 2 * math.pi * args.radius / args.wavelength * geom.numerical_aperture
    print(f"a = {args.radius:g} nm, lambda = {args.wavelength:g} nm, "
          f"n1 = {args.n1:g}, n2 = {args.n2:g}, V = {V:.6f}")
    print(f"{'mode':6s} {'n_eff':>10s} {'beta (1/um)':>12s} {'c*beta_prime':>13s} {'cutoff a (nm)':>14s}")
    for mode in supported_modes(geom, omega):
        sol = solve_beta(geom, omega, mode)
        a_cut = cutoff_radius(mode.family, mode.l, mode.m, args.wavelength * nm, args.n1, args.n2) / nm
        print(f"{mode.name:6s} {sol.effective_index:10.6f} {sol.beta * 1e-6:12.6f} "
              f"{sol.beta_prime * C_LIGHT:13.6f} {a_cut:14.3f}")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = {"sweep": _cmd_sweep, "figure": _cmd_figure, "modes": _cmd_modes}[args.command]
    try:
        return handler(args)
    except (SweepError, ValueError, OSError) as exc:
        print(f"nanofiber-emission: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
