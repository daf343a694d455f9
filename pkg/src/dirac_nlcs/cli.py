"""Command-line front end.

Exit codes: 0 success, 2 configuration error, 3 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import COMMANDS, FAMILIES, FORMATS, RunConfig, StrainBlock, parse_grid, parse_range
from .errors import ConfigError, NumericalError
from .runner import RECIPE_NOTES, figure_recipe, recipe_names, run

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3

LEVELS_DEFAULT_N = 10


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(f"{self.prog}: {message}")


def _common(p):
    g = p.add_argument_group("state")
    g.add_argument("--family", default="identity", help=f"comma list from {', '.join(FAMILIES)}")
    g.add_argument("--alpha-abs", default="1", help="|alpha|: value, list or min:max:count")
    g.add_argument("--alpha-phase", default="0", help="arg(alpha) in radians")
    g.add_argument("--delta", type=float, default=0.0, help="phase of the deformed annihilator")
    g.add_argument("--tol", type=float, default=1e-12, help="truncation tolerance of the series")

    g = p.add_argument_group("field and anisotropy")
    g.add_argument("--zeta", default=None, help="v_xx/v_yy (default 1); excludes the strain options")
    g.add_argument("--strain-dir", default=None, help="stress direction(s): x, y or x,y")
    g.add_argument("--epsilon", type=float, default=None, help="strain magnitude (default 0.21)")
    g.add_argument("--nu", type=float, default=None, help="Poisson ratio (default 0.15)")
    g.add_argument("--beta", type=float, default=None, help="Grueneisen-like parameter (default 2)")
    g.add_argument("--B0", default="0.5", help="field strength")
    g.add_argument("--k", type=float, default=1.0, help="momentum along y")
    g.add_argument("--n", default=None, help="Landau level(s); maximum level for 'levels'")
    g.add_argument("--grid", default=None, help="x grid as min:max:points")

    _runtime(p)


def _runtime(p):
    g = p.add_argument_group("output")
    g.add_argument("-o", "--output", default=None, help="output file (default: stdout or $DIRAC_NLCS_OUTPUT_DIR)")
    g.add_argument("--format", default=None, choices=FORMATS)
    g.add_argument("--jobs", type=int, default=None, help="worker threads for sweep cells")
    g.add_argument("--plot", action="store_true", default=None, help="also write a PNG next to the output file")
    g.add_argument("--dump-config", action="store_true", help="print the resolved config as JSON and exit")


def build_parser():
    parser = _Parser(prog="dirac-nlcs", description="Landau levels and nonlinear coherent states of anisotropic 2D Dirac materials.")
    sub = parser.add_subparsers(dest="action", required=True, parser_class=_Parser)
    for cmd in COMMANDS:
        _common(sub.add_parser(cmd, help=f"single {cmd} computation"))
    p = sub.add_parser("sweep", help="run a command over value ranges")
    p.add_argument("target", choices=COMMANDS)
    _common(p)
    p = sub.add_parser("figure", help="run a figure preset")
    p.add_argument("name")
    _runtime(p)
    p = sub.add_parser("replay", help="rerun a saved config JSON")
    p.add_argument("config")
    _runtime(p)
    sub.add_parser("presets", help="list figure presets")
    return parser


def config_from_args(args):
    command = args.target if args.action == "sweep" else args.action
    strain_given = any(getattr(args, a) is not None for a in ("strain_dir", "epsilon", "nu", "beta"))
    if args.zeta is not None and strain_given:
        raise ConfigError("zeta/strain: give either --zeta or the strain options, not both")
    strain = None
    zeta = parse_range(args.zeta, "--zeta") if args.zeta is not None else None
    if strain_given:
        d = StrainBlock()
        direction = tuple(s.strip() for s in args.strain_dir.split(",")) if args.strain_dir else d.direction
        strain = StrainBlock(
            direction=direction,
            epsilon=d.epsilon if args.epsilon is None else args.epsilon,
            nu=d.nu if args.nu is None else args.nu,
            beta=d.beta if args.beta is None else args.beta,
        )
    elif zeta is None:
        zeta = (1.0,)
    if args.n is not None:
        n = parse_range(args.n, "--n", integer=True)
    else:
        n = (LEVELS_DEFAULT_N,) if command == "levels" else (0,)
    return RunConfig(
        command,
        sweep=args.action == "sweep",
        family=tuple(s.strip() for s in args.family.split(",") if s.strip()),
        alpha_abs=parse_range(args.alpha_abs, "--alpha-abs"),
        alpha_phase=parse_range(args.alpha_phase, "--alpha-phase"),
        delta=args.delta,
        zeta=zeta,
        strain=strain,
        B0=parse_range(args.B0, "--B0"),
        k=args.k,
        n=n,
        grid=parse_grid(args.grid) if args.grid is not None else None,
        tol=args.tol,
        output=args.output,
        format=args.format or "csv",
        jobs=args.jobs or 1,
        plot=bool(args.plot),
    )


def _override(config, args):
    changes = {}
    for key in ("output", "format", "jobs", "plot"):
        value = getattr(args, key)
        if value is not None:
            changes[key] = value
    return config.with_(**changes) if changes else config


def _load(path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc.strerror}") from None
    return RunConfig.from_json(text)


def main(argv=None, stdout=None):
    stdout = stdout or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        if args.action == "presets":
            for name in recipe_names():
                stdout.write(f"{name:14s} {RECIPE_NOTES[name]}\n")
            return EXIT_OK
        name = None
        if args.action == "figure":
            config, name = _override(figure_recipe(args.name), args), args.name
        elif args.action == "replay":
            config = _override(_load(args.config), args)
        else:
            config = config_from_args(args)
        if args.dump_config:
            stdout.write(config.to_json() + "\n")
            return EXIT_OK
        run(config, stdout=stdout, name=name)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
