"""Command-line front end.

    expwidth generate "arith n=1000 step=1 dir=pi/2" --out imag.txt
    expwidth measure imag.txt --r 10 --R 1e4
    expwidth density "arith n=10^6" --phi pi/2 --out run/
    expwidth geom disk 0 0 1
    expwidth verdict "arith n=10^6" --b pi,2*pi,3*pi --theta pi/2
    expwidth sweep lattice.txt --b 2*pi --out run/

An input is a distribution file (``re im [mult]`` per line) or, when no such
file exists, a generator spec. CSV goes to stdout; with ``--out`` the CSV and
SVG artifacts are also written into that directory. Estimation settings come
from defaults, then a JSON ``--config`` file, then command-line flags.

Exit status: 0 on success, 2 when a theorem's hypothesis is violated, 1 on
any other error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, fields
from pathlib import Path

from . import convexgeom as cg
from .criteria import (
    Analysis,
    CompletenessVerdict,
    EstimationParams,
    breadth_criterion,
    diameter_sufficient,
    direction_profile,
    theorem1_verdict,
    theorem2_verdict,
)
from .divisor import PointDistribution
from .errors import ExpWidthError, HypothesisViolation
from .generators import eval_number, generate
from .io import atomic_write, csv_text, format_distribution, read_distribution
from .logmeasure import (
    IntervalMeasureTable,
    block_profile,
    density_report,
    fmt,
    left_log_measure,
    log_submeasure,
    right_log_measure,
)

EXIT_OK, EXIT_ERROR, EXIT_HYPOTHESIS = 0, 1, 2


@dataclass
class RunConfig:
    grid_base: float = 1.0
    grid_ratio: float = math.exp(1 / 8)
    horizon: float = 1e6
    tail_fraction: float = 0.3
    tolerance: float = 0.05
    divergence_margin: float = 1.0
    theta_steps: int = 720
    out: str | None = None
    formats: tuple[str, ...] = ("csv", "svg")

    def __post_init__(self):
        if not self.grid_ratio > 1:
            raise ValueError("grid_ratio must exceed 1")
        if not self.grid_base > 0:
            raise ValueError("grid_base must be positive")
        if not self.horizon >= self.grid_base * self.grid_ratio**3:
            raise ValueError("horizon must be at least grid_base * grid_ratio**3")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if not 0 < self.tail_fraction < 1:
            raise ValueError("tail_fraction must lie in (0, 1)")
        if int(self.theta_steps) != self.theta_steps or self.theta_steps < 1:
            raise ValueError("theta_steps must be a positive integer")
        self.theta_steps = int(self.theta_steps)
        self.formats = tuple(self.formats)
        unknown = set(self.formats) - {"csv", "svg"}
        if unknown:
            raise ValueError(f"unknown output formats {sorted(unknown)}")

    @classmethod
    def from_sources(cls, config_path: str | None, overrides: dict) -> "RunConfig":
        values: dict = {}
        if config_path:
            data = json.loads(Path(config_path).read_text(encoding="utf-8"))
            if not isinstance(data, dict):
                raise ValueError("the config file must hold a JSON object")
            known = {f.name for f in fields(cls)}
            unknown = set(data) - known
            if unknown:
                raise ValueError(f"unknown config keys {sorted(unknown)}; allowed {sorted(known)}")
            values.update(data)
        values.update({k: v for k, v in overrides.items() if v is not None})
        for key in ("grid_base", "grid_ratio", "horizon", "tail_fraction", "tolerance", "divergence_margin"):
            if key in values:
                values[key] = eval_number(values[key])
        return cls(**values)

    def params(self) -> EstimationParams:
        return EstimationParams(
            grid_base=self.grid_base,
            grid_ratio=self.grid_ratio,
            horizon=self.horizon,
            tail_fraction=self.tail_fraction,
            tolerance=self.tolerance,
            divergence_margin=self.divergence_margin,
            theta_steps=self.theta_steps,
        )

    def wants(self, fmt_name: str) -> bool:
        return self.out is not None and fmt_name in self.formats


def load_input(text: str) -> PointDistribution:
    if Path(text).is_file():
        return read_distribution(text)
    try:
        return generate(text)
    except ValueError as exc:
        raise ValueError(f"{text!r} is neither a readable file nor a generator spec ({exc})") from None


def number_list(text: str) -> list[float]:
    return [eval_number(t) for t in text.split(",") if t.strip()]


class _Emitter:
    """Prints CSV to stdout and mirrors artifacts into the output directory."""

    def __init__(self, cfg: RunConfig, stdout):
        self.cfg = cfg
        self.stdout = stdout

    def table(self, name: str, header, rows, echo: bool = True) -> None:
        text = csv_text(header, rows)
        if echo:
            self.stdout.write(text)
        if self.cfg.wants("csv"):
            atomic_write(Path(self.cfg.out) / name, text)

    def svg(self, name: str, render) -> None:
        if self.cfg.wants("svg"):
            atomic_write(Path(self.cfg.out) / name, render())


# -- subcommands --------------------------------------------------------------------


def cmd_generate(args, cfg: RunConfig, out) -> int:
    Z = generate(args.spec)
    text = format_distribution(Z)
    if cfg.out:
        atomic_write(cfg.out, text)
    else:
        out.write(text)
    return EXIT_OK


def cmd_measure(args, cfg: RunConfig, out) -> int:
    from .divisor import rotate

    Z = rotate(load_input(args.input), eval_number(args.phi))
    em = _Emitter(cfg, out)
    if args.table:
        an = Analysis(Z, cfg.params())
        table = an.profile.table(an.grid, args.kind)
        text = table.to_csv()
        out.write(text)
        if cfg.wants("csv"):
            atomic_write(Path(cfg.out) / f"{args.kind}_table.csv", text)
        return EXIT_OK
    if args.r is None or args.R is None:
        raise ValueError("measure needs --r and --R (or --table)")
    r, R = eval_number(args.r), eval_number(args.R)
    rows = [
        ("right", fmt(right_log_measure(Z, r, R))),
        ("left", fmt(left_log_measure(Z, r, R))),
        ("submeasure", fmt(log_submeasure(Z, r, R))),
    ]
    em.table("measure.csv", ("quantity", "value"), rows)
    return EXIT_OK


def cmd_density(args, cfg: RunConfig, out) -> int:
    from .plotting import block_estimate_figure, interval_curves_figure

    Z = load_input(args.input)
    phi = eval_number(args.phi)
    an = Analysis(Z, cfg.params())
    table: IntervalMeasureTable = an.profile.table(an.grid, args.kind, phi)
    p = an.params
    rep = density_report(table, p.tail_fraction, p.tolerance, p.spread_floor, p.growth_tol)
    em = _Emitter(cfg, out)
    em.table("density.csv", ("quantity", "value"), rep.rows())
    factors, est = block_profile(table, p.tail_fraction)
    em.table("block_profile.csv", ("a", "estimate"),
             [(fmt(a), fmt(v)) for a, v in zip(factors, est)], echo=False)
    title = f"{args.kind} of e^(i {fmt(phi)}) Z"
    em.svg("density_blocks.svg", lambda: block_estimate_figure(rep, title))
    em.svg("density_curves.svg", lambda: interval_curves_figure(table, title=title))
    return EXIT_OK


def _parse_body_args(tokens: list[str]) -> cg.ConvexBody:
    if not tokens:
        raise ValueError("geom needs a body: disk cx cy r | strip phi b [offset] | polygon x y ... | file PATH")
    kind, rest = tokens[0].lower(), tokens[1:]
    if kind == "file":
        if len(rest) != 1:
            raise ValueError("geom file takes one path")
        return cg.parse_body(Path(rest[0]).read_text(encoding="utf-8"))
    nums = [eval_number(t) for t in rest]
    if kind == "disk":
        if len(nums) != 3:
            raise ValueError("geom disk takes cx cy r")
        return cg.Disk(complex(nums[0], nums[1]), nums[2])
    if kind == "strip":
        if len(nums) not in (2, 3):
            raise ValueError("geom strip takes phi b [offset]")
        return cg.Strip(*nums)
    if kind in ("polygon", "points"):
        if len(nums) % 2:
            raise ValueError("geom polygon takes x y pairs")
        return cg.point_cloud(complex(x, y) for x, y in zip(nums[::2], nums[1::2]))
    if kind == "empty":
        return cg.EMPTY
    raise ValueError(f"unknown body kind {kind!r}")


def cmd_geom(args, cfg: RunConfig, out) -> int:
    body = _parse_body_args(args.body)
    rows = [("breadth", "", fmt(cg.breadth(body))), ("diameter", "", fmt(cg.diameter(body)))]
    for t in number_list(args.theta) if args.theta else []:
        rows.append(("support", fmt(t), fmt(cg.support(body, t))))
        rows.append(("width", fmt(t), fmt(cg.width(body, t))))
    _Emitter(cfg, out).table("geom.csv", ("quantity", "theta", "value"), rows)
    return EXIT_OK


def _verdict_rows(verdicts: list[CompletenessVerdict]):
    return [v.csv_row() for v in verdicts]


def cmd_verdict(args, cfg: RunConfig, out) -> int:
    Z = load_input(args.input)
    an = Analysis(Z, cfg.params())
    bs = number_list(args.b)
    thetas = number_list(args.theta)
    which = {t.strip() for t in args.theorems.split(",")}
    unknown = which - {"1", "2", "3", "4"}
    if unknown:
        raise ValueError(f"unknown theorems {sorted(unknown)}; use 1, 2, 3 (breadth), 4 (diameter)")
    verdicts: list[CompletenessVerdict] = []
    for b in bs:
        for theta in thetas:
            if "1" in which:
                verdicts.append(theorem1_verdict(an, b, theta))
            if "2" in which:
                verdicts.append(theorem2_verdict(an, b, theta, redheffer=args.redheffer))
        if "3" in which:
            verdicts.append(breadth_criterion(an, b))
        if "4" in which:
            verdicts.append(diameter_sufficient(an, b))
    _Emitter(cfg, out).table("verdicts.csv", CompletenessVerdict.CSV_HEADER, _verdict_rows(verdicts))
    if args.verbose:
        for v in verdicts:
            print(v.summary(), file=sys.stderr)
    return EXIT_OK


def cmd_sweep(args, cfg: RunConfig, out) -> int:
    from .plotting import direction_figure

    Z = load_input(args.input)
    an, thetas, reports = direction_profile(Z, cfg.params())
    em = _Emitter(cfg, out)
    header = ("theta", "bar", "underline", "inf", "b", "critical_width", "relative_spread", "converged")
    # the report of e^{i phi} Z governs the width in direction theta = pi/2 - phi
    rows = []
    for phi, rep in zip(thetas, reports):
        theta = math.remainder(math.pi / 2 - float(phi), math.pi) % math.pi
        rows.append((fmt(theta), fmt(rep.bar), fmt(rep.underline), fmt(rep.inf), fmt(rep.b),
                     fmt(2 * math.pi * rep.estimate), fmt(rep.relative_spread),
                     str(rep.converged).lower()))
    rows.sort(key=lambda row: float(row[0]))
    em.table("sweep.csv", header, rows)
    em.svg("sweep.svg", lambda: direction_figure(
        [float(r[0]) for r in rows], [float(r[1]) for r in rows], [r[-1] == "true" for r in rows],
        title="critical width by direction"))
    if args.b:
        verdicts = []
        for b in number_list(args.b):
            verdicts.append(breadth_criterion(an, b))
            verdicts.append(diameter_sufficient(an, b))
        em.table("sweep_verdicts.csv", CompletenessVerdict.CSV_HEADER, _verdict_rows(verdicts))
    return EXIT_OK


# -- argument parsing -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("estimation")
    g.add_argument("--config", help="JSON file with RunConfig fields")
    g.add_argument("--grid-base", dest="grid_base", help="smallest grid radius (default 1)")
    g.add_argument("--grid-ratio", dest="grid_ratio", help="geometric grid ratio (default e^(1/8))")
    g.add_argument("--horizon", help="largest grid radius (default 1e6)")
    g.add_argument("--tail-fraction", dest="tail_fraction", help="share of the grid used as tail (default 0.3)")
    g.add_argument("--tolerance", help="relative spread allowed between block densities (default 0.05)")
    g.add_argument("--divergence-margin", dest="divergence_margin",
                   help="per-decade growth above which a supremum counts as divergent (default 1)")
    g.add_argument("--theta-steps", dest="theta_steps", type=int, help="directions in [0, pi) (default 720)")
    g.add_argument("--format", dest="formats", action="append", choices=("csv", "svg"),
                   help="artifact formats written to --out (repeatable; default both)")
    g.add_argument("--out", help="output directory (output file for generate)")

    parser = argparse.ArgumentParser(prog="expwidth", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", parents=[common], help="materialize a generator spec")
    p.add_argument("spec", help='e.g. "sector theta=0 a=pi/4 density=1 horizon=10^4 seed=7"')
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("measure", parents=[common], help="logarithmic measures of e^{i phi} Z")
    p.add_argument("input")
    p.add_argument("--r")
    p.add_argument("--R")
    p.add_argument("--phi", default="0", help="rotation applied to Z first")
    p.add_argument("--table", action="store_true", help="emit the grid table r,R,value instead")
    p.add_argument("--kind", default="submeasure", choices=("submeasure", "right", "left"))
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("density", parents=[common], help="four block densities of e^{i phi} Z")
    p.add_argument("input")
    p.add_argument("--phi", default="0")
    p.add_argument("--kind", default="submeasure", choices=("submeasure", "right", "left"))
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("geom", parents=[common], help="breadth, diameter and widths of a convex body")
    p.add_argument("body", nargs="+", help="disk cx cy r | strip phi b [offset] | polygon x y ... | file PATH")
    p.add_argument("--theta", help="comma-separated directions for support and width")
    p.set_defaults(func=cmd_geom)

    p = sub.add_parser("verdict", parents=[common], help="completeness verdicts over a (b, theta) sweep")
    p.add_argument("input")
    p.add_argument("--b", required=True, help="comma-separated widths, e.g. pi,2*pi")
    p.add_argument("--theta", default="pi/2", help="comma-separated directions")
    p.add_argument("--theorems", default="1,2", help="subset of 1,2,3,4 (3 breadth, 4 diameter)")
    p.add_argument("--redheffer", default="check", choices=("check", "assert"))
    p.add_argument("-v", "--verbose", action="store_true", help="print clause summaries to stderr")
    p.set_defaults(func=cmd_verdict)

    p = sub.add_parser("sweep", parents=[common], help="critical width over all directions")
    p.add_argument("input")
    p.add_argument("--b", help="also run the breadth and diameter criteria at these widths")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    overrides = {k: getattr(args, k) for k in (
        "grid_base", "grid_ratio", "horizon", "tail_fraction", "tolerance",
        "divergence_margin", "theta_steps", "formats", "out")}
    try:
        cfg = RunConfig.from_sources(args.config, overrides)
        return args.func(args, cfg, stdout)
    except BrokenPipeError:
        # downstream reader (e.g. head) closed the pipe; not an error of ours
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return EXIT_OK
    except HypothesisViolation as exc:
        print(f"expwidth: hypothesis violated: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except (ExpWidthError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"expwidth: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
