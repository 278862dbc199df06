"""Command-line front end.

Exit codes: 0 success, 1 parse or I/O error, 2 input data violates an
invariant, 3 a dominance check came out negative.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import formats as io
from .dominance import check, ssd_check
from .envelope import reduce_fsd, reduce_ssd, ssd_minimal
from .market import price, sdf_quantile, solve_expenditure
from .oracles import brute_phi, feasible_sample
from .quantile import StepQuantile, ValidationError, from_samples, integrate, merge_grid

EXIT_OK, EXIT_PARSE, EXIT_INVALID, EXIT_VIOLATED = 0, 1, 2, 3
MAX_GRID = 10**6


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse exits with 2 by default
        self.print_usage(sys.stderr)
        self.exit(EXIT_PARSE, f"{self.prog}: error: {message}\n")


def _grid_size(text: str) -> int:
    n = int(text)
    if not 2 <= n <= MAX_GRID:
        raise argparse.ArgumentTypeError(f"grid size must be in [2, {MAX_GRID}]")
    return n


def _load_quantiles(paths: Sequence[str] | None) -> list[StepQuantile]:
    return [io.quantile_from_json(io.read_json(p)) for p in paths or ()]


def _benchmarks(args: argparse.Namespace) -> tuple[StepQuantile, StepQuantile]:
    fsd, ssd = _load_quantiles(args.fsd), _load_quantiles(args.ssd)
    if not fsd and not ssd:
        raise io.FormatError("give at least one --fsd or --ssd constraint")
    zero = StepQuantile.constant(0.0)
    return reduce_fsd(fsd or [zero]), reduce_ssd(ssd or [zero])


def _emit(text: str, out: str | None) -> None:
    if out:
        io.write_text(out, text)
    else:
        sys.stdout.write(text)


def _seed(args: argparse.Namespace) -> int:
    env = os.environ.get("SDM_SEED")
    return int(env) if env not in (None, "") else args.seed


def cmd_check(args: argparse.Namespace) -> int:
    a = io.quantile_from_json(io.read_json(args.a))
    b = io.quantile_from_json(io.read_json(args.b))
    rep = check(a, b, args.order)
    sys.stdout.write(io.dumps(io.report_to_json(rep)))
    return EXIT_OK if rep.holds else EXIT_VIOLATED


def cmd_envelope(args: argparse.Namespace) -> int:
    q1, q2 = _benchmarks(args)
    sol = ssd_minimal(q1, q2)
    out = io.envelope_to_json(sol)
    if args.oracle:
        ref = brute_phi(q1, q2, args.grid)
        ours = np.array([sol.phi(t) for t in ref.grid])
        seed = _seed(args)
        margins = [
            ssd_check(feasible_sample(q1, q2, seed + k), sol.q_star).margin for k in range(args.samples)
        ]
        out["oracle"] = {
            "grid": args.grid,
            "max_deviation": float(np.max(np.abs(ours - ref.values))),
            "seed": seed,
            "samples": args.samples,
            "min_dominance_margin": min(margins) if margins else None,
        }
        print(
            f"oracle: max |phi - brute| = {out['oracle']['max_deviation']:.3e} on {args.grid} points",
            file=sys.stderr,
        )
    _emit(io.dumps(out), args.output)
    return EXIT_OK


def cmd_price(args: argparse.Namespace) -> int:
    q = io.quantile_from_json(io.read_json(args.quantile))
    m = io.market_from_json(io.read_json(args.market))
    print(repr(price(q, sdf_quantile(m))))
    return EXIT_OK


def cmd_solve(args: argparse.Namespace) -> int:
    fsd, ssd = _load_quantiles(args.fsd), _load_quantiles(args.ssd)
    if not fsd and not ssd:
        raise io.FormatError("give at least one --fsd or --ssd constraint")
    m = io.market_from_json(io.read_json(args.market))
    res = solve_expenditure(fsd, ssd, m)
    io.write_text(args.output, io.dumps(io.payoff_to_json(res.payoff)))
    env_path = args.envelope_out or str(Path(args.output).with_suffix("")) + ".envelope.json"
    io.write_text(env_path, io.dumps(io.envelope_to_json(res.envelope)))
    print(repr(res.cost))
    return EXIT_OK


def cmd_from_samples(args: argparse.Namespace) -> int:
    values, weights = io.read_samples_csv(args.csv)
    _emit(io.dumps(io.quantile_to_json(from_samples(values, weights))), args.output)
    return EXIT_OK


def cmd_plot(args: argparse.Namespace) -> int:
    q1, q2 = _benchmarks(args)
    sol = ssd_minimal(q1, q2)
    p2 = integrate(q2)
    uniform = [k / args.points for k in range(args.points)]
    grid = merge_grid(uniform, q1.breakpoints, q2.breakpoints, sol.q_star.breakpoints, sol.phi.xs)
    rows = ["t,Q1bar,Q2bar,Qstar,P2,phi"]
    for t in grid:
        if t >= 1.0:
            continue
        cells = (t, q1(t), q2(t), sol.q_star(t), p2(t), sol.phi(t))
        rows.append(",".join(repr(float(c)) for c in cells))
    _emit("\n".join(rows) + "\n", args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sdm", description="SSD-minimal quantiles under mixed FSD/SSD constraints.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("check", help="test first- or second-order dominance of A over B")
    p.add_argument("--order", type=int, choices=(1, 2), required=True)
    p.add_argument("a", metavar="A.json")
    p.add_argument("b", metavar="B.json")
    p.set_defaults(func=cmd_check)

    def constraints(p: argparse.ArgumentParser) -> None:
        p.add_argument("--fsd", action="append", metavar="F.json", help="FSD benchmark (repeatable)")
        p.add_argument("--ssd", action="append", metavar="S.json", help="SSD benchmark (repeatable)")

    p = sub.add_parser("envelope", help="solve for the SSD-minimal quantile")
    constraints(p)
    p.add_argument("-o", "--output")
    p.add_argument("--oracle", action="store_true", help="cross-check against the brute-force formula")
    p.add_argument("--grid", type=_grid_size, default=2000)
    p.add_argument("--samples", type=int, default=20, help="feasible candidates tested with --oracle")
    p.add_argument("--seed", type=int, default=0, help="overridden by $SDM_SEED")
    p.set_defaults(func=cmd_envelope)

    p = sub.add_parser("price", help="cheapest cost of a quantile against the market SDF")
    p.add_argument("-q", "--quantile", required=True)
    p.add_argument("-m", "--market", required=True)
    p.set_defaults(func=cmd_price)

    p = sub.add_parser("solve", help="full expenditure minimisation")
    constraints(p)
    p.add_argument("-m", "--market", required=True)
    p.add_argument("-o", "--output", required=True, help="payoff JSON")
    p.add_argument("--envelope-out", help="envelope JSON (default: <output>.envelope.json)")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("quantile", help="quantile utilities")
    qsub = p.add_subparsers(dest="action", required=True, parser_class=_Parser)
    fs = qsub.add_parser("from-samples", help="empirical quantile of a CSV sample")
    fs.add_argument("csv")
    fs.add_argument("-o", "--output")
    fs.set_defaults(func=cmd_from_samples)

    p = sub.add_parser("plot", help="write curve samples as CSV")
    constraints(p)
    p.add_argument("-o", "--output")
    p.add_argument("--points", type=_grid_size, default=512)
    p.set_defaults(func=cmd_plot)
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"sdm: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (io.FormatError, ValueError, TypeError) as exc:
        print(f"sdm: {exc}", file=sys.stderr)
        return EXIT_PARSE


def main() -> None:
    sys.exit(run())
