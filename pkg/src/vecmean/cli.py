"""Command line: ``vecmean {norm-op,run,rate,gap}``.

Exit status 0 on success, 1 on usage or precondition errors, 2 when an audited
run breaks its oracle-call bound.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .estimators import AdaptiveConfig, default_m
from .harness import (
    ALGORITHMS,
    BudgetViolation,
    ExperimentPlan,
    estimate_error,
    fit_rate,
    gap_csv,
    gap_experiment,
    records_csv,
    sweep,
)
from .hard_instances import InstanceSpec
from .rng_streams import SeedSpec
from .tensor_space import operator_norm, parse_exponent

INSTANCES = ("mu1", "mu2", "mu3", "mu4", "witness", "custom")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}\n{self.format_usage()}")


def _exponent(text: str) -> float:
    try:
        return parse_exponent(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _seed(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return value


def parse_grid(text: str) -> list[int]:
    """``a:b:factor`` -> [a, a*factor, ...] up to b."""
    try:
        a, b, factor = (int(x) for x in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError("grid must look like a:b:factor") from None
    if a < 1 or b < a or factor < 2:
        raise argparse.ArgumentTypeError("grid needs 1 <= a <= b and factor >= 2")
    grid = [a]
    while grid[-1] * factor <= b:
        grid.append(grid[-1] * factor)
    return grid


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="vecmean", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    op = sub.add_parser("norm-op", help="operator norm of the row-mean map")
    op.add_argument("--p", type=_exponent, required=True)
    op.add_argument("--q", type=_exponent, required=True)
    op.add_argument("--n1", type=int, required=True)

    def experiment_flags(p, grid: bool):
        p.add_argument("--algo", choices=ALGORITHMS, required=True)
        p.add_argument("--instance", choices=INSTANCES, required=True)
        p.add_argument("--file", help="matrix file for --instance custom")
        p.add_argument("--p", type=_exponent, required=True)
        p.add_argument("--q", type=_exponent, required=True)
        p.add_argument("--n1", type=int)
        p.add_argument("--n2", type=int)
        if grid:
            p.add_argument("--n-grid", type=parse_grid, required=True)
            p.add_argument("--coupled", action="store_true", help="pick N1, N2 per n by the gap coupling")
        else:
            p.add_argument("--n", type=int, required=True)
        p.add_argument("--m", type=int)
        p.add_argument("--w", type=float, default=1.0)
        p.add_argument("--trials", type=int, default=100)
        p.add_argument("--seed", type=_seed, default=0)
        p.add_argument("--out")

    experiment_flags(sub.add_parser("run", help="error estimate at one budget"), grid=False)
    experiment_flags(sub.add_parser("rate", help="error estimates over a budget grid plus a rate fit"), grid=True)

    gap = sub.add_parser("gap", help="non-adaptive vs adaptive error at matched budgets")
    gap.add_argument("--p", type=_exponent, required=True)
    gap.add_argument("--q", type=_exponent, required=True)
    gap.add_argument("--n-grid", type=parse_grid, required=True)
    gap.add_argument("--m", type=int, default=9)
    gap.add_argument("--trials", type=int, default=100)
    gap.add_argument("--seed", type=_seed, default=0)
    gap.add_argument("--out")
    return parser


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _dims(args) -> tuple[int, int]:
    if args.instance == "custom":
        if not args.file:
            raise ValueError("--instance custom needs --file")
        header = Path(args.file).read_text().split(None, 2)
        return int(header[0]), int(header[1])
    if args.n1 is None or args.n2 is None:
        raise ValueError("--n1 and --n2 are required")
    return args.n1, args.n2


def _m(args, n1: int, n2: int) -> int:
    if args.m is not None:
        if args.m < 1:
            raise ValueError("--m must be positive")
        return args.m
    return default_m(n1, n2, args.w) if args.algo == "a3" else 1


def _run(args) -> str:
    n1, n2 = _dims(args)
    spec = InstanceSpec(args.instance, args.p, args.n, n1, n2, path=args.file)
    cfg = AdaptiveConfig(args.n, _m(args, n1, n2), args.w)
    rec = estimate_error(args.algo, spec, cfg, args.q, args.trials, SeedSpec(args.seed))
    return records_csv([rec])


def _rate(args) -> str:
    if args.coupled:
        plan = ExperimentPlan(args.n_grid, [args.algo], args.trials, args.seed, coupled=True, p=args.p, q=args.q)
        m = args.m if args.m is not None else 9
    else:
        n1, n2 = _dims(args)
        plan = ExperimentPlan(args.n_grid, [args.algo], args.trials, args.seed, n1, n2, p=args.p, q=args.q)
        m = _m(args, n1, n2)
    records = sweep(plan, args.algo, args.instance, m=m, w=args.w, path=args.file)
    text = records_csv(records)
    usable = [(r.n, r.mean_err) for r in records if r.mean_err > 0]
    if len(usable) >= 3:
        text += fit_rate(usable).line() + "\n"
    else:
        text += "# RateFit unavailable: fewer than three positive error points\n"
    return text


def _gap(args) -> str:
    if args.m < 1:
        raise ValueError("--m must be positive")
    return gap_csv(gap_experiment(args.p, args.q, args.n_grid, args.trials, args.m, args.seed))


def run_cli(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.command == "norm-op":
            if args.n1 < 1:
                raise ValueError("--n1 must be positive")
            _emit(f"{operator_norm(args.p, args.q, args.n1):.17g}\n", None)
        elif args.command == "run":
            _emit(_run(args), args.out)
        elif args.command == "rate":
            _emit(_rate(args), args.out)
        else:
            _emit(_gap(args), args.out)
    except UsageError as exc:
        sys.stderr.write(str(exc))
        return 1
    except BudgetViolation as exc:
        sys.stderr.write(f"vecmean: budget violation: {exc}\n")
        return 2
    except (ValueError, OSError) as exc:
        sys.stderr.write(f"vecmean: {exc}\n")
        return 1
    return 0


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
