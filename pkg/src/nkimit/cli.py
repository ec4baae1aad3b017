"""Command-line interface: ``nkimit {generate,analyze,baseline,search,sweep}``.

Data goes to stdout or files, logs to stderr. Exit codes: 0 success,
1 runtime failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import os
import sys
from pathlib import Path

from . import analytic, harness
from . import landscape as nk
from .search import DEFAULT_MAX_TRIALS, SearchConfig, export_trace, run_search

log = logging.getLogger("nkimit")

WORKERS_ENV = "NKIMIT_WORKERS"


class UsageError(Exception):
    pass


def _int_list(text: str) -> list[int]:
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("list must not be empty")
    return values


def _float_list(text: str) -> list[float]:
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("list must not be empty")
    return values


def _seed(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError(f"seed must be a 64-bit unsigned integer, got {text}")
    return value


def _default_workers() -> int:
    raw = os.environ.get(WORKERS_ENV)
    if raw is None:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentDefaultsHelpFormatter
    parser = argparse.ArgumentParser(prog="nkimit", description=__doc__.splitlines()[0], formatter_class=fmt)
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate an NK landscape and cache its global maximum", formatter_class=fmt)
    p.add_argument("--n", type=int, default=12, help="string length N (1..30)")
    p.add_argument("--k", type=int, default=0, help="epistasis K (0..N-1)")
    p.add_argument("--seed", type=_seed, default=0, help="64-bit landscape seed")
    p.add_argument("--out", type=Path, required=True, help="landscape JSON file to write")

    p = sub.add_parser("analyze", help="maxima table and fitness trajectory profile", formatter_class=fmt)
    p.add_argument("landscape", type=Path, help="landscape JSON file")
    p.add_argument("--profile-out", type=Path, default=None, help="write the trajectory CSV here instead of stdout")

    p = sub.add_parser("baseline", help="closed-form cost of independent search", formatter_class=fmt)
    p.add_argument("--n", type=int, default=12, help="string length N (1..64)")
    p.add_argument("--m", type=_int_list, default=[1, 10, 100, 1000, 10000], help="comma-separated group sizes")

    p = sub.add_parser("search", help="one imitative search run", formatter_class=fmt)
    p.add_argument("landscape", type=Path, help="landscape JSON file")
    p.add_argument("--m", type=int, default=1, help="group size M")
    p.add_argument("--p", type=float, default=0.0, help="imitation probability in [0, 1]")
    p.add_argument("--seed", type=_seed, default=0, help="64-bit search seed")
    p.add_argument("--max-trials", type=int, default=DEFAULT_MAX_TRIALS, help="trial cap")
    p.add_argument("--trace", type=Path, default=None, help="write the model-fitness trace CSV here")

    p = sub.add_parser("sweep", help="replicated searches over (M, p) grids", formatter_class=fmt)
    p.add_argument("landscape", type=Path, help="landscape JSON file")
    p.add_argument("--m-grid", type=_int_list, default=list(harness.DEFAULT_M_VALUES), help="comma-separated M values")
    p.add_argument("--p-grid", type=_float_list, default=list(harness.DEFAULT_P_VALUES), help="comma-separated p values")
    p.add_argument("--replications", "-R", type=int, default=harness.DEFAULT_REPLICATIONS, help="searches per cell")
    p.add_argument("--master-seed", type=_seed, default=0, help="64-bit master seed")
    p.add_argument("--max-trials", type=int, default=DEFAULT_MAX_TRIALS, help="trial cap per search")
    p.add_argument(
        "--workers", type=int, default=_default_workers(), help=f"worker threads (default from ${WORKERS_ENV})"
    )
    p.add_argument("--trace-dir", type=Path, default=None, help="write a trace CSV of replication 0 per cell")
    p.add_argument("--out", type=Path, required=True, help="sweep CSV file to write")
    return parser


def cmd_generate(args) -> int:
    try:
        landscape = nk.generate(args.n, args.k, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    g, f = nk.find_global_maximum(landscape)
    nk.save(landscape, args.out)
    log.info("wrote %s (global max %d, fitness %.6f)", args.out, g, f)
    return 0


def cmd_analyze(args) -> int:
    landscape = nk.load(args.landscape)
    out = sys.stdout
    for line in nk.describe(landscape):
        print(line, file=out)
    profile = ["d,relative_fitness"] + [f"{d},{v:.17g}" for d, v in nk.fitness_profile_trajectory(landscape)]
    if args.profile_out is not None:
        args.profile_out.write_text("\n".join(profile) + "\n", encoding="utf-8")
    else:
        print(file=out)
        print("\n".join(profile), file=out)
    return 0


def cmd_baseline(args) -> int:
    if any(m < 1 for m in args.m):
        raise UsageError(f"every --m must be >= 1, got {args.m}")
    if not 1 <= args.n <= analytic.MAX_N:
        raise UsageError(f"--n must be in [1, {analytic.MAX_N}], got {args.n}")
    base = analytic.IndependentBaseline.for_length(args.n)
    print("n,m,lambda_n,one_minus_lambda,mean_cost")
    for m in args.m:
        cost = analytic.mean_cost_independent(base, m)
        print(f"{args.n},{m},{base.lambda_n:.17g},{base.per_trial_success:.17g},{cost:.17g}")
    return 0


def cmd_search(args) -> int:
    try:
        cfg = SearchConfig(args.m, args.p, args.seed, args.max_trials, record_trace=args.trace is not None)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    landscape = nk.load(args.landscape)
    nk.find_global_maximum(landscape)
    out = run_search(landscape, cfg)
    print("m,p,seed,success,t_star,cost,finder")
    finder = "" if out.finder is None else out.finder
    print(f"{cfg.m},{cfg.p:.17g},{cfg.seed},{int(out.success)},{out.t_star},{out.cost:.17g},{finder}")
    if args.trace is not None:
        export_trace(out, landscape, args.trace)
    return 0


def cmd_sweep(args) -> int:
    try:
        spec = harness.SweepSpec(
            landscape=args.landscape,
            m_values=args.m_grid,
            p_values=args.p_grid,
            replications=args.replications,
            master_seed=args.master_seed,
            max_trials=args.max_trials,
            trace=args.trace_dir is not None,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.workers < 1:
        raise UsageError(f"--workers must be >= 1, got {args.workers}")
    landscape = nk.load(args.landscape)
    spec = dataclasses.replace(spec, landscape=landscape)
    if args.trace_dir is not None:
        args.trace_dir.mkdir(parents=True, exist_ok=True)

    done: list[harness.SweepCell] = []

    def on_cell(cell):
        done.append(cell)
        log.info("%d/%d cells done", len(done), len(spec.m_values) * len(spec.p_values))
        if cell.trace is not None:
            export_trace(cell.trace, landscape, args.trace_dir / f"trace_m{cell.m}_p{cell.p:g}.csv")

    try:
        cells = harness.run_sweep(spec, workers=args.workers, on_cell=on_cell)
    except (KeyboardInterrupt, MemoryError):
        harness.export_csv(done, args.out)
        log.error("sweep aborted; %d completed cells flushed to %s", len(done), args.out)
        return 1
    harness.export_csv(cells, args.out)
    return 0


COMMANDS = {
    "generate": cmd_generate,
    "analyze": cmd_analyze,
    "baseline": cmd_baseline,
    "search": cmd_search,
    "sweep": cmd_sweep,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    config = {k: (str(v) if isinstance(v, Path) else v) for k, v in vars(args).items()}
    log.info("config: %s", config)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        parser.error(f"{args.command}: {exc}")
    except (nk.LandscapeFormatError, OSError, ValueError) as exc:
        log.error("%s", exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
