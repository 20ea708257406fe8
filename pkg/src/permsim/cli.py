"""permsim command line.

Exit codes: 0 success / valid, 1 invalid decomposition, 2 usage or parse
error, 3 internal error. Permutations are read and written one per line as
space-separated 1-indexed values (or a JSON list of lists with --format json).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import oracle
from .core import Decomposition, DimensionError, Permutation, verify_decomposition
from .experiment import ExperimentPlan, run_plan, summarize, to_csv
from .geometry import PointCloud, SamplerConfig
from .pipeline import (InternalError, PipelineConfig, baseline_decompose, decompose,
                       random_permutations)

EXIT_OK, EXIT_INVALID, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3
SEED_ENV = "PERMSIM_SEED"


class UsageError(Exception):
    pass


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV, "0")
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV}={raw!r} is not an integer")


def _read_text(path: str | None) -> str:
    if path is None or path == "-":
        return sys.stdin.read()
    return Path(path).read_text()


def parse_permutations(text: str) -> list[Permutation]:
    text = text.strip()
    try:
        if text.startswith("["):
            return [Permutation(tuple(p)) for p in json.loads(text)]
        return [Permutation.parse(line) for line in text.splitlines() if line.strip()]
    except (ValueError, TypeError) as exc:
        raise UsageError(f"malformed permutation input: {exc}")


def format_permutations(perms, fmt: str = "text") -> str:
    if fmt == "json":
        return json.dumps([list(p.values) for p in perms]) + "\n"
    return "".join(str(p) + "\n" for p in perms)


def _pipeline_config(args, k: int) -> PipelineConfig:
    return PipelineConfig(
        k=k,
        sampler=SamplerConfig(mode=args.sampler, rate_multiplier=args.rate),
        metric=args.metric,
        matching_mode=args.matching_mode,
        M_override=args.M,
        seed=args.seed,
    )


def cmd_gen(args) -> int:
    if args.n < 1 or args.k < 1:
        raise UsageError("n and k must be >= 1")
    if args.n == 1:
        perms = [Permutation((1,))] * args.k
    else:
        perms = random_permutations(args.n, args.k, PipelineConfig(k=max(args.k, 2), seed=args.seed))
    sys.stdout.write(format_permutations(perms, args.format))
    return EXIT_OK


def cmd_decompose(args) -> int:
    if args.fresh is not None:
        if args.baseline:
            perms = random_permutations(args.fresh, args.k, PipelineConfig(k=args.k, seed=args.seed))
        else:
            perms = None
    else:
        perms = parse_permutations(_read_text(args.input))
        if len(perms) < 2:
            raise UsageError("need at least two permutations")
    if args.baseline:
        d, rec = baseline_decompose(perms, increasing=args.increasing, seed=args.seed)
    else:
        if perms is None:
            perms, d, rec = decompose(cfg=_pipeline_config(args, args.k), fresh=args.fresh)
        else:
            perms, d, rec = decompose(perms, _pipeline_config(args, len(perms)))
    if args.perms_out:
        Path(args.perms_out).write_text(format_permutations(perms))
    sys.stdout.write(d.dumps() + "\n")
    sys.stderr.write(rec.dumps() + "\n")
    return EXIT_OK


def cmd_baseline(args) -> int:
    args.baseline = True
    args.fresh = None
    return cmd_decompose(args)


def cmd_verify(args) -> int:
    perms = parse_permutations(Path(args.perms).read_text())
    try:
        d = Decomposition.loads(_read_text(args.decomposition))
    except (ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"malformed decomposition: {exc}")
    try:
        verdict = verify_decomposition(perms, d)
    except DimensionError as exc:
        print(f"invalid: {exc}")
        return EXIT_INVALID
    print("valid" if verdict else f"invalid: {verdict.message}")
    return EXIT_OK if verdict else EXIT_INVALID


def cmd_oracle(args) -> int:
    budget = oracle.OracleBudget(max_n=args.max_n, time_cap=args.time_cap)
    which = args.which
    if which == "tail":
        print(repr(oracle.poisson_tail_bound(args.lam, args.x)))
        return EXIT_OK
    if which == "bottleneck":
        red = PointCloud.from_csv(Path(args.red).read_text())
        blue = PointCloud.from_csv(Path(args.blue).read_text())
        print(repr(oracle.brute_bottleneck(red, blue, args.metric, budget)))
        return EXIT_OK
    perms = parse_permutations(_read_text(args.input))
    if which == "u":
        print(oracle.exact_U(perms, budget))
    elif which == "lcp":
        if len(perms) != 2:
            raise UsageError("lcp needs exactly two permutations")
        print(oracle.longest_common_pattern(perms[0], perms[1], budget))
    elif which == "lis":
        for p in perms:
            print(oracle.brute_lis(p, budget))
    return EXIT_OK


def cmd_experiment(args) -> int:
    plan = ExperimentPlan(
        n_values=tuple(args.n), k=args.k, trials_per_n=args.trials, seed=args.seed,
        sampler=SamplerConfig(mode=args.sampler, rate_multiplier=args.rate),
        metric=args.metric, matching_mode=args.matching_mode, timing=not args.no_timing,
    )
    rows = run_plan(plan, jobs=args.jobs)
    text = to_csv(rows, summarize(rows))
    if args.out:
        try:
            Path(args.out).write_text(text)
        except OSError as exc:
            raise UsageError(f"cannot write {args.out}: {exc}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _pipeline_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--metric", choices=["euclidean", "chebyshev"], default="euclidean")
    p.add_argument("--matching-mode", choices=["auto", "exact", "threshold-doubling"], default="auto")
    p.add_argument("--sampler", choices=["uniform", "poisson"], default="uniform")
    p.add_argument("--rate", type=float, default=2.0, help="poisson rate as a multiple of n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help=f"default from ${SEED_ENV}, else 0")
    parser = argparse.ArgumentParser(prog="permsim", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", parents=[common], help="emit k uniform random permutations")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("decompose", parents=[common], help="decompose permutations into order-isomorphic parts")
    p.add_argument("input", nargs="?", help="permutation file (default stdin)")
    p.add_argument("--fresh", type=int, help="decompose k fresh random permutations of this length")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--M", type=int, default=None, help="override the grid side")
    p.add_argument("--baseline", action="store_true", help="use the monotone pile baseline")
    p.add_argument("--increasing", action="store_true", help="baseline with increasing piles")
    p.add_argument("--perms-out", help="also write the decomposed permutations here")
    _pipeline_flags(p)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("baseline", parents=[common], help="monotone pile baseline decomposition")
    p.add_argument("input", nargs="?")
    p.add_argument("--increasing", action="store_true")
    p.add_argument("--perms-out")
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("verify", parents=[common], help="check a decomposition JSON against permutations")
    p.add_argument("--perms", required=True)
    p.add_argument("decomposition", nargs="?", help="decomposition JSON (default stdin)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("oracle", parents=[common], help="exhaustive small-instance oracles")
    p.add_argument("which", choices=["u", "lcp", "lis", "bottleneck", "tail"])
    p.add_argument("input", nargs="?")
    p.add_argument("--max-n", type=int, default=None)
    p.add_argument("--time-cap", type=float, default=60.0)
    p.add_argument("--red")
    p.add_argument("--blue")
    p.add_argument("--metric", choices=["euclidean", "chebyshev"], default="euclidean")
    p.add_argument("--lam", type=float)
    p.add_argument("--x", type=float)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("experiment", parents=[common], help="scaling experiment, CSV output")
    p.add_argument("--n", type=int, nargs="+", required=True)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out")
    p.add_argument("--no-timing", action="store_true", help="write wall_ms as 0 for byte-stable output")
    _pipeline_flags(p)
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.seed is None:
            args.seed = _default_seed()
        if args.command == "oracle" and args.which == "tail" and (args.lam is None or args.x is None):
            raise UsageError("tail needs --lam and --x")
        if args.command == "oracle" and args.which == "bottleneck" and not (args.red and args.blue):
            raise UsageError("bottleneck needs --red and --blue CSV files")
        return args.func(args)
    except UsageError as exc:
        print(f"permsim: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InternalError as exc:
        print(f"permsim: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (oracle.OracleRefusal, ValueError) as exc:
        print(f"permsim: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
