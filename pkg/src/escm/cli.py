"""Command line interface: ``escm <subcommand> ...``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 partial benchmark.
"""

from __future__ import annotations

import argparse
import functools
import logging
import sys
from pathlib import Path

import numpy as np

from . import bench
from .angular import AacConfig, InsufficientDataError, aac_pair, default_k, polarize
from .discovery import ease_order, pairwise_direction, score_matrix_from_data
from .graph import ancestral_violation_rate, random_dag
from .io import DataError, load_csv, read_dag, write_csv, write_dag
from .margins import ORIENTATION_LABELS, orientations, pareto_transform
from .simulate import (
    MODEL_NAMES, SCM_MODELS, ScmSpec, SecondOrderPairSpec, default_escm_spec, parse_spec,
    sample_escm_conditional, sample_second_order_pair, scm_spec_for, simulate_chunked,
    simulate_escm_prelimit, simulate_scm,
)

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_PARTIAL = 0, 1, 2, 3
log = logging.getLogger("escm")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _cols(text: str) -> tuple[int, int]:
    try:
        i, j = (int(c) for c in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected two 1-based column numbers 'i,j', got {text!r}") from None
    if i < 1 or j < 1 or i == j:
        raise argparse.ArgumentTypeError("columns must be distinct and >= 1")
    return i, j


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(k) for k in text.split(",") if k.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _pick_pair(x: np.ndarray, cols: tuple[int, int]) -> np.ndarray:
    i, j = cols
    if max(i, j) > x.shape[1]:
        raise UsageError(f"--cols {i},{j} out of range for {x.shape[1]} columns")
    return x[:, [i - 1, j - 1]]


# ---------------------------------------------------------------- subcommands

def cmd_transform(args) -> int:
    sample = load_csv(args.input)
    write_csv(args.out, pareto_transform(sample.values, args.alpha), sample.column_names)
    return EXIT_OK


def cmd_aac(args) -> int:
    sample = load_csv(args.input)
    pair = _pick_pair(sample.values, args.cols)
    if not args.no_transform:
        pair = pareto_transform(pair, args.alpha)
    k = args.k if args.k is not None else default_k(pair.shape[0])
    cfg = AacConfig(k, args.lam, args.gamma, args.alpha)
    if args.dump_polar:
        series = polarize(pair)
        write_csv(args.dump_polar, np.column_stack([series.w, series.r]), ("w", "r"))
    res = aac_pair(pair[:, 0], pair[:, 1], cfg)
    sup = res.support
    print("a_hat\tb_hat\ttau\tobjective\tconverged")
    print(f"{sup.a_hat:.6f}\t{sup.b_hat:.6f}\t{res.tau_uv:.6f}\t{sup.objective_value:.6f}\t"
          f"{str(sup.optimizer_report.converged).lower()}")
    return EXIT_OK


def cmd_order(args) -> int:
    sample = load_csv(args.input)
    x = sample.values
    if not args.no_transform:
        x = pareto_transform(x, args.alpha)
    truth = read_dag(args.dag_file) if args.dag_file else None
    if truth is not None and truth.node_count != x.shape[1]:
        raise DataError(f"DAG has {truth.node_count} nodes but the data has {x.shape[1]} columns")
    k_list = args.k_list or (args.k if args.k is not None else default_k(x.shape[0]),)

    lines = []
    sweep = len(k_list) > 1
    if sweep:
        lines.append("k\tancestral_violation_rate" if truth is not None else "k\tnode\trank")
    for k in k_list:
        scores = score_matrix_from_data(x, AacConfig(k, args.lam, args.gamma, args.alpha),
                                        transform=False, workers=args.workers)
        order = ease_order(scores)
        if args.scores_out and not sweep:
            write_csv(args.scores_out, scores.tau, sample.column_names)
        if sweep:
            if truth is not None:
                lines.append(f"{k}\t{ancestral_violation_rate(truth, order):.4f}")
            else:
                lines += [f"{k}\t{v}\t{order.rank(v)}" for v in range(1, len(order) + 1)]
        else:
            lines.append("node\trank")
            lines += [f"{v}\t{order.rank(v)}" for v in range(1, len(order) + 1)]
            if truth is not None:
                lines.append(f"# ancestral_violation_rate\t{ancestral_violation_rate(truth, order):.4f}")
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_pairdir(args) -> int:
    sample = load_csv(args.input)
    pair = _pick_pair(sample.values, args.cols)
    k = args.k if args.k is not None else default_k(pair.shape[0], 0.5)
    cfg = AacConfig(k, args.lam, args.gamma, args.alpha)
    variants = list(zip(ORIENTATION_LABELS, orientations(pair))) if args.orientations else [("(x1,x2)", pair)]
    print("orientation\ttau\tdecision")
    for label, z in variants:
        if not args.no_transform:
            z = pareto_transform(z, args.alpha)
        tau = aac_pair(z[:, 0], z[:, 1], cfg).tau_uv
        decision = pairwise_direction(tau, args.threshold)
        print(f"{label}\t{tau:.6f}\t{decision.value}")
    return EXIT_OK


def _simulate_rows(model: str, spec, rows: int, rng: np.random.Generator) -> np.ndarray:
    if isinstance(spec, ScmSpec):
        return simulate_scm(spec, rows, rng)
    if isinstance(spec, SecondOrderPairSpec):
        return sample_second_order_pair(spec, rows, rng)
    if model == "escm":
        return sample_escm_conditional(spec, rows, rng)[0]
    return simulate_escm_prelimit(spec, rows, rng)


def cmd_simulate(args) -> int:
    setup_rng = np.random.default_rng(np.random.SeedSequence([args.seed, 0]))
    if args.spec:
        model, spec = parse_spec(Path(args.spec).read_text())
    else:
        model = args.model
        if model is None:
            raise UsageError("simulate needs --model or --spec")
        if model == "so2pair":
            spec = SecondOrderPairSpec(alpha=args.alpha)
        else:
            dag = random_dag(args.d, min(args.avg_degree, args.d - 1), setup_rng)
            if model in SCM_MODELS:
                spec = scm_spec_for(model, dag, args.alpha0)
            else:
                spec = default_escm_spec(model, dag, setup_rng, args.alpha)
    if args.emit_dag:
        if isinstance(spec, SecondOrderPairSpec):
            raise UsageError("--emit-dag is not available for so2pair")
        write_dag(args.emit_dag, spec.dag)
    fn = functools.partial(_simulate_rows, model, spec)
    x = simulate_chunked(fn, args.n, (args.seed, 1), workers=args.workers)
    d = x.shape[1]
    write_csv(args.out, x, [f"x{j}" for j in range(1, d + 1)])
    return EXIT_OK


def cmd_bench(args) -> int:
    if args.pairs:
        cases = bench.read_manifest(args.pairs)
        res = bench.run_pair_benchmark(cases, lam=args.lam, k_factor=args.k_factor, threshold=args.threshold)
        lines = ["orientation\taccuracy\thalf_width\tpairs"]
        scored = len(cases) - len(res.failures)
        for label in ORIENTATION_LABELS:
            lines.append(f"{label}\t{res.accuracy[label]:.4f}\t{res.half_width[label]:.4f}\t{scored}")
        for o in res.failures:
            log.warning("pair %s skipped (%s); weights renormalised", o.path, o.error)
        _emit("\n".join(lines) + "\n", args.out)
        return EXIT_PARTIAL if res.failures else EXIT_OK

    if not args.config:
        raise UsageError("bench needs --config or --pairs")
    cfg = bench.BenchConfig.from_text(Path(args.config).read_text())
    overrides = {}
    if args.seed_given:
        overrides["seed"] = args.seed
    if args.workers_given:
        overrides["workers"] = args.workers
    if overrides:
        cfg = bench.BenchConfig(**{**cfg.__dict__, **overrides})
    result = bench.run_benchmark(cfg)
    _emit(bench.format_table(result), args.out)
    log.info("elapsed %.1fs", result.elapsed)
    return EXIT_PARTIAL if result.partial else EXIT_OK


# ---------------------------------------------------------------- parser

def _add_aac_options(p, lam_default: float) -> None:
    p.add_argument("--k", type=int, help="extremal subsample size")
    p.add_argument("--lambda", dest="lam", type=float, default=lam_default)
    p.add_argument("--gamma", type=float, default=0.5)
    p.add_argument("--alpha", type=float, default=2.0, help="target Pareto tail index of the transform")
    p.add_argument("--no-transform", action="store_true", help="use raw (nonnegative) data")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--workers", type=int, default=argparse.SUPPRESS)
    common.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS)

    parser = _Parser(prog="escm", description="Causal direction and order from joint extremes.")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--workers", type=int, default=None)
    parser.add_argument("--quiet", action="store_true", default=False)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("transform", parents=[common], help="rank-transform margins to alpha-Pareto")
    p.add_argument("--alpha", type=float, default=2.0)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("aac", parents=[common], help="angular support and AAC of two columns")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--cols", type=_cols, default=(1, 2))
    p.add_argument("--dump-polar", metavar="PATH")
    _add_aac_options(p, 2.0)
    p.set_defaults(func=cmd_aac)

    p = sub.add_parser("order", parents=[common], help="causal order via EASE")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--k-list", type=_int_list)
    p.add_argument("--scores-out", metavar="CSV")
    p.add_argument("--dag-file", metavar="PATH", help="true DAG; reports the ancestral violation rate")
    p.add_argument("--out")
    _add_aac_options(p, 2.0)
    p.set_defaults(func=cmd_order)

    p = sub.add_parser("pairdir", parents=[common], help="cause/effect decision for two columns")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--cols", type=_cols, default=(1, 2))
    p.add_argument("--orientations", action="store_true", help="score all four sign flips")
    p.add_argument("--threshold", type=float, default=0.0)
    _add_aac_options(p, 1.0)
    p.set_defaults(func=cmd_pairdir)

    p = sub.add_parser("simulate", parents=[common], help="generate synthetic data")
    p.add_argument("--model", choices=MODEL_NAMES)
    p.add_argument("--d", type=int, default=5)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--alpha0", type=float, default=3.0)
    p.add_argument("--alpha", type=float, default=2.0)
    p.add_argument("--avg-degree", type=float, default=3.0)
    p.add_argument("--out", required=True)
    p.add_argument("--emit-dag", metavar="PATH")
    p.add_argument("--spec", metavar="PATH")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("bench", parents=[common], help="replication runner / pair benchmark")
    p.add_argument("--config", metavar="PATH")
    p.add_argument("--pairs", metavar="MANIFEST", help="'file truth weight' lines")
    p.add_argument("--lambda", dest="lam", type=float, default=1.0, help="penalty for --pairs")
    p.add_argument("--k-factor", type=float, default=0.5, help="k = round(f*sqrt(n)) for --pairs")
    p.add_argument("--threshold", type=float, default=0.0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a subcommand is required")
        args.seed_given = args.seed is not None
        args.workers_given = args.workers is not None
        args.seed = 0 if args.seed is None else args.seed
        args.workers = 1 if args.workers is None else args.workers
        if args.workers < 1:
            raise UsageError("--workers must be >= 1")
        logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                            format="%(levelname)s: %(message)s")
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, InsufficientDataError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
