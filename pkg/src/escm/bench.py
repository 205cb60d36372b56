"""Seeded replication runner for causal-order simulations and pairwise benchmarks."""

from __future__ import annotations

import dataclasses
import logging
import math
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .angular import AacConfig, aac_pair, default_k
from .discovery import Direction, ease_order, pairwise_direction, score_matrix_from_data
from .graph import EmptyAncestralSetWarning, ancestral_violation_rate, random_dag
from .io import DataError, load_csv, parse_key_values
from .margins import ORIENTATION_LABELS, orientations, pareto_transform
from .simulate import SCM_MODELS, default_escm_spec, scm_spec_for, simulate_escm_prelimit, simulate_scm

log = logging.getLogger(__name__)

BENCH_MODELS = (*SCM_MODELS, "mlnoise")
SWEEP_K_FACTORS = (0.5, 1.5, 2.5)


def sweep_k_list(n: int) -> tuple[int, ...]:
    """``k`` in ``{0.5, 1.5, 2.5} * sqrt(n)``, rounded; (16, 47, 79) for n = 1000."""
    return tuple(default_k(n, c) for c in SWEEP_K_FACTORS)


@dataclass(frozen=True)
class BenchConfig:
    model: str = "sl0"
    d: int = 5
    n: int = 1000
    reps: int = 100
    k_list: tuple[int, ...] = (16, 47, 79)
    lam: float = 2.0
    gamma: float = 0.5
    alpha: float = 2.0
    alpha0: float = 3.0
    avg_degree: float = 3.0
    seed: int = 0
    transform: bool = True
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "k_list", tuple(sorted(int(k) for k in self.k_list)))
        if self.model not in BENCH_MODELS:
            raise ValueError(f"model must be one of {BENCH_MODELS}, got {self.model!r}")
        if self.reps < 1:
            raise ValueError("reps must be >= 1")
        if self.d < 2:
            raise ValueError("d must be >= 2")
        if not self.k_list or any(not (2 <= k <= self.n) for k in self.k_list):
            raise ValueError(f"every k must satisfy 2 <= k <= n={self.n}, got {self.k_list}")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if not (0 < self.avg_degree <= self.d - 1):
            raise ValueError(f"avg_degree must lie in (0, d - 1] = (0, {self.d - 1}], got {self.avg_degree}")

    def to_text(self) -> str:
        lines = []
        for f in dataclasses.fields(self):
            value = getattr(self, f.name)
            if f.name == "k_list":
                value = ",".join(map(str, value))
            elif f.name == "lam":
                lines.append(f"lambda = {value!r}")
                continue
            lines.append(f"{f.name} = {value}" if not isinstance(value, float) else f"{f.name} = {value!r}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "BenchConfig":
        """Parse ``key = value`` lines; unknown keys are an error.

        ``k_list = auto`` selects the rounded ``{0.5, 1.5, 2.5} * sqrt(n)`` sweep.
        """
        kv, directives = parse_key_values(text)
        if directives:
            raise DataError(f"unexpected config line {' '.join(directives[0])!r}")
        kv = {("lam" if k in ("lambda", "lam") else k): v for k, v in kv.items()}
        names = {f.name: f for f in dataclasses.fields(cls)}
        unknown = set(kv) - set(names)
        if unknown:
            raise DataError(f"unknown config keys: {sorted(unknown)}")
        args = {}
        try:
            for key, raw in kv.items():
                if key == "model":
                    args[key] = raw.lower()
                elif key == "k_list":
                    args[key] = raw
                elif key == "transform":
                    if raw.lower() not in ("true", "false", "1", "0", "yes", "no"):
                        raise ValueError(f"bad boolean {raw!r}")
                    args[key] = raw.lower() in ("true", "1", "yes")
                elif key in ("d", "n", "reps", "seed", "workers"):
                    args[key] = int(raw)
                else:
                    args[key] = float(raw)
            n = args.get("n", cls.n)
            k_raw = args.pop("k_list", None)
            if k_raw is None or k_raw.strip().lower() == "auto":
                args["k_list"] = sweep_k_list(n)
            else:
                args["k_list"] = tuple(int(k) for k in k_raw.split(",") if k.strip())
            return cls(**args)
        except ValueError as exc:
            raise DataError(f"invalid config: {exc}") from None


@dataclass
class RepResult:
    rep: int
    rates: dict[int, float] = field(default_factory=dict)
    error: str | None = None
    no_ancestral_pairs: bool = False


@dataclass
class KSummary:
    k: int
    mean: float
    se: float
    min: float
    max: float
    completed: int


@dataclass
class BenchResult:
    config: BenchConfig
    reps: list[RepResult]
    summaries: list[KSummary]
    elapsed: float

    @property
    def partial(self) -> bool:
        return any(r.error is not None for r in self.reps)

    @property
    def failures(self) -> list[RepResult]:
        return [r for r in self.reps if r.error is not None]

    def summary(self, k: int) -> KSummary:
        for s in self.summaries:
            if s.k == k:
                return s
        raise KeyError(k)

    def provenance(self) -> str:
        return self.config.to_text()


def rep_rng(seed: int, rep: int) -> np.random.Generator:
    """Generator for replicate ``rep``; depends only on ``(seed, rep)``."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(rep)]))


def simulate_rep(cfg: BenchConfig, rep: int):
    """The DAG and data set of replicate ``rep``."""
    rng = rep_rng(cfg.seed, rep)
    dag = random_dag(cfg.d, cfg.avg_degree, rng)
    if cfg.model == "mlnoise":
        x = simulate_escm_prelimit(default_escm_spec("mlnoise", dag, rng, cfg.alpha0), cfg.n, rng)
    else:
        x = simulate_scm(scm_spec_for(cfg.model, dag, cfg.alpha0), cfg.n, rng)
    return dag, x


def run_rep(cfg: BenchConfig, rep: int) -> RepResult:
    out = RepResult(rep)
    try:
        dag, x = simulate_rep(cfg, rep)
        if cfg.transform:
            x = pareto_transform(x, cfg.alpha)
        for k in cfg.k_list:
            scores = score_matrix_from_data(x, AacConfig(k, cfg.lam, cfg.gamma, cfg.alpha), transform=False)
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter("always", EmptyAncestralSetWarning)
                out.rates[k] = ancestral_violation_rate(dag, ease_order(scores))
            if any(issubclass(w.category, EmptyAncestralSetWarning) for w in caught):
                out.no_ancestral_pairs = True
    except Exception as exc:  # isolate the replicate, keep the sweep going
        out.rates = {}
        out.error = f"{type(exc).__name__}: {exc}"
    return out


def _run_rep_task(args):
    return run_rep(*args)


def summarize(k: int, rates: Sequence[float]) -> KSummary:
    r = np.asarray(rates, dtype=float)
    if r.size == 0:
        return KSummary(k, math.nan, math.nan, math.nan, math.nan, 0)
    se = float(r.std(ddof=1) / math.sqrt(r.size)) if r.size > 1 and np.ptp(r) > 0 else 0.0
    return KSummary(k, float(r.mean()), se, float(r.min()), float(r.max()), int(r.size))


def run_benchmark(cfg: BenchConfig) -> BenchResult:
    """Run ``cfg.reps`` independent replicates and aggregate per ``k``.

    Each replicate draws a random DAG and data set from its own
    ``(seed, rep)`` stream, so results do not depend on ``cfg.workers``.
    Failed replicates are recorded and excluded from the aggregates.
    """
    start = time.perf_counter()
    tasks = [(cfg, rep) for rep in range(cfg.reps)]
    if cfg.workers > 1:
        with ProcessPoolExecutor(cfg.workers) as pool:
            reps = list(pool.map(_run_rep_task, tasks, chunksize=max(1, cfg.reps // (4 * cfg.workers))))
    else:
        reps = [_run_rep_task(t) for t in tasks]
    reps.sort(key=lambda r: r.rep)
    for r in reps:
        if r.error:
            log.warning("rep %d (seed %d) failed: %s", r.rep, cfg.seed, r.error)
    summaries = [summarize(k, [r.rates[k] for r in reps if r.error is None]) for k in cfg.k_list]
    return BenchResult(cfg, reps, summaries, time.perf_counter() - start)


TABLE_HEADER = ("model", "d", "n", "k", "mean_rate", "se", "reps", "seed")


def format_table(result: BenchResult) -> str:
    cfg = result.config
    lines = ["\t".join(TABLE_HEADER)]
    for s in sorted(result.summaries, key=lambda s: s.k):
        lines.append("\t".join([cfg.model, str(cfg.d), str(cfg.n), str(s.k),
                                f"{s.mean:.4f}", f"{s.se:.4f}", str(s.completed), str(cfg.seed)]))
    return "\n".join(lines) + "\n"


def emit_table(result: BenchResult, path: str | Path) -> None:
    Path(path).write_text(format_table(result))


# ---------------------------------------------------------------- pairwise benchmark

@dataclass(frozen=True)
class PairCase:
    path: Path
    truth: Direction  # U_CAUSES_V means column 1 causes column 2
    weight: float


@dataclass
class PairOutcome:
    path: Path
    taus: tuple[float, ...] = ()
    decisions: tuple[Direction, ...] = ()
    error: str | None = None


@dataclass
class PairBenchResult:
    accuracy: dict[str, float]
    half_width: dict[str, float]
    outcomes: list[PairOutcome]

    @property
    def failures(self) -> list[PairOutcome]:
        return [o for o in self.outcomes if o.error is not None]


def parse_truth(label: str) -> Direction:
    label = label.replace(" ", "").replace("→", "->")
    if label in ("1->2", "x->y"):
        return Direction.U_CAUSES_V
    if label in ("2->1", "y->x"):
        return Direction.V_CAUSES_U
    raise DataError(f"truth label must be '1->2' or '2->1', got {label!r}")


def read_manifest(path: str | Path) -> list[PairCase]:
    """Whitespace-separated ``file truth weight`` lines; relative files resolve against the manifest."""
    path = Path(path)
    cases = []
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise DataError(f"{path}:{lineno}: expected 'file truth weight'")
        try:
            weight = float(parts[2])
        except ValueError:
            raise DataError(f"{path}:{lineno}: bad weight {parts[2]!r}") from None
        if not weight > 0:
            raise DataError(f"{path}:{lineno}: weights must be positive")
        file = Path(parts[0])
        cases.append(PairCase(file if file.is_absolute() else path.parent / file, parse_truth(parts[1]), weight))
    return cases


def run_pair_benchmark(cases: Sequence[PairCase], lam: float = 1.0, k_factor: float = 0.5,
                       gamma: float = 0.5, alpha: float = 2.0, threshold: float = 0.0) -> PairBenchResult:
    """Weighted accuracy of the AAC sign rule over cause-effect pairs.

    Every pair is scored in its four sign orientations with
    ``k = round(k_factor * sqrt(n))``. Weights are renormalised over the
    pairs that could be scored; the 95% half-width is
    ``1.96 * sqrt(acc * (1 - acc) * sum(w**2))``. Undecided pairs count
    as wrong.
    """
    if not cases:
        raise ValueError("pair benchmark needs at least one pair")
    outcomes = []
    for case in cases:
        try:
            x = load_csv(case.path).values
            if x.shape[1] != 2:
                raise DataError(f"{case.path}: expected 2 columns, got {x.shape[1]}")
            cfg = AacConfig(default_k(x.shape[0], k_factor), lam, gamma, alpha)
            taus = tuple(aac_pair(*pareto_transform(o, alpha).T, cfg).tau_uv for o in orientations(x))
            outcomes.append(PairOutcome(case.path, taus, tuple(pairwise_direction(t, threshold) for t in taus)))
        except Exception as exc:  # isolate the pair
            outcomes.append(PairOutcome(case.path, error=f"{type(exc).__name__}: {exc}"))

    ok = [(c, o) for c, o in zip(cases, outcomes) if o.error is None]
    if not ok:
        raise DataError("no pair could be scored")
    w = np.array([c.weight for c, _ in ok])
    w = w / w.sum()
    accuracy, half = {}, {}
    for j, label in enumerate(ORIENTATION_LABELS):
        correct = np.array([o.decisions[j] == c.truth for c, o in ok], dtype=float)
        acc = float(w @ correct)
        accuracy[label] = acc
        half[label] = 1.96 * math.sqrt(acc * (1 - acc) * float(w @ w))
    return PairBenchResult(accuracy, half, outcomes)
