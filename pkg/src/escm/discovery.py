"""Causal order search (EASE) over a pairwise score matrix, and pairwise decisions."""

from __future__ import annotations

import enum
import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .angular import AacConfig, aac_pair
from .graph import CausalOrder
from .margins import pareto_transform

# A pairwise score maps two columns to (score(u, v), score(v, u)).
PairScore = Callable[[np.ndarray, np.ndarray, AacConfig], "tuple[float, float]"]


class Direction(enum.Enum):
    U_CAUSES_V = "u->v"
    V_CAUSES_U = "v->u"
    NO_DECISION = "none"


@dataclass(frozen=True)
class ScoreMatrix:
    """``tau[u - 1, v - 1]`` scores node ``u`` as a cause of node ``v``. Diagonal is NaN."""

    tau: np.ndarray
    skew: bool = True

    def __post_init__(self):
        tau = np.array(self.tau, dtype=float)
        if tau.ndim != 2 or tau.shape[0] != tau.shape[1] or tau.shape[0] < 2:
            raise ValueError(f"score matrix must be square with d >= 2, got shape {tau.shape}")
        np.fill_diagonal(tau, np.nan)
        off = ~np.eye(tau.shape[0], dtype=bool)
        if self.skew and not np.array_equal(tau[off], -tau.T[off]):
            raise ValueError("skew flag set but tau[u, v] != -tau[v, u]")
        tau.setflags(write=False)
        object.__setattr__(self, "tau", tau)

    @property
    def d(self) -> int:
        return self.tau.shape[0]


def ease_order(scores: ScoreMatrix) -> CausalOrder:
    """Repeatedly remove the node whose largest incoming score is smallest.

    Ties go to the smallest node id. O(d^2) comparisons per step.
    """
    tau = scores.tau
    d = scores.d
    for u, v in itertools.permutations(range(d), 2):
        if not math.isfinite(tau[u, v]):
            raise ValueError(f"non-finite score for pair ({u + 1}, {v + 1})")
    remaining = list(range(d))
    sequence = []
    while remaining:
        if len(remaining) == 1:
            sequence.append(remaining.pop())
            break
        incoming = [max(tau[u, v] for u in remaining if u != v) for v in remaining]
        pick = remaining[int(np.argmin(incoming))]
        sequence.append(pick)
        remaining.remove(pick)
    return CausalOrder.from_sequence([v + 1 for v in sequence])


def pairwise_direction(tau_uv: float, threshold: float = 0.0) -> Direction:
    if not math.isfinite(tau_uv):
        raise ValueError(f"score must be finite, got {tau_uv!r}")
    if threshold < 0:
        raise ValueError("threshold must be nonnegative")
    if tau_uv > threshold:
        return Direction.U_CAUSES_V
    if tau_uv < -threshold:
        return Direction.V_CAUSES_U
    return Direction.NO_DECISION


def aac_score(u: np.ndarray, v: np.ndarray, cfg: AacConfig) -> tuple[float, float]:
    res = aac_pair(u, v, cfg)
    return res.tau_uv, res.tau_vu


# The causal tail coefficient has no bundled implementation; supply a callable.
SCORES: dict[str, PairScore | None] = {"aac": aac_score, "ctc": None}


def get_score(name: str) -> PairScore:
    try:
        fn = SCORES[name]
    except KeyError:
        raise ValueError(f"unknown score {name!r}; known: {sorted(SCORES)}") from None
    if fn is None:
        raise NotImplementedError(f"score {name!r} is a placeholder; pass your own PairScore callable")
    return fn


def _pair_task(args):
    score, x, i, j, cfg = args
    return i, j, score(x[:, i], x[:, j], cfg)


def score_matrix_from_data(x, cfg: AacConfig, transform: bool = True,
                           score: PairScore | str = "aac", workers: int = 1) -> ScoreMatrix:
    """Score every unordered pair of columns once and assemble a :class:`ScoreMatrix`.

    With ``transform`` the columns are first mapped to ``cfg.alpha``-Pareto
    margins. The skew flag is set when the score returns exact negations.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 2 or x.shape[1] < 2:
        raise ValueError("need an n x d sample with d >= 2")
    if isinstance(score, str):
        score = get_score(score)
    if transform:
        x = pareto_transform(x, cfg.alpha)
    d = x.shape[1]
    tasks = [(score, x, i, j, cfg) for i, j in itertools.combinations(range(d), 2)]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            results = list(pool.map(_pair_task, tasks))
    else:
        results = [_pair_task(t) for t in tasks]
    tau = np.full((d, d), np.nan)
    for i, j, (s_ij, s_ji) in results:
        tau[i, j], tau[j, i] = s_ij, s_ji
    off = ~np.eye(d, dtype=bool)
    return ScoreMatrix(tau, skew=bool(np.array_equal(tau[off], -tau.T[off])))
