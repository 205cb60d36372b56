"""Causal direction and causal order discovery from joint extremes."""

from .angular import (
    AacConfig, AacResult, InsufficientDataError, PolarSeries, SupportInterval, aac_pair, d_k,
    default_k, dk_limit_oracle, estimate_support, interval_distance, minimize_simplex, objective,
    polarize, radial_weight,
)
from .bench import BenchConfig, BenchResult, run_benchmark, run_pair_benchmark
from .discovery import Direction, ScoreMatrix, ease_order, pairwise_direction, score_matrix_from_data
from .graph import (
    CausalOrder, Dag, ancestors, ancestral_violation_rate, is_valid_order, random_dag,
    valid_orders_bruteforce,
)
from .io import DataError, Sample, load_csv
from .margins import orientations, pareto_transform
from .simulate import (
    CoeffLaw, EscmSpec, ScmSpec, SecondOrderPairSpec, sample_escm_conditional, sample_second_order_pair,
    simulate_escm_prelimit, simulate_scm,
)

__version__ = "0.1.0"
