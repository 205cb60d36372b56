import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from escm.angular import AacConfig
from escm.discovery import (
    Direction, ScoreMatrix, ease_order, get_score, pairwise_direction, score_matrix_from_data,
)
from escm.graph import Dag, ancestors, random_dag, valid_orders_bruteforce
from escm.simulate import EscmSpec, sample_escm_conditional


def idealized_scores(dag: Dag, c: float = 0.4) -> ScoreMatrix:
    d = dag.node_count
    tau = np.zeros((d, d))
    for v in dag.nodes:
        for u in ancestors(dag, v):
            tau[u - 1, v - 1] = c
            tau[v - 1, u - 1] = -c
    return ScoreMatrix(tau)


def skew(upper):
    tau = np.array(upper, dtype=float)
    return ScoreMatrix(tau - tau.T)


def test_two_nodes():
    order = ease_order(skew([[0, 0.4], [0, 0]]))
    assert (order.rank(1), order.rank(2)) == (1, 2)


def test_chain_hand_trace():
    order = ease_order(skew([[0, 0.3, 0.3], [0, 0, 0.3], [0, 0, 0]]))
    assert order.sequence() == (1, 2, 3)


def test_all_zero_scores_use_id_tie_break():
    assert ease_order(ScoreMatrix(np.zeros((3, 3)))).sequence() == (1, 2, 3)


def test_ease_rejects_non_finite():
    tau = np.zeros((3, 3))
    tau[0, 2] = np.inf
    with pytest.raises(ValueError, match=r"\(1, 3\)"):
        ease_order(ScoreMatrix(tau, skew=False))


def test_score_matrix_validation():
    with pytest.raises(ValueError):
        ScoreMatrix(np.zeros((2, 3)))
    with pytest.raises(ValueError):
        ScoreMatrix(np.array([[0, 0.2], [0.2, 0]]))
    m = ScoreMatrix(np.array([[5, 0.2], [-0.2, 5]]))
    assert np.isnan(m.tau[0, 0])
    with pytest.raises(ValueError):
        m.tau[0, 1] = 1.0


def test_ease_recovers_valid_order_on_idealized_scores():
    rng = np.random.default_rng(11)
    for _ in range(200):
        d = int(rng.integers(2, 6))
        dag = random_dag(d, float(rng.uniform(0.5, d - 1)), rng)
        assert ease_order(idealized_scores(dag)) in valid_orders_bruteforce(dag)


@given(st.integers(0, 2**32 - 1), st.floats(-5, 5), st.floats(0.01, 50))
@settings(max_examples=100, deadline=None)
def test_rank_invariance(seed, shift, scale):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(2, 8))
    tau = rng.normal(size=(d, d))
    base = ease_order(ScoreMatrix(tau, skew=False))
    assert ease_order(ScoreMatrix(tau + shift, skew=False)) == base
    assert ease_order(ScoreMatrix(tau * scale, skew=False)) == base
    assert ease_order(ScoreMatrix(tau.copy(), skew=False)) == base


def test_pairwise_direction_examples():
    assert pairwise_direction(0.5) is Direction.U_CAUSES_V
    assert pairwise_direction(-0.01, 0.05) is Direction.NO_DECISION
    assert pairwise_direction(0.0, 0.0) is Direction.NO_DECISION
    assert pairwise_direction(-0.2) is Direction.V_CAUSES_U
    with pytest.raises(ValueError):
        pairwise_direction(float("nan"))
    with pytest.raises(ValueError):
        pairwise_direction(0.1, -1)


FLIP = {Direction.U_CAUSES_V: Direction.V_CAUSES_U, Direction.V_CAUSES_U: Direction.U_CAUSES_V,
        Direction.NO_DECISION: Direction.NO_DECISION}


@given(st.floats(-1, 1), st.floats(0, 1))
def test_pairwise_direction_antisymmetry(tau, threshold):
    assert pairwise_direction(-tau, threshold) is FLIP[pairwise_direction(tau, threshold)]


def two_ray_sample(n, seed, beta=1.0):
    spec = EscmSpec(Dag(2, [(1, 2)]), (1.0, 1.0), "sum", {(1, 2): beta})
    y, _ = sample_escm_conditional(spec, n, np.random.default_rng(seed))
    return y


def test_single_pair_matrix_is_skew(rng):
    x = (1 - rng.random((500, 2))) ** -0.5
    m = score_matrix_from_data(x, AacConfig(k=30))
    assert m.d == 2 and m.skew
    assert m.tau[0, 1] == -m.tau[1, 0]


def test_identical_columns_score_near_zero(rng):
    u = rng.lognormal(size=5000)
    m = score_matrix_from_data(np.column_stack([u, u, u]), AacConfig(k=106))
    off = ~np.eye(3, dtype=bool)
    assert np.all(np.abs(m.tau[off]) < 0.1)


def test_two_ray_data_names_the_cause():
    y = two_ray_sample(5000, seed=3)
    raw = score_matrix_from_data(y, AacConfig(k=106), transform=False)
    assert raw.tau[0, 1] == pytest.approx(0.5, abs=0.02)
    ranked = score_matrix_from_data(y, AacConfig(k=106))
    assert ranked.tau[0, 1] > 0.3
    assert ease_order(ranked).sequence() == (1, 2)


def test_workers_do_not_change_scores(rng):
    x = (1 - rng.random((400, 4))) ** -0.5
    x[:, 1] += 0.5 * x[:, 0]
    cfg = AacConfig(k=30)
    np.testing.assert_array_equal(score_matrix_from_data(x, cfg).tau,
                                  score_matrix_from_data(x, cfg, workers=2).tau)


def test_score_registry():
    with pytest.raises(NotImplementedError):
        get_score("ctc")
    with pytest.raises(ValueError):
        get_score("nope")

    def fake(u, v, cfg):
        return 0.1, 0.2

    m = score_matrix_from_data(np.ones((10, 3)) + np.arange(30).reshape(10, 3), AacConfig(k=5), score=fake)
    assert not m.skew
    assert all(m.tau[i, j] == 0.1 for i, j in itertools.combinations(range(3), 2))
