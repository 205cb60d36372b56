import dataclasses

import numpy as np
import pytest

from escm import bench
from escm.bench import (
    BenchConfig, BenchResult, KSummary, PairCase, format_table, sweep_k_list, read_manifest,
    run_benchmark, run_pair_benchmark, summarize,
)
from escm.discovery import Direction
from escm.graph import Dag
from escm.io import DataError, write_csv
from escm.simulate import EscmSpec, sample_escm_conditional

SMALL = dict(model="sl0", d=4, n=300, reps=6, k_list=(10, 26), seed=5)


def test_sweep_k_list():
    assert sweep_k_list(1000) == (16, 47, 79)


def test_run_is_deterministic():
    cfg = BenchConfig(**{**SMALL, "reps": 1})
    a, b = run_benchmark(cfg), run_benchmark(cfg)
    assert [r.rates for r in a.reps] == [r.rates for r in b.reps]
    assert a.summaries == b.summaries


def test_worker_count_does_not_change_results():
    one = run_benchmark(BenchConfig(**SMALL, workers=1))
    four = run_benchmark(BenchConfig(**SMALL, workers=4))
    assert [r.rates for r in one.reps] == [r.rates for r in four.reps]
    assert one.summaries == four.summaries


def test_rates_are_bounded_and_summaries_consistent():
    res = run_benchmark(BenchConfig(**SMALL))
    assert not res.partial
    for s in res.summaries:
        rates = [r.rates[s.k] for r in res.reps]
        assert all(0 <= x <= 1 for x in rates)
        assert s.min <= s.mean <= s.max
        assert s.completed == SMALL["reps"]
        assert (s.se == 0) == (len(set(rates)) == 1)


def test_summarize_standard_error():
    assert summarize(5, [0.1, 0.1, 0.1]).se == 0.0
    s = summarize(5, [0.0, 0.2])
    assert s.se == pytest.approx(0.1)
    assert s.mean == pytest.approx(0.1)
    assert np.isnan(summarize(5, []).mean)


def test_failed_reps_are_isolated(monkeypatch):
    real = bench.simulate_rep

    def flaky(cfg, rep):
        if rep == 1:
            raise RuntimeError("boom")
        return real(cfg, rep)

    monkeypatch.setattr(bench, "simulate_rep", flaky)
    res = run_benchmark(BenchConfig(**{**SMALL, "reps": 3}))
    assert res.partial
    assert [r.rep for r in res.failures] == [1]
    assert "boom" in res.failures[0].error
    assert all(s.completed == 2 for s in res.summaries)


def fake_result(means, d=5):
    cfg = BenchConfig(d=d, k_list=tuple(k for k, _ in means), seed=3)
    return BenchResult(cfg, [], [KSummary(k, m, 0.0, m, m, 100) for k, m in means], 0.0)


def test_table_format(tmp_path):
    res = fake_result([(79, 0.0121999)])
    lines = format_table(res).splitlines()
    assert lines == ["model\td\tn\tk\tmean_rate\tse\treps\tseed", "sl0\t5\t1000\t79\t0.0122\t0.0000\t100\t3"]
    res = fake_result([(79, 0.2), (16, 0.1), (47, 0.15)])
    lines = format_table(res).splitlines()
    assert len(lines) == 4
    assert [line.split("\t")[3] for line in lines[1:]] == ["16", "47", "79"]
    bench.emit_table(res, tmp_path / "t.tsv")
    assert (tmp_path / "t.tsv").read_text() == format_table(res)


def test_config_round_trip():
    cfg = BenchConfig(model="ml0", d=7, n=500, reps=3, k_list=(40, 11), lam=1.5, gamma=0.25,
                      alpha0=1.0, seed=99, transform=False, workers=2)
    res = BenchResult(cfg, [], [], 0.0)
    assert BenchConfig.from_text(res.provenance()) == cfg
    assert cfg.k_list == (11, 40)


def test_config_parsing():
    cfg = BenchConfig.from_text("model = SL0\nn = 1000\nk_list = auto\nlambda = 2\n# comment\n")
    assert cfg.k_list == (16, 47, 79) and cfg.model == "sl0"
    for bad in ("colour = red\n", "reps = 0\n", "k_list = 1\n", "transform = maybe\n", "model = xyz\n",
                "d = 3\navg_degree = 3\n"):
        with pytest.raises(DataError):
            BenchConfig.from_text(bad)


# ---------------------------------------------------------------- pair benchmark

def write_two_ray_pair(path, seed, swap=False):
    spec = EscmSpec(Dag(2, [(1, 2)]), (1.0, 1.0), "sum", {(1, 2): 1.0})
    y, _ = sample_escm_conditional(spec, 2000, np.random.default_rng(seed))
    write_csv(path, y[:, ::-1] if swap else y, ["x", "y"])
    return path


# the minor ray sits at smaller radii after the rank transform, so a clear
# sign needs a larger k than the small-sample default
STRONG = dict(lam=2.0, k_factor=2.5)


def test_single_correct_pair(tmp_path):
    p = write_two_ray_pair(tmp_path / "p.csv", 1)
    res = run_pair_benchmark([PairCase(p, Direction.U_CAUSES_V, 1.0)], **STRONG)
    assert res.accuracy["(x1,x2)"] == 1.0
    assert res.half_width["(x1,x2)"] == 0.0
    assert len(res.outcomes[0].taus) == 4


def test_two_pairs_one_correct(tmp_path):
    p = write_two_ray_pair(tmp_path / "a.csv", 1)
    q = write_two_ray_pair(tmp_path / "b.csv", 2)
    cases = [PairCase(p, Direction.U_CAUSES_V, 3.0), PairCase(q, Direction.V_CAUSES_U, 3.0)]
    res = run_pair_benchmark(cases, **STRONG)
    assert res.accuracy["(x1,x2)"] == 0.5
    assert res.half_width["(x1,x2)"] == pytest.approx(1.96 * np.sqrt(0.25 * 0.5))
    assert res.half_width["(x1,x2)"] == pytest.approx(0.693, abs=5e-4)


def test_failed_pair_is_excluded(tmp_path):
    p = write_two_ray_pair(tmp_path / "a.csv", 1)
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b,c\n1,2,3\n")
    res = run_pair_benchmark([PairCase(p, Direction.U_CAUSES_V, 1.0), PairCase(bad, Direction.U_CAUSES_V, 5.0)],
                             **STRONG)
    assert res.accuracy["(x1,x2)"] == 1.0
    assert len(res.failures) == 1


def test_zero_pairs_is_an_error():
    with pytest.raises(ValueError):
        run_pair_benchmark([])


def test_manifest(tmp_path):
    (tmp_path / "m.txt").write_text("# file truth weight\na.csv 1->2 0.5\nsub/b.csv 2->1 2\n")
    cases = read_manifest(tmp_path / "m.txt")
    assert cases[0] == PairCase(tmp_path / "a.csv", Direction.U_CAUSES_V, 0.5)
    assert cases[1].truth is Direction.V_CAUSES_U and cases[1].path == tmp_path / "sub" / "b.csv"
    for bad in ("a.csv 1->3 1\n", "a.csv 1->2\n", "a.csv 1->2 -1\n"):
        (tmp_path / "m.txt").write_text(bad)
        with pytest.raises(DataError):
            read_manifest(tmp_path / "m.txt")
