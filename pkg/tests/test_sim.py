import numpy as np
import pytest

from sparsepriv.analysis import LeakageBudget, sparsity_pad, sparsity_padded
from sparsepriv.gf import get_field
from sparsepriv.matrix import DenseMatrix, matvec
from sparsepriv.pad import PadParams, SourceModel, sample_source
from sparsepriv.scheme import TRUSTED, UNTRUSTED, SchemeConfig, covered_blocks
from sparsepriv.sim import TimingModel, UndecodableError, run_simulation, sweep_sparsity_vs_time

F = get_field(256)


def problem(seed=0, m=40, n=30, k=1, s=0.9, field=F):
    rng = np.random.default_rng(seed)
    A = sample_source(SourceModel(s, field), m, n, rng)
    return A, DenseMatrix.random(field, n, k, rng)


def test_timing_validation():
    with pytest.raises(ValueError):
        TimingModel(base_cost_per_nnz=0)
    with pytest.raises(ValueError):
        TimingModel(straggler_slowdown=0.5)
    with pytest.raises(ValueError):
        TimingModel(jitter_rate=-1.0)


def test_single_layer_needs_every_worker():
    A, x = problem()
    cfg = SchemeConfig(4, 5, 1, 1, 1, F)
    rep = run_simulation(A, x, PadParams.symmetric(0.5, F), cfg, TimingModel(), np.random.default_rng(1))
    assert rep.consumed == {UNTRUSTED: 4, TRUSTED: 5}
    assert sum(rep.consumed.values()) == cfg.N1 + cfg.N2
    assert rep.verified and rep.y == matvec(A, x)


def test_one_full_straggler_is_tolerated():
    A, x = problem(k=2)
    cfg = SchemeConfig(4, 4, 2, 2, 1, F)
    timing = TimingModel(full_stragglers={(TRUSTED, 2)})
    rep = run_simulation(A, x, PadParams.symmetric(0.3, F), cfg, timing, np.random.default_rng(2))
    assert rep.verified
    assert rep.consumed[TRUSTED] <= rep.thresholds[TRUSTED]
    assert all(not (e.cluster == TRUSTED and e.worker == 2) for e in rep.events)


def test_too_many_full_stragglers_fail_with_blocks():
    A, x = problem()
    cfg = SchemeConfig(4, 4, 2, 2, 1, F)
    timing = TimingModel(full_stragglers={(TRUSTED, 0), (TRUSTED, 1)})
    with pytest.raises(UndecodableError) as info:
        run_simulation(A, x, PadParams.symmetric(0.3, F), cfg, timing, np.random.default_rng(3))
    assert info.value.missing.missing_trusted == {0}
    assert "trusted blocks 1" in str(info.value)


def test_unknown_straggler_rejected():
    A, x = problem()
    with pytest.raises(ValueError):
        run_simulation(A, x, PadParams.symmetric(0.3, F), SchemeConfig(2, 2),
                       TimingModel(full_stragglers={(TRUSTED, 5)}), np.random.default_rng(0))


def test_same_seed_same_report():
    A, x = problem()
    cfg = SchemeConfig(3, 4, 2, 3, 2, F)
    timing = TimingModel(jitter_rate=0.5, jitter_shift=1.0, partial_stragglers={(UNTRUSTED, 1)},
                         straggler_slowdown=3.0)
    a = run_simulation(A, x, PadParams.symmetric(0.4, F), cfg, timing, np.random.default_rng(9))
    b = run_simulation(A, x, PadParams.symmetric(0.4, F), cfg, timing, np.random.default_rng(9))
    assert a.to_csv() == b.to_csv()
    c = run_simulation(A, x, PadParams.symmetric(0.4, F), cfg, timing, np.random.default_rng(10))
    assert a.to_csv() != c.to_csv()


def test_decode_instant_is_first_full_coverage():
    A, x = problem(m=60)
    cfg = SchemeConfig(5, 6, 3, 2, 1, F)
    timing = TimingModel(jitter_rate=1.0, jitter_shift=0.1)
    rep = run_simulation(A, x, PadParams.symmetric(0.2, F), cfg, timing, np.random.default_rng(4))
    for cluster in (UNTRUSTED, TRUSTED):
        counted = [e for e in rep.events if e.cluster == cluster and e.counted]
        assert len(counted) == rep.consumed[cluster] <= rep.thresholds[cluster]
        counts = np.zeros(cfg.size(cluster), dtype=int)
        for i, e in enumerate(counted):
            assert e.layer == counts[e.worker]  # layers arrive in order
            counts[e.worker] += 1
            done = len(covered_blocks(cfg.grid(cluster), counts)) == cfg.size(cluster)
            assert done == (i == len(counted) - 1)
        assert rep.cluster_decode_time[cluster] == counted[-1].finish
    assert rep.decode_time == max(rep.cluster_decode_time.values())


def test_partial_straggler_delays_its_layers():
    A, x = problem()
    cfg = SchemeConfig(2, 2, 1, 1, 1, F)
    params = PadParams.symmetric(0.1, F)
    base = run_simulation(A, x, params, cfg, TimingModel(), np.random.default_rng(5))
    slow = run_simulation(A, x, params, cfg,
                          TimingModel(straggler_slowdown=10.0, partial_stragglers={(TRUSTED, 0)}),
                          np.random.default_rng(5))
    t0 = {(e.cluster, e.worker, e.layer): e.finish for e in base.events}
    t1 = {(e.cluster, e.worker, e.layer): e.finish for e in slow.events}
    assert t0[(TRUSTED, 0, 0)] > 0
    assert t1[(TRUSTED, 0, 0)] == pytest.approx(10 * t0[(TRUSTED, 0, 0)])
    assert t1[(TRUSTED, 1, 0)] == t0[(TRUSTED, 1, 0)]
    assert slow.verified


def test_jitter_respects_shift():
    A, x = problem()
    rep = run_simulation(A, x, PadParams.symmetric(0.5, F), SchemeConfig(3, 3, 1, 1, 1, F),
                         TimingModel(base_cost_per_nnz=1e-9, jitter_rate=2.0, jitter_shift=5.0),
                         np.random.default_rng(6))
    assert all(e.finish - e.start >= 5.0 for e in rep.events)


def test_task_cost_is_proportional_to_nnz():
    A, x = problem(k=3)
    rep = run_simulation(A, x, PadParams.symmetric(0.5, F), SchemeConfig(2, 3, 1, 1, 1, F),
                         TimingModel(base_cost_per_nnz=0.5), np.random.default_rng(7))
    for e in rep.events:
        assert e.finish - e.start == pytest.approx(0.5 * e.nnz * 3)


def test_empirical_task_sparsity_matches_closed_form():
    s, p = 0.9, 0.7
    A, x = problem(m=500, n=400, s=s)
    rep = run_simulation(A, x, PadParams.symmetric(p, F), SchemeConfig(4, 4, 1, 1, 1, F),
                         TimingModel(), np.random.default_rng(8))
    n = A.rows * A.cols
    for key, want in (("S_R", sparsity_pad(s, p, p, 256)), ("S_ApR", sparsity_padded(s, p, p))):
        assert abs(rep.empirical[key] - want) <= 3 * np.sqrt(want * (1 - want) / n) + 3 * np.sqrt(s * (1 - s) / n)


def test_csv_layout():
    A, x = problem()
    rep = run_simulation(A, x, PadParams.symmetric(0.5, F), SchemeConfig(2, 2, 1, 1, 1, F),
                         TimingModel(), np.random.default_rng(0))
    head, summary = rep.to_csv().split("\n\n")
    assert head.splitlines()[0] == "order,cluster,worker,layer,block,nnz,start,finish,new_block,counted"
    assert len(head.splitlines()) == 1 + len(rep.events)
    keys = dict(line.split(",") for line in summary.splitlines()[1:])
    assert keys["verified"] == "1" and keys["K_t"] == "2"


def test_sweep_trend_and_boundaries():
    A, x = problem(m=200, n=100, s=0.93)
    cfg = SchemeConfig(4, 10, 1, 2, 3, F)
    budgets = [LeakageBudget(e, 3, 10, 2) for e in (0.0, 0.05, 0.1, 0.25, 0.5, 1.0)]
    res = sweep_sparsity_vs_time(A, x, cfg, budgets, TimingModel(), np.random.default_rng(0))
    times = [r.decode_time for r in res.rows]
    ps = [r.p_star for r in res.rows]
    assert ps == sorted(ps)
    assert ps[0] == 1 / 256 and ps[-1] == 1.0
    assert times[0] == max(times)
    assert res.rows[-1].S_ApR == 1.0 and res.rows[-1].S_ApR_empirical == 1.0
    assert res.trend_ok
    assert res.to_csv().splitlines()[0].startswith("eps_rel,z,p_star")


def test_sweep_requires_sorted_budgets():
    A, x = problem()
    with pytest.raises(ValueError):
        sweep_sparsity_vs_time(A, x, SchemeConfig(2, 2, 1, 1, 1, F),
                               [LeakageBudget(0.5, 1, 2), LeakageBudget(0.1, 1, 2)],
                               TimingModel(), np.random.default_rng(0))
