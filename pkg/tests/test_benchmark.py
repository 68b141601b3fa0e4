import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from eegcgs.benchmark import (BenchConfig, average_clips, corrupt_node, farthest_feature,
                              fibonacci_montage, inject_anomaly, run_synthetic_eval,
                              synth_generate)
from eegcgs.graphs import EegGraph, build_rand_graph
from eegcgs.metrics import classification_metrics, confusion, roc_auc
from eegcgs.model import init_params
from eegcgs.montage import EegClip, ten_twenty


def _clips(values):
    return [EegClip(np.full((2, 3), v), 256.0, f"c{i}", "normal") for i, v in enumerate(values)]


def test_average_pairs():
    avg = average_clips(_clips([1.0, 3.0, 5.0, 7.0]), group=2)
    assert [a.samples[0, 0] for a in avg] == [2.0, 6.0]
    assert [a.clip_id for a in avg] == ["avg0000", "avg0001"]


def test_average_drops_trailing_partial_group():
    assert len(average_clips(_clips(range(70)), 35)) == 2
    assert len(average_clips(_clips(range(71)), 35)) == 2
    with pytest.raises(ValueError):
        average_clips(_clips(range(3)), 35)


def _graph(seed=0, n=5, d=4):
    rng = np.random.default_rng(seed)
    return EegGraph(build_rand_graph(n), rng.normal(size=(n, d)), "rand")


def test_p_zero_is_identity():
    g = _graph()
    for seed in range(20):
        out, rec = inject_anomaly(g, 0.0, seed)
        assert rec.node is None
        np.testing.assert_array_equal(out.A, g.A)
        np.testing.assert_array_equal(out.X, g.X)


def test_p_one_matches_brute_force():
    X = np.array([[0.0, 0.0], [1.0, 0.0], [5.0, 5.0]])
    g = EegGraph(np.eye(3), X, "rand")
    for seed in range(10):
        out, rec = inject_anomaly(g, 1.0, seed)
        i = rec.node
        # brute force: the node with the largest Euclidean distance to i
        far = max(range(3), key=lambda j: ((X[j] - X[i]) ** 2).sum())
        assert rec.source == far
        np.testing.assert_array_equal(out.X[i], X[far])
        assert (out.A[i] == 1).all() and (out.A[:, i] == 1).all()
        assert rec.edges_added == 2
        # other nodes keep their features
        others = [j for j in range(3) if j != i]
        np.testing.assert_array_equal(out.X[others], X[others])
    np.testing.assert_array_equal(g.X, X)


def test_electrode_distance_source():
    m = ten_twenty()
    g = EegGraph(np.eye(19), np.random.default_rng(0).normal(size=(19, 4)), "dist")
    _, rec = inject_anomaly(g, 1.0, 2, montage=m, distance="electrode")
    assert rec.source == m.farthest()[rec.node]


def test_corrupt_node_idempotent():
    g = _graph(1)
    once = corrupt_node(g, 2, farthest_feature(g.X, 2))
    twice = corrupt_node(once, 2, farthest_feature(g.X, 2))
    np.testing.assert_array_equal(once.A, twice.A)
    np.testing.assert_array_equal(once.X, twice.X)


def test_injection_rate():
    g = _graph()
    hits = sum(inject_anomaly(g, 0.03, np.random.default_rng(s))[1].node is not None
               for s in range(4000))
    # binomial mean 120, std about 11
    assert 80 < hits < 160


def test_synthetic_deterministic():
    a = synth_generate(3, T=64, seed=5)
    b = synth_generate(3, T=64, seed=5)
    for x, y in zip(a, b):
        assert x.samples.tobytes() == y.samples.tobytes()
    assert a[0].samples.shape == (19, 64)
    assert all(c.label == "normal" for c in a)
    assert synth_generate(2, T=64, n=7)[0].n == 7


def test_synthetic_spatial_correlation():
    m = ten_twenty()
    clips = synth_generate(50, T=256, seed=0)
    C = np.mean([np.corrcoef(c.samples) for c in clips], axis=0)
    D = m.distances()
    assert C[m.index("C3"), m.index("CZ")] > C[m.index("FP1"), m.index("O2")] + 0.1
    iu = np.triu_indices(m.n, 1)
    assert np.corrcoef(D[iu], C[iu])[0, 1] < -0.5


def test_fibonacci_montage_on_sphere():
    m = fibonacci_montage(32)
    np.testing.assert_allclose(np.linalg.norm(m.coords, axis=1), 1.0)
    assert (m.coords[:, 2] >= 0).all()


def _brute_auc(scores, labels):
    pos = [s for s, y in zip(scores, labels) if y]
    neg = [s for s, y in zip(scores, labels) if not y]
    total = sum(1.0 if p > q else 0.5 if p == q else 0.0 for p, q in itertools.product(pos, neg))
    return total / (len(pos) * len(neg))


def test_auc_examples():
    assert roc_auc([0.9, 0.8, 0.1], [1, 1, 0]) == 1.0
    assert roc_auc([0.9, 0.8, 0.1], [1, 0, 1]) == 0.5
    assert roc_auc([0.1, 0.2], [1, 0]) == 0.0
    with pytest.raises(ValueError):
        roc_auc([0.1, 0.2], [1, 1])


@settings(max_examples=100, deadline=None)
@given(arrays(np.float64, st.integers(2, 40), elements=st.sampled_from([0.0, 0.25, 0.5, 1.0])),
       st.integers(0, 2**32 - 1))
def test_auc_matches_pair_count(scores, seed):
    rng = np.random.default_rng(seed)
    labels = rng.random(scores.size) < 0.4
    labels[0], labels[-1] = True, False
    assert roc_auc(scores, labels) == pytest.approx(_brute_auc(scores, labels), abs=1e-12)


def test_metric_example():
    flags = np.array([1, 1, 1, 1, 0] + [0] * 5, dtype=bool)
    labels = np.array([1, 1, 1, 0, 1] + [0] * 5, dtype=bool)
    assert confusion(flags, labels) == (3, 1, 1, 5)
    m = classification_metrics(flags, labels)
    assert m.precision == 0.75 and m.sensitivity == 0.75
    assert m.specificity == pytest.approx(5 / 6)
    assert m.f1 == pytest.approx(0.75)
    assert np.isnan(m.roc_auc)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.booleans(), st.booleans()), min_size=1, max_size=50))
def test_f1_identity(pairs):
    flags = np.array([p for p, _ in pairs])
    labels = np.array([y for _, y in pairs])
    tp, fp, fn, _ = confusion(flags, labels)
    m = classification_metrics(flags, labels)
    expected = 2 * tp / (2 * tp + fp + fn) if tp else 0.0
    assert m.f1 == pytest.approx(expected)


def test_no_injection_raises():
    clips = synth_generate(4, T=64, seed=0)
    with pytest.raises(RuntimeError, match="no anomaly"):
        run_synthetic_eval({"corr": init_params(8, 4, 0)}, clips,
                           cfg=BenchConfig(group=2, p=0.0, rounds=2))


def test_eval_runs_and_records():
    clips = synth_generate(8, T=64, seed=0)
    cfg = BenchConfig(group=2, p=1.0, rounds=2, repeats=2)
    res = run_synthetic_eval({"corr": init_params(8, 4, 0), "dist": init_params(8, 4, 1)},
                             clips, cfg=cfg)
    assert res.injections == 8
    assert len(res.reports) == 8 and res.reports[0].kinds == ("dist", "corr")
    assert res.reports[0].clip_id == "avg0000-r000"
    assert res.scores.shape == (8 * 19,)
    assert 0.0 <= res.metrics.roc_auc <= 1.0
    again = run_synthetic_eval({"corr": init_params(8, 4, 0), "dist": init_params(8, 4, 1)},
                               clips, cfg=cfg)
    np.testing.assert_array_equal(res.scores, again.scores)


def test_dataset_scaling_option():
    clips = synth_generate(8, T=64, seed=0)
    models = {"corr": init_params(8, 4, 0)}
    res = run_synthetic_eval(models, clips, cfg=BenchConfig(group=2, p=1.0, rounds=2,
                                                            scaling="dataset"))
    # pooled scaling: the extremes are reached once across all clips, not in every clip
    con_max = [r.f_con.max() for r in res.reports]
    assert max(con_max) == 1.0 and min(r.f_con.min() for r in res.reports) == 0.0
    assert sum(v == 1.0 for v in con_max) < len(res.reports)
    with pytest.raises(ValueError, match="scaling"):
        BenchConfig(scaling="global").validate()
