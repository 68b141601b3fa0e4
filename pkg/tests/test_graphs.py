import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from eegcgs.graphs import (build_corr_graph, build_dist_graph, build_dtf_graph, build_graph,
                           build_rand_graph, corr_scores, default_scale, dtf_scores,
                           node_strength, normalize_adjacency)
from eegcgs.montage import ElectrodeMontage, ten_twenty


def _montage(points):
    pts = np.asarray(points, dtype=float)
    return ElectrodeMontage(tuple(f"E{i}" for i in range(len(pts))), pts)


def test_dist_diagonal_is_one():
    A = build_dist_graph(ten_twenty())
    np.testing.assert_array_equal(np.diag(A), 1.0)


def test_dist_cutoff():
    # two points 1.2 apart on the unit sphere
    half = np.arcsin(0.6)
    m = _montage([[np.sin(half), 0, np.cos(half)], [-np.sin(half), 0, np.cos(half)]])
    assert m.distances()[0, 1] == pytest.approx(1.2)
    A = build_dist_graph(m, scale=1.0, k=0.9)
    assert A[0, 1] == 0.0


def test_dist_unit_ratio():
    half = np.arcsin(0.4)
    m = _montage([[np.sin(half), 0, np.cos(half)], [-np.sin(half), 0, np.cos(half)]])
    A = build_dist_graph(m, scale=0.8, k=0.9)
    assert abs(A[0, 1] - np.exp(-1.0)) < 1e-12


def test_default_scale_is_std_of_pair_distances():
    m = ten_twenty()
    D = m.distances()
    pairs = [D[i, j] for i, j in itertools.combinations(range(m.n), 2)]
    assert default_scale(m) == pytest.approx(np.std(pairs))


def test_rand_graph():
    np.testing.assert_array_equal(build_rand_graph(2), [[1, 0.5], [0.5, 1]])
    for n in (3, 7, 19):
        A = build_rand_graph(n)
        assert (A.sum() - np.trace(A)) == pytest.approx(0.5 * n * (n - 1))
    np.testing.assert_array_equal(np.diag(build_rand_graph(19)), 1.0)


def test_corr_identical_rows_score_one():
    X = np.array([[1.0, 2.0, 3.0], [1.0, 2.0, 3.0], [3.0, 0.0, 1.0]])
    assert abs(corr_scores(X)[0, 1] - 1.0) < 1e-12


def test_corr_orthogonal_rows_no_edge():
    X = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    assert abs(corr_scores(X)[0, 1]) < 1e-12
    A = build_corr_graph(X, 3)
    assert A[0, 1] == 0.0


def _brute_top(score, m_top):
    """Per row: pick by repeatedly scanning for the largest |score|, lowest index first."""
    n = score.shape[0]
    A = np.zeros_like(score)
    for i in range(n):
        chosen = []
        for _ in range(min(m_top, n - 1)):
            best = None
            for j in range(n):
                if j == i or j in chosen:
                    continue
                if best is None or abs(score[i, j]) > abs(score[i, best]):
                    best = j
            chosen.append(best)
        for j in chosen:
            A[i, j] = min(max(score[i, j], 0.0), 1.0)
    return A


def test_corr_top3_against_brute_force():
    rng = np.random.default_rng(4)
    X = rng.normal(size=(5, 7))
    norms = np.linalg.norm(X, axis=1)
    score = np.array([[X[i] @ X[j] / (norms[i] * norms[j]) for j in range(5)] for i in range(5)])
    directed = _brute_top(score, 3)
    assert ((directed != 0).sum(axis=1) <= 3).all()
    np.testing.assert_allclose(build_corr_graph(X, 3), np.maximum(directed, directed.T),
                               atol=1e-12)


def test_dtf_three_nodes():
    X = np.array([[1.0, 1.0], [2.0, 0.0], [0.0, 2.0]])
    assert X[0] @ X[1] == 2 and X[0] @ X[2] == 2
    assert abs(dtf_scores(X)[0, 1] - 1.0) < 1e-12


def test_dtf_against_direct_evaluation():
    rng = np.random.default_rng(9)
    X = rng.normal(size=(6, 5))
    n = 6
    ref = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            den = np.sqrt(sum((X[i] @ X[m]) ** 2 for m in range(n) if m not in (i, j)))
            ref[i, j] = (X[i] @ X[j]) / den
    np.testing.assert_allclose(dtf_scores(X), ref, atol=1e-12)
    np.testing.assert_allclose(build_dtf_graph(X), np.maximum(_brute_top(ref, 3),
                                                              _brute_top(ref, 3).T), atol=1e-12)


def test_dtf_orthogonal_node_isolated():
    X = np.array([[1.0, 0, 0, 0], [0, 1.0, 1.0, 0], [0, 1.0, 2.0, 0], [0, 2.0, 1.0, 0]])
    assert np.all(dtf_scores(X)[0] == 0)
    A = build_dtf_graph(X)
    assert node_strength(A, 0) == 0.0


def test_dtf_clamps_to_one():
    # x0 much more correlated with x1 than with the rest -> raw ratio > 1
    X = np.array([[1.0, 0.0], [10.0, 0.0], [0.1, 1.0], [0.1, -1.0]])
    assert dtf_scores(X)[0, 1] > 1
    assert build_dtf_graph(X)[0, 1] == 1.0


@pytest.mark.parametrize("kind", ["dist", "rand", "corr", "dtf"])
def test_entries_in_unit_interval(kind):
    rng = np.random.default_rng(1)
    X = rng.normal(size=(19, 12))
    g = build_graph(kind, X, ten_twenty())
    assert g.A.min() >= 0 and g.A.max() <= 1
    expected_diag = 1.0 if kind in ("dist", "rand") else 0.0
    np.testing.assert_array_equal(np.diag(g.A), expected_diag)


@pytest.mark.parametrize("kind", ["dist", "rand"])
def test_geometry_graphs_ignore_features(kind):
    rng = np.random.default_rng(2)
    m = ten_twenty()
    a = build_graph(kind, rng.normal(size=(19, 8)), m).A
    b = build_graph(kind, rng.normal(size=(19, 8)), m).A
    np.testing.assert_array_equal(a, b)


def test_normalize_hand_cases():
    np.testing.assert_array_equal(normalize_adjacency(np.zeros((2, 2))), np.eye(2))
    np.testing.assert_allclose(normalize_adjacency([[0, 1], [1, 0]]), [[0.5, 0.5], [0.5, 0.5]],
                               atol=1e-15)


def _power_radius(M, iters=2000):
    v = np.ones(M.shape[0])
    lam = 0.0
    for _ in range(iters):
        w = M @ v
        lam = np.linalg.norm(w)
        if lam == 0:
            return 0.0
        v = w / lam
    return lam


@settings(max_examples=60, deadline=None)
@given(arrays(np.float64, (5, 5), elements=st.floats(0, 1)), st.integers(2, 5))
def test_normalized_symmetric_and_radius_at_most_one(raw, n):
    A = raw[:n, :n]
    A = (A + A.T) / 2
    Ah = normalize_adjacency(A)
    np.testing.assert_allclose(Ah, Ah.T, atol=1e-15)
    assert (Ah >= 0).all()
    assert _power_radius(Ah) <= 1 + 1e-9


def test_node_strength():
    assert node_strength(build_rand_graph(19), 3) == pytest.approx(9.0)
    np.testing.assert_allclose(node_strength(build_rand_graph(19)), 9.0)
    assert node_strength(np.zeros((4, 4)), 2) == 0.0


def test_corr_strength_varies_dist_does_not():
    from eegcgs.benchmark import synth_generate
    from eegcgs.features import fft_features
    m = ten_twenty()
    clips = synth_generate(2, T=256, seed=3)
    X0, X1 = (fft_features(c, 32) for c in clips)
    assert not np.allclose(node_strength(build_graph("corr", X0, m).A),
                           node_strength(build_graph("corr", X1, m).A))
    np.testing.assert_array_equal(node_strength(build_graph("dist", X0, m).A),
                                  node_strength(build_graph("dist", X1, m).A))
