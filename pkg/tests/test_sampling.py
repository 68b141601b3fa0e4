import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eegcgs.graphs import EegGraph, build_dist_graph, build_rand_graph, normalize_adjacency
from eegcgs.montage import ten_twenty
from eegcgs.sampling import (make_triplet, reachable_counts, rwr_sample, rwr_walks,
                             sample_triplets, stream)


def test_alpha_one_is_root():
    A = build_rand_graph(5)
    assert rwr_sample(A, 3, 1) == [3]


def test_star_graph_covers_all_nodes():
    A = np.zeros((5, 5))
    A[0, 1:] = A[1:, 0] = 1.0
    for seed in range(20):
        nodes = rwr_sample(A, 0, 5, seed=seed)
        assert nodes[0] == 0
        assert sorted(nodes) == [0, 1, 2, 3, 4]


def test_isolated_root_padded():
    A = np.zeros((4, 4))
    A[1, 2] = A[2, 1] = 1.0
    assert rwr_sample(A, 0, 3) == [0, 0, 0]
    # only two nodes reachable from 1
    assert rwr_sample(A, 1, 4, seed=5) == [1, 2, 1, 1]


def test_reachable_counts():
    A = np.zeros((5, 5))
    A[0, 1] = A[1, 0] = A[1, 2] = A[2, 1] = 0.3
    np.testing.assert_array_equal(reachable_counts(A), [3, 3, 3, 1, 1])


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31), st.integers(2, 8), st.integers(1, 8))
def test_walk_invariants(seed, n, alpha):
    rng = np.random.default_rng(seed)
    A = rng.random((n, n)) * (rng.random((n, n)) < 0.5)
    A = np.maximum(A, A.T)
    roots = rng.integers(0, n, size=6)
    walks = rwr_walks(A, roots, alpha, 0.5, np.random.default_rng(seed))
    reach = reachable_counts(A)
    for r, w in zip(roots, walks):
        assert w[0] == r
        distinct = list(dict.fromkeys(w.tolist()))
        assert len(distinct) == min(alpha, reach[r])
        # padding only with the root, after all distinct nodes
        assert (w[len(distinct):] == r).all()


def test_deterministic():
    A = build_dist_graph(ten_twenty())
    a = rwr_walks(A, np.arange(19), 6, 0.5, stream(7, "x", 1))
    b = rwr_walks(A, np.arange(19), 6, 0.5, stream(7, "x", 1))
    c = rwr_walks(A, np.arange(19), 6, 0.5, stream(7, "x", 2))
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, c)


def test_first_step_follows_edge_weights():
    # from node 0 the first new node is 1 w.p. 0.8 and 2 w.p. 0.2
    A = np.array([[1.0, 0.8, 0.2], [0.8, 0, 0], [0.2, 0, 0]])
    walks = rwr_walks(A, np.zeros(20000, dtype=int), 2, 0.5, np.random.default_rng(0))
    frac = (walks[:, 1] == 1).mean()
    # binomial std ~ 0.003
    assert abs(frac - 0.8) < 0.015


def test_path_graph_visits_in_order():
    # from the end of a path every walk discovers 0, 1, 2, 3 in that order
    n = 8
    A = np.zeros((n, n))
    for i in range(n - 1):
        A[i, i + 1] = A[i + 1, i] = 1.0
    for p in (0.1, 0.9):
        walks = rwr_walks(A, np.zeros(500, dtype=int), 4, p, np.random.default_rng(1))
        assert (walks == [0, 1, 2, 3]).all()


def test_bad_arguments():
    A = build_rand_graph(3)
    with pytest.raises(ValueError):
        rwr_walks(A, [0], 3, 1.0, np.random.default_rng(0))
    with pytest.raises(ValueError):
        rwr_walks(A, [0], 0, 0.5, np.random.default_rng(0))
    with pytest.raises(IndexError):
        rwr_walks(A, [3], 2, 0.5, np.random.default_rng(0))


def _graph(seed=0):
    rng = np.random.default_rng(seed)
    m = ten_twenty()
    return EegGraph(build_dist_graph(m), rng.normal(size=(19, 8)), "dist"), m


def test_triplet_negative_root_is_farthest():
    g, m = _graph()
    t = make_triplet(g, m.index("C3"), m, alpha=4, rng=3)
    assert m.names[t.g1_neg.nodes[0]] == "T4"
    assert not t.g1_neg.anonymized


def test_triplet_anonymized_and_parent_untouched():
    g, m = _graph()
    X0 = g.X.copy()
    c3 = m.index("C3")
    t = make_triplet(g, c3, m, alpha=4, rng=3)
    for sub in (t.g1_pos, t.g2_pos):
        assert sub.nodes[0] == c3
        assert sub.target_index == 0
        np.testing.assert_array_equal(sub.X_s[0], 0.0)
        np.testing.assert_array_equal(sub.X_s[1:], g.X[sub.nodes[1:]])
        np.testing.assert_array_equal(sub.A_s, g.A[np.ix_(sub.nodes, sub.nodes)])
    np.testing.assert_array_equal(g.X, X0)
    np.testing.assert_array_equal(t.g1_neg.X_s, g.X[t.g1_neg.nodes])


def test_batch_matches_induced_normalized():
    g, m = _graph()
    b = sample_triplets(g.A, np.arange(19), m.farthest(), 5, 0.5, np.random.default_rng(0))
    for i in range(19):
        nodes = b.neg_nodes[i]
        np.testing.assert_allclose(b.neg_ahat[i], normalize_adjacency(g.A[np.ix_(nodes, nodes)]))
        assert b.neg_nodes[i, 0] == m.farthest()[i]
        for q in range(2):
            assert b.pos_nodes[i, q, 0] == i
            np.testing.assert_array_equal(b.pos_keep[i, q], b.pos_nodes[i, q] != i)
