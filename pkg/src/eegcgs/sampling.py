"""Random-walk-with-restart subgraph sampling and positive/negative triplets.

Walks are simulated in parallel with numpy. Every walk in one call shares a
single ``numpy.random.Generator``; callers derive a fresh generator per
(seed, clip, epoch/round) via :func:`stream` so results do not depend on
how clips are scheduled.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .graphs import normalize_adjacency

_MAX_STEPS = 1_000_000


def stream(seed, *keys) -> np.random.Generator:
    """Independent generator for ``seed`` and a tuple of int/str keys."""
    spawn = tuple(k if isinstance(k, int) else zlib.crc32(str(k).encode())
                  for k in keys)
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=spawn))


def _transition(A):
    P = np.clip(np.asarray(A, dtype=float), 0.0, None)
    P = P.copy()
    np.fill_diagonal(P, 0.0)
    return P


def reachable_counts(A) -> np.ndarray:
    """Number of nodes reachable from each node (itself included)."""
    link = _transition(A) > 0
    reach = link | np.eye(link.shape[0], dtype=bool)
    while True:
        nxt = reach | ((reach.astype(np.int64) @ link.astype(np.int64)) > 0)
        if (nxt == reach).all():
            return reach.sum(axis=1)
        reach = nxt


def rwr_walks(A, roots, alpha, restart_p, rng, _reach=None) -> np.ndarray:
    """Collect ``alpha`` distinct nodes per root by random walk with restart.

    At each step the walker returns to its root with probability
    ``restart_p``, otherwise it moves to a neighbour with probability
    proportional to the edge weight (self-loops ignored). Nodes are kept in
    first-visit order with the root first. When fewer than ``alpha`` nodes
    are reachable the list is padded with the root.

    Returns an int array of shape ``(len(roots), alpha)``.
    """
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    roots = np.atleast_1d(np.asarray(roots, dtype=np.int64))
    if roots.size and (roots.min() < 0 or roots.max() >= n):
        raise IndexError(f"root out of range for a {n}-node graph")
    if alpha < 1:
        raise ValueError("alpha must be >= 1")
    if not 0.0 < restart_p < 1.0:
        raise ValueError("restart_p must lie in (0, 1)")
    W = roots.size
    out = np.repeat(roots[:, None], alpha, axis=1)
    if alpha == 1 or W == 0:
        return out

    P = _transition(A)
    rowsum = P.sum(axis=1)
    isolated = rowsum == 0
    cum = np.cumsum(P, axis=1)
    reach = reachable_counts(A) if _reach is None else _reach
    need = np.minimum(alpha, reach[roots])

    count = np.ones(W, dtype=np.int64)
    cur = roots.copy()
    live = np.flatnonzero(count < need)
    for _ in range(_MAX_STEPS):
        if live.size == 0:
            return out
        u = rng.random((live.size, 2))
        at = cur[live]
        jump = (u[:, 0] < restart_p) | isolated[at]
        step = (cum[at] > (u[:, 1] * rowsum[at])[:, None]).argmax(axis=1)
        nxt = np.where(jump, roots[live], step)
        # unfilled slots hold the root, so a restart never counts as new
        fresh = ~(out[live] == nxt[:, None]).any(axis=1)
        idx = live[fresh]
        out[idx, count[idx]] = nxt[fresh]
        count[idx] += 1
        cur[live] = nxt
        live = live[count[live] < need[live]]
    raise RuntimeError(f"random walk did not collect {alpha} nodes in {_MAX_STEPS} steps")


def rwr_sample(graph, root, alpha, restart_p=0.5, seed=0) -> list:
    A = getattr(graph, "A", graph)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return rwr_walks(A, [root], alpha, restart_p, rng)[0].tolist()


@dataclass
class SubGraph:
    nodes: np.ndarray
    A_s: np.ndarray
    X_s: np.ndarray
    target_index: Optional[int]
    anonymized: bool


@dataclass
class Triplet:
    g1_pos: SubGraph
    g2_pos: SubGraph
    g1_neg: SubGraph
    target: int


@dataclass
class TripletBatch:
    """Flat stack of ``M`` triplets drawn from one or more clips.

    ``clip`` and ``target`` index into a feature stack of shape (C, n, d).
    Positive arrays carry an extra axis of length 2 for the two draws.
    ``pos_keep`` is 0 where a positive subgraph row is the anonymised target.
    """

    clip: np.ndarray        # (M,)
    target: np.ndarray      # (M,)
    pos_nodes: np.ndarray   # (M, 2, alpha)
    pos_keep: np.ndarray    # (M, 2, alpha)
    pos_ahat: np.ndarray    # (M, 2, alpha, alpha)
    neg_nodes: np.ndarray   # (M, alpha)
    neg_ahat: np.ndarray    # (M, alpha, alpha)

    def __len__(self):
        return self.clip.size

    @staticmethod
    def concat(batches) -> "TripletBatch":
        batches = list(batches)
        return TripletBatch(*(np.concatenate([getattr(b, f) for b in batches])
                              for f in ("clip", "target", "pos_nodes", "pos_keep",
                                        "pos_ahat", "neg_nodes", "neg_ahat")))


def _induced(A, nodes):
    return A[nodes[..., :, None], nodes[..., None, :]]


def sample_triplets(A, targets, farthest, alpha, restart_p, rng,
                    clip_index=0, reach=None) -> TripletBatch:
    """One triplet per entry of ``targets`` for a single graph.

    ``farthest[t]`` is the root of the negative subgraph for target ``t``.
    """
    A = np.asarray(A, dtype=float)
    targets = np.asarray(targets, dtype=np.int64)
    m = targets.size
    if reach is None:
        reach = reachable_counts(A)
    roots = np.concatenate([targets, targets, np.asarray(farthest)[targets]])
    walks = rwr_walks(A, roots, alpha, restart_p, rng, _reach=reach)
    pos = np.stack([walks[:m], walks[m:2 * m]], axis=1)
    neg = walks[2 * m:]
    keep = (pos != targets[:, None, None]).astype(float)
    return TripletBatch(
        clip=np.full(m, clip_index, dtype=np.int64),
        target=targets,
        pos_nodes=pos,
        pos_keep=keep,
        pos_ahat=normalize_adjacency(_induced(A, pos)),
        neg_nodes=neg,
        neg_ahat=normalize_adjacency(_induced(A, neg)),
    )


def make_triplet(graph, target, montage, alpha=4, restart_p=0.5, rng=None) -> Triplet:
    """Two anonymised positive subgraphs around ``target`` and one negative
    subgraph rooted at the electrode farthest from it."""
    if rng is None or isinstance(rng, (int, np.integer)):
        rng = np.random.default_rng(rng)
    if graph.n != montage.n:
        raise ValueError(f"graph has {graph.n} nodes, montage {montage.n}")
    far = montage.farthest()
    tb = sample_triplets(graph.A, [target], far, alpha, restart_p, rng)

    def sub(nodes, anonymize):
        X_s = graph.X[nodes].copy()
        if anonymize:
            X_s[nodes == target] = 0.0
        return SubGraph(nodes=nodes.copy(), A_s=_induced(graph.A, nodes),
                        X_s=X_s, target_index=0 if anonymize else None,
                        anonymized=anonymize)

    return Triplet(sub(tb.pos_nodes[0, 0], True), sub(tb.pos_nodes[0, 1], True),
                   sub(tb.neg_nodes[0], False), int(target))
