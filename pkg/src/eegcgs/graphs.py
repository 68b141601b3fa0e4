"""Adjacency builders for the four EEG graph kinds and GCN normalisation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

KINDS = ("dist", "rand", "corr", "dtf")


@dataclass
class EegGraph:
    A: np.ndarray
    X: np.ndarray
    kind: str

    @property
    def n(self) -> int:
        return self.A.shape[0]

    def copy(self) -> "EegGraph":
        return EegGraph(self.A.copy(), self.X.copy(), self.kind)


def default_scale(montage) -> float:
    """Standard deviation of all pairwise electrode distances."""
    dist = montage.distances()
    iu = np.triu_indices(montage.n, k=1)
    return float(np.std(dist[iu]))


def build_dist_graph(montage, scale=None, k=0.9):
    """Gaussian kernel on electrode distance, cut to zero beyond ``k``."""
    if scale is None:
        scale = default_scale(montage)
    if scale <= 0 or k <= 0:
        raise ValueError("scale and k must be positive")
    dist = montage.distances()
    A = np.exp(-dist ** 2 / scale ** 2)
    A[dist > k] = 0.0
    return A


def build_rand_graph(n):
    if n < 2:
        raise ValueError("n must be >= 2")
    A = np.full((n, n), 0.5)
    np.fill_diagonal(A, 1.0)
    return A


def _row_norms(X):
    norms = np.linalg.norm(X, axis=1)
    zero = np.flatnonzero(norms == 0)
    if zero.size:
        raise ValueError(f"feature row {zero[0]} has zero norm")
    return norms


def _keep_top(score, m_top):
    """Keep the ``m_top`` largest-|score| off-diagonal entries per row.

    Ties go to the lower column index. Negatives are clamped to 0, values
    above 1 to 1, and the result is symmetrised with an element-wise max.
    """
    n = score.shape[0]
    if m_top < 1:
        raise ValueError("m_top must be >= 1")
    mag = np.abs(score)
    np.fill_diagonal(mag, -np.inf)
    order = np.argsort(-mag, axis=1, kind="stable")[:, :min(m_top, n - 1)]
    rows = np.repeat(np.arange(n), order.shape[1])
    A = np.zeros_like(score)
    A[rows, order.ravel()] = score[rows, order.ravel()]
    A = np.clip(A, 0.0, 1.0)
    return np.maximum(A, A.T)


def corr_scores(X):
    """Zero-lag normalised cross-correlation (cosine) between feature rows."""
    X = np.asarray(X, dtype=float)
    norms = _row_norms(X)
    return (X @ X.T) / np.outer(norms, norms)


def dtf_scores(X):
    """Cross-correlation of each pair over the energy of the remaining pairs."""
    X = np.asarray(X, dtype=float)
    n = X.shape[0]
    if n < 3:
        raise ValueError("the dtf graph needs at least 3 channels")
    _row_norms(X)
    xc = X @ X.T
    sq = xc ** 2
    # sum over m != i, j of xc[i, m]^2
    rest = sq.sum(axis=1, keepdims=True) - np.diag(sq)[:, None] - sq
    rest = np.maximum(rest, 0.0)
    denom = np.sqrt(rest)
    with np.errstate(divide="ignore", invalid="ignore"):
        score = np.where(denom > 0, xc / np.where(denom > 0, denom, 1.0), 0.0)
    np.fill_diagonal(score, 0.0)
    return score


def build_corr_graph(X, m_top=3):
    return _keep_top(corr_scores(X), m_top)


def build_dtf_graph(X, m_top=3):
    return _keep_top(dtf_scores(X), m_top)


def build_graph(kind, X, montage, scale=None, k=0.9, m_top=3) -> EegGraph:
    X = np.asarray(X, dtype=float)
    if kind == "dist":
        A = build_dist_graph(montage, scale, k)
    elif kind == "rand":
        A = build_rand_graph(X.shape[0])
    elif kind == "corr":
        A = build_corr_graph(X, m_top)
    elif kind == "dtf":
        A = build_dtf_graph(X, m_top)
    else:
        raise ValueError(f"unknown graph kind {kind!r}; expected one of {KINDS}")
    if A.shape[0] != X.shape[0]:
        raise ValueError(f"{A.shape[0]} electrodes but {X.shape[0]} feature rows")
    return EegGraph(A, X, kind)


def normalize_adjacency(A):
    """``D^-1/2 (A + I) D^-1/2``; works on a single matrix or a stack of them."""
    A = np.asarray(A, dtype=float)
    At = A + np.eye(A.shape[-1])
    dinv = 1.0 / np.sqrt(At.sum(axis=-1))
    return dinv[..., :, None] * At * dinv[..., None, :]


def node_strength(A, i=None):
    """Sum of a node's connections, excluding its self-loop.

    Returns all strengths when ``i`` is None.
    """
    A = np.asarray(A, dtype=float)
    strength = A.sum(axis=1) - np.diag(A)
    return strength if i is None else float(strength[i])
