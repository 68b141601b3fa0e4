"""Contrastive + reconstruction objective, exact gradients, Adam, training loop."""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np
from scipy.special import expit, log_expit

from .features import fft_features
from .graphs import KINDS, build_graph
from .model import ModelParams, forward, init_params
from .montage import ten_twenty
from .sampling import TripletBatch, reachable_counts, sample_triplets, stream

log = logging.getLogger(__name__)


@dataclass
class TrainConfig:
    lam: float = 0.6
    alpha: int = 4
    restart_p: float = 0.5
    d: int = 6000
    d_emb: int = 256
    learning_rate: float = 1e-3
    epochs: int = 100
    batch_size: int = 32
    seed: int = 0
    graph_kind: str = "corr"
    k: float = 0.9
    m_top: int = 3
    scale: Optional[float] = None

    def validate(self) -> "TrainConfig":
        checks = [
            (0.0 <= self.lam <= 1.0, "lam must lie in [0, 1]"),
            (self.alpha >= 1, "alpha must be >= 1"),
            (0.0 < self.restart_p < 1.0, "restart_p must lie in (0, 1)"),
            (self.d >= 1 and self.d_emb >= 1, "d and d_emb must be >= 1"),
            (self.learning_rate > 0, "learning_rate must be positive"),
            (self.epochs >= 0, "epochs must be >= 0"),
            (self.batch_size >= 1, "batch_size must be >= 1"),
            (self.graph_kind in KINDS, f"graph_kind must be one of {KINDS}"),
            (self.k > 0, "k must be positive"),
            (self.m_top >= 1, "m_top must be >= 1"),
            (self.scale is None or self.scale > 0, "scale must be positive"),
        ]
        for ok, msg in checks:
            if not ok:
                raise ValueError(msg)
        return self


@dataclass
class Gradients:
    dW_e: np.ndarray
    dW_d: np.ndarray
    dW_s: np.ndarray

    def arrays(self):
        return [self.dW_e, self.dW_d, self.dW_s]


@dataclass
class AdamState:
    m: list
    v: list
    step: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def zeros_like(cls, params: ModelParams) -> "AdamState":
        return cls([np.zeros_like(w) for w in params.arrays()],
                   [np.zeros_like(w) for w in params.arrays()])


def contrastive_loss(sim_pos, sim_neg):
    """Mean binary cross-entropy of the positive and negative pairs.

    ``sim_pos`` has shape (M, 2) and ``sim_neg`` shape (M,), one row per
    (clip, target). The negative term enters once for each positive draw.
    """
    sim_pos = np.asarray(sim_pos, dtype=float)
    sim_neg = np.asarray(sim_neg, dtype=float)
    m = sim_neg.size
    total = np.log(sim_pos).sum() + 2.0 * np.log1p(-sim_neg).sum()
    return -total / (2.0 * m)


def _contrastive_from_logits(s_pos, s_neg):
    m = s_neg.size
    return -(log_expit(s_pos).sum() + 2.0 * log_expit(-s_neg).sum()) / (2.0 * m)


def reconstruction_loss(xhat, x):
    """``xhat`` (M, 2, d) reconstructions of the targets ``x`` (M, d)."""
    xhat = np.asarray(xhat, dtype=float)
    x = np.asarray(x, dtype=float)
    m = x.shape[0]
    return float(((xhat - x[:, None, :]) ** 2).sum() / (2.0 * m))


def total_loss(lam, l_con, l_rec):
    if not 0.0 <= lam <= 1.0:
        raise ValueError("lam must lie in [0, 1]")
    return lam * l_con + (1.0 - lam) * l_rec


def backward(params: ModelParams, feats, batch: TripletBatch, lam,
             clip_ids: Optional[Sequence[str]] = None):
    """Loss and exact gradients for one mini-batch.

    Returns ``(loss, Gradients, (l_con, l_rec))``.
    """
    if len(batch) == 0:
        raise ValueError("empty batch")
    fw = forward(params, feats, batch)
    M = len(batch)
    N = 2.0 * M
    alpha = batch.pos_nodes.shape[-1]

    l_con = _contrastive_from_logits(fw.s_pos, fw.s_neg)
    l_rec = float((fw.resid ** 2).sum() / N)
    loss = total_loss(lam, l_con, l_rec)
    if not np.isfinite(loss):
        per = (fw.resid ** 2).sum(axis=(1, 2)) + np.abs(fw.s_pos).sum(1) + np.abs(fw.s_neg)
        bad = int(batch.clip[np.flatnonzero(~np.isfinite(per))[0]])
        name = clip_ids[bad] if clip_ids is not None else str(bad)
        raise FloatingPointError(f"non-finite loss on clip {name}")

    # scorer logits
    g_spos = -lam / N * expit(-fw.s_pos)                # (M, 2)
    g_sneg = 2.0 * lam / N * expit(fw.s_neg)            # (M,)
    rbar = np.einsum("mq,mqk->mk", g_spos, fw.pos_r) + g_sneg[:, None] * fw.neg_r
    dW_s = fw.e_t.T @ rbar
    de_t = rbar @ params.W_s.T
    dpos_r = g_spos[..., None] * fw.es[:, None, :]
    dneg_r = g_sneg[:, None] * fw.es

    # decoder
    g_x = (1.0 - lam) * 2.0 / N * fw.resid               # (M, 2, d)
    dW_d = np.einsum("mqk,mqd->kd", fw.u, g_x)
    du = g_x @ params.W_d.T                              # (M, 2, k)

    # encoder, positive and negative subgraphs
    dpos_E = dpos_r[:, :, None, :] / alpha + batch.pos_ahat[:, :, 0, :, None] * du[:, :, None, :]
    dpos_z = dpos_E * (fw.pos_z > 0)
    dpos_in = np.swapaxes(batch.pos_ahat, -1, -2) @ dpos_z
    dpos_in *= batch.pos_keep[..., None]
    dneg_z = (dneg_r[:, None, :] / alpha) * (fw.neg_z > 0)
    dneg_in = np.swapaxes(batch.neg_ahat, -1, -2) @ dneg_z
    dz_t = de_t * (fw.z_t > 0)

    # route row gradients of X W_e back to (clip, node) and contract with X
    C, n, d = feats.shape
    k = params.d_emb
    G = np.zeros((C * n, k))
    c = batch.clip
    np.add.at(G, c * n + batch.target, dz_t)
    np.add.at(G, (c[:, None, None] * n + batch.pos_nodes).ravel(), dpos_in.reshape(-1, k))
    np.add.at(G, (c[:, None] * n + batch.neg_nodes).ravel(), dneg_in.reshape(-1, k))
    dW_e = feats.reshape(C * n, d).T @ G
    return loss, Gradients(dW_e, dW_d, dW_s), (float(l_con), l_rec)


def optimizer_step(params: ModelParams, grads: Gradients, state: AdamState, lr):
    """One Adam update in place; returns ``(params, state)``."""
    state.step += 1
    b1, b2 = state.beta1, state.beta2
    c1 = 1.0 - b1 ** state.step
    c2 = 1.0 - b2 ** state.step
    for w, g, m, v in zip(params.arrays(), grads.arrays(), state.m, state.v):
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * g * g
        w -= lr * (m / c1) / (np.sqrt(v / c2) + state.eps)
    return params, state


def check_trainable(clips) -> None:
    for clip in clips:
        if clip.label == "seizure":
            raise ValueError(
                f"clip {clip.clip_id} is labelled seizure; training uses normal clips only")


def prepare(clips, cfg: TrainConfig, montage):
    """Feature stack and adjacency stack for ``cfg.graph_kind``."""
    feats = np.stack([fft_features(c, cfg.d) for c in clips])
    adj = np.stack([build_graph(cfg.graph_kind, X, montage, cfg.scale, cfg.k, cfg.m_top).A
                    for X in feats])
    return feats, adj


def sample_epoch_batch(adj, reach, farthest, idx, cfg: TrainConfig, epoch, local=True):
    """One triplet for every (clip, target) of the clips in ``idx``."""
    n = adj.shape[1]
    targets = np.arange(n)
    parts = []
    for pos, ci in enumerate(idx):
        rng = stream(cfg.seed, "train", epoch, int(ci))
        parts.append(sample_triplets(adj[ci], targets, farthest, cfg.alpha, cfg.restart_p,
                                     rng, clip_index=pos if local else int(ci),
                                     reach=reach[ci]))
    return TripletBatch.concat(parts)


def train(clips, cfg: TrainConfig, montage=None, params: Optional[ModelParams] = None):
    """Fit one model on normal clips.

    Returns ``(params, history)`` where ``history`` holds the mean batch loss
    of every epoch.
    """
    cfg.validate()
    clips = list(clips)
    if not clips:
        raise ValueError("no training clips")
    check_trainable(clips)
    montage = montage or ten_twenty()
    if clips[0].n != montage.n:
        raise ValueError(f"clips have {clips[0].n} channels, montage {montage.n}")
    ids = [c.clip_id for c in clips]

    feats, adj = prepare(clips, cfg, montage)
    reach = [reachable_counts(A) for A in adj]
    farthest = montage.farthest()
    params = init_params(cfg.d, cfg.d_emb, cfg.seed) if params is None else params
    state = AdamState.zeros_like(params)

    history = []
    for epoch in range(cfg.epochs):
        order = stream(cfg.seed, "shuffle", epoch).permutation(len(clips))
        losses = []
        for start in range(0, len(order), cfg.batch_size):
            idx = order[start:start + cfg.batch_size]
            batch = sample_epoch_batch(adj, reach, farthest, idx, cfg, epoch)
            loss, grads, _ = backward(params, feats[idx], batch, cfg.lam,
                                      [ids[i] for i in idx])
            optimizer_step(params, grads, state, cfg.learning_rate)
            losses.append(loss)
        history.append(float(np.mean(losses)))
        log.debug("epoch %d loss %.6f", epoch, history[-1])
    return params, history


def train_kinds(clips, cfg: TrainConfig, kinds=KINDS, montage=None) -> dict:
    """One independently trained model per graph kind."""
    return {kind: train(clips, replace(cfg, graph_kind=kind), montage)
            for kind in kinds}
