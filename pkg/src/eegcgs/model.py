"""Single-layer GCN autoencoder with a bilinear subgraph/node scorer.

The per-subgraph functions (:func:`encode_subgraph`, :func:`encode_node`,
:func:`readout`, :func:`similarity`, :func:`decode_subgraph`) are the
reference definitions. :func:`forward` evaluates the same maps for a whole
:class:`~eegcgs.sampling.TripletBatch` at once and is what training and
scoring use.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path
from types import SimpleNamespace

import numpy as np
from scipy.special import expit

from .graphs import normalize_adjacency

CKPT_MAGIC = b"CGSM"


@dataclass
class ModelParams:
    W_e: np.ndarray  # (d, d')
    W_d: np.ndarray  # (d', d)
    W_s: np.ndarray  # (d', d')

    @property
    def d(self) -> int:
        return self.W_e.shape[0]

    @property
    def d_emb(self) -> int:
        return self.W_e.shape[1]

    def arrays(self):
        return [self.W_e, self.W_d, self.W_s]

    def copy(self) -> "ModelParams":
        return ModelParams(self.W_e.copy(), self.W_d.copy(), self.W_s.copy())


def _glorot(rng, fan_in, fan_out):
    bound = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-bound, bound, size=(fan_in, fan_out))


def init_params(d, d_emb, seed=0) -> ModelParams:
    if d < 1 or d_emb < 1:
        raise ValueError("d and d_emb must be >= 1")
    rng = np.random.default_rng(seed)
    return ModelParams(_glorot(rng, d, d_emb), _glorot(rng, d_emb, d),
                       _glorot(rng, d_emb, d_emb))


def relu(x):
    return np.maximum(x, 0.0)


def encode_subgraph(params, A_s, X_s):
    """ReLU(Â X W_e) for one subgraph; ``A_s`` may be a SubGraph."""
    if hasattr(A_s, "A_s"):
        A_s, X_s = A_s.A_s, A_s.X_s
    return relu(normalize_adjacency(A_s) @ np.asarray(X_s, dtype=float) @ params.W_e)


def encode_node(params, x):
    return relu(np.asarray(x, dtype=float) @ params.W_e)


def readout(E_s):
    return np.asarray(E_s).mean(axis=-2)


def similarity(params, e_t, r_s):
    return expit(np.asarray(e_t) @ params.W_s @ np.asarray(r_s).T)


def decode_subgraph(params, E_s, A_s):
    """Linear GCN decoder: Â E W_d, shape (alpha, d)."""
    return normalize_adjacency(A_s) @ np.asarray(E_s) @ params.W_d


def forward(params, feats, batch):
    """Batched forward pass over a TripletBatch.

    ``feats`` has shape (C, n, d) and is indexed by ``batch.clip``. The
    returned namespace keeps the intermediates needed for backprop.
    """
    XW = feats @ params.W_e                                  # (C, n, k)
    c, t = batch.clip, batch.target
    x_t = feats[c, t]                                        # (M, d)
    z_t = XW[c, t]
    e_t = relu(z_t)

    pos_in = XW[c[:, None, None], batch.pos_nodes] * batch.pos_keep[..., None]
    pos_z = batch.pos_ahat @ pos_in                          # (M, 2, a, k)
    pos_E = relu(pos_z)
    pos_r = pos_E.mean(axis=-2)                              # (M, 2, k)

    neg_in = XW[c[:, None], batch.neg_nodes]
    neg_z = batch.neg_ahat @ neg_in                          # (M, a, k)
    neg_E = relu(neg_z)
    neg_r = neg_E.mean(axis=-2)                              # (M, k)

    es = e_t @ params.W_s
    s_pos = np.einsum("mk,mqk->mq", es, pos_r)
    s_neg = np.einsum("mk,mk->m", es, neg_r)

    # target sits at row 0 of every positive subgraph
    u = np.einsum("mqa,mqak->mqk", batch.pos_ahat[:, :, 0, :], pos_E)
    xhat = u @ params.W_d                                    # (M, 2, d)
    resid = xhat - x_t[:, None, :]
    return SimpleNamespace(
        x_t=x_t, z_t=z_t, e_t=e_t, es=es,
        pos_z=pos_z, pos_E=pos_E, pos_r=pos_r,
        neg_z=neg_z, neg_E=neg_E, neg_r=neg_r,
        s_pos=s_pos, s_neg=s_neg,
        sim_pos=expit(s_pos), sim_neg=expit(s_neg),
        u=u, xhat=xhat, resid=resid,
    )


def save_checkpoint(params: ModelParams, path) -> Path:
    path = Path(path)
    head = CKPT_MAGIC + struct.pack("<2i", params.d, params.d_emb)
    body = b"".join(np.ascontiguousarray(w, dtype="<f8").tobytes()
                    for w in params.arrays())
    path.write_bytes(head + body)
    return path


def load_checkpoint(path) -> ModelParams:
    blob = Path(path).read_bytes()
    if blob[:4] != CKPT_MAGIC:
        raise ValueError(f"{path}: not a CGSM checkpoint")
    d, k = struct.unpack("<2i", blob[4:12])
    sizes = [(d, k), (k, d), (k, k)]
    expected = 12 + 8 * sum(a * b for a, b in sizes)
    if d < 1 or k < 1 or len(blob) != expected:
        raise ValueError(f"{path}: truncated or corrupt checkpoint")
    arrays, off = [], 12
    for shape in sizes:
        count = shape[0] * shape[1]
        arrays.append(np.frombuffer(blob, "<f8", count, off).reshape(shape).copy())
        off += 8 * count
    return ModelParams(*arrays)
