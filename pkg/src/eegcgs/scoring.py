"""Node anomaly scores, thresholds and the four-kind ensemble."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .features import fft_features
from .graphs import KINDS, EegGraph, build_graph
from .model import forward
from .sampling import reachable_counts, sample_triplets


@dataclass
class AnomalyReport:
    names: list
    f_con: np.ndarray
    f_rec: np.ndarray
    f: np.ndarray
    lam: float
    rounds: int
    kinds: tuple
    clip_id: str = ""
    tau1: Optional[float] = None
    tau2: Optional[float] = None
    flags: Optional[np.ndarray] = None
    verdict: Optional[str] = None
    con_raw: Optional[np.ndarray] = field(default=None, repr=False)
    rec_raw: Optional[np.ndarray] = field(default=None, repr=False)

    def to_dict(self) -> dict:
        nodes = []
        for i, name in enumerate(self.names):
            nodes.append({
                "name": name,
                "f_con": float(self.f_con[i]),
                "f_rec": float(self.f_rec[i]),
                "f": float(self.f[i]),
                "flagged": None if self.flags is None else bool(self.flags[i]),
            })
        kinds = list(self.kinds)
        return {
            "clip_id": self.clip_id,
            "kind": kinds[0] if len(kinds) == 1 else kinds,
            "tau1": self.tau1,
            "tau2": self.tau2,
            "rounds": self.rounds,
            "nodes": nodes,
            "verdict": self.verdict,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def minmax_scale(values):
    """Rescale to [0, 1]; a constant input maps to all zeros."""
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        raise ValueError("minmax_scale needs at least one value")
    lo, hi = v.min(), v.max()
    if hi == lo:
        return np.zeros_like(v)
    return (v - lo) / (hi - lo)


def raw_scores(params, graph: EegGraph, farthest, rounds=80, rng=None,
               alpha=4, restart_p=0.5, targets=None):
    """Round-averaged contrastive and reconstruction errors per target.

    ``con_raw`` is the mean of ``Sim^- - Sim^+_q`` and ``rec_raw`` the mean
    squared reconstruction error of the anonymised target, both averaged
    over ``rounds`` freshly sampled triplets and the two positive draws.
    """
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    if graph.X.shape[1] != params.d:
        raise ValueError(f"model expects d={params.d}, graph has d={graph.X.shape[1]}")
    rng = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
    n = graph.n
    targets = np.arange(n) if targets is None else np.atleast_1d(targets)
    tt = np.tile(targets, rounds)
    batch = sample_triplets(graph.A, tt, farthest, alpha, restart_p, rng,
                            reach=reachable_counts(graph.A))
    fw = forward(params, graph.X[None], batch)
    con = (fw.sim_neg[:, None] - fw.sim_pos).mean(axis=1)
    rec = (fw.resid ** 2).sum(axis=-1).mean(axis=1)
    con = con.reshape(rounds, targets.size).mean(axis=0)
    rec = rec.reshape(rounds, targets.size).mean(axis=0)
    return con, rec


def raw_node_scores(params, graph, target, farthest, rounds=80, rng=None,
                    alpha=4, restart_p=0.5):
    con, rec = raw_scores(params, graph, farthest, rounds, rng, alpha, restart_p,
                          targets=[target])
    return float(con[0]), float(rec[0])


def combine(con_raw, rec_raw, lam):
    f_con = minmax_scale(con_raw)
    f_rec = minmax_scale(rec_raw)
    return f_con, f_rec, lam * f_con + (1.0 - lam) * f_rec


def score_nodes(params, graph: EegGraph, montage, lam=0.6, rounds=80, rng=None,
                alpha=4, restart_p=0.5, clip_id="") -> AnomalyReport:
    con, rec = raw_scores(params, graph, montage.farthest(), rounds, rng, alpha, restart_p)
    f_con, f_rec, f = combine(con, rec, lam)
    return AnomalyReport(list(montage.names), f_con, f_rec, f, lam, rounds,
                         (graph.kind,), clip_id, con_raw=con, rec_raw=rec)


def detect(report: AnomalyReport, tau1=0.4, tau2=1) -> AnomalyReport:
    """Flag nodes with ``f > tau1``; the clip is a seizure if at least
    ``tau2`` nodes are flagged."""
    report.tau1, report.tau2 = tau1, tau2
    report.flags = report.f > tau1
    report.verdict = "seizure" if report.flags.sum() >= tau2 else "normal"
    return report


def ensemble_score(models: dict, clip, montage, lam=0.6, rounds=80, rng=None,
                   alpha=4, restart_p=0.5, kinds=KINDS, graphs=None,
                   scale=None, k=0.9, m_top=3) -> AnomalyReport:
    """Average the per-kind node scores of independently trained models.

    ``graphs`` may supply pre-built (e.g. corrupted) graphs keyed by kind;
    otherwise they are built from ``clip``.
    """
    missing = [kd for kd in kinds if kd not in models]
    if missing:
        raise KeyError(f"no model for graph kind(s) {missing}")
    dims = {(m.d, m.d_emb) for m in models.values()}
    if len(dims) != 1:
        raise ValueError(f"models disagree on (d, d'): {sorted(dims)}")
    rng = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
    X = None
    reports = []
    for kind in kinds:
        if graphs is not None and kind in graphs:
            g = graphs[kind]
        else:
            if X is None:
                X = fft_features(clip, models[kind].d)
            g = build_graph(kind, X, montage, scale, k, m_top)
        reports.append(score_nodes(models[kind], g, montage, lam, rounds, rng,
                                   alpha, restart_p))
    clip_id = getattr(clip, "clip_id", "") if clip is not None else ""
    return AnomalyReport(
        list(montage.names),
        np.mean([r.f_con for r in reports], axis=0),
        np.mean([r.f_rec for r in reports], axis=0),
        np.mean([r.f for r in reports], axis=0),
        lam, rounds, tuple(kinds), clip_id,
        con_raw=np.stack([r.con_raw for r in reports]),
        rec_raw=np.stack([r.rec_raw for r in reports]),
    )


def rescale_jointly(reports, lam=None) -> list:
    """Min-max scale raw scores over all nodes of all ``reports`` at once.

    The default scaling is per clip. This variant uses the whole set of
    clips as the population, per graph kind, and then averages the kinds
    as the ensemble does. Reports are updated in place; thresholds must be
    applied again afterwards.
    """
    reports = list(reports)
    if not reports:
        return reports
    con = np.stack([np.atleast_2d(r.con_raw) for r in reports])   # (C, K, n)
    rec = np.stack([np.atleast_2d(r.rec_raw) for r in reports])
    C, K, n = con.shape
    f_con = np.empty_like(con)
    f_rec = np.empty_like(rec)
    for kd in range(K):
        f_con[:, kd] = minmax_scale(con[:, kd].ravel()).reshape(C, n)
        f_rec[:, kd] = minmax_scale(rec[:, kd].ravel()).reshape(C, n)
    for i, r in enumerate(reports):
        weight = r.lam if lam is None else lam
        r.f_con = f_con[i].mean(axis=0)
        r.f_rec = f_rec[i].mean(axis=0)
        r.f = (weight * f_con[i] + (1.0 - weight) * f_rec[i]).mean(axis=0)
        r.flags, r.verdict = None, None
    return reports
