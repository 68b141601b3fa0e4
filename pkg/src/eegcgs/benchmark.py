"""Synthetic anomalous-channel benchmark.

Normal clips are averaged in disjoint groups, each averaged clip receives at
most one corrupted node (fully connected, features swapped with the most
distant node), and the trained model(s) must find it.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .features import fft_features
from .graphs import KINDS, EegGraph, build_graph
from .metrics import MetricSet, classification_metrics
from .montage import EegClip, ElectrodeMontage, ten_twenty
from .sampling import stream
from .scoring import detect, ensemble_score, rescale_jointly, score_nodes

log = logging.getLogger(__name__)


@dataclass
class InjectionRecord:
    clip_id: str
    node: Optional[int] = None
    source: Optional[int] = None
    edges_added: int = 0

    def to_dict(self) -> dict:
        return {"clip_id": self.clip_id, "node": self.node,
                "source": self.source, "edges_added": self.edges_added}


@dataclass
class BenchConfig:
    group: int = 35
    p: float = 0.03
    rounds: int = 80
    lam: float = 0.6
    tau1: float = 0.4
    tau2: int = 1
    alpha: int = 4
    restart_p: float = 0.5
    seed: int = 0
    repeats: int = 1
    distance: str = "feature"
    scaling: str = "clip"
    k: float = 0.9
    m_top: int = 3
    scale: Optional[float] = None

    def validate(self) -> "BenchConfig":
        if self.group < 1:
            raise ValueError("group must be >= 1")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("p must lie in [0, 1]")
        if self.rounds < 1 or self.repeats < 1:
            raise ValueError("rounds and repeats must be >= 1")
        if not 0.0 <= self.lam <= 1.0:
            raise ValueError("lam must lie in [0, 1]")
        if self.distance not in ("feature", "electrode"):
            raise ValueError("distance must be 'feature' or 'electrode'")
        if self.scaling not in ("clip", "dataset"):
            raise ValueError("scaling must be 'clip' or 'dataset'")
        return self


def average_clips(clips, group=35) -> list:
    """Element-wise mean of consecutive, non-overlapping groups of clips.

    A trailing partial group is dropped.
    """
    clips = list(clips)
    if group < 1:
        raise ValueError("group must be >= 1")
    if len(clips) < group:
        raise ValueError(f"need at least {group} clips, got {len(clips)}")
    out = []
    for g in range(len(clips) // group):
        members = clips[g * group:(g + 1) * group]
        samples = np.mean([c.samples for c in members], axis=0)
        out.append(EegClip(samples, members[0].sample_rate, f"avg{g:04d}", label="normal"))
    return out


def farthest_feature(X, i) -> int:
    dist = np.linalg.norm(X - X[i], axis=1)
    return int(np.argmax(dist))


def corrupt_node(graph: EegGraph, node, source) -> EegGraph:
    """Connect ``node`` to every node (weight 1) and give it ``source``'s features."""
    g = graph.copy()
    g.A[node, :] = 1.0
    g.A[:, node] = 1.0
    g.X[node] = graph.X[source]
    return g


def inject_anomaly(graph: EegGraph, p=0.03, rng=None, montage=None,
                   clip_id="", distance="feature"):
    """With probability ``p`` corrupt one uniformly chosen node.

    The replacement features come from the node farthest from the victim in
    feature space, or in electrode space when ``distance="electrode"``.
    """
    rng = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
    if rng.random() >= p:
        return graph, InjectionRecord(clip_id)
    node = int(rng.integers(graph.n))
    if distance == "electrode":
        if montage is None:
            raise ValueError("electrode distance needs a montage")
        source = int(montage.farthest()[node])
    else:
        source = farthest_feature(graph.X, node)
    added = int((graph.A[node] != 1.0).sum())
    return corrupt_node(graph, node, source), InjectionRecord(clip_id, node, source, added)


def fibonacci_montage(n) -> ElectrodeMontage:
    """``n`` roughly evenly spaced points on the upper half of the unit sphere."""
    i = np.arange(n) + 0.5
    z = 1.0 - i / n
    r = np.sqrt(1.0 - z ** 2)
    phi = np.pi * (1.0 + 5 ** 0.5) * i
    coords = np.column_stack([r * np.cos(phi), r * np.sin(phi), z])
    return ElectrodeMontage(tuple(f"CH{j + 1}" for j in range(n)), coords)


def synth_generate(n_clips, T=512, rate=256, seed=0, montage=None, n=None,
                   n_sources=8, band_width=6, max_cycles=60, spread=0.5,
                   amplitude=2.0, noise=4.0) -> list:
    """Normal EEG-like clips: band-limited rhythms with scalp topographies.

    Each source is a band of ``band_width`` adjacent frequencies (integer
    cycles per clip) with fixed per-frequency phases, a scalp centre and a
    Gaussian footprint of width ``spread``, so nearby electrodes share
    rhythms and are more correlated than distant ones. Per clip the source
    gains and phases jitter slightly. Spatially smooth plus white noise is
    added on top. Everything is fixed by ``seed``.
    """
    if montage is None:
        montage = ten_twenty() if n in (None, 19) else fibonacci_montage(n)
    n = montage.n
    if n < 2:
        raise ValueError("need at least 2 channels")
    rng = np.random.default_rng(seed)

    top = max(band_width + 1, min(T // 2 - 1, max_cycles))
    lows = np.linspace(1, top - band_width, n_sources).round().astype(int)
    cycles = lows[:, None] + np.arange(band_width)[None, :]            # (K, B)
    bin_amp = amplitude / np.sqrt(cycles / cycles.min())
    bin_phase = rng.uniform(0, 2 * np.pi, cycles.shape)

    centers = rng.normal(size=(n_sources, 3))
    centers[:, 2] = np.abs(centers[:, 2])
    centers /= np.linalg.norm(centers, axis=1, keepdims=True)
    dist = np.linalg.norm(montage.coords[:, None, :] - centers[None], axis=-1)   # (n, K)
    footprint = np.exp(-dist ** 2 / (2 * spread ** 2))

    D = montage.distances()
    cov = 0.6 * np.exp(-D ** 2 / (2 * 0.5 ** 2)) + 0.4 * np.eye(n)
    mix = np.linalg.cholesky(cov)

    t = np.arange(T) / T
    # (K, B, T) unit waves; the per-clip phase jitter is applied by rotation
    arg = 2 * np.pi * cycles[:, :, None] * t[None, None, :] + bin_phase[:, :, None]
    cos_w = (bin_amp[:, :, None] * np.cos(arg)).sum(axis=1)            # (K, T)
    sin_w = (bin_amp[:, :, None] * np.sin(arg)).sum(axis=1)
    clips = []
    for c in range(n_clips):
        gain = np.exp(rng.normal(0.0, 0.2, n_sources))
        shift = rng.normal(0.0, 0.3, n_sources)[None, :] + dist         # (n, K)
        w = footprint * gain
        signal = (w * np.cos(shift)) @ sin_w + (w * np.sin(shift)) @ cos_w
        signal += noise * (mix @ rng.normal(size=(n, T)))
        clips.append(EegClip(signal, float(rate), f"synth{c:05d}", label="normal"))
    return clips


def _graphs_for(kinds, X, montage, cfg: BenchConfig):
    return {kind: build_graph(kind, X, montage, cfg.scale, cfg.k, cfg.m_top)
            for kind in kinds}


@dataclass
class BenchResult:
    metrics: MetricSet
    reports: list = field(repr=False)
    records: list = field(repr=False)
    scores: np.ndarray = field(repr=False)
    labels: np.ndarray = field(repr=False)

    @property
    def injections(self) -> int:
        return int(self.labels.sum())

    def separation(self) -> float:
        """Mean score of injected nodes minus mean score of clean nodes."""
        y = self.labels.astype(bool)
        return float(self.scores[y].mean() - self.scores[~y].mean())


def run_synthetic_eval(models: dict, clips, montage=None, cfg: Optional[BenchConfig] = None,
                       averaged=False) -> BenchResult:
    """Average, corrupt, score and evaluate.

    ``models`` maps graph kind to parameters; with more than one entry the
    scores are ensembled. ``cfg.repeats`` re-runs injection and scoring with
    fresh seeds over the same averaged clips, pooling all node scores.
    """
    cfg = (cfg or BenchConfig()).validate()
    montage = montage or ten_twenty()
    kinds = tuple(kd for kd in KINDS if kd in models)
    if not kinds:
        raise ValueError("no models given")
    d = next(iter(models.values())).d
    avg = list(clips) if averaged else average_clips(clips, cfg.group)
    feats = [fft_features(c, d) for c in avg]
    base = [_graphs_for(kinds, X, montage, cfg) for X in feats]

    reports, records, labels = [], [], []
    for rep in range(cfg.repeats):
        for ci, clip in enumerate(avg):
            irng = stream(cfg.seed, "inject", rep, ci)
            clip_id = clip.clip_id if cfg.repeats == 1 else f"{clip.clip_id}-r{rep:03d}"
            first = base[ci][kinds[0]]
            _, record = inject_anomaly(first, cfg.p, irng, montage, clip_id, cfg.distance)
            graphs = {}
            for kind in kinds:
                g = base[ci][kind]
                if record.node is not None:
                    g = corrupt_node(g, record.node, record.source)
                graphs[kind] = g
            srng = stream(cfg.seed, "score", rep, ci)
            if len(kinds) == 1:
                report = score_nodes(models[kinds[0]], graphs[kinds[0]], montage, cfg.lam,
                                     cfg.rounds, srng, cfg.alpha, cfg.restart_p, clip_id)
            else:
                report = ensemble_score(models, None, montage, cfg.lam, cfg.rounds, srng,
                                        cfg.alpha, cfg.restart_p, kinds, graphs)
                report.clip_id = clip_id
            truth = np.zeros(montage.n, dtype=bool)
            if record.node is not None:
                truth[record.node] = True
            reports.append(report)
            records.append(record)
            labels.append(truth)

    if cfg.scaling == "dataset":
        rescale_jointly(reports, cfg.lam)
    for report in reports:
        detect(report, cfg.tau1, cfg.tau2)
    scores = np.concatenate([r.f for r in reports])
    labels = np.concatenate(labels)
    if not labels.any():
        raise RuntimeError(
            "no anomaly was injected; use more clips, more repeats or another seed")
    flags = scores > cfg.tau1
    metrics = classification_metrics(flags, labels, scores)
    log.info("synthetic eval: %d injections, auc %.4f", int(labels.sum()), metrics.roc_auc)
    return BenchResult(metrics, reports, records, scores, labels)


SWEEP_PARAMS = {"lambda": "lam", "alpha": "alpha", "dprime": "d_emb"}


def sweep(param, values, clips, train_cfg, bench_cfg=None, montage=None, seeds=(0,)) -> dict:
    """Benchmark AUC for each hyperparameter value and seed.

    ``param`` is one of ``lambda``, ``alpha`` or ``dprime``. Returns a dict
    mapping each value to its list of per-seed AUCs.
    """
    from dataclasses import replace

    from .training import train

    if param not in SWEEP_PARAMS:
        raise ValueError(f"param must be one of {sorted(SWEEP_PARAMS)}")
    values = list(values)
    if not values:
        raise ValueError("no sweep values")
    bench_cfg = bench_cfg or BenchConfig()
    field_name = SWEEP_PARAMS[param]
    out = {}
    for value in values:
        value = int(value) if field_name != "lam" else float(value)
        aucs = []
        for seed in seeds:
            tcfg = replace(train_cfg, seed=seed, **{field_name: value})
            bcfg = replace(bench_cfg, seed=seed, lam=tcfg.lam, alpha=tcfg.alpha)
            params, _ = train(clips, tcfg, montage)
            result = run_synthetic_eval({tcfg.graph_kind: params}, clips, montage, bcfg)
            aucs.append(result.metrics.roc_auc)
            log.info("sweep %s=%s seed %d auc %.4f", param, value, seed, aucs[-1])
        out[value] = aucs
    return out
