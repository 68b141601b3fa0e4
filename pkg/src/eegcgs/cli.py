"""Command line entry point: ``eegcgs <command> [options]``.

Every option can also be given in a flat ``key=value`` config file passed
with ``--config``; command-line flags take precedence. Exit status is 0 on
success, 2 on invalid configuration and 1 on runtime failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Optional

import numpy as np

from .benchmark import BenchConfig, run_synthetic_eval, sweep, synth_generate
from .export import graph_to_json, render_svg
from .features import fft_features
from .graphs import KINDS, build_graph
from .model import load_checkpoint, save_checkpoint
from .montage import load_clips, load_montage, write_clips
from .sampling import stream
from .scoring import detect, ensemble_score, rescale_jointly, score_nodes
from .training import TrainConfig, check_trainable, train

log = logging.getLogger("eegcgs")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    # training
    lam: float = 0.6
    alpha: int = 4
    restart_p: float = 0.5
    d: int = 6000
    d_emb: int = 256
    learning_rate: float = 1e-3
    epochs: int = 100
    batch_size: int = 32
    seed: int = 0
    k: float = 0.9
    m_top: int = 3
    scale: Optional[float] = None
    # inference
    tau1: float = 0.4
    tau2: int = 1
    rounds: int = 80
    # benchmark
    group: int = 35
    p: float = 0.03
    repeats: int = 1
    distance: str = "feature"
    scaling: str = "clip"
    # data and paths
    graphs: list = field(default_factory=lambda: ["corr"])
    data: Optional[str] = None
    format: str = "csv"
    montage: str = "10-20"
    out: str = "out"

    def train_config(self, kind=None) -> TrainConfig:
        return TrainConfig(
            lam=self.lam, alpha=self.alpha, restart_p=self.restart_p, d=self.d,
            d_emb=self.d_emb, learning_rate=self.learning_rate, epochs=self.epochs,
            batch_size=self.batch_size, seed=self.seed,
            graph_kind=kind or self.graphs[0], k=self.k, m_top=self.m_top, scale=self.scale)

    def bench_config(self) -> BenchConfig:
        return BenchConfig(
            group=self.group, p=self.p, rounds=self.rounds, lam=self.lam, tau1=self.tau1,
            tau2=self.tau2, alpha=self.alpha, restart_p=self.restart_p, seed=self.seed,
            repeats=self.repeats, distance=self.distance, scaling=self.scaling, k=self.k,
            m_top=self.m_top, scale=self.scale)

    def validate(self) -> "RunConfig":
        bad = [g for g in self.graphs if g not in KINDS]
        if bad or not self.graphs:
            raise ConfigError(f"graphs must be drawn from {KINDS}, got {self.graphs}")
        if self.format not in ("csv", "raw-f32"):
            raise ConfigError("format must be csv or raw-f32")
        if self.tau2 < 0:
            raise ConfigError("tau2 must be >= 0")
        try:
            for kind in self.graphs:
                self.train_config(kind).validate()
            self.bench_config().validate()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        return self


# flag name -> RunConfig attribute
_ALIASES = {"lambda": "lam", "dprime": "d_emb", "lr": "learning_rate"}
_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _coerce(name, value):
    kind = _TYPES[name]
    try:
        if name == "graphs":
            return [v.strip() for v in str(value).split(",") if v.strip()]
        if name == "scale":
            return None if str(value).lower() in ("", "none", "auto") else float(value)
        if kind in ("float", float):
            return float(value)
        if kind in ("int", int):
            return int(value)
        return None if value is None else str(value)
    except ValueError as exc:
        raise ConfigError(f"bad value for {name}: {value!r}") from exc


def _key(raw):
    key = raw.strip().lstrip("-").replace("-", "_")
    return _ALIASES.get(key, key)


def read_config_file(path) -> dict:
    values = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    for lineno, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value")
        key, value = line.split("=", 1)
        name = _key(key)
        if name not in _TYPES:
            raise ConfigError(f"{path}:{lineno}: unknown key {key.strip()!r}")
        values[name] = _coerce(name, value.strip())
    return values


def build_config(args) -> RunConfig:
    values = read_config_file(args.config) if getattr(args, "config", None) else {}
    for name in _TYPES:
        v = getattr(args, name, None)
        if v is not None:
            values[name] = _coerce(name, v)
    return RunConfig(**values).validate()


def _add_common(p, *names):
    opts = {
        "lam": ("--lambda", float, "balance of contrastive vs reconstruction terms"),
        "alpha": ("--alpha", int, "subgraph size"),
        "restart_p": ("--restart-p", float, "random-walk restart probability"),
        "d": ("--d", int, "FFT bins per channel"),
        "d_emb": ("--dprime", int, "embedding width"),
        "learning_rate": ("--lr", float, "Adam learning rate"),
        "epochs": ("--epochs", int, None),
        "batch_size": ("--batch-size", int, "clips per mini-batch"),
        "seed": ("--seed", int, None),
        "k": ("--k", float, "distance cut-off of the dist graph"),
        "m_top": ("--m-top", int, "neighbours kept per node in corr/dtf graphs"),
        "scale": ("--scale", str, "kernel width of the dist graph (default: auto)"),
        "tau1": ("--tau1", float, "node score threshold"),
        "tau2": ("--tau2", int, "flagged nodes needed to call a seizure"),
        "rounds": ("--rounds", int, "subgraph draws averaged per node at inference"),
        "group": ("--group", int, "clips averaged per synthetic test clip"),
        "p": ("--p", float, "injection probability per averaged clip"),
        "repeats": ("--repeats", int, "injection/scoring re-runs pooled into one metric"),
        "distance": ("--distance", str, "feature or electrode distance for the feature swap"),
        "scaling": ("--scaling", str, "min-max population of node scores: clip or dataset"),
        "graphs": ("--graphs", str, "comma-separated graph kinds"),
        "data": ("--data", str, "clip file or directory"),
        "format": ("--format", str, "csv or raw-f32"),
        "montage": ("--montage", str, "montage file or '10-20'"),
        "out": ("--out", str, "output directory"),
    }
    for name in names:
        flag, typ, helptext = opts[name]
        p.add_argument(flag, dest=name, type=typ, default=None, help=helptext)


_TRAIN_OPTS = ("lam", "alpha", "restart_p", "d", "d_emb", "learning_rate", "epochs",
               "batch_size", "seed", "k", "m_top", "scale", "graphs", "data", "format",
               "montage", "out")
_SCORE_OPTS = ("lam", "alpha", "restart_p", "seed", "k", "m_top", "scale", "tau1", "tau2",
               "rounds", "scaling", "graphs", "data", "format", "montage", "out")
_BENCH_OPTS = _SCORE_OPTS + ("group", "p", "repeats", "distance")


def _kind_of(path: Path, fallback):
    stem = path.stem.lower()
    for kind in KINDS:
        if stem == kind or stem.endswith("_" + kind) or stem.endswith("-" + kind):
            return kind
    return fallback


def _load_models(paths, cfg: RunConfig) -> dict:
    models = {}
    kinds = cfg.graphs if len(cfg.graphs) == len(paths) else [None] * len(paths)
    for path, hint in zip(paths, kinds):
        path = Path(path)
        kind = _kind_of(path, hint)
        if kind is None:
            raise ConfigError(f"cannot tell the graph kind of {path}; name it model_<kind>.cgsm")
        models[kind] = load_checkpoint(path)
    dims = {(m.d, m.d_emb) for m in models.values()}
    if len(dims) != 1:
        raise ValueError(f"checkpoints disagree on (d, d'): {sorted(dims)}")
    return models


def _require_data(cfg):
    if not cfg.data:
        raise ConfigError("--data is required")


def cmd_gen_synth(args):
    if args.clips < 1 or args.T < 1:
        raise ConfigError("--clips and --T must be positive")
    montage = load_montage(args.montage)
    clips = synth_generate(args.clips, args.T, args.rate, args.seed, montage)
    write_clips(clips, args.out, args.format)
    print(f"wrote {len(clips)} clips to {args.out}")


def cmd_train(args):
    cfg = build_config(args)
    _require_data(cfg)
    montage = load_montage(cfg.montage)
    clips = load_clips(cfg.data, cfg.format, montage)
    check_trainable(clips)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    for kind in cfg.graphs:
        params, history = train(clips, cfg.train_config(kind), montage)
        save_checkpoint(params, out / f"model_{kind}.cgsm")
        with open(out / f"loss_{kind}.csv", "w") as fh:
            fh.write("epoch,loss\n")
            for epoch, loss in enumerate(history):
                fh.write(f"{epoch},{loss!r}\n")
        final = history[-1] if history else float("nan")
        print(f"{kind}: final loss {final:.6f}")


def cmd_score(args):
    cfg = build_config(args)
    _require_data(cfg)
    montage = load_montage(cfg.montage)
    models = _load_models(args.checkpoints, cfg)
    clips = load_clips(cfg.data, cfg.format, montage)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    kinds = tuple(kd for kd in KINDS if kd in models)
    reports = []
    for clip in clips:
        rng = stream(cfg.seed, "score", clip.clip_id)
        if len(kinds) == 1:
            params = models[kinds[0]]
            graph = build_graph(kinds[0], fft_features(clip, params.d), montage,
                                cfg.scale, cfg.k, cfg.m_top)
            report = score_nodes(params, graph, montage, cfg.lam, cfg.rounds, rng,
                                 cfg.alpha, cfg.restart_p, clip.clip_id)
        else:
            report = ensemble_score(models, clip, montage, cfg.lam, cfg.rounds, rng,
                                    cfg.alpha, cfg.restart_p, kinds, None,
                                    cfg.scale, cfg.k, cfg.m_top)
        reports.append(report)
    if cfg.scaling == "dataset":
        rescale_jointly(reports, cfg.lam)
    summary = []
    for report in reports:
        detect(report, cfg.tau1, cfg.tau2)
        (out / f"{report.clip_id}.report.json").write_text(report.to_json() + "\n")
        flagged = [nm for nm, f in zip(report.names, report.flags) if f]
        summary.append((report.clip_id, report.verdict, flagged))
    with open(out / "summary.tsv", "w") as fh:
        fh.write("clip_id\tverdict\tflagged\n")
        for cid, verdict, flagged in summary:
            fh.write(f"{cid}\t{verdict}\t{','.join(flagged)}\n")
    for cid, verdict, flagged in summary:
        print(f"{cid:20s} {verdict:8s} {' '.join(flagged)}")


def cmd_bench(args):
    cfg = build_config(args)
    _require_data(cfg)
    montage = load_montage(cfg.montage)
    models = _load_models(args.checkpoints, cfg)
    clips = load_clips(cfg.data, cfg.format, montage)
    result = run_synthetic_eval(models, clips, montage, cfg.bench_config())
    out = Path(cfg.out)
    (out / "reports").mkdir(parents=True, exist_ok=True)
    metrics = result.metrics.to_dict()
    metrics["injections"] = result.injections
    metrics["nodes"] = int(result.labels.size)
    (out / "metrics.json").write_text(json.dumps(metrics, indent=2, sort_keys=True) + "\n")
    (out / "metrics.csv").write_text(result.metrics.to_csv())
    for report, record in zip(result.reports, result.records):
        body = report.to_dict()
        body["injection"] = record.to_dict()
        (out / "reports" / f"{report.clip_id}.json").write_text(json.dumps(body, indent=2) + "\n")
    print(json.dumps(metrics, indent=2, sort_keys=True))


def cmd_sweep(args):
    cfg = build_config(args)
    montage = load_montage(cfg.montage)
    values = [v for v in args.values.split(",") if v.strip()]
    if not values:
        raise ConfigError("--values is empty")
    seeds = [int(s) for s in args.seeds.split(",")]
    if cfg.data:
        clips = load_clips(cfg.data, cfg.format, montage)
    else:
        clips = synth_generate(args.synth_clips, args.synth_T, seed=cfg.seed, montage=montage)
    results = sweep(args.param, [float(v) for v in values], clips,
                    cfg.train_config(), cfg.bench_config(), montage, seeds)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    rows = ["value,auc"] + [f"{v:g},{float(np.median(a))!r}" for v, a in results.items()]
    (out / f"sweep_{args.param}.csv").write_text("\n".join(rows) + "\n")
    print("\n".join(rows))


def cmd_export_graph(args):
    montage = load_montage(args.montage)
    clip = load_clips(args.clip, args.format, montage)[0]
    kinds = [k.strip() for k in args.kinds.split(",") if k.strip()]
    bad = [k for k in kinds if k not in KINDS]
    if bad or not kinds:
        raise ConfigError(f"kinds must be drawn from {KINDS}")
    models = _load_models(args.checkpoints, RunConfig(graphs=kinds)) if args.checkpoints else {}
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    feats = {}
    for kind in kinds:
        d = models[kind].d if kind in models else args.d
        if d not in feats:
            feats[d] = fft_features(clip, d)
        graph = build_graph(kind, feats[d], montage)
        scores = None
        if kind in models:
            report = score_nodes(models[kind], graph, montage, args.lam, args.rounds,
                                 stream(args.seed, "export", clip.clip_id, kind))
            scores = report.f
        stem = out / f"{clip.clip_id}_{kind}"
        Path(f"{stem}.json").write_text(graph_to_json(graph, montage, scores, clip.clip_id) + "\n")
        Path(f"{stem}.svg").write_text(render_svg(graph, montage, scores, f"{clip.clip_id} {kind}"))
        print(f"wrote {stem}.json and {stem}.svg")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="eegcgs", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-synth", help="write synthetic normal clips")
    p.add_argument("--out", required=True)
    p.add_argument("--clips", type=int, default=700)
    p.add_argument("--T", type=int, default=512)
    p.add_argument("--rate", type=int, default=256)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", default="csv", choices=["csv", "raw-f32"])
    p.add_argument("--montage", default="10-20")
    p.set_defaults(func=cmd_gen_synth)

    p = sub.add_parser("train", help="train one model per graph kind")
    p.add_argument("--config")
    _add_common(p, *_TRAIN_OPTS)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("score", help="score clips with one checkpoint or an ensemble")
    p.add_argument("--config")
    p.add_argument("--checkpoints", nargs="+", required=True)
    _add_common(p, *_SCORE_OPTS)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("bench", help="synthetic anomalous-channel benchmark")
    p.add_argument("--config")
    p.add_argument("--checkpoints", nargs="+", required=True)
    _add_common(p, *_BENCH_OPTS)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("sweep", help="benchmark AUC across hyperparameter values")
    p.add_argument("--config")
    p.add_argument("--param", required=True, choices=["lambda", "alpha", "dprime"])
    p.add_argument("--values", required=True, help="comma-separated values")
    p.add_argument("--seeds", default="0", help="comma-separated seeds; the CSV holds the median")
    p.add_argument("--synth-clips", type=int, default=700)
    p.add_argument("--synth-T", type=int, default=512)
    _add_common(p, *_BENCH_OPTS, "d", "d_emb", "learning_rate", "epochs", "batch_size")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("export-graph", help="JSON + SVG head map of a clip's graphs")
    p.add_argument("--clip", required=True)
    p.add_argument("--kinds", default="dist,rand,corr,dtf")
    p.add_argument("--checkpoints", nargs="*", default=None,
                   help="optional checkpoints; adds anomaly scores")
    p.add_argument("--format", default="csv", choices=["csv", "raw-f32"])
    p.add_argument("--montage", default="10-20")
    p.add_argument("--d", type=int, default=6000)
    p.add_argument("--lambda", dest="lam", type=float, default=0.6)
    p.add_argument("--rounds", type=int, default=80)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_export_graph)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except ConfigError as exc:
        print(f"eegcgs: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - report and map to exit status 1
        if args.verbose:
            raise
        print(f"eegcgs: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
