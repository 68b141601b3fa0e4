"""Electrode montages and EEG clip containers.

Two on-disk clip formats are supported, one file per clip:

* CSV: a header line ``#n=<n>,T=<T>,rate=<hz>,label=<normal|seizure|unknown>``
  followed by ``n`` comma-separated rows of ``T`` samples.
* raw-f32: the magic bytes ``CGS1``, three little-endian int32 values
  ``(n, T, rate)`` and then ``n*T`` little-endian float32 samples, row-major.

Either format may have a JSON sidecar ``<file>.json`` holding ``label`` and
``channel_labels``; sidecar values take precedence over the CSV header.
"""

from __future__ import annotations

import json
import os
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

LABELS = ("normal", "seizure", "unknown")
RAW_MAGIC = b"CGS1"

# Azimuth (degrees, 0 = nose, positive = right ear) and polar radius
# (0 = vertex, 0.5 = 90 degrees) of the 19-channel 10-20 cap.
_TEN_TWENTY_POLAR = [
    ("FP1", -18.0, 0.511), ("FP2", 18.0, 0.511),
    ("F7", -54.0, 0.511), ("F3", -39.0, 0.333), ("FZ", 0.0, 0.256),
    ("F4", 39.0, 0.333), ("F8", 54.0, 0.511),
    ("T3", -90.0, 0.511), ("C3", -90.0, 0.256), ("CZ", 90.0, 0.0),
    ("C4", 90.0, 0.256), ("T4", 90.0, 0.511),
    ("T5", -126.0, 0.511), ("P3", -141.0, 0.333), ("PZ", 180.0, 0.256),
    ("P4", 141.0, 0.333), ("T6", 126.0, 0.511),
    ("O1", -162.0, 0.511), ("O2", 162.0, 0.511),
]


class MontageError(ValueError):
    pass


class ClipFormatError(ValueError):
    pass


@dataclass(frozen=True)
class ElectrodeMontage:
    """Channel names and unit-sphere scalp coordinates (x right, y front, z up)."""

    names: tuple
    coords: np.ndarray

    def __post_init__(self):
        names = tuple(str(nm) for nm in self.names)
        coords = np.asarray(self.coords, dtype=float)
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "coords", coords)
        if coords.ndim != 2 or coords.shape[1] != 3:
            raise MontageError(f"coords must be n x 3, got shape {coords.shape}")
        if len(names) != coords.shape[0]:
            raise MontageError(
                f"{len(names)} names but {coords.shape[0]} coordinates")
        if len(names) < 2:
            raise MontageError("a montage needs at least 2 electrodes")
        seen = set()
        for nm in names:
            if nm.upper() in seen:
                raise MontageError(f"duplicate electrode name {nm!r}")
            seen.add(nm.upper())
        norms = np.linalg.norm(coords, axis=1)
        bad = np.flatnonzero((norms < 0.95) | (norms > 1.05) | ~np.isfinite(norms))
        if bad.size:
            raise MontageError(
                f"electrode {names[bad[0]]!r} is not on the unit sphere "
                f"(norm {norms[bad[0]]:.3f})")

    @property
    def n(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        upper = [nm.upper() for nm in self.names]
        try:
            return upper.index(name.upper())
        except ValueError:
            raise KeyError(name) from None

    def distances(self) -> np.ndarray:
        diff = self.coords[:, None, :] - self.coords[None, :, :]
        return np.sqrt((diff ** 2).sum(-1))

    def farthest(self) -> np.ndarray:
        """For every electrode, the index of the electrode farthest from it."""
        return np.argmax(self.distances(), axis=1)


def ten_twenty() -> ElectrodeMontage:
    names, coords = [], []
    for name, azimuth, radius in _TEN_TWENTY_POLAR:
        theta = np.deg2rad(azimuth)
        phi = np.pi * radius
        coords.append([np.sin(phi) * np.sin(theta),
                       np.sin(phi) * np.cos(theta),
                       np.cos(phi)])
        names.append(name)
    return ElectrodeMontage(tuple(names), np.array(coords))


def load_montage(path) -> ElectrodeMontage:
    """Read a montage from a ``name,x,y,z`` text file.

    The string ``"10-20"`` returns the built-in 19-channel cap.
    """
    if str(path).lower() in ("10-20", "10_20", "1020"):
        return ten_twenty()
    names, coords = [], []
    try:
        with open(path) as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                parts = [p.strip() for p in line.split(",")]
                if len(parts) != 4:
                    raise MontageError(
                        f"{path}:{lineno}: expected name,x,y,z")
                if lineno == 1 and parts[1].lower() == "x":
                    continue
                names.append(parts[0])
                coords.append([float(v) for v in parts[1:]])
    except (OSError, ValueError) as exc:
        if isinstance(exc, MontageError):
            raise
        raise MontageError(f"cannot parse montage {path}: {exc}") from exc
    return ElectrodeMontage(tuple(names), np.array(coords, dtype=float).reshape(-1, 3))


def save_montage(montage: ElectrodeMontage, path) -> None:
    with open(path, "w") as fh:
        for name, (x, y, z) in zip(montage.names, montage.coords):
            fh.write(f"{name},{float(x)!r},{float(y)!r},{float(z)!r}\n")


@dataclass
class EegClip:
    samples: np.ndarray
    sample_rate: float
    clip_id: str
    label: Optional[str] = None
    channel_labels: Optional[list] = field(default=None)

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=float)
        if self.samples.ndim != 2 or self.samples.shape[1] == 0:
            raise ClipFormatError(
                f"clip {self.clip_id}: samples must be a non-empty n x T matrix")
        if self.label is not None and self.label not in LABELS:
            raise ClipFormatError(f"clip {self.clip_id}: bad label {self.label!r}")
        bad_rows = np.flatnonzero(~np.isfinite(self.samples).all(axis=1))
        if bad_rows.size:
            raise ClipFormatError(
                f"clip {self.clip_id}: non-finite sample in channel {bad_rows[0]}")

    @property
    def n(self) -> int:
        return self.samples.shape[0]

    @property
    def T(self) -> int:
        return self.samples.shape[1]


def _check_against(clip: EegClip, montage: Optional[ElectrodeMontage]) -> None:
    if montage is not None and clip.n != montage.n:
        raise ClipFormatError(
            f"clip {clip.clip_id} has {clip.n} channels, montage has {montage.n}")


def _parse_header(line: str, path) -> dict:
    if not line.startswith("#"):
        raise ClipFormatError(f"{path}: missing '#n=...' header line")
    meta = {}
    for item in line[1:].strip().split(","):
        key, _, value = item.partition("=")
        meta[key.strip()] = value.strip()
    try:
        return {"n": int(meta["n"]), "T": int(meta["T"]),
                "rate": float(meta["rate"]), "label": meta.get("label", "unknown")}
    except (KeyError, ValueError) as exc:
        raise ClipFormatError(f"{path}: bad header {line.strip()!r}") from exc


def read_csv_clip(path, montage: Optional[ElectrodeMontage] = None) -> EegClip:
    path = Path(path)
    with open(path) as fh:
        header = _parse_header(fh.readline(), path)
        rows = []
        for lineno, line in enumerate(fh, 2):
            if not line.strip():
                continue
            try:
                rows.append([float(v) for v in line.split(",")])
            except ValueError as exc:
                raise ClipFormatError(f"{path}:{lineno}: {exc}") from exc
    if len(rows) != header["n"] or any(len(r) != header["T"] for r in rows):
        raise ClipFormatError(
            f"{path}: header says {header['n']}x{header['T']}, "
            f"found {len(rows)} rows")
    samples = np.array(rows, dtype=float)
    _check_finite(samples, path, montage)
    clip = EegClip(samples, header["rate"], path.stem, label=header["label"])
    _check_against(clip, montage)
    return clip


def read_raw_clip(path, montage: Optional[ElectrodeMontage] = None) -> EegClip:
    path = Path(path)
    blob = path.read_bytes()
    if blob[:4] != RAW_MAGIC or len(blob) < 16:
        raise ClipFormatError(f"{path}: not a CGS1 raw-f32 clip")
    n, T, rate = struct.unpack("<3i", blob[4:16])
    if n <= 0 or T <= 0 or len(blob) != 16 + 4 * n * T:
        raise ClipFormatError(f"{path}: size does not match n={n}, T={T}")
    samples = np.frombuffer(blob, dtype="<f4", offset=16).reshape(n, T).astype(float)
    _check_finite(samples, path, montage)
    clip = EegClip(samples, float(rate), path.stem, label="unknown")
    _check_against(clip, montage)
    return clip


def _check_finite(samples, path, montage):
    bad = np.flatnonzero(~np.isfinite(samples).all(axis=1))
    if bad.size:
        ch = bad[0]
        if montage is not None and ch < montage.n:
            name = montage.names[ch]
        else:
            name = f"#{ch}"
        raise ClipFormatError(f"{path}: NaN/Inf in channel {name}")


def write_clip(clip: EegClip, path, fmt: str = "csv") -> Path:
    path = Path(path)
    if fmt == "csv":
        label = clip.label or "unknown"
        with open(path, "w") as fh:
            rate = clip.sample_rate
            rate_txt = str(int(rate)) if float(rate).is_integer() else repr(rate)
            fh.write(f"#n={clip.n},T={clip.T},rate={rate_txt},label={label}\n")
            for row in clip.samples:
                fh.write(",".join(repr(float(v)) for v in row) + "\n")
    elif fmt == "raw-f32":
        head = RAW_MAGIC + struct.pack("<3i", clip.n, clip.T, int(round(clip.sample_rate)))
        path.write_bytes(head + clip.samples.astype("<f4").tobytes())
        if clip.label not in (None, "unknown") or clip.channel_labels is not None:
            _write_sidecar(clip, path)
    else:
        raise ValueError(f"unknown clip format {fmt!r}")
    if clip.channel_labels is not None and fmt == "csv":
        _write_sidecar(clip, path)
    return path


def _write_sidecar(clip: EegClip, path: Path) -> None:
    meta = {"label": clip.label or "unknown"}
    if clip.channel_labels is not None:
        meta["channel_labels"] = list(clip.channel_labels)
    with open(str(path) + ".json", "w") as fh:
        json.dump(meta, fh, sort_keys=True)


def _apply_sidecar(clip: EegClip, path: Path) -> None:
    sidecar = Path(str(path) + ".json")
    if not sidecar.exists():
        return
    meta = json.loads(sidecar.read_text())
    label = meta.get("label")
    if label is not None:
        if label not in LABELS:
            raise ClipFormatError(f"{sidecar}: bad label {label!r}")
        clip.label = label
    chl = meta.get("channel_labels")
    if chl is not None:
        if len(chl) != clip.n:
            raise ClipFormatError(f"{sidecar}: {len(chl)} channel labels for {clip.n} channels")
        clip.channel_labels = list(chl)


_SUFFIX = {"csv": ".csv", "raw-f32": ".f32"}


def load_clips(path, fmt: str = "csv",
               montage: Optional[ElectrodeMontage] = None) -> list:
    """Load one clip file or every clip file in a directory (sorted by name)."""
    if fmt not in _SUFFIX:
        raise ValueError(f"unknown clip format {fmt!r}")
    reader = read_csv_clip if fmt == "csv" else read_raw_clip
    path = Path(path)
    if path.is_dir():
        files = sorted(p for p in path.iterdir()
                       if p.suffix == _SUFFIX[fmt] and p.is_file())
    else:
        files = [path]
    clips = []
    for f in files:
        clip = reader(f, montage)
        _apply_sidecar(clip, f)
        clips.append(clip)
    return clips


def write_clips(clips: Sequence[EegClip], directory, fmt: str = "csv") -> list:
    os.makedirs(directory, exist_ok=True)
    return [write_clip(c, Path(directory) / (c.clip_id + _SUFFIX[fmt]), fmt)
            for c in clips]
