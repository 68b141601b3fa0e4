"""JSON and SVG exports of EEG graphs, node strengths and anomaly scores."""

from __future__ import annotations

import json
from typing import Optional

import numpy as np

from .graphs import node_strength

_SIZE = 320
_RADIUS = 130.0


def graph_to_dict(graph, montage, scores=None, clip_id="") -> dict:
    out = {
        "clip_id": clip_id,
        "kind": graph.kind,
        "channels": list(montage.names),
        "adjacency": [[float(v) for v in row] for row in graph.A],
        "strength": [float(s) for s in node_strength(graph.A)],
    }
    if scores is not None:
        out["scores"] = [float(s) for s in scores]
    return out


def graph_to_json(graph, montage, scores=None, clip_id="") -> str:
    return json.dumps(graph_to_dict(graph, montage, scores, clip_id), indent=2)


def project(coords) -> np.ndarray:
    """Azimuthal equidistant projection seen from above, nose up."""
    coords = np.asarray(coords, dtype=float)
    polar = np.arccos(np.clip(coords[:, 2] / np.linalg.norm(coords, axis=1), -1, 1))
    azim = np.arctan2(coords[:, 0], coords[:, 1])
    r = _RADIUS * polar / (np.pi / 2) * 0.9
    cx = cy = _SIZE / 2
    return np.column_stack([cx + r * np.sin(azim), cy - r * np.cos(azim)])


def _shade(v):
    # white -> dark red
    r = int(round(255 - 116 * v))
    g = int(round(255 * (1.0 - v)))
    return f"rgb({r},{g},{g})"


def render_svg(graph, montage, values: Optional[np.ndarray] = None, title="") -> str:
    """Head map: edges drawn with opacity ``a_ij``, nodes shaded by ``values``.

    ``values`` defaults to node strength; either way they are rescaled by
    their maximum so the darkest node is the largest value.
    """
    if values is None:
        values = node_strength(graph.A)
    values = np.asarray(values, dtype=float)
    top = values.max()
    level = values / top if top > 0 else np.zeros_like(values)
    pos = project(montage.coords)
    c = _SIZE / 2
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_SIZE}" height="{_SIZE}" '
        f'viewBox="0 0 {_SIZE} {_SIZE}">',
        f'<circle cx="{c:.1f}" cy="{c:.1f}" r="{_RADIUS:.1f}" fill="none" stroke="black"/>',
        f'<polygon points="{c - 10:.1f},{c - _RADIUS + 1:.1f} {c:.1f},{c - _RADIUS - 14:.1f} '
        f'{c + 10:.1f},{c - _RADIUS + 1:.1f}" fill="none" stroke="black"/>',
    ]
    if title:
        lines.append(f'<text x="6" y="16" font-size="12">{title}</text>')
    n = graph.n
    for i in range(n):
        for j in range(i + 1, n):
            w = max(graph.A[i, j], graph.A[j, i])
            if w > 0:
                lines.append(
                    f'<line x1="{pos[i, 0]:.2f}" y1="{pos[i, 1]:.2f}" x2="{pos[j, 0]:.2f}" '
                    f'y2="{pos[j, 1]:.2f}" stroke="steelblue" stroke-opacity="{min(w, 1.0):.3f}"/>')
    for i, name in enumerate(montage.names):
        lines.append(
            f'<circle cx="{pos[i, 0]:.2f}" cy="{pos[i, 1]:.2f}" r="11" '
            f'fill="{_shade(level[i])}" stroke="black"/>')
        lines.append(
            f'<text x="{pos[i, 0]:.2f}" y="{pos[i, 1] + 3:.2f}" font-size="8" '
            f'text-anchor="middle">{name}</text>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
