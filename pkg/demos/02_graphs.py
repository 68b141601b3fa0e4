# coding: utf-8

# # Four views of the same clip as a graph
#
# `dist` and `rand` depend only on electrode geometry. `corr` and `dtf`
# are built from the clip's features, keep three strongest links per node
# and are symmetrised.

# In[1]:

import tempfile
from pathlib import Path

import numpy as np

from eegcgs.benchmark import synth_generate
from eegcgs.export import graph_to_json, render_svg
from eegcgs.features import fft_features
from eegcgs.graphs import KINDS, build_graph, node_strength, normalize_adjacency
from eegcgs.montage import ten_twenty

montage = ten_twenty()
clips = synth_generate(2, T=512, seed=1)
feats = [fft_features(c, 64) for c in clips]


# In[2]:

for kind in KINDS:
    A = build_graph(kind, feats[0], montage).A
    off = A[~np.eye(montage.n, dtype=bool)]
    print("%-4s  edges %3d   mean weight %.3f   strength range %.2f..%.2f" % (
        kind, (off > 0).sum() // 2, off[off > 0].mean(),
        node_strength(A).min(), node_strength(A).max()))


# Geometry graphs do not change between clips, data graphs do.

# In[3]:

for kind in KINDS:
    s0 = node_strength(build_graph(kind, feats[0], montage).A)
    s1 = node_strength(build_graph(kind, feats[1], montage).A)
    print("%-4s  strength changes between clips: %s" % (kind, not np.allclose(s0, s1)))


# The GCN propagation matrix adds self loops and normalises symmetrically.

# In[4]:

Ahat = normalize_adjacency(build_graph("corr", feats[0], montage).A)
print("symmetric:", np.allclose(Ahat, Ahat.T),
      " spectral radius: %.4f" % np.abs(np.linalg.eigvalsh(Ahat)).max())


# Head-map export: JSON with adjacency and strengths, SVG for a quick look.

# In[5]:

out = Path(tempfile.mkdtemp())
g = build_graph("corr", feats[0], montage)
(out / "corr.json").write_text(graph_to_json(g, montage, clip_id=clips[0].clip_id))
(out / "corr.svg").write_text(render_svg(g, montage, title="corr graph"))
print("wrote", sorted(p.name for p in out.iterdir()), "to", out)
