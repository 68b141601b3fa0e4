# coding: utf-8

# # Training on normal clips and scoring electrodes
#
# The model never sees abnormal data. After training, an electrode whose
# links and spectrum do not fit its neighbourhood gets a high score.

# In[1]:

import numpy as np

from eegcgs.benchmark import average_clips, corrupt_node, farthest_feature, synth_generate
from eegcgs.features import fft_features
from eegcgs.graphs import build_graph
from eegcgs.montage import ten_twenty
from eegcgs.scoring import detect, score_nodes
from eegcgs.training import TrainConfig, train

montage = ten_twenty()
names = np.array(montage.names)
clips = synth_generate(140, T=512, seed=3)


# In[2]:

cfg = TrainConfig(d=64, d_emb=16, epochs=20, batch_size=16, learning_rate=1e-2,
                  graph_kind="corr", seed=0)
params, history = train(clips, cfg)
print("loss per epoch:", np.round(history[::4], 3), "...", round(history[-1], 3))


# Average groups of 35 clips and score the clean result. Then take the
# electrode the model finds most ordinary and break it: connect it to
# everything and give it the spectrum of its most dissimilar channel.

# In[3]:

avg = average_clips(clips, 35)
X = fft_features(avg[0], cfg.d)
graph = build_graph("corr", X, montage)
clean = detect(score_nodes(params, graph, montage, lam=0.6, rounds=80, rng=0,
                           clip_id=avg[0].clip_id))
victim = int(np.argmin(clean.f))
bad = corrupt_node(graph, victim, farthest_feature(X, victim))
report = detect(score_nodes(params, bad, montage, lam=0.6, rounds=80, rng=0,
                            clip_id=avg[0].clip_id))

for label, r in (("clean", clean), ("corrupted", report)):
    top = np.argsort(r.f)[::-1][:3]
    rank = int((r.f > r.f[victim]).sum()) + 1
    print("%-9s top electrodes: %s  scores %s  %s score %.2f, rank %d of 19" % (
        label, names[top], np.round(r.f[top], 2), names[victim], r.f[victim], rank))


# The report serialises to JSON for downstream tools.

# In[4]:

print(report.to_json()[:300], "...")
