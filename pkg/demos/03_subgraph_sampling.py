# coding: utf-8

# # Random walks with restart and contrastive triplets
#
# Each target electrode gets two small subgraphs grown around it (with its
# own features blanked out) and one grown around the electrode farthest
# away on the scalp.

# In[1]:

import numpy as np

from eegcgs.benchmark import synth_generate
from eegcgs.features import fft_features
from eegcgs.graphs import build_graph
from eegcgs.montage import ten_twenty
from eegcgs.sampling import make_triplet, rwr_sample

montage = ten_twenty()
names = np.array(montage.names)
clip = synth_generate(1, T=512, seed=2)[0]
graph = build_graph("dist", fft_features(clip, 64), montage)


# A walk collects distinct nodes in visiting order, root first.

# In[2]:

c3 = montage.index("C3")
for seed in range(3):
    print("walk", seed, names[rwr_sample(graph, c3, alpha=4, seed=seed)])


# Higher restart probability keeps the walk closer to its root.

# In[3]:

dist = montage.distances()
for p in (0.2, 0.5, 0.8):
    spread = np.mean([dist[c3, rwr_sample(graph, c3, 6, restart_p=p, seed=s)].mean()
                      for s in range(200)])
    print("restart %.1f   mean distance of sampled electrodes to C3: %.3f" % (p, spread))


# In[4]:

t = make_triplet(graph, c3, montage, alpha=4, rng=0)
print("positive 1:", names[t.g1_pos.nodes], " target row zeroed:", not t.g1_pos.X_s[0].any())
print("positive 2:", names[t.g2_pos.nodes])
print("negative  :", names[t.g1_neg.nodes])
