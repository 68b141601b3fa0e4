# coding: utf-8

# # The model and its hand-written gradients
#
# A one-layer GCN encodes each subgraph, a bilinear scorer compares the
# target's own embedding with the subgraph summary, and a linear GCN
# decoder reconstructs the blanked-out target. All gradients are written
# out by hand; here we check them against finite differences.

# In[1]:

import numpy as np

from eegcgs.model import forward, init_params
from eegcgs.sampling import sample_triplets
from eegcgs.training import backward, contrastive_loss, reconstruction_loss, total_loss

rng = np.random.default_rng(0)
n, d, k, alpha = 6, 8, 3, 3
A = rng.random((n, n)) * (rng.random((n, n)) < 0.7)
A = np.maximum(A, A.T)
feats = rng.normal(size=(1, n, d))
batch = sample_triplets(A, np.arange(n), (np.arange(n) + 3) % n, alpha, 0.5, rng)
params = init_params(d, k, seed=0)


# In[2]:

fw = forward(params, feats, batch)
print("positive similarities\n", np.round(fw.sim_pos, 3))
print("negative similarities\n", np.round(fw.sim_neg, 3))
print("reconstructions", fw.xhat.shape)


# In[3]:

def loss_of(p, lam=0.6):
    out = forward(p, feats, batch)
    return total_loss(lam, contrastive_loss(out.sim_pos, out.sim_neg),
                      reconstruction_loss(out.xhat, out.x_t))


loss, grads, (l_con, l_rec) = backward(params, feats, batch, 0.6)
print("loss %.6f = 0.6 * %.6f + 0.4 * %.6f" % (loss, l_con, l_rec))

h = 1e-5
for name, W, G in zip(("W_e", "W_d", "W_s"), params.arrays(), grads.arrays()):
    num = np.zeros_like(W)
    for idx in np.ndindex(W.shape):
        old = W[idx]
        W[idx] = old + h
        up = loss_of(params)
        W[idx] = old - h
        num[idx] = (up - loss_of(params)) / (2 * h)
        W[idx] = old
    print("%s  max |analytic - numeric| = %.2e" % (name, np.abs(G - num).max()))
