# coding: utf-8

# # Clips, montages and spectral features
#
# A clip is an (n channels x T samples) array tied to a montage of named
# electrodes on the unit sphere. Each channel is turned into a fixed-length
# vector of log FFT magnitudes.

# In[1]:

import tempfile
from pathlib import Path

import numpy as np

from eegcgs.benchmark import synth_generate
from eegcgs.features import fft_features
from eegcgs.montage import load_clips, ten_twenty, write_clips


# The built-in 19-channel 10-20 cap:

# In[2]:

montage = ten_twenty()
print(montage.n, "electrodes:", " ".join(montage.names))
far = montage.farthest()
print("farthest electrode from C3:", montage.names[far[montage.index("C3")]])


# Synthetic normal clips: band-limited rhythms with smooth scalp footprints
# plus spatially correlated noise, so neighbouring electrodes look alike.

# In[3]:

clips = synth_generate(5, T=512, seed=0)
clip = clips[0]
print(clip.clip_id, clip.samples.shape, clip.sample_rate, "Hz", clip.label)

C = np.corrcoef(clip.samples)
print("corr(C3, CZ) = %.2f   corr(FP1, O2) = %.2f" % (
    C[montage.index("C3"), montage.index("CZ")], C[montage.index("FP1"), montage.index("O2")]))


# Round trip through both on-disk formats.

# In[4]:

with tempfile.TemporaryDirectory() as tmp:
    write_clips(clips, Path(tmp) / "csv")
    write_clips(clips, Path(tmp) / "raw", fmt="raw-f32")
    from_csv = load_clips(Path(tmp) / "csv", "csv", montage)
    from_raw = load_clips(Path(tmp) / "raw", "raw-f32", montage)
    print("csv max error:", np.abs(from_csv[0].samples - clip.samples).max())
    print("raw-f32 max error:", np.abs(from_raw[0].samples - clip.samples).max())


# Features: the first d bins of log(|FFT| + eps), DC included.

# In[5]:

X = fft_features(clip, 64)
print("feature matrix", X.shape)
print("strongest bin per channel:", np.argmax(X[:, 1:], axis=1) + 1)

# scaling a signal shifts its features by log(scale)
print("shift for 3x amplitude:", np.round((fft_features(3 * clip.samples, 64) - X).mean(), 6),
      "vs log 3 =", round(np.log(3), 6))
