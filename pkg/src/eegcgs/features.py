"""FFT log-magnitude node attributes."""

import numpy as np

EPS = 1e-8


def fft_features(samples, d, eps=EPS):
    """Log-magnitude spectrum of each channel, truncated to the first ``d`` bins.

    Parameters
    ----------
    samples : array_like, shape (n, T)
        One row per channel. An :class:`~eegcgs.montage.EegClip` is accepted too.
    d : int
        Number of frequency bins kept, starting at DC. Signals shorter than
        ``2 * d`` samples are zero-padded first.

    Returns
    -------
    ndarray, shape (n, d)
        ``log(|FFT| + eps)`` with a rectangular window and no normalisation.
    """
    samples = getattr(samples, "samples", samples)
    x = np.asarray(samples, dtype=float)
    if x.ndim != 2:
        raise ValueError("samples must be an n x T matrix")
    if d < 1:
        raise ValueError("d must be >= 1")
    length = max(x.shape[1], 2 * d)
    mag = np.abs(np.fft.rfft(x, n=length, axis=1))[:, :d]
    dead = np.flatnonzero(~(mag > 0).any(axis=1))
    if dead.size:
        raise ValueError(f"channel {dead[0]} has an all-zero spectrum")
    return np.log(mag + eps)
