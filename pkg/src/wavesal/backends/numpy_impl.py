"""Pure-numpy implementations of the hot kernels.

Always available; selected by setting ``WAVESAL_BACKEND=numpy`` or used as
the fallback when numba is not importable.  Results must match the numba
implementations to float rounding.
"""

from __future__ import annotations

import numpy as np
from scipy.signal import fftconvolve

NAME = "numpy"


def filter_down_axis0(x: np.ndarray, f: np.ndarray) -> np.ndarray:
    """Circular convolution along axis 0 followed by even-phase decimation.

    out[k, j] = sum_n f[n] * x[(2k - n) mod N, j]
    """
    n_rows = x.shape[0]
    out = np.zeros((n_rows // 2, x.shape[1]), dtype=np.float64)
    ks = 2 * np.arange(n_rows // 2)
    for n in range(len(f)):
        out += f[n] * x[(ks - n) % n_rows, :]
    return out


def pss_scan(bin_img, n_bins, radii, off_y, off_x, ring_start, weights):
    """Windowed-histogram entropy and total-variation stacks for PSS.

    Window counts come from convolving per-bin indicator images with disk
    kernels (zero fill outside the frame, i.e. clipped windows).  Counts
    are integers, so they are re-rounded to kill FFT noise before any
    probability is formed.
    """
    h, w = bin_img.shape
    n_s = len(radii)
    indicators = np.zeros((n_bins, h, w), dtype=np.float64)
    for b in range(n_bins):
        indicators[b] = bin_img == b

    h_all = np.zeros((n_s, h, w), dtype=np.float64)
    w_all = np.zeros((n_s, h, w), dtype=np.float64)
    prev_p = None
    for i, radius in enumerate(radii):
        r = int(radius)
        kern = np.zeros((1, 2 * r + 1, 2 * r + 1), dtype=np.float64)
        sel = slice(ring_start[0], ring_start[i + 1])
        kern[0, off_y[sel] + r, off_x[sel] + r] = 1.0
        counts = np.rint(fftconvolve(indicators, kern, mode="same", axes=(1, 2)))
        counts[counts < 0] = 0.0
        total = counts.sum(axis=0)
        p = counts / total
        with np.errstate(divide="ignore", invalid="ignore"):
            h_all[i] = -np.where(p > 0, p * np.log2(np.where(p > 0, p, 1.0)), 0.0).sum(axis=0)
        if prev_p is not None:
            w_all[i] = weights[i] * np.abs(p - prev_p).sum(axis=0)
        prev_p = p
    return h_all, w_all
