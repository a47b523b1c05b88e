"""Numba-compiled implementations of the hot kernels.

Importing this module requires numba; the dispatcher in ``__init__`` falls
back to the numpy twins when it is unavailable or when
``WAVESAL_BACKEND=numpy`` is set.
"""

from __future__ import annotations

import numpy as np
from numba import njit

NAME = "numba"


@njit(cache=True)
def filter_down_axis0(x, f):
    n_rows, n_cols = x.shape
    n_taps = f.shape[0]
    half = n_rows // 2
    out = np.zeros((half, n_cols), dtype=np.float64)
    for k in range(half):
        for n in range(n_taps):
            row = (2 * k - n) % n_rows
            c = f[n]
            for j in range(n_cols):
                out[k, j] += c * x[row, j]
    return out


@njit(cache=True)
def pss_scan(bin_img, n_bins, radii, off_y, off_x, ring_start, weights):
    h, w = bin_img.shape
    n_s = radii.shape[0]
    h_all = np.zeros((n_s, h, w), dtype=np.float64)
    w_all = np.zeros((n_s, h, w), dtype=np.float64)
    hist = np.zeros(n_bins, dtype=np.int64)
    prev_p = np.zeros(n_bins, dtype=np.float64)
    cur_p = np.zeros(n_bins, dtype=np.float64)
    for y in range(h):
        for x in range(w):
            hist[:] = 0
            total = 0
            for i in range(n_s):
                # grow the window by one ring; clipped at the frame edges
                for t in range(ring_start[i], ring_start[i + 1]):
                    yy = y + off_y[t]
                    xx = x + off_x[t]
                    if 0 <= yy < h and 0 <= xx < w:
                        hist[bin_img[yy, xx]] += 1
                        total += 1
                acc = 0.0
                for b in range(n_bins):
                    pb = hist[b] / total
                    cur_p[b] = pb
                    if pb > 0.0:
                        acc -= pb * np.log2(pb)
                h_all[i, y, x] = acc
                if i > 0:
                    tv = 0.0
                    for b in range(n_bins):
                        tv += abs(cur_p[b] - prev_p[b])
                    w_all[i, y, x] = weights[i] * tv
                prev_p[:] = cur_p
    return h_all, w_all
