"""Pixel-value scale saliency baseline (Kadir-Brady lineage).

Per pixel and integer radius s, the intensity histogram of the circular
window (clipped at frame borders) gives an entropy H(s); the inter-scale
weight W(s) = s^2/(2s-1) * sum_b |p_s(b) - p_{s-1}(b)| measures how the
distribution moves between consecutive radii.  Saliency is H * W summed
over the strict interior peaks of H; pixels with no peak score zero.

The window scan is the hottest loop in the package and runs on the
selected backend kernel.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from . import backends
from .errors import ParameterError
from .imagedata import Image, SaliencyMap


@dataclass(frozen=True)
class PssConfig:
    s_min: int = 3
    s_max: int = 20
    bins: int = 16

    def __post_init__(self):
        if not 1 <= self.s_min < self.s_max:
            raise ParameterError("need 1 <= s_min < s_max")
        if self.bins < 2:
            raise ParameterError("need bins >= 2")

    def digest(self) -> str:
        return hashlib.sha1(f"{self.s_min}|{self.s_max}|{self.bins}".encode()).hexdigest()[:12]


def _ring_offsets(s_min: int, s_max: int):
    """Disk offsets grouped into growth rings, center-distance <= s."""
    span = np.arange(-s_max, s_max + 1)
    dy, dx = np.meshgrid(span, span, indexing="ij")
    d2 = dy * dy + dx * dx
    off_y, off_x, starts = [], [], [0]
    prev_r2 = -1  # first ring is the whole s_min disk
    for s in range(s_min, s_max + 1):
        sel = (d2 <= s * s) & (d2 > prev_r2)
        off_y.append(dy[sel])
        off_x.append(dx[sel])
        starts.append(starts[-1] + int(sel.sum()))
        prev_r2 = s * s
    return (
        np.concatenate(off_y).astype(np.int64),
        np.concatenate(off_x).astype(np.int64),
        np.array(starts, dtype=np.int64),
    )


def pss_entropy_weight(image: Image, config: PssConfig):
    """Per-radius entropy and inter-scale weight cubes (n_radii, h, w)."""
    v = image.data
    bin_img = np.minimum((v * config.bins).astype(np.int64), config.bins - 1)
    radii = np.arange(config.s_min, config.s_max + 1, dtype=np.int64)
    off_y, off_x, starts = _ring_offsets(config.s_min, config.s_max)
    weights = radii.astype(np.float64) ** 2 / (2.0 * radii - 1.0)
    return backends.pss_scan(bin_img, config.bins, radii, off_y, off_x, starts, weights)


def pss_map(image: Image, config: PssConfig | None = None) -> SaliencyMap:
    """Dense pixel-value scale-saliency map.

    Every interior entropy peak of a pixel contributes its H * W product,
    so pixels salient at several scales accumulate.
    """
    config = config or PssConfig()
    h_all, w_all = pss_entropy_weight(image, config)
    y = np.zeros(image.data.shape)
    for i in range(1, h_all.shape[0] - 1):
        peak = (h_all[i - 1] < h_all[i]) & (h_all[i] > h_all[i + 1])
        y += np.where(peak, h_all[i] * w_all[i], 0.0)
    return SaliencyMap(y, method_tag="pss", params_digest=config.digest())
