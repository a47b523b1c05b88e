"""Scale saliency on sub-band energy descriptors.

Per pixel, the inter-band distribution over sub-bands up to depth position
m gives a model entropy H(M_m); adding the next depth's sub-bands gives
the joint H(M_{m+1}), and the inter-scale saliency is the grouped mutual
information

    MI(D_{m+1}, M_m) = H(D_{m+1}) + H(M_m) - H(M_{m+1}),

which is the expected Bayesian surprise of the new depth.  The joint
entropy of step m is reused as the model entropy of step m+1, so the scan
is O(depths) per pixel.  Because the model share q of the joint mass can
be anything in [0, 1], this quantity may be negative; it is clamped at
use (configurable) but scale selection always sees the raw values.

Two entropy modes exist: "observer" (Shannon entropy of the inter-band
distribution) and "searcher" (cross-entropy against the fitted per-band
GGD densities, mixing local structure with global statistics).  Scale
selection follows either the WSS rule (first interior peak of the model
entropy across depths) or the DIS rule (first interior peak of the
inter-scale saliency), with argmax-tie-to-coarsest as the fallback.  The
pixel's saliency is H at the selected scale times the MI across the
selected boundary; the finest depth position has no predecessor and its
MI is defined as zero.

Zero-mass conventions: a distribution with no energy reads as uniform
(maximum entropy, no information), but a zero-mass side contributes no
mass to a joint, so every MI term involving it vanishes.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import gaussian_filter

from .descriptors import (
    SubbandStack,
    fit_ggd_table,
    ggd_log2_density,
    interband_pdf,
    iter_energy_layers,
    layer_ggd,
)
from .errors import ConfigurationError, ParameterError
from .imagedata import Image, SaliencyMap
from .wavelet import transform

_MODES = ("observer", "searcher")
_RULES = ("WSS", "DIS")
_KINDS = ("DWT", "DWPTBB", "QWT", "QWPTBB")


@dataclass(frozen=True)
class SaliencyConfig:
    mode: str = "observer"
    scale_rule: str = "WSS"
    levels: int = 4
    transform_kind: str = "DWT"
    smoothing_sigma: float = 0.0
    clamp_negative_mi: bool = True

    def __post_init__(self):
        object.__setattr__(self, "mode", self.mode.lower())
        object.__setattr__(self, "scale_rule", self.scale_rule.upper())
        object.__setattr__(self, "transform_kind", self.transform_kind.upper())
        if self.mode not in _MODES:
            raise ParameterError(f"mode must be one of {_MODES}")
        if self.scale_rule not in _RULES:
            raise ParameterError(f"scale_rule must be one of {_RULES}")
        if self.transform_kind not in _KINDS:
            raise ParameterError(f"transform_kind must be one of {_KINDS}")
        if self.levels < 2:
            raise ParameterError("levels must be >= 2 (MI needs two depth positions)")
        if self.smoothing_sigma < 0:
            raise ParameterError("smoothing_sigma must be >= 0")

    def digest(self) -> str:
        text = (
            f"{self.mode}|{self.scale_rule}|{self.levels}|{self.transform_kind}"
            f"|{self.smoothing_sigma!r}|{self.clamp_negative_mi}"
        )
        return hashlib.sha1(text.encode()).hexdigest()[:12]

    def tag(self) -> str:
        return f"{self.transform_kind.lower()}.{self.scale_rule.lower()}.{self.mode}"


@dataclass(frozen=True)
class ScaleField:
    """Per-pixel selected depth position with the H and MI values there."""

    positions: np.ndarray  # int, indices into depth_schedule
    h_values: np.ndarray
    mi_values: np.ndarray  # raw (unclamped) MI at the selection
    depth_schedule: tuple


def _entropy_from_probs(p: np.ndarray) -> float:
    nz = p[p > 0.0]
    return float(-np.sum(nz * np.log2(nz)))


def entropy_observer(stack: SubbandStack, x: int, y: int, upto_depth_pos: int) -> float:
    """Shannon entropy (bits) of the inter-band distribution at one pixel."""
    return _entropy_from_probs(interband_pdf(stack, x, y, upto_depth_pos))


def entropy_searcher(stack: SubbandStack, ggd_table: dict, x: int, y: int,
                     upto_depth_pos: int) -> float:
    """Cross-entropy (bits) of the inter-band distribution against the
    per-band GGD densities evaluated at this pixel's magnitudes.

    Densities can exceed 1, so the value may be negative; it is always
    finite.  Layers with no energy anywhere have no fitted density and
    contribute zero, which is consistent with their zero mass.
    """
    p = interband_pdf(stack, x, y, upto_depth_pos)
    layers = stack.layers_upto(upto_depth_pos)
    total = 0.0
    for pi, layer in zip(p, layers):
        params = layer_ggd(ggd_table, layer)
        if params is None:
            if layer.energy[y, x] > 0.0:
                raise ConfigurationError(
                    f"sub-band ({layer.depth}, {layer.band_id}) has energy "
                    "but no GGD parameters"
                )
            continue
        total -= pi * float(ggd_log2_density(params, np.sqrt(layer.energy[y, x])))
    return total


def _side_terms(stack, layers, x, y, ggd_table):
    """(mass, entropy-or-crossentropy given mass) for a set of layers."""
    e = np.array([layer.energy[y, x] for layer in layers], dtype=np.float64)
    mass = float(e.sum())
    if mass <= 0.0:
        return 0.0, 0.0
    p = e / mass
    if ggd_table is None:
        return mass, _entropy_from_probs(p)
    total = 0.0
    for pi, layer in zip(p, layers):
        if pi == 0.0:
            continue
        params = layer_ggd(ggd_table, layer)
        if params is None:
            raise ConfigurationError(
                f"sub-band ({layer.depth}, {layer.band_id}) has energy "
                "but no GGD parameters"
            )
        total -= pi * float(ggd_log2_density(params, np.sqrt(layer.energy[y, x])))
    return mass, total


def mutual_information(stack: SubbandStack, x: int, y: int, model_pos: int,
                       data_pos: int | None = None, ggd_table: dict | None = None) -> float:
    """Grouped mutual information H(D) + H(M) - H(D, M) at one pixel (bits).

    The model is every layer up to schedule[model_pos], the data the
    layers exactly at schedule[data_pos].  Each side is normalized on its
    own; the joint over the union.  A side with zero mass carries no
    probability in the joint and therefore contributes zero entropy; if
    the joint itself is empty the MI is zero.  Passing a GGD table swaps
    every entropy for its searcher-mode cross-entropy.
    """
    if data_pos is None:
        data_pos = model_pos + 1
    if data_pos <= model_pos:
        raise ParameterError("data_pos must exceed model_pos")
    if not 0 <= data_pos < len(stack.depth_schedule):
        raise ParameterError(f"data position {data_pos} outside depth schedule")
    model_layers = stack.layers_upto(model_pos)
    data_layers = stack.layers_at(data_pos)
    m_mass, h_m = _side_terms(stack, model_layers, x, y, ggd_table)
    d_mass, h_d = _side_terms(stack, data_layers, x, y, ggd_table)
    joint_mass = m_mass + d_mass
    if joint_mass <= 0.0:
        return 0.0
    q = m_mass / joint_mass
    if ggd_table is None:
        h_b = 0.0
        for share in (q, 1.0 - q):
            if share > 0.0:
                h_b -= share * np.log2(share)
        h_joint = q * h_m + (1.0 - q) * h_d + h_b
    else:
        h_joint = q * h_m + (1.0 - q) * h_d
    return h_d + h_m - h_joint


@dataclass(frozen=True)
class ScaleSelection:
    position: int
    h_value: float
    mi_value: float


def _first_interior_peak(seq: np.ndarray, first_pos: int) -> int:
    n = len(seq)
    for m in range(first_pos + 1, n - 1):
        if seq[m - 1] < seq[m] > seq[m + 1]:
            return m
    # fallback: argmax with ties broken toward the coarsest position
    tail = seq[first_pos:]
    return n - 1 - int(np.argmax(tail[::-1]))


def select_scale(stack: SubbandStack, config: SaliencyConfig, x: int, y: int,
                 ggd_table: dict | None = None) -> ScaleSelection:
    """Characteristic-scale choice at one pixel (reference implementation).

    ``compute_map`` applies the same rules vectorized; this entry point
    exists for inspection and tests.
    """
    n = len(stack.depth_schedule)
    if n < 2:
        raise ParameterError("scale selection needs >= 2 depth positions")
    if config.mode == "searcher" and ggd_table is None:
        raise ConfigurationError("searcher mode needs a GGD table")
    table = ggd_table if config.mode == "searcher" else None
    if table is None:
        h_seq = np.array([entropy_observer(stack, x, y, m) for m in range(n)])
    else:
        h_seq = np.array([entropy_searcher(stack, table, x, y, m) for m in range(n)])
    mi_seq = np.zeros(n)
    for m in range(1, n):
        mi_seq[m] = mutual_information(stack, x, y, m - 1, m, ggd_table=table)
    if config.scale_rule == "WSS":
        pos = _first_interior_peak(h_seq, 0)
    else:
        pos = _first_interior_peak(mi_seq, 1)
    return ScaleSelection(position=pos, h_value=float(h_seq[pos]), mi_value=float(mi_seq[pos]))


def _accumulate_depth_arrays(tree, schedule, mode: str, ggd_table):
    """Streamed per-depth-position accumulators over all layers.

    Returns dict with, per depth position: summed energy E, summed
    e*log2(e) L, layer count, and for searcher mode the mass-weighted
    and unweighted cross-information sums.
    """
    h, w = tree.image_shape
    n = len(schedule)
    pos_of_depth = {d: i for i, d in enumerate(schedule)}
    e_sum = np.zeros((n, h, w))
    l_sum = np.zeros((n, h, w))
    counts = np.zeros(n)
    c_sum = np.zeros((n, h, w)) if mode == "searcher" else None
    x_sum = np.zeros((n, h, w)) if mode == "searcher" else None
    for layer in iter_energy_layers(tree):
        i = pos_of_depth[layer.depth]
        en = layer.energy
        e_sum[i] += en
        lg = np.zeros_like(en)
        np.log2(en, out=lg, where=en > 0.0)
        l_sum[i] += en * lg
        counts[i] += 1
        if mode == "searcher":
            params = layer_ggd(ggd_table, layer)
            if params is None:
                continue  # all-zero band: no mass anywhere
            xi = -ggd_log2_density(params, np.sqrt(en))
            c_sum[i] += en * xi
            x_sum[i] += xi
    return e_sum, l_sum, counts, c_sum, x_sum


def _pick_scale_vec(seq: np.ndarray, first_pos: int) -> np.ndarray:
    n = seq.shape[0]
    pos = np.full(seq.shape[1:], -1, dtype=np.int64)
    for m in range(first_pos + 1, n - 1):
        peak = (seq[m - 1] < seq[m]) & (seq[m] > seq[m + 1]) & (pos < 0)
        pos[peak] = m
    fallback = n - 1 - np.argmax(seq[first_pos:][::-1], axis=0)
    return np.where(pos < 0, fallback, pos)


def compute_map(image: Image, config: SaliencyConfig, bank=None, filters=None):
    """Full per-pixel saliency map plus the scale field behind it.

    Pipeline: transform -> energy descriptors -> prefix entropies and
    inter-scale MI -> scale selection -> Y = H * MI -> optional Gaussian
    smoothing -> affine normalization to [0, 1].
    """
    tree = transform(image, config.transform_kind, levels=config.levels,
                     bank=bank, filters=filters)
    schedule = tuple(sorted({node.depth for node in tree.nodes}))
    h, w = tree.image_shape
    ggd_table = fit_ggd_table(tree) if config.mode == "searcher" else None

    n = len(schedule)
    if n == 0:
        # degenerate best-basis collapse (zero-energy input): flat zero map
        zero = np.zeros((h, w))
        smap = SaliencyMap(zero, method_tag=config.tag(), params_digest=config.digest())
        field = ScaleField(np.zeros((h, w), dtype=np.int64), zero, zero, ())
        return smap, field

    e_sum, l_sum, counts, c_sum, x_sum = _accumulate_depth_arrays(
        tree, schedule, config.mode, ggd_table
    )

    ep = np.cumsum(e_sum, axis=0)
    lp = np.cumsum(l_sum, axis=0)
    cum_counts = np.cumsum(counts)
    has_mass = ep > 0.0
    d_has_mass = e_sum > 0.0

    with np.errstate(divide="ignore", invalid="ignore"):
        hp_mass = np.where(has_mass, np.log2(np.where(has_mass, ep, 1.0)) - lp / np.where(has_mass, ep, 1.0), 0.0)
        hd_mass = np.where(d_has_mass, np.log2(np.where(d_has_mass, e_sum, 1.0)) - l_sum / np.where(d_has_mass, e_sum, 1.0), 0.0)
    hp_mass = np.maximum(hp_mass, 0.0)  # kill -1e-16 rounding
    hd_mass = np.maximum(hd_mass, 0.0)

    if config.mode == "searcher":
        cp = np.cumsum(c_sum, axis=0)
        xp = np.cumsum(x_sum, axis=0)
        with np.errstate(divide="ignore", invalid="ignore"):
            hseq_mass = np.where(has_mass, cp / np.where(has_mass, ep, 1.0), 0.0)
            hseq_rep = np.where(has_mass, hseq_mass, xp / cum_counts[:, None, None])
            hd_term = np.where(d_has_mass, c_sum / np.where(d_has_mass, e_sum, 1.0), 0.0)
        h_report, h_mi, hd_mi = hseq_rep, hseq_mass, hd_term
    else:
        uniform = np.log2(cum_counts)[:, None, None]
        h_report = np.where(has_mass, hp_mass, uniform)
        h_mi, hd_mi = hp_mass, hd_mass

    mi = np.zeros_like(h_mi)
    if n >= 2:
        mi[1:] = hd_mi[1:] + h_mi[:-1] - h_mi[1:]

    if n < 2:
        pos = np.zeros((h, w), dtype=np.int64)
    elif config.scale_rule == "WSS":
        pos = _pick_scale_vec(h_report, 0)
    else:
        pos = _pick_scale_vec(mi, 1)

    take = pos[None]
    h_at = np.take_along_axis(h_report, take, axis=0)[0]
    mi_at = np.take_along_axis(mi, take, axis=0)[0]
    mi_used = np.maximum(mi_at, 0.0) if config.clamp_negative_mi else mi_at
    y_map = h_at * mi_used

    if config.smoothing_sigma > 0.0:
        y_map = gaussian_filter(y_map, sigma=config.smoothing_sigma)
    lo = y_map.min()
    hi = y_map.max()
    y_map = (y_map - lo) / (hi - lo) if hi > lo else np.zeros_like(y_map)

    smap = SaliencyMap(y_map, method_tag=config.tag(), params_digest=config.digest())
    field = ScaleField(positions=pos, h_values=h_at, mi_values=mi_at,
                       depth_schedule=schedule)
    return smap, field
