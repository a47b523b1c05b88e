"""Sub-band energy descriptors and the intra-band GGD model.

A decomposition tree becomes a stack of per-pixel energy layers: each
detail sub-band contributes its squared coefficients (squared quaternion
norms for dual-tree kinds), block-replicated over the 2^depth x 2^depth
footprint back to image resolution.  The stack is what the saliency
entropies run on.  Pixels whose included layers hold no energy get the
uniform distribution, so flat regions carry maximum entropy but no
inter-scale surprise.

The global intra-band statistics use a generalized Gaussian fitted by
moment matching per sub-band.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import ConfigurationError, DegenerateDistributionError, ParameterError
from .wavelet import DecompositionTree, SubbandNode, _node_energies

_LN2 = float(np.log(2.0))


@dataclass(frozen=True)
class StackLayer:
    depth: int
    band_id: str
    energy: np.ndarray  # full image resolution, values >= 0


@dataclass(frozen=True)
class SubbandStack:
    width: int
    height: int
    layers: tuple  # of StackLayer, ordered by (depth, band index)
    depth_schedule: tuple  # strictly increasing depths present

    def layers_upto(self, depth_pos: int):
        if not 0 <= depth_pos < len(self.depth_schedule):
            raise ParameterError(
                f"depth position {depth_pos} outside schedule of "
                f"length {len(self.depth_schedule)}"
            )
        limit = self.depth_schedule[depth_pos]
        return [layer for layer in self.layers if layer.depth <= limit]

    def layers_at(self, depth_pos: int):
        if not 0 <= depth_pos < len(self.depth_schedule):
            raise ParameterError(
                f"depth position {depth_pos} outside schedule of "
                f"length {len(self.depth_schedule)}"
            )
        wanted = self.depth_schedule[depth_pos]
        return [layer for layer in self.layers if layer.depth == wanted]


def _band_id(node: SubbandNode) -> str:
    # DWT/QWT detail nodes carry their orientation letter; packet nodes
    # are better identified by their quad-tree index.
    if node.node_index in (1, 2, 3) and node.orientation in ("V", "H", "D"):
        return node.orientation
    return str(node.node_index)


def iter_energy_layers(tree: DecompositionTree):
    """Yield StackLayers for the tree's detail nodes, coarse depths last.

    Layers are upsampled by nearest-neighbor block replication and cropped
    to the original frame.  The low-pass node is not a descriptor (it
    carries brightness, not structure) and is excluded, matching the
    3-orientations-per-depth layout of the plain DWT.
    """
    h, w = tree.image_shape
    for node in sorted(tree.nodes, key=lambda n: (n.depth, n.node_index)):
        en = _node_energies(node.coeffs)
        factor = 2**node.depth
        up = np.repeat(np.repeat(en, factor, axis=0), factor, axis=1)
        yield StackLayer(node.depth, _band_id(node), up[:h, :w])


def energy_stack(tree: DecompositionTree) -> SubbandStack:
    """Materialize the full-resolution descriptor stack for a tree."""
    layers = tuple(iter_energy_layers(tree))
    schedule = tuple(sorted({layer.depth for layer in layers}))
    h, w = tree.image_shape
    return SubbandStack(width=w, height=h, layers=layers, depth_schedule=schedule)


def interband_pdf(stack: SubbandStack, x: int, y: int, upto_depth_pos: int) -> np.ndarray:
    """Probability over layers with depth <= schedule[upto_depth_pos] at (x, y).

    Zero total energy yields the uniform vector.
    """
    if not (0 <= x < stack.width and 0 <= y < stack.height):
        raise ParameterError(f"pixel ({x}, {y}) outside {stack.width}x{stack.height}")
    layers = stack.layers_upto(upto_depth_pos)
    e = np.array([layer.energy[y, x] for layer in layers], dtype=np.float64)
    total = e.sum()
    if total <= 0.0:
        return np.full(len(e), 1.0 / len(e))
    return e / total


@dataclass(frozen=True)
class GGDParams:
    """Generalized Gaussian scale/shape pair; ``clipped`` marks a fit that
    ran into the shape bracket [0.05, 5]."""

    alpha: float
    beta: float
    clipped: bool = False


def _moment_ratio(beta: float) -> float:
    # E|x|^2 / E[x^2] for a GGD depends on beta only:
    # Gamma(2/b)^2 / (Gamma(1/b) Gamma(3/b)), increasing in beta.
    return float(np.exp(2.0 * gammaln(2.0 / beta) - gammaln(1.0 / beta) - gammaln(3.0 / beta)))


_BETA_LO = 0.05
_BETA_HI = 5.0


def fit_ggd(samples) -> GGDParams:
    """Moment-matching GGD fit.

    Solves the m1^2/m2 ratio equation for beta by bisection on
    [0.05, 5] (tolerance 1e-8), then recovers alpha from the second
    moment.  A ratio outside the bracket pins beta to the bracket edge
    and flags the result.
    """
    x = np.asarray(samples, dtype=np.float64).ravel()
    if x.size < 16:
        raise ParameterError(f"GGD fit needs >= 16 samples, got {x.size}")
    m1 = float(np.mean(np.abs(x)))
    m2 = float(np.mean(x * x))
    if m2 <= 0.0:
        raise DegenerateDistributionError("GGD fit on an all-zero sample")
    target = m1 * m1 / m2
    lo, hi = _BETA_LO, _BETA_HI
    clipped = False
    if target >= _moment_ratio(hi):
        beta = hi
        clipped = True
    elif target <= _moment_ratio(lo):
        beta = lo
        clipped = True
    else:
        while hi - lo > 1e-8:
            mid = 0.5 * (lo + hi)
            if _moment_ratio(mid) < target:
                lo = mid
            else:
                hi = mid
        beta = 0.5 * (lo + hi)
    alpha = float(np.sqrt(m2 * np.exp(gammaln(1.0 / beta) - gammaln(3.0 / beta))))
    return GGDParams(alpha=alpha, beta=beta, clipped=clipped)


def ggd_log2_density(params: GGDParams, magnitude) -> np.ndarray:
    """log2 of the GGD density; finite for every finite magnitude."""
    m = np.asarray(magnitude, dtype=np.float64)
    log_norm = np.log(params.beta) - np.log(2.0 * params.alpha) - gammaln(1.0 / params.beta)
    return (log_norm - (m / params.alpha) ** params.beta) / _LN2


def ggd_density(params: GGDParams, magnitude) -> np.ndarray:
    """GGD density (beta / (2 alpha Gamma(1/beta))) exp(-(|x|/alpha)^beta)."""
    return np.exp2(ggd_log2_density(params, magnitude))


def fit_ggd_table(tree: DecompositionTree) -> dict:
    """Fit one GGD per detail sub-band over all of its coefficients.

    All-zero sub-bands get None: they carry no probability mass at any
    pixel, so their density is never consulted.
    """
    table = {}
    for node in tree.nodes:
        key = (node.depth, _band_id(node))
        mags = np.sqrt(_node_energies(node.coeffs)).ravel()
        if not mags.any():
            table[key] = None
            continue
        table[key] = fit_ggd(mags)
    return table


def ggd_table_rows(table: dict):
    """CSV-ready (depth, band_id, alpha, beta) rows, sorted."""
    rows = []
    for (depth, band_id), params in sorted(table.items(), key=lambda kv: (kv[0][0], kv[0][1])):
        if params is None:
            continue
        rows.append((depth, band_id, params.alpha, params.beta))
    return rows


def layer_ggd(table: dict, layer: StackLayer):
    """Table lookup; raises if a layer with energy lacks parameters."""
    key = (layer.depth, layer.band_id)
    if key not in table:
        raise ConfigurationError(f"no GGD parameters for sub-band {key}")
    return table[key]
