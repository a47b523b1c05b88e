"""2-D wavelet machinery: DWT, wavelet packets with best basis, and the
dual-tree quaternion variants.

Conventions fixed here and relied upon everywhere downstream:

* Boundary handling is periodic (circular) extension.  Odd image sizes are
  tiled periodically up to the next multiple of 2**levels before analysis;
  derived per-pixel maps are cropped back to the original frame.
* One analysis step along an axis is circular convolution with the filter
  followed by even-phase decimation (see ``filters``).
* Sub-band letters name (y-filter, x-filter); HL (high along y) carries
  horizontal features and is tagged 'H', LH is tagged 'V', HH 'D'.
* Packet-tree nodes use base-4 indices, most significant digit first, with
  digit values 0:LL 1:LH 2:HL 3:HH, so the node at index 0 of any depth is
  the pure low-pass path.
* Dual-tree coefficients are quadruples (hh, gh, hg, gg) where the first
  letter is the tree filtering axis y and the second the tree filtering
  axis x.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import backends
from .errors import KindError, ParameterError
from .filters import DualTreeFilterSet, FilterBank, get_bank, get_dual_tree_set

_ORIENT_OF_DIGIT = {0: "A", 1: "V", 2: "H", 3: "D"}
_COMPONENTS = (("h", "h"), ("g", "h"), ("h", "g"), ("g", "g"))  # (tree_y, tree_x)


@dataclass(frozen=True)
class SubbandNode:
    """One sub-band: real grid (h, w) or quaternion quadruples (h, w, 4)."""

    depth: int
    node_index: int
    orientation: str
    coeffs: np.ndarray

    @property
    def is_dual(self) -> bool:
        return self.coeffs.ndim == 3

    def energy(self) -> float:
        return float(np.sum(self.coeffs * self.coeffs))


@dataclass(frozen=True)
class DecompositionTree:
    """Result of any of the four transforms.

    ``nodes`` holds the detail sub-bands (for best-basis kinds: the chosen
    tiling minus the low-pass node); ``approx`` is the remaining low-pass
    node, so ``nodes + [approx]`` always tiles the frequency plane once.
    """

    transform_kind: str  # DWT | DWPTBB | QWT | QWPTBB
    levels: int
    nodes: tuple
    approx: SubbandNode
    image_shape: tuple
    padded_shape: tuple
    basis_cost: float | None = None

    def all_nodes(self) -> tuple:
        return self.nodes + (self.approx,)

    def detail_energy(self) -> float:
        return float(sum(n.energy() for n in self.nodes))

    def total_energy(self) -> float:
        return self.detail_energy() + self.approx.energy()


@dataclass(frozen=True)
class PacketTree:
    """Full wavelet-packet expansion down to a uniform depth.

    ``nodes`` maps (depth, index) to coefficient arrays and includes the
    depth-0 root (the padded input), which lets the best-basis search
    consider "do not decompose at all" as a candidate tiling.
    """

    levels: int
    nodes: dict
    image_shape: tuple
    padded_shape: tuple
    dual: bool = False

    def children(self, depth: int, index: int):
        return [(depth + 1, 4 * index + d) for d in range(4)]


def _validate_levels(shape, levels: int) -> None:
    if levels < 1:
        raise ParameterError(f"levels must be >= 1, got {levels}")
    if 2**levels > min(shape):
        raise ParameterError(
            f"levels={levels} too deep for image of size {shape[1]}x{shape[0]}"
        )


def _pad_periodic(data: np.ndarray, levels: int) -> np.ndarray:
    """Tile the frame periodically up to the next multiple of 2**levels."""
    block = 2**levels
    h, w = data.shape
    ph = -(-h // block) * block
    pw = -(-w // block) * block
    if (ph, pw) == (h, w):
        return data
    reps = (-(-ph // h), -(-pw // w))
    return np.tile(data, reps)[:ph, :pw]


def _split4(x: np.ndarray, bank_y: FilterBank, bank_x: FilterBank):
    """One separable analysis step; returns (LL, LH, HL, HH)."""
    lo_y = backends.filter_down_axis0(x, bank_y.lo_a)
    hi_y = backends.filter_down_axis0(x, bank_y.hi_a)
    ll = backends.filter_down_axis0(lo_y.T, bank_x.lo_a).T
    lh = backends.filter_down_axis0(lo_y.T, bank_x.hi_a).T
    hl = backends.filter_down_axis0(hi_y.T, bank_x.lo_a).T
    hh = backends.filter_down_axis0(hi_y.T, bank_x.hi_a).T
    return ll, lh, hl, hh


def _synth_axis0(lo: np.ndarray, hi: np.ndarray, bank: FilterBank) -> np.ndarray:
    n = 2 * lo.shape[0]
    up_lo = np.zeros((n,) + lo.shape[1:])
    up_hi = np.zeros_like(up_lo)
    up_lo[0::2] = lo
    up_hi[0::2] = hi
    out = np.zeros_like(up_lo)
    for k, c in enumerate(bank.lo_s):
        out += c * np.roll(up_lo, k, axis=0)
    for k, c in enumerate(bank.hi_s):
        out += c * np.roll(up_hi, k, axis=0)
    return np.roll(out, -bank.recon_shift, axis=0)


def dwt2(image, bank: FilterBank | None = None, levels: int = 4) -> DecompositionTree:
    """Separable 2-D DWT with periodic extension.

    Detail sub-bands are tagged V/H/D per level; the approximation is the
    depth-``levels`` low-pass node.
    """
    data = np.asarray(getattr(image, "data", image), dtype=np.float64)
    _validate_levels(data.shape, levels)
    bank = bank or get_bank()
    x = _pad_periodic(data, levels)
    padded_shape = x.shape
    nodes = []
    for depth in range(1, levels + 1):
        x, lh, hl, hh = _split4(x, bank, bank)
        nodes.append(SubbandNode(depth, 1, "V", lh))
        nodes.append(SubbandNode(depth, 2, "H", hl))
        nodes.append(SubbandNode(depth, 3, "D", hh))
    approx = SubbandNode(levels, 0, "A", x)
    return DecompositionTree(
        transform_kind="DWT",
        levels=levels,
        nodes=tuple(nodes),
        approx=approx,
        image_shape=data.shape,
        padded_shape=padded_shape,
    )


def _idwt2(tree: DecompositionTree, bank: FilterBank) -> np.ndarray:
    """Inverse of dwt2 (test support only; not part of the public surface)."""
    if tree.transform_kind != "DWT":
        raise KindError("_idwt2 only inverts plain DWT trees")
    by_key = {(n.depth, n.node_index): n.coeffs for n in tree.nodes}
    x = tree.approx.coeffs
    for depth in range(tree.levels, 0, -1):
        lh = by_key[(depth, 1)]
        hl = by_key[(depth, 2)]
        hh = by_key[(depth, 3)]
        lo_rows = _synth_axis0(x.T, lh.T, bank).T
        hi_rows = _synth_axis0(hl.T, hh.T, bank).T
        x = _synth_axis0(lo_rows, hi_rows, bank)
    h, w = tree.image_shape
    return x[:h, :w]


def dwpt_full(image, bank: FilterBank | None = None, levels: int = 2) -> PacketTree:
    """Full wavelet-packet expansion: every node splits into 4 children."""
    data = np.asarray(getattr(image, "data", image), dtype=np.float64)
    _validate_levels(data.shape, levels)
    bank = bank or get_bank()
    x = _pad_periodic(data, levels)
    nodes = {(0, 0): x}
    for depth in range(levels):
        for index in range(4**depth):
            ll, lh, hl, hh = _split4(nodes[(depth, index)], bank, bank)
            base = 4 * index
            nodes[(depth + 1, base + 0)] = ll
            nodes[(depth + 1, base + 1)] = lh
            nodes[(depth + 1, base + 2)] = hl
            nodes[(depth + 1, base + 3)] = hh
    return PacketTree(
        levels=levels,
        nodes=nodes,
        image_shape=data.shape,
        padded_shape=x.shape,
        dual=False,
    )


def _axis_all_low(index: int, depth: int, axis_bit: int) -> bool:
    """True when every split so far kept the low band along the given axis.

    axis_bit 2 tests the y digit, 1 the x digit.
    """
    for _ in range(depth):
        if index % 4 & axis_bit:
            return False
        index //= 4
    return True


def _qwpt_full(image, filters: DualTreeFilterSet, levels: int) -> PacketTree:
    """Quaternion packet tree; all four component trees share one schedule.

    Splitting a branch that is still pure low-pass along an axis uses that
    tree's own filters, as in the plain dual-tree transform.  Once a branch
    has gone through a high-pass along an axis, further splits along that
    axis use the same extension pair (the later h bank) in both trees,
    which is the constraint that keeps the packet atoms near analytic.
    """
    data = np.asarray(getattr(image, "data", image), dtype=np.float64)
    _validate_levels(data.shape, levels)
    x0 = _pad_periodic(data, levels)
    shared = filters.later_h
    comp_nodes = []
    for tree_y, tree_x in _COMPONENTS:
        nodes = {(0, 0): x0}
        for depth in range(levels):
            level = depth + 1
            for index in range(4**depth):
                bank_y = (
                    filters.bank(tree_y, level)
                    if _axis_all_low(index, depth, 2)
                    else shared
                )
                bank_x = (
                    filters.bank(tree_x, level)
                    if _axis_all_low(index, depth, 1)
                    else shared
                )
                ll, lh, hl, hh = _split4(nodes[(depth, index)], bank_y, bank_x)
                base = 4 * index
                nodes[(depth + 1, base + 0)] = ll
                nodes[(depth + 1, base + 1)] = lh
                nodes[(depth + 1, base + 2)] = hl
                nodes[(depth + 1, base + 3)] = hh
        comp_nodes.append(nodes)
    stacked = {
        key: np.stack([cn[key] for cn in comp_nodes], axis=-1) for key in comp_nodes[0]
    }
    return PacketTree(
        levels=levels,
        nodes=stacked,
        image_shape=data.shape,
        padded_shape=x0.shape,
        dual=True,
    )


def qwt2(image, filters: DualTreeFilterSet | None = None, levels: int = 4) -> DecompositionTree:
    """Dual-tree quaternion wavelet transform.

    Four parallel separable transforms (hh, gh, hg, gg, letter order y
    then x); each sub-band stores the quadruple per coefficient.
    """
    data = np.asarray(getattr(image, "data", image), dtype=np.float64)
    _validate_levels(data.shape, levels)
    filters = filters or get_dual_tree_set()
    x0 = _pad_periodic(data, levels)
    comp_details = []  # per component: {(depth, idx): grid}, plus approx
    comp_approx = []
    for tree_y, tree_x in _COMPONENTS:
        x = x0
        det = {}
        for depth in range(1, levels + 1):
            bank_y = filters.bank(tree_y, depth)
            bank_x = filters.bank(tree_x, depth)
            x, lh, hl, hh = _split4(x, bank_y, bank_x)
            det[(depth, 1)] = lh
            det[(depth, 2)] = hl
            det[(depth, 3)] = hh
        comp_details.append(det)
        comp_approx.append(x)
    nodes = []
    for depth in range(1, levels + 1):
        for index, orient in ((1, "V"), (2, "H"), (3, "D")):
            quad = np.stack([cd[(depth, index)] for cd in comp_details], axis=-1)
            nodes.append(SubbandNode(depth, index, orient, quad))
    approx = SubbandNode(levels, 0, "A", np.stack(comp_approx, axis=-1))
    return DecompositionTree(
        transform_kind="QWT",
        levels=levels,
        nodes=tuple(nodes),
        approx=approx,
        image_shape=data.shape,
        padded_shape=x0.shape,
    )


def quaternion_magnitude(node: SubbandNode) -> np.ndarray:
    """Elementwise quaternion norm sqrt(a^2 + b^2 + c^2 + d^2)."""
    if not node.is_dual:
        raise KindError("quaternion_magnitude needs a dual-tree node")
    return np.sqrt(np.sum(node.coeffs * node.coeffs, axis=-1))


def _node_energies(coeffs: np.ndarray) -> np.ndarray:
    """Per-coefficient energy grid: c^2, or the squared quaternion norm."""
    if coeffs.ndim == 3:
        return np.sum(coeffs * coeffs, axis=-1)
    return coeffs * coeffs


def _shannon_cost(coeffs: np.ndarray, root_energy: float) -> float:
    """Additive best-basis cost: -sum p ln p with p = energy / root energy."""
    if root_energy <= 0.0:
        return 0.0
    p = _node_energies(coeffs).ravel() / root_energy
    p = p[p > 0.0]
    return float(-np.sum(p * np.log(p)))


def _best_basis_cover(ptree: PacketTree):
    """Bottom-up dynamic program over the packet quad-tree.

    Returns (cover, total_cost) where cover is the chosen disjoint set of
    (depth, index) keys.  Ties keep the parent, so a zero-energy input
    collapses to the root-only basis.
    """
    root_energy = float(np.sum(_node_energies(ptree.nodes[(0, 0)])))
    cost = {key: _shannon_cost(c, root_energy) for key, c in ptree.nodes.items()}
    best = {}
    split = {}
    for depth in range(ptree.levels, -1, -1):
        for index in range(4**depth):
            key = (depth, index)
            if depth == ptree.levels:
                best[key] = cost[key]
                split[key] = False
            else:
                child_sum = sum(best[c] for c in ptree.children(depth, index))
                if cost[key] <= child_sum:
                    best[key] = cost[key]
                    split[key] = False
                else:
                    best[key] = child_sum
                    split[key] = True
    cover = []
    stack = [(0, 0)]
    while stack:
        key = stack.pop()
        if split[key]:
            stack.extend(ptree.children(*key))
        else:
            cover.append(key)
    return sorted(cover), best[(0, 0)]


def _cover_to_tree(ptree: PacketTree, kind: str) -> DecompositionTree:
    cover, total_cost = _best_basis_cover(ptree)
    nodes = []
    approx = None
    for depth, index in cover:
        orient = "A" if index == 0 else _ORIENT_OF_DIGIT[index % 4]
        node = SubbandNode(depth, index, orient, ptree.nodes[(depth, index)])
        if index == 0:
            approx = node  # the unique cover node on the pure low-pass path
        else:
            nodes.append(node)
    return DecompositionTree(
        transform_kind=kind,
        levels=ptree.levels,
        nodes=tuple(nodes),
        approx=approx,
        image_shape=ptree.image_shape,
        padded_shape=ptree.padded_shape,
        basis_cost=total_cost,
    )


def best_basis(ptree: PacketTree) -> DecompositionTree:
    """Minimum Shannon-cost tiling of a full single-tree packet expansion."""
    if ptree.dual:
        raise KindError("best_basis expects a single-tree packet; see qwpt_best_basis")
    return _cover_to_tree(ptree, "DWPTBB")


def qwpt_best_basis(
    image, filters: DualTreeFilterSet | None = None, levels: int = 2
) -> DecompositionTree:
    """Best-basis quaternion wavelet packets.

    The cost functional runs on squared quaternion magnitudes, and the one
    chosen tiling applies to all four component trees.
    """
    filters = filters or get_dual_tree_set()
    ptree = _qwpt_full(image, filters, levels)
    return _cover_to_tree(ptree, "QWPTBB")


def transform(image, kind: str, levels: int = 4,
              bank: FilterBank | None = None,
              filters: DualTreeFilterSet | None = None) -> DecompositionTree:
    """Dispatch to one of the four transform back-ends by name."""
    k = kind.upper()
    if k == "DWT":
        return dwt2(image, bank=bank, levels=levels)
    if k == "DWPTBB":
        return best_basis(dwpt_full(image, bank=bank, levels=levels))
    if k == "QWT":
        return qwt2(image, filters=filters, levels=levels)
    if k == "QWPTBB":
        return qwpt_best_basis(image, filters=filters, levels=levels)
    raise ParameterError(f"unknown transform kind {kind!r}")
