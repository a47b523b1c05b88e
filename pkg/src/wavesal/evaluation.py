"""Fixation-based scoring of saliency maps: ROC/AUC and NSS.

Fixated pixels are the positives; every other pixel is a negative (no
negative sampling, so results are deterministic).  NSS standardizes the
map around its median, not its mean.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .imagedata import FixationSet, SaliencyMap


@dataclass(frozen=True)
class RocCurve:
    points: np.ndarray  # (k, 2) rows of (fpr, tpr), (0,0) .. (1,1)
    auc: float


def roc_auc(smap: SaliencyMap, fixations: FixationSet) -> RocCurve:
    """ROC sweep over the distinct map values, >= threshold counts as detected.

    AUC is the trapezoidal integral, which equals the Mann-Whitney
    statistic with ties counted half.
    """
    if len(fixations) == 0:
        raise ParameterError("roc_auc needs at least one fixation")
    v = smap.values
    fix_mask = np.zeros(v.shape, dtype=bool)
    pos = np.empty(len(fixations.points))
    for i, (x, y) in enumerate(fixations.points):
        if not (0 <= x < smap.width and 0 <= y < smap.height):
            raise ParameterError(f"fixation ({x}, {y}) outside the map")
        fix_mask[y, x] = True
        pos[i] = v[y, x]
    neg = v[~fix_mask]
    if neg.size == 0:
        raise ParameterError("every pixel is fixated; no negatives left")
    pos.sort()
    neg.sort()
    thresholds = np.unique(v)[::-1]
    tpr = 1.0 - np.searchsorted(pos, thresholds, side="left") / pos.size
    fpr = 1.0 - np.searchsorted(neg, thresholds, side="left") / neg.size
    fprs = np.concatenate(([0.0], fpr))
    tprs = np.concatenate(([0.0], tpr))
    auc = float(np.sum((fprs[1:] - fprs[:-1]) * (tprs[1:] + tprs[:-1])) / 2.0)
    return RocCurve(points=np.column_stack([fprs, tprs]), auc=auc)


def nss(smap: SaliencyMap, fixations: FixationSet) -> float:
    """Mean (S - median(S)) / std(S) over the fixated pixels.

    A zero-variance map cannot be standardized; that degenerate case
    warns and scores 0.
    """
    if len(fixations) == 0:
        raise ParameterError("nss needs at least one fixation")
    v = smap.values
    # a constant map has no spread to standardize by (float accumulation
    # can leave std() at ~1e-17 for constant input, so compare extremes)
    if v.max() == v.min():
        warnings.warn("NSS of a constant map is undefined; reporting 0", stacklevel=2)
        return 0.0
    std = float(v.std())
    med = float(np.median(v))
    vals = [(v[y, x] - med) / std for x, y in fixations.points]
    return float(np.mean(vals))


@dataclass(frozen=True)
class EvalScore:
    image_id: str
    method: str
    mode: str
    scale_rule: str
    auc: float
    nss: float
    time_ms: float


def aggregate(scores) -> tuple:
    """Unweighted means of (AUC, NSS, per-image wall time in ms)."""
    scores = list(scores)
    if not scores:
        raise ParameterError("aggregate needs at least one score")
    return (
        float(np.mean([s.auc for s in scores])),
        float(np.mean([s.nss for s in scores])),
        float(np.mean([s.time_ms for s in scores])),
    )
