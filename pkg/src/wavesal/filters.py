"""Filter banks for the single-tree and dual-tree transforms.

Coefficients are loaded from a plain-text asset (``data/filters.txt``,
overridable via the ``WAVESAL_FILTER_DIR`` environment variable).  All
filters are causal arrays; the analysis convention throughout the package
is circular convolution followed by even-phase downsampling,

    a[k] = sum_n lo_a[n] * x[(2k - n) mod N],

and synthesis is zero-stuffed upsampling, circular convolution with the
synthesis pair and a roll that undoes the accumulated filter delay.  Under
that convention an orthonormal bank gives an exactly orthogonal transform
for any even signal length, so Parseval and perfect reconstruction hold to
rounding error.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .errors import ConfigurationError, FormatError

_ASSET_NAME = "filters.txt"


@dataclass(frozen=True)
class FilterBank:
    """Analysis/synthesis FIR pair for one two-channel stage."""

    name: str
    lo_a: np.ndarray
    hi_a: np.ndarray
    lo_s: np.ndarray
    hi_s: np.ndarray

    @property
    def recon_shift(self) -> int:
        """Circular delay accumulated by one analysis+synthesis stage."""
        return (len(self.lo_a) + len(self.lo_s)) // 2 - 1

    @property
    def is_orthonormal(self) -> bool:
        return abs(float(self.lo_a @ self.lo_a) - 1.0) < 1e-8

    @classmethod
    def orthonormal(cls, name: str, lo_a) -> "FilterBank":
        """Build a bank from an orthonormal low-pass via the CQF relations.

        Published coefficient tables are rounded; the low-pass is rescaled
        to exactly unit norm so Parseval stays tight.
        """
        lo = np.asarray(lo_a, dtype=np.float64)
        lo = lo / np.sqrt(np.sum(lo * lo))
        n = np.arange(len(lo))
        hi = ((-1.0) ** n) * lo[::-1]
        return cls(name=name, lo_a=lo, hi_a=hi, lo_s=lo[::-1].copy(), hi_s=hi[::-1].copy())

    @classmethod
    def biorthogonal(cls, name: str, lo_a, lo_s) -> "FilterBank":
        """Build a biorthogonal bank from its two low-pass filters.

        High-pass filters come from the alternating-sign modulation of the
        opposite low-pass; the sign phases below were fixed so that one
        analysis+synthesis stage is an exact circular shift by recon_shift.
        """
        la = np.asarray(lo_a, dtype=np.float64)
        ls = np.asarray(lo_s, dtype=np.float64)
        ha = ((-1.0) ** np.arange(len(ls))) * ls
        hs = -((-1.0) ** np.arange(len(la))) * la
        return cls(name=name, lo_a=la, hi_a=ha, lo_s=ls, hi_s=hs)


@dataclass(frozen=True)
class DualTreeFilterSet:
    """Filter banks for the two trees of the quaternion transform.

    The first-stage pair is offset by roughly one full sample; every later
    stage uses a Q-shift pair whose low-pass filters differ by close to
    half a sample of group delay, which is what makes the quaternion
    magnitudes nearly shift invariant.
    """

    first_stage_h: FilterBank
    first_stage_g: FilterBank
    later_h: FilterBank
    later_g: FilterBank

    def bank(self, tree: str, level: int) -> FilterBank:
        """Bank for tree 'h' or 'g' at 1-based decomposition level."""
        if tree == "h":
            return self.first_stage_h if level == 1 else self.later_h
        if tree == "g":
            return self.first_stage_g if level == 1 else self.later_g
        raise ConfigurationError(f"unknown tree {tree!r}")


def group_delay_difference(lo_h, lo_g, band_edge: float = np.pi / 3) -> float:
    """Mean group-delay offset between two low-pass filters over the passband.

    Measured as the least-squares slope of the unwrapped phase difference
    over (0, band_edge]; the flat passband of a half-band low-pass ends
    well before the transition region, hence the pi/3 default.
    """
    lo_h = np.asarray(lo_h, dtype=np.float64)
    lo_g = np.asarray(lo_g, dtype=np.float64)
    w = np.linspace(0.0, band_edge, 1024)[1:]
    n_h = np.arange(len(lo_h))
    n_g = np.arange(len(lo_g))
    resp_h = np.exp(-1j * np.outer(w, n_h)) @ lo_h
    resp_g = np.exp(-1j * np.outer(w, n_g)) @ lo_g
    phase = np.unwrap(np.angle(resp_g) - np.angle(resp_h))
    slope = -(phase @ w) / (w @ w)
    return abs(float(slope))


def _parse_asset(text: str) -> dict:
    table = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if ":" not in line:
            raise FormatError(f"filter asset line {lineno}: missing ':'")
        name, _, rest = line.partition(":")
        try:
            coeffs = np.array([float(tok) for tok in rest.split()], dtype=np.float64)
        except ValueError:
            raise FormatError(f"filter asset line {lineno}: non-numeric coefficient") from None
        if coeffs.size == 0:
            raise FormatError(f"filter asset line {lineno}: empty filter")
        table[name.strip()] = coeffs
    return table


def _load_asset_table() -> dict:
    override = os.environ.get("WAVESAL_FILTER_DIR")
    if override:
        path = os.path.join(override, _ASSET_NAME)
        with open(path) as fh:
            return _parse_asset(fh.read())
    text = resources.files("wavesal").joinpath("data", _ASSET_NAME).read_text()
    return _parse_asset(text)


def get_bank(name: str = "daub4") -> FilterBank:
    """Look up a single-tree bank by name (daub4, haar, cdf97)."""
    table = _load_asset_table()
    key = name.lower()
    if f"{key}.lo_a" not in table:
        raise ConfigurationError(f"unknown filter bank {name!r}")
    if f"{key}.lo_s" in table:
        return FilterBank.biorthogonal(key, table[f"{key}.lo_a"], table[f"{key}.lo_s"])
    return FilterBank.orthonormal(key, table[f"{key}.lo_a"])


def get_dual_tree_set() -> DualTreeFilterSet:
    """The shipped Farras + 10-tap Q-shift dual-tree filter set."""
    table = _load_asset_table()
    try:
        return DualTreeFilterSet(
            first_stage_h=FilterBank.orthonormal("farras_h", table["farras_h.lo_a"]),
            first_stage_g=FilterBank.orthonormal("farras_g", table["farras_g.lo_a"]),
            later_h=FilterBank.orthonormal("qshift10_h", table["qshift10_h.lo_a"]),
            later_g=FilterBank.orthonormal("qshift10_g", table["qshift10_g.lo_a"]),
        )
    except KeyError as exc:
        raise ConfigurationError(f"filter asset is missing {exc.args[0]!r}") from None
