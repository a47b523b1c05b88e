"""Image, fixation and saliency-map I/O.

Inputs are 8-bit PGM (P2/P5) or PNG rasters; color PNGs are reduced to
luma with the BT.601 weights.  All pixel data lives in float64 arrays
scaled to [0, 1].  Fixation ground truth is a plain ``x,y`` CSV with a
header row, origin at the top-left pixel.  Everything here is immutable
after construction and safe to share between threads.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass

import numpy as np
from PIL import Image as _PILImage
from PIL import UnidentifiedImageError

from .errors import FixationParseError, FormatError, ParameterError

# BT.601 luma weights for RGB input.
_LUMA = (0.299, 0.587, 0.114)


@dataclass(frozen=True)
class Image:
    """Grayscale raster with intensities in [0, 1], row-major (y, x)."""

    data: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.data, dtype=np.float64)
        if d.ndim != 2:
            raise ParameterError("image data must be a 2-D array")
        if d.size == 0:
            raise ParameterError("image must contain at least one pixel")
        if not np.isfinite(d).all() or d.min() < 0.0 or d.max() > 1.0:
            raise ParameterError("image intensities must lie in [0, 1]")
        object.__setattr__(self, "data", d)

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]


@dataclass(frozen=True)
class FixationSet:
    """Gaze points for one image, pixel coordinates, origin top-left."""

    image_id: str
    points: tuple  # of (x, y) int pairs, duplicates preserved

    def __len__(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class SaliencyMap:
    """Per-pixel nonnegative saliency plus provenance metadata."""

    values: np.ndarray
    method_tag: str = ""
    params_digest: str = ""

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 2:
            raise ParameterError("saliency values must be a 2-D array")
        if not np.isfinite(v).all() or v.min() < 0.0:
            raise ParameterError("saliency values must be finite and >= 0")
        object.__setattr__(self, "values", v)

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]


def _read_pgm_tokens(raw: bytes, n: int):
    """Yield the first *n* whitespace-separated ASCII tokens, '#' comments stripped.

    Returns (tokens, offset_past_last_token).
    """
    tokens = []
    i = 0
    size = len(raw)
    while len(tokens) < n and i < size:
        c = raw[i : i + 1]
        if c == b"#":
            while i < size and raw[i : i + 1] not in (b"\n", b"\r"):
                i += 1
        elif c.isspace():
            i += 1
        else:
            j = i
            while j < size and not raw[j : j + 1].isspace() and raw[j : j + 1] != b"#":
                j += 1
            tokens.append(raw[i:j])
            i = j
    if len(tokens) < n:
        raise FormatError("truncated PGM header")
    return tokens, i


def _load_pgm(raw: bytes) -> np.ndarray:
    magic, _ = _read_pgm_tokens(raw, 1)
    magic = magic[0].decode("ascii", "replace")
    if magic not in ("P2", "P5"):
        raise FormatError(f"unsupported PNM variant {magic!r}; only PGM P2/P5")
    tokens, offset = _read_pgm_tokens(raw, 4)
    try:
        width, height, maxval = (int(t) for t in tokens[1:4])
    except ValueError:
        raise FormatError("non-numeric PGM header field") from None
    if width <= 0 or height <= 0:
        raise FormatError("PGM dimensions must be positive")
    if not 0 < maxval <= 255:
        raise FormatError(f"unsupported PGM bit depth (maxval={maxval}); only 8-bit")
    n = width * height
    if magic == "P5":
        pixels = raw[offset + 1 : offset + 1 + n]  # exactly one whitespace after maxval
        if len(pixels) < n:
            raise FormatError("truncated PGM pixel data")
        arr = np.frombuffer(pixels, dtype=np.uint8, count=n).astype(np.float64)
    else:
        try:
            vals, _ = _read_pgm_tokens(raw[offset:], n)
            arr = np.array([int(v) for v in vals], dtype=np.float64)
        except FormatError:
            raise FormatError("truncated PGM pixel data") from None
        except ValueError:
            raise FormatError("non-numeric P2 pixel value") from None
        if (arr < 0).any() or (arr > maxval).any():
            raise FormatError("P2 pixel value out of range")
    return (arr / 255.0).reshape(height, width)


def _load_png(path) -> np.ndarray:
    try:
        with _PILImage.open(path) as im:
            im.load()
            mode = im.mode
            if mode == "L":
                return np.asarray(im, dtype=np.float64) / 255.0
            if mode == "RGB":
                rgb = np.asarray(im, dtype=np.float64)
                luma = _LUMA[0] * rgb[..., 0] + _LUMA[1] * rgb[..., 1] + _LUMA[2] * rgb[..., 2]
                return luma / 255.0
            raise FormatError(f"unsupported PNG mode {mode!r}; only grayscale (L) or RGB")
    except FormatError:
        raise
    except (UnidentifiedImageError, SyntaxError, OSError) as exc:
        # Pillow raises OSError for truncated streams; unreadable files are
        # caught before Pillow ever sees them (see load_image).
        raise FormatError(f"corrupt or truncated PNG: {exc}") from exc


def load_image(path) -> Image:
    """Decode a PGM (P2/P5) or PNG file into a normalized grayscale Image."""
    with open(path, "rb") as fh:
        head = fh.read(8)
    if head[:2] in (b"P2", b"P5"):
        with open(path, "rb") as fh:
            return Image(_load_pgm(fh.read()))
    if head[:8] == b"\x89PNG\r\n\x1a\n":
        return Image(_load_png(path))
    raise FormatError("unrecognized image format; expected PGM (P2/P5) or PNG")


def load_fixations(path, image: Image) -> FixationSet:
    """Read an ``x,y`` fixation CSV, clamping out-of-bounds points to the frame.

    Clamping (rather than rejection) keeps points that eye-tracker jitter
    pushed a pixel or two outside the frame.  Duplicates are preserved.
    """
    points = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise FixationParseError(f"{path}: empty fixation file (missing header)") from None
        if [c.strip().lower() for c in header[:2]] != ["x", "y"]:
            raise FixationParseError(f"{path}: line 1: expected header 'x,y'")
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) < 2:
                raise FixationParseError(f"{path}: line {lineno}: expected two columns")
            try:
                x = float(row[0])
                y = float(row[1])
            except ValueError:
                raise FixationParseError(
                    f"{path}: line {lineno}: non-numeric coordinate {row[:2]!r}"
                ) from None
            xi = min(max(int(round(x)), 0), image.width - 1)
            yi = min(max(int(round(y)), 0), image.height - 1)
            points.append((xi, yi))
    image_id = os.path.splitext(os.path.basename(str(path)))[0]
    return FixationSet(image_id=image_id, points=tuple(points))


def write_map(smap: SaliencyMap, path) -> None:
    """Write an 8-bit P5 PGM, rescaling [min, max] -> [0, 255] (round half up).

    A constant map writes all zeros.  A ``<path>.txt`` sidecar records the
    method tag, parameter digest and the pre-rescale min/max.
    """
    v = smap.values
    lo = float(v.min())
    hi = float(v.max())
    if hi > lo:
        pix = np.floor((v - lo) / (hi - lo) * 255.0 + 0.5).astype(np.uint8)
    else:
        pix = np.zeros_like(v, dtype=np.uint8)
    header = f"P5\n{smap.width} {smap.height}\n255\n".encode("ascii")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(pix.tobytes())
    with open(f"{path}.txt", "w") as fh:
        fh.write(f"method_tag={smap.method_tag}\n")
        fh.write(f"params_digest={smap.params_digest}\n")
        fh.write(f"min={lo!r}\n")
        fh.write(f"max={hi!r}\n")
