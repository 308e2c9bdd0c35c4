"""Raster loading, normalization, and the multi-resolution pyramid.

Images are normalized to a grayscale intensity field in [0, 1] regardless of
source bit depth. The pyramid halves the linear resolution per level with a
2x2 box filter; edge rows/columns of odd-sized levels pool over the pixels
that actually exist, so each cell stores the true mean of its source pixels
and total intensity mass is conserved exactly.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import FormatError, IoError, ParamError

# Rec. 709 luma weights used to collapse RGB to luminosity.
LUMA_WEIGHTS = (0.2126, 0.7152, 0.0722)


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr, dtype=np.float64)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class RasterImage:
    """Normalized grayscale image: row-major intensity field in [0, 1]."""

    width: int
    height: int
    intensity: np.ndarray  # shape (height, width), float64, read-only
    source_depth: int = 8

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise FormatError(f"zero-dimension image: {self.width}x{self.height}")
        arr = self.intensity
        if arr.shape != (self.height, self.width):
            raise FormatError(
                f"intensity shape {arr.shape} does not match "
                f"{self.height}x{self.width}"
            )
        if arr.size and (arr.min() < 0.0 or arr.max() > 1.0):
            raise FormatError("intensity values must lie in [0, 1]")
        object.__setattr__(self, "intensity", _freeze(arr))

    @classmethod
    def from_array(cls, arr: np.ndarray, source_depth: int = 8) -> "RasterImage":
        arr = np.asarray(arr, dtype=np.float64)
        if arr.ndim != 2:
            raise FormatError(f"expected a 2D array, got shape {arr.shape}")
        h, w = arr.shape
        return cls(width=w, height=h, intensity=arr, source_depth=source_depth)

    def mean_intensity(self) -> float:
        return float(self.intensity.mean())


@dataclass(frozen=True)
class ResolutionStack:
    """Resolution pyramid: level 0 native, each level half the linear size."""

    levels: list[RasterImage] = field(default_factory=list)

    @property
    def level_count(self) -> int:
        return len(self.levels)

    @property
    def base(self) -> RasterImage:
        return self.levels[0]


def load_raster(path: str | Path) -> RasterImage:
    """Load a PNG/PGM/PFM file as a normalized grayscale RasterImage.

    RGB inputs are collapsed with Rec. 709 luma weights; integer samples are
    scaled to [0, 1] by the source bit depth, which is recorded as
    ``source_depth`` (32 denotes float sources).
    """
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    if data[:2] in (b"P2", b"P5"):
        return _parse_pgm(data, path)
    if data[:2] in (b"PF", b"Pf"):
        return _parse_pfm(data, path)
    return _load_with_pillow(path)


def _load_with_pillow(path: Path) -> RasterImage:
    try:
        from PIL import Image, UnidentifiedImageError
    except ImportError as exc:  # pragma: no cover
        raise FormatError("Pillow is required for PNG input") from exc
    try:
        img = Image.open(path)
        img.load()
    except UnidentifiedImageError as exc:
        raise FormatError(f"unsupported image format: {path}") from exc
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc

    if img.mode == "P":
        img = img.convert("RGB")
    if img.mode == "L":
        arr = np.asarray(img, dtype=np.float64) / 255.0
        depth = 8
    elif img.mode in ("I;16", "I;16B", "I;16L"):
        arr = np.asarray(img, dtype=np.float64) / 65535.0
        depth = 16
    elif img.mode == "I":
        raw = np.asarray(img, dtype=np.float64)
        # 16-bit grayscale PNG decoded to 32-bit integers keeps 16-bit range.
        arr = raw / 65535.0
        depth = 16
    elif img.mode == "RGB":
        rgb = np.asarray(img, dtype=np.float64) / 255.0
        arr = rgb @ np.array(LUMA_WEIGHTS)
        depth = 8
    elif img.mode == "RGBA":
        rgb = np.asarray(img, dtype=np.float64)[..., :3] / 255.0
        arr = rgb @ np.array(LUMA_WEIGHTS)
        depth = 8
    else:
        raise FormatError(f"unsupported image mode {img.mode!r}: {path}")
    arr = np.clip(arr, 0.0, 1.0)
    if arr.ndim != 2 or arr.size == 0:
        raise FormatError(f"zero-dimension image: {path}")
    return RasterImage.from_array(arr, source_depth=depth)


def _pgm_tokens(data: bytes):
    """Yield whitespace-separated header tokens, skipping '#' comments."""
    i = 0
    n = len(data)
    while i < n:
        c = data[i : i + 1]
        if c.isspace():
            i += 1
            continue
        if c == b"#":
            while i < n and data[i : i + 1] != b"\n":
                i += 1
            continue
        j = i
        while j < n and not data[j : j + 1].isspace():
            j += 1
        yield data[i:j], j
        i = j


def _parse_pgm(data: bytes, path: Path) -> RasterImage:
    tokens = _pgm_tokens(data)
    try:
        magic, _ = next(tokens)
        w_tok, _ = next(tokens)
        h_tok, _ = next(tokens)
        max_tok, end = next(tokens)
        width, height, maxval = int(w_tok), int(h_tok), int(max_tok)
    except (StopIteration, ValueError) as exc:
        raise FormatError(f"malformed PGM header: {path}") from exc
    if width < 1 or height < 1:
        raise FormatError(f"zero-dimension image: {path}")
    if maxval < 1 or maxval > 65535:
        raise FormatError(f"unsupported PGM maxval {maxval}: {path}")
    count = width * height
    if magic == b"P2":
        try:
            values = np.array(
                data[end:].split()[:count], dtype=np.float64
            )
        except ValueError as exc:
            raise FormatError(f"malformed P2 samples: {path}") from exc
    else:
        raster = data[end + 1 :]
        if maxval > 255:
            need = count * 2
            if len(raster) < need:
                raise FormatError(f"truncated P5 raster: {path}")
            values = np.frombuffer(raster[:need], dtype=">u2").astype(np.float64)
        else:
            if len(raster) < count:
                raise FormatError(f"truncated P5 raster: {path}")
            values = np.frombuffer(raster[:count], dtype=np.uint8).astype(np.float64)
    if values.size != count:
        raise FormatError(f"PGM sample count mismatch: {path}")
    arr = (values / maxval).reshape(height, width)
    arr = np.clip(arr, 0.0, 1.0)
    depth = 16 if maxval > 255 else 8
    return RasterImage.from_array(arr, source_depth=depth)


def _parse_pfm(data: bytes, path: Path) -> RasterImage:
    tokens = _pgm_tokens(data)
    try:
        magic, _ = next(tokens)
        w_tok, _ = next(tokens)
        h_tok, _ = next(tokens)
        scale_tok, end = next(tokens)
        width, height, scale = int(w_tok), int(h_tok), float(scale_tok)
    except (StopIteration, ValueError) as exc:
        raise FormatError(f"malformed PFM header: {path}") from exc
    if width < 1 or height < 1:
        raise FormatError(f"zero-dimension image: {path}")
    channels = 3 if magic == b"PF" else 1
    count = width * height * channels
    dtype = "<f4" if scale < 0 else ">f4"
    raster = data[end + 1 :]
    if len(raster) < count * 4:
        raise FormatError(f"truncated PFM raster: {path}")
    values = np.frombuffer(raster[: count * 4], dtype=dtype).astype(np.float64)
    if channels == 3:
        rgb = values.reshape(height, width, 3)
        arr = rgb @ np.array(LUMA_WEIGHTS)
    else:
        arr = values.reshape(height, width)
    # PFM rasters are stored bottom-to-top.
    arr = np.flipud(arr)
    arr = np.clip(arr, 0.0, 1.0)
    return RasterImage.from_array(arr, source_depth=32)


def save_pgm16(img: RasterImage, path: str | Path) -> None:
    """Write the canonical debug output: P5 PGM, 16-bit big-endian samples."""
    path = Path(path)
    samples = np.round(img.intensity * 65535.0).astype(">u2")
    header = f"P5\n{img.width} {img.height}\n65535\n".encode("ascii")
    try:
        path.write_bytes(header + samples.tobytes())
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def _box_down(arr: np.ndarray, weights: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Halve both dimensions with a mass-conserving 2x2 box filter.

    Each output cell is the exact mean of its native source pixels: cells
    carry their source-pixel counts down the pyramid so that edge cells of
    odd-sized levels (which cover fewer native pixels) are weighted by
    their true footprint instead of diluting the mean.
    """
    h, w = arr.shape
    h2, w2 = (h + 1) // 2, (w + 1) // 2
    mass = np.zeros((h2, w2), dtype=np.float64)
    counts = np.zeros((h2, w2), dtype=np.float64)
    weighted = arr * weights
    for dy in (0, 1):
        for dx in (0, 1):
            part = weighted[dy::2, dx::2]
            wpart = weights[dy::2, dx::2]
            mass[: part.shape[0], : part.shape[1]] += part
            counts[: wpart.shape[0], : wpart.shape[1]] += wpart
    return mass / counts, counts


def pyramid_cell_counts(width: int, height: int, level: int) -> np.ndarray:
    """Source-pixel count per cell of a pyramid level (box-filter weights)."""
    f = 2**level
    xs = np.minimum(np.arange(0, width, f) + f, width) - np.arange(0, width, f)
    ys = np.minimum(np.arange(0, height, f) + f, height) - np.arange(0, height, f)
    return ys[:, None].astype(np.float64) * xs[None, :]


def build_pyramid(img: RasterImage, levels: int = 5) -> ResolutionStack:
    """Build a box-filter resolution pyramid with `levels` levels.

    Level 0 is the input unchanged; level k+1 halves level k. Construction
    stops early once a level reaches 1x1 (ceil-halving never produces an
    empty level, so fewer levels than requested is the only shortfall).
    """
    if levels < 1:
        raise ParamError(f"levels must be >= 1, got {levels}")
    out = [img]
    arr = img.intensity
    weights = np.ones_like(arr)
    for _ in range(levels - 1):
        if arr.shape == (1, 1):
            break
        arr, weights = _box_down(arr, weights)
        out.append(RasterImage.from_array(arr, source_depth=img.source_depth))
    return ResolutionStack(levels=out)


def overall_luminosity(img: RasterImage) -> float:
    """Dynamic range of the image: max - min intensity.

    Detection thresholds are expressed as fractions of this value, making
    them invariant to affine contrast changes.
    """
    arr = img.intensity
    return float(arr.max() - arr.min())
