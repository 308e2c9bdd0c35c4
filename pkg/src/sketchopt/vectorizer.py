"""Oriented line detection over a resolution pyramid and segment tracing.

Each pyramid level is filtered with a bank of oriented strip kernels: the
response is the difference between the candidate line's center strip and
the darker of two flanking strips offset perpendicular to it (a dark
stroke must beat BOTH flanks; a strip merely crossing a transverse stroke
cancels out). Dark strokes on a light background produce a positive
response equal to the stroke contrast. A pixel "contains linearity" when
its best response, expressed as a fraction of the level-0 luminosity
range, reaches the detection threshold and the pixel itself is darker
than its flanks (point features radiate strip responses from bright
pixels; the coherence test rejects them).

Per-level responses are merged at native resolution: only levels whose
response reached the threshold contribute, with weights proportional to
their gain, combined as a vector sum over doubled angles so that antipodal
orientations cancel instead of averaging to a bogus diagonal.

The merged field is traced into line segments by walking along the local
orientation from high-gain seeds, then refined by a least-squares fit.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, replace

import cv2
import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .errors import ParamError
from .raster import (
    RasterImage,
    ResolutionStack,
    build_pyramid,
    overall_luminosity,
)


@dataclass(frozen=True)
class DetectorParams:
    """Parameters of the oriented line filter bank."""

    orientations: int = 16
    threshold_fraction: float = 5e-4
    strip_length: int = 21
    strip_width: int = 1
    flank_offset: float = 2.0
    # Relative slack on the threshold comparison; absorbs float32
    # convolution round-off so boundary contrasts detect deterministically.
    threshold_slack: float = 5e-3
    # A linear pixel must itself sit on the stroke: its intensity must lie
    # below the flank level by at least this fraction of the response.
    # Point features (stroke ends, corners, isolated dots) radiate strip
    # responses from BRIGHT pixels; this coherence test rejects them.
    center_coherence: float = 0.5
    # Merged pixels must be darker than their local background by this
    # fraction of the merged gain; block-upsampled coarse flags otherwise
    # leak onto background pixels beside strong strokes.
    merge_coherence: float = 0.25
    coherence_window: int = 11

    def validate(self) -> None:
        if self.orientations < 4:
            raise ParamError(f"orientations must be >= 4, got {self.orientations}")
        if self.threshold_fraction <= 0:
            raise ParamError("threshold_fraction must be positive")
        if self.strip_length < 3 * self.strip_width:
            raise ParamError("strip_length must be >= 3x strip_width")
        if self.flank_offset <= 0:
            raise ParamError("flank_offset must be positive")


@dataclass(frozen=True)
class TracerParams:
    """Parameters of the greedy segment tracer."""

    angle_tol_deg: float = 10.0
    offset_tol: float = 1.5
    min_length: float = 8.0
    # Junction pixels carry the crossing stroke's orientation; the walk may
    # step over up to gap_tol consecutive non-joining pixels, and fitted
    # endpoints may extend through that many flagged junction-core pixels.
    gap_tol: int = 2
    # Optionally trim end pixels whose gain falls below this fraction of
    # the segment's upper-quartile gain (0 disables; gains already taper
    # legitimately where strokes meet junctions).
    end_trim_fraction: float = 0.0
    # A traceable pixel must have flagged pixels one step ahead AND behind
    # along its own orientation; isolated noise flags fail this. Gain
    # magnitudes are deliberately not compared: junction pixels carry
    # cancellation-suppressed gains that are still real structure.
    ridge_support: bool = True


@dataclass(frozen=True)
class NodeResponse:
    """Detection result at one native-resolution pixel."""

    position: tuple[float, float]
    orientation: float  # radians in [0, pi)
    gain: float  # fraction of the luminosity range
    level_weights: tuple[float, ...]


@dataclass(frozen=True)
class LevelResponse:
    """Best-orientation response field of a single pyramid level."""

    level: int
    gain: np.ndarray  # (h, w) float, fraction of luminosity range
    orientation: np.ndarray  # (h, w) float in [0, pi)
    flag: np.ndarray  # (h, w) bool, response reached the threshold


@dataclass(frozen=True)
class MergedField:
    """Cross-resolution merge of level responses at native resolution."""

    gain: np.ndarray  # (H, W) float64, zero where not linear
    orientation: np.ndarray  # (H, W) float64
    flag: np.ndarray  # (H, W) bool
    image_size: tuple[int, int]  # (width, height)
    luminosity_range: float
    level_count: int
    _weight_index: np.ndarray = field(repr=False, default=None)
    _weights: np.ndarray = field(repr=False, default=None)

    def response_at(self, x: int, y: int) -> NodeResponse | None:
        """Per-pixel NodeResponse, or None where no linearity was found."""
        if not self.flag[y, x]:
            return None
        flat = y * self.image_size[0] + x
        pos = int(np.searchsorted(self._weight_index, flat))
        weights = tuple(self._weights[pos])
        return NodeResponse(
            position=(float(x), float(y)),
            orientation=float(self.orientation[y, x]),
            gain=float(self.gain[y, x]),
            level_weights=weights,
        )


@dataclass(frozen=True)
class LineSegment:
    """Oriented segment in native pixel coordinates (y-down)."""

    p0: tuple[float, float]
    p1: tuple[float, float]
    gain: float
    width_estimate: float

    @property
    def length(self) -> float:
        return math.hypot(self.p1[0] - self.p0[0], self.p1[1] - self.p0[1])

    @property
    def direction(self) -> tuple[float, float]:
        L = self.length
        return ((self.p1[0] - self.p0[0]) / L, (self.p1[1] - self.p0[1]) / L)

    @property
    def angle(self) -> float:
        """Orientation in [0, pi)."""
        a = math.atan2(self.p1[1] - self.p0[1], self.p1[0] - self.p0[0])
        return a % math.pi

    @property
    def midpoint(self) -> tuple[float, float]:
        return ((self.p0[0] + self.p1[0]) / 2.0, (self.p0[1] + self.p1[1]) / 2.0)


@dataclass(frozen=True)
class VectorScene:
    """Vectorized sketch: segments plus the detection context."""

    segments: tuple[LineSegment, ...]
    image_size: tuple[int, int]
    luminosity_range: float
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        w, h = self.image_size
        for seg in self.segments:
            for px, py in (seg.p0, seg.p1):
                if not (-1.0 <= px <= w and -1.0 <= py <= h):
                    raise ParamError(
                        f"segment endpoint ({px}, {py}) outside image bounds"
                    )


_KERNEL_CACHE: dict[tuple, list[np.ndarray]] = {}


def _strip_kernels(params: DetectorParams) -> list[np.ndarray]:
    """Oriented strip-mean kernels for every orientation bin.

    Each kernel computes the mean intensity over an elongated strip
    (strip_length samples along the orientation, strip_width across),
    splatted bilinearly so fractional sample positions are exact.
    """
    key = (params.orientations, params.strip_length, params.strip_width)
    cached = _KERNEL_CACHE.get(key)
    if cached is not None:
        return cached
    radius = int(math.ceil((params.strip_length - 1) / 2.0)) + 1
    size = 2 * radius + 1
    ts = np.arange(params.strip_length, dtype=np.float64)
    ts -= (params.strip_length - 1) / 2.0
    ws = np.arange(params.strip_width, dtype=np.float64)
    ws -= (params.strip_width - 1) / 2.0
    n_samples = params.strip_length * params.strip_width
    kernels = []
    for b in range(params.orientations):
        theta = b * math.pi / params.orientations
        dx, dy = math.cos(theta), math.sin(theta)
        nx, ny = -dy, dx
        kern = np.zeros((size, size), dtype=np.float64)
        for t in ts:
            for wo in ws:
                px, py = t * dx + wo * nx, t * dy + wo * ny
                gx, gy = px + radius, py + radius
                x0, y0 = int(math.floor(gx)), int(math.floor(gy))
                fx, fy = gx - x0, gy - y0
                w = 1.0 / n_samples
                kern[y0, x0] += w * (1 - fx) * (1 - fy)
                kern[y0, x0 + 1] += w * fx * (1 - fy)
                kern[y0 + 1, x0] += w * (1 - fx) * fy
                kern[y0 + 1, x0 + 1] += w * fx * fy
        kernels.append(kern.astype(np.float32))
    _KERNEL_CACHE[key] = kernels
    return kernels


def _shift_bilinear(arr: np.ndarray, ox: float, oy: float) -> np.ndarray:
    """Sample arr at (x + ox, y + oy) with bilinear interpolation.

    Borders replicate, matching the convolution's border handling. The
    result keeps arr's dtype (no float64 upcast) and integer offsets
    return a view rather than a copy.
    """
    x0, y0 = math.floor(ox), math.floor(oy)
    fx = arr.dtype.type(ox - x0)
    fy = arr.dtype.type(oy - y0)
    one = arr.dtype.type(1)
    pad = max(abs(x0) + 1, abs(y0) + 1)
    padded = np.pad(arr, pad, mode="edge")
    H, W = arr.shape

    def window(ix: int, iy: int) -> np.ndarray:
        return padded[pad + iy : pad + iy + H, pad + ix : pad + ix + W]

    if fx == 0 and fy == 0:
        return window(x0, y0)
    out = (one - fx) * (one - fy) * window(x0, y0)
    if fx:
        out += fx * (one - fy) * window(x0 + 1, y0)
    if fy:
        out += (one - fx) * fy * window(x0, y0 + 1)
    if fx and fy:
        out += fx * fy * window(x0 + 1, y0 + 1)
    return out


def _flank_min(strip: np.ndarray, ox: float, oy: float) -> np.ndarray:
    """Elementwise min of the two flank strips at offsets +-(ox, oy).

    Shares one padded copy between both shifts; hot path of detection.
    """
    corners = [math.floor(v) for v in (ox, oy, -ox, -oy)]
    pad = max(abs(c) + 1 for c in corners)
    padded = np.pad(strip, pad, mode="edge")
    H, W = strip.shape
    one = strip.dtype.type(1)

    def sample(sx: float, sy: float) -> np.ndarray:
        x0, y0 = math.floor(sx), math.floor(sy)
        fx = strip.dtype.type(sx - x0)
        fy = strip.dtype.type(sy - y0)

        def window(ix: int, iy: int) -> np.ndarray:
            return padded[pad + iy : pad + iy + H, pad + ix : pad + ix + W]

        if fx == 0 and fy == 0:
            return window(x0, y0)
        out = (one - fx) * (one - fy) * window(x0, y0)
        if fx:
            out += fx * (one - fy) * window(x0 + 1, y0)
        if fy:
            out += (one - fx) * fy * window(x0, y0 + 1)
        if fx and fy:
            out += fx * fy * window(x0 + 1, y0 + 1)
        return out

    return np.minimum(sample(ox, oy), sample(-ox, -oy))


def detect_linearity(
    stack: ResolutionStack, params: DetectorParams | None = None
) -> list[LevelResponse]:
    """Run the oriented filter bank at every pyramid level.

    Returns one LevelResponse per level with the best-orientation gain
    (fraction of the level-0 luminosity range) and the linearity flag.
    """
    params = params or DetectorParams()
    params.validate()
    cv2.setNumThreads(1)
    lum_range = overall_luminosity(stack.base)
    kernels = _strip_kernels(params)
    thetas = np.array(
        [b * math.pi / params.orientations for b in range(params.orientations)],
        dtype=np.float32,
    )
    threshold = params.threshold_fraction * (1.0 - params.threshold_slack)
    reach = (kernels[0].shape[0] - 1) // 2 + int(math.ceil(params.flank_offset))
    out = []
    for level, img in enumerate(stack.levels):
        arr = img.intensity.astype(np.float32)
        if min(arr.shape) < 2 * reach + 1:
            # The filter has no full support anywhere at this level.
            out.append(
                LevelResponse(
                    level=level,
                    gain=np.zeros(arr.shape, dtype=np.float64),
                    orientation=np.zeros(arr.shape, dtype=np.float64),
                    flag=np.zeros(arr.shape, dtype=bool),
                )
            )
            continue
        best = np.full(arr.shape, -np.inf, dtype=np.float32)
        best_bin = np.zeros(arr.shape, dtype=np.int16)
        best_flank = np.zeros(arr.shape, dtype=np.float32)
        better = np.empty(arr.shape, dtype=bool)
        for b, kern in enumerate(kernels):
            theta = b * math.pi / params.orientations
            ox = -params.flank_offset * math.sin(theta)
            oy = params.flank_offset * math.cos(theta)
            strip = cv2.filter2D(
                arr, cv2.CV_32F, kern, borderType=cv2.BORDER_REPLICATE
            )
            # Conservative flank combination: a dark stroke must beat BOTH
            # flanking strips; this cancels strips crossing transverse
            # strokes and suppresses stroke-endpoint ghosts.
            flank = _flank_min(strip, ox, oy)
            resp = np.subtract(flank, strip, out=strip)
            np.greater(resp, best, out=better)
            best_bin[better] = b
            best_flank[better] = flank[better]
            np.maximum(best, resp, out=best)
        if lum_range > 0.0:
            gain = best / np.float32(lum_range)
            np.maximum(gain, 0.0, out=gain)
            flag = gain >= threshold
            if params.center_coherence > 0.0:
                flag &= (best_flank - arr) >= np.float32(
                    params.center_coherence
                ) * best
        else:
            gain = np.zeros(arr.shape, dtype=np.float32)
            flag = np.zeros(arr.shape, dtype=bool)
        if level > 0:
            # Coarse levels are context only; their border responses lean on
            # replicated padding and would upsample into junk blocks.
            flag[:reach, :] = False
            flag[-reach:, :] = False
            flag[:, :reach] = False
            flag[:, -reach:] = False
        out.append(
            LevelResponse(
                level=level,
                gain=gain,
                orientation=thetas[best_bin],
                flag=flag,
            )
        )
    return out


def merge_resolutions(
    responses: list[LevelResponse],
    params: DetectorParams | None = None,
    luminosity_range: float = 1.0,
    base_intensity: np.ndarray | None = None,
) -> MergedField:
    """Merge per-level responses into one native-resolution field.

    Coarse responses are upsampled by block replication. Only levels whose
    response reached the threshold contribute; contributions are combined
    with gain-proportional weights as a vector sum over doubled angles, and
    the merged pixel keeps its linearity only if the combined gain still
    reaches the threshold (antipodal orientations cancel).

    When the native raster is supplied, merged pixels must additionally be
    darker than their local background (block-upsampled coarse flags would
    otherwise spill onto background pixels beside strong strokes).
    """
    if not responses:
        raise ParamError("no level responses to merge")
    params = params or DetectorParams()
    threshold = params.threshold_fraction * (1.0 - params.threshold_slack)
    H, W = responses[0].gain.shape
    n_levels = len(responses)

    any_flag = np.zeros((H, W), dtype=bool)
    for r in responses:
        k = r.level
        up = np.repeat(np.repeat(r.flag, 2**k, axis=0), 2**k, axis=1)[:H, :W]
        any_flag |= up
    idx = np.flatnonzero(any_flag)
    ys, xs = np.divmod(idx, W)

    contrib_gain = np.zeros((idx.size, n_levels), dtype=np.float64)
    contrib_orient = np.zeros((idx.size, n_levels), dtype=np.float64)
    for j, r in enumerate(responses):
        k = r.level
        ly, lx = ys >> k, xs >> k
        flagged = r.flag[ly, lx]
        contrib_gain[:, j] = np.where(flagged, r.gain[ly, lx], 0.0)
        contrib_orient[:, j] = r.orientation[ly, lx]

    gsum = contrib_gain.sum(axis=1)
    weights = contrib_gain / gsum[:, None]
    wg = weights * contrib_gain
    vx = (wg * np.cos(2.0 * contrib_orient)).sum(axis=1)
    vy = (wg * np.sin(2.0 * contrib_orient)).sum(axis=1)
    merged_gain = np.hypot(vx, vy)
    merged_orient = (0.5 * np.arctan2(vy, vx)) % math.pi
    keep = merged_gain >= threshold
    if (
        base_intensity is not None
        and params.merge_coherence > 0.0
        and luminosity_range > 0.0
        and idx.size
    ):
        arr = np.asarray(base_intensity, dtype=np.float32)
        win = max(3, int(params.coherence_window))
        local_bg = cv2.dilate(arr, np.ones((win, win), dtype=np.uint8))
        depth = (local_bg.flat[idx] - arr.flat[idx]) / luminosity_range
        keep &= depth >= params.merge_coherence * merged_gain

    gain = np.zeros((H, W), dtype=np.float64)
    orient = np.zeros((H, W), dtype=np.float64)
    flag = np.zeros((H, W), dtype=bool)
    kept_idx = idx[keep]
    gain.flat[kept_idx] = merged_gain[keep]
    orient.flat[kept_idx] = merged_orient[keep]
    flag.flat[kept_idx] = True
    return MergedField(
        gain=gain,
        orientation=orient,
        flag=flag,
        image_size=(W, H),
        luminosity_range=luminosity_range,
        level_count=n_levels,
        _weight_index=kept_idx,
        _weights=weights[keep],
    )


def _angle_diff(a: float, b: float) -> float:
    d = abs(a - b) % math.pi
    return min(d, math.pi - d)


def _ridge_mask(field_: MergedField, require_support: bool) -> np.ndarray:
    """Pixels with flagged pixels one step ahead and behind along their own
    orientation. Isolated noise flags have no such along-track support."""
    orient, flag = field_.orientation, field_.flag
    H, W = flag.shape
    if not require_support:
        return flag.copy()
    idx = np.flatnonzero(flag)
    ys, xs = np.divmod(idx, W)
    theta = orient.flat[idx]
    dx = np.rint(np.cos(theta)).astype(np.int64)
    dy = np.rint(np.sin(theta)).astype(np.int64)

    def neighbor_flag(sign: int) -> np.ndarray:
        nx = np.clip(xs + sign * dx, 0, W - 1)
        ny = np.clip(ys + sign * dy, 0, H - 1)
        f = flag[ny, nx]
        off_grid = (xs + sign * dx != nx) | (ys + sign * dy != ny)
        return f & ~off_grid

    ok = neighbor_flag(1) & neighbor_flag(-1)
    mask = np.zeros((H, W), dtype=bool)
    mask.flat[idx[ok]] = True
    return mask


def _find_seeds(
    gain: np.ndarray, orient: np.ndarray, flag: np.ndarray, angle_tol: float
) -> np.ndarray:
    """Seed pixels: flagged local gain maxima with an aligned flagged neighbor.

    Returns flat indices ordered by descending gain, ties by (y, x).
    Works on the flagged subset only; full-frame neighborhood ops would
    touch every pixel of a mostly-empty field.
    """
    H, W = gain.shape
    idx = np.flatnonzero(flag)
    if idx.size == 0:
        return idx
    ys, xs = np.divmod(idx, W)
    g0 = gain.flat[idx]
    th0 = orient.flat[idx]
    local_max = np.ones(idx.size, dtype=bool)
    aligned = np.zeros(idx.size, dtype=bool)
    for dy in (-1, 0, 1):
        for dx in (-1, 0, 1):
            if dy == 0 and dx == 0:
                continue
            nx = xs + dx
            ny = ys + dy
            inb = (nx >= 0) & (nx < W) & (ny >= 0) & (ny < H)
            nidx = np.where(inb, ny * W + nx, 0)
            ng = np.where(inb, gain.flat[nidx], -1.0)
            nf = flag.flat[nidx] & inb
            local_max &= g0 >= ng
            d = np.abs(th0 - orient.flat[nidx]) % math.pi
            d = np.minimum(d, math.pi - d)
            aligned |= nf & (d < angle_tol)
    seeds = idx[local_max & aligned]
    if seeds.size == 0:
        return seeds
    order = np.lexsort((seeds % W, seeds // W, -gain.flat[seeds]))
    return seeds[order]


def _round_half_up(v: float) -> int:
    return int(math.floor(v + 0.5))


def trace_segments(
    field_: MergedField,
    params: TracerParams | None = None,
    provenance: dict | None = None,
) -> VectorScene:
    """Grow line segments greedily along the merged orientation field.

    Seeds are consumed in descending gain order. From each seed the walk
    steps one pixel at a time along the seed orientation (both ways); a
    pixel joins when its orientation matches within angle_tol and it lies
    within offset_tol of the seed line. Each pixel is consumed at most once.
    Segment ends are trimmed where the gain falls off, endpoints come from a
    least-squares fit, and segments shorter than min_length are discarded.
    """
    params = params or TracerParams()
    gain, orient = field_.gain, field_.orientation
    usable = field_.flag & _ridge_mask(field_, params.ridge_support)
    H, W = gain.shape
    angle_tol = math.radians(params.angle_tol_deg)
    seeds = _find_seeds(gain, orient, usable, angle_tol)
    segments: list[LineSegment] = []

    # Dict lookups over the usable pixels are an order of magnitude faster
    # than numpy scalar indexing in the per-pixel walk below. Consuming a
    # pixel = removing it from the pool.
    usable_idx = np.flatnonzero(usable)
    pool: dict[int, tuple[float, float]] = dict(
        zip(
            usable_idx.tolist(),
            zip(
                orient.flat[usable_idx].tolist(),
                gain.flat[usable_idx].tolist(),
            ),
        )
    )
    pi = math.pi
    half_pi = pi / 2.0

    for seed_flat in seeds:
        seed_flat = int(seed_flat)
        seed = pool.pop(seed_flat, None)
        if seed is None:
            continue
        sy, sx = seed_flat // W, seed_flat % W
        theta = seed[0]
        dx, dy = math.cos(theta), math.sin(theta)
        nx, ny = -dy, dx
        members_x = [sx]
        members_y = [sy]
        members_g = [seed[1]]
        for sign in (1.0, -1.0):
            px, py = float(sx), float(sy)
            gap = 0
            while gap <= params.gap_tol:
                px += sign * dx
                py += sign * dy
                best_g = -1.0
                best_xy = None
                for k in (0.0, 1.0, -1.0):
                    cx = int(math.floor(px + k * nx + 0.5))
                    cy = int(math.floor(py + k * ny + 0.5))
                    if cx < 0 or cy < 0 or cx >= W or cy >= H:
                        continue
                    entry = pool.get(cy * W + cx)
                    if entry is None:
                        continue
                    d = (entry[0] - theta) % pi
                    if d > half_pi:
                        d = pi - d
                    if d >= angle_tol:
                        continue
                    perp = (cx - sx) * nx + (cy - sy) * ny
                    if perp >= params.offset_tol or perp <= -params.offset_tol:
                        continue
                    g = entry[1]
                    if g > best_g or (
                        g == best_g and (cy, cx) < (best_xy[1], best_xy[0])
                    ):
                        best_g = g
                        best_xy = (cx, cy)
                if best_xy is None:
                    gap += 1
                    continue
                members_x.append(best_xy[0])
                members_y.append(best_xy[1])
                members_g.append(best_g)
                del pool[best_xy[1] * W + best_xy[0]]
                px, py = float(best_xy[0]), float(best_xy[1])
                gap = 0

        seg = _fit_segment(
            np.array(members_x, dtype=np.float64),
            np.array(members_y, dtype=np.float64),
            np.array(members_g, dtype=np.float64),
            params,
            bounds=field_.image_size,
        )
        if seg is not None:
            seg = _extend_into_junctions(seg, field_.flag, params.gap_tol)
            segments.append(seg)

    segments.sort(key=lambda s: (s.p0[1], s.p0[0], s.p1[1], s.p1[0]))
    return VectorScene(
        segments=tuple(segments),
        image_size=field_.image_size,
        luminosity_range=field_.luminosity_range,
        provenance=provenance or {},
    )


def _extend_into_junctions(
    seg: LineSegment, flag: np.ndarray, max_steps: int
) -> LineSegment:
    """Extend fitted endpoints through flagged junction-core pixels.

    Where a stroke terminates at a crossing stroke, the last pixels carry
    the crossing stroke's orientation and cannot join the walk; the fitted
    endpoint stops short of the junction. Extending geometrically through
    consecutive flagged pixels recovers the true corner without claiming
    those pixels as members.
    """
    if max_steps <= 0:
        return seg
    H, W = flag.shape
    ux, uy = seg.direction
    p0, p1 = seg.p0, seg.p1
    for sign, point in ((1.0, "p1"), (-1.0, "p0")):
        px, py = p1 if point == "p1" else p0
        steps = 0
        while steps < max_steps:
            nx_ = px + sign * ux
            ny_ = py + sign * uy
            cx, cy = _round_half_up(nx_), _round_half_up(ny_)
            if cx < 0 or cy < 0 or cx >= W or cy >= H or not flag[cy, cx]:
                break
            px, py = nx_, ny_
            steps += 1
        if point == "p1":
            p1 = (px, py)
        else:
            p0 = (px, py)
    if (p0, p1) == (seg.p0, seg.p1):
        return seg
    return replace(seg, p0=p0, p1=p1)


def _fit_segment(
    xs: np.ndarray,
    ys: np.ndarray,
    gs: np.ndarray,
    params: TracerParams,
    bounds: tuple[int, int] | None = None,
) -> LineSegment | None:
    if xs.size < 2:
        return None
    # Trim low-gain tails: beyond-end pixels respond at a fraction of the
    # stroke contrast and would otherwise stretch the endpoint outward.
    cx0, cy0 = xs.mean(), ys.mean()
    sxx = ((xs - cx0) ** 2).sum()
    syy = ((ys - cy0) ** 2).sum()
    sxy = ((xs - cx0) * (ys - cy0)).sum()
    ang = 0.5 * math.atan2(2.0 * sxy, sxx - syy)
    ux, uy = math.cos(ang), math.sin(ang)
    proj = (xs - cx0) * ux + (ys - cy0) * uy
    order = np.argsort(proj, kind="stable")
    xs, ys, gs, proj = xs[order], ys[order], gs[order], proj[order]
    if params.end_trim_fraction > 0.0:
        cutoff = params.end_trim_fraction * float(np.quantile(gs, 0.75))
        lo, hi = 0, xs.size
        while lo < hi and gs[lo] < cutoff:
            lo += 1
        while hi > lo and gs[hi - 1] < cutoff:
            hi -= 1
        if hi - lo < 2:
            return None
        xs, ys, gs = xs[lo:hi], ys[lo:hi], gs[lo:hi]

    cx, cy = xs.mean(), ys.mean()
    sxx = ((xs - cx) ** 2).sum()
    syy = ((ys - cy) ** 2).sum()
    sxy = ((xs - cx) * (ys - cy)).sum()
    ang = 0.5 * math.atan2(2.0 * sxy, sxx - syy)
    ux, uy = math.cos(ang), math.sin(ang)
    if ux < -1e-12 or (abs(ux) <= 1e-12 and uy < 0):
        ux, uy = -ux, -uy
    proj = (xs - cx) * ux + (ys - cy) * uy
    smin, smax = float(proj.min()), float(proj.max())
    if smax - smin < params.min_length:
        return None
    perp = -(xs - cx) * uy + (ys - cy) * ux
    p0 = (cx + smin * ux, cy + smin * uy)
    p1 = (cx + smax * ux, cy + smax * uy)
    if bounds is not None:
        w, h = bounds
        p0 = (min(max(p0[0], -1.0), float(w)), min(max(p0[1], -1.0), float(h)))
        p1 = (min(max(p1[0], -1.0), float(w)), min(max(p1[1], -1.0), float(h)))
    return LineSegment(
        p0=p0,
        p1=p1,
        gain=float(gs.mean()),
        width_estimate=1.0 + 2.0 * float(np.abs(perp).mean()),
    )


class Vectorizer(BaseEstimator, TransformerMixin):
    """Raster sketch to VectorScene, sklearn-style.

    Stateless transformer: ``fit`` is a no-op, ``transform`` accepts a
    RasterImage and returns the traced (and optionally axis-snapped) scene.
    All detector and tracer knobs are constructor parameters so the stage
    composes with pipelines and parameter search.
    """

    def __init__(
        self,
        levels=5,
        orientations=16,
        threshold_fraction=5e-4,
        strip_length=21,
        strip_width=1,
        flank_offset=2.0,
        center_coherence=0.5,
        merge_coherence=0.25,
        angle_tol_deg=10.0,
        offset_tol=1.5,
        min_length=8.0,
        gap_tol=2,
        end_trim_fraction=0.0,
        ridge_support=True,
        snap_tol_deg=5.0,
    ):
        self.levels = levels
        self.orientations = orientations
        self.threshold_fraction = threshold_fraction
        self.strip_length = strip_length
        self.strip_width = strip_width
        self.flank_offset = flank_offset
        self.center_coherence = center_coherence
        self.merge_coherence = merge_coherence
        self.angle_tol_deg = angle_tol_deg
        self.offset_tol = offset_tol
        self.min_length = min_length
        self.gap_tol = gap_tol
        self.end_trim_fraction = end_trim_fraction
        self.ridge_support = ridge_support
        self.snap_tol_deg = snap_tol_deg

    def _detector_params(self) -> DetectorParams:
        return DetectorParams(
            orientations=self.orientations,
            threshold_fraction=self.threshold_fraction,
            strip_length=self.strip_length,
            strip_width=self.strip_width,
            flank_offset=self.flank_offset,
            center_coherence=self.center_coherence,
            merge_coherence=self.merge_coherence,
        )

    def _tracer_params(self) -> TracerParams:
        return TracerParams(
            angle_tol_deg=self.angle_tol_deg,
            offset_tol=self.offset_tol,
            min_length=self.min_length,
            gap_tol=self.gap_tol,
            end_trim_fraction=self.end_trim_fraction,
            ridge_support=self.ridge_support,
        )

    def fit(self, X, y=None):
        return self

    def transform(self, X: RasterImage) -> VectorScene:
        det = self._detector_params()
        det.validate()
        stack = build_pyramid(X, self.levels)
        lum_range = overall_luminosity(stack.base)
        responses = detect_linearity(stack, det)
        merged = merge_resolutions(
            responses,
            det,
            luminosity_range=lum_range,
            base_intensity=stack.base.intensity,
        )
        scene = trace_segments(
            merged,
            self._tracer_params(),
            provenance={"detector": asdict(det), "tracer": asdict(self._tracer_params())},
        )
        if self.snap_tol_deg > 0:
            scene = snap_orthogonal(scene, self.snap_tol_deg)
        return scene


def snap_orthogonal(scene: VectorScene, tol_deg: float = 5.0) -> VectorScene:
    """Snap near-axis-aligned segments to exactly 0 or 90 degrees.

    Segments within tol_deg of horizontal or vertical are rotated about
    their midpoint; everything else passes through unchanged.
    """
    if not 0.0 <= tol_deg < 45.0:
        raise ParamError(f"tol_deg must be in [0, 45), got {tol_deg}")
    tol = math.radians(tol_deg)
    snapped = []
    for seg in scene.segments:
        ang = seg.angle
        mx, my = seg.midpoint
        half = seg.length / 2.0
        d_h = _angle_diff(ang, 0.0)
        d_v = _angle_diff(ang, math.pi / 2.0)
        if d_h <= tol:
            s = 1.0 if seg.p1[0] >= seg.p0[0] else -1.0
            seg = replace(
                seg, p0=(mx - s * half, my), p1=(mx + s * half, my)
            )
        elif d_v <= tol:
            s = 1.0 if seg.p1[1] >= seg.p0[1] else -1.0
            seg = replace(
                seg, p0=(mx, my - s * half), p1=(mx, my + s * half)
            )
        snapped.append(seg)
    return VectorScene(
        segments=tuple(snapped),
        image_size=scene.image_size,
        luminosity_range=scene.luminosity_range,
        provenance=scene.provenance,
    )
