"""Deterministic synthetic sketches: the case-study fixture and test corpora.

Everything here is reproducible from code (fixed seeds), so the bundled
fixture sketch is generated rather than stored as binary. The case-study
plan is an asymmetric layout whose three annotated walls can slide into a
doubly mirror-symmetric configuration, where the torsion proxy vanishes
and the stress proxy improves; the optimizer therefore has a known
dominating region to discover.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .raster import RasterImage

BG = 1.0
REF_PATCH = ((4, 6), (4, 6))  # black patch pinning luminosity range to 1


@dataclass(frozen=True)
class GroundTruthWall:
    orientation: str  # "h" or "v"
    center: float  # perpendicular coordinate of the stroke centerline
    lo: float  # along-axis span start
    hi: float  # along-axis span end


@dataclass(frozen=True)
class SyntheticPlan:
    image: RasterImage
    walls: tuple[GroundTruthWall, ...]
    contrast: float
    stroke_width: int
    marks: tuple[dict, ...] = field(default_factory=tuple)


def _draw_wall(arr, orientation, coord, lo, hi, contrast, width):
    c0, lo, hi = int(round(coord)), int(round(lo)), int(round(hi))
    rows = range(c0, c0 + width)
    for r in rows:
        if orientation == "h":
            arr[r, lo : hi + 1] = np.minimum(arr[r, lo : hi + 1], BG - contrast)
        else:
            arr[lo : hi + 1, r] = np.minimum(arr[lo : hi + 1, r], BG - contrast)


def _draw_mark(arr, x0, y0, x1, y1, cap_half, contrast):
    """One I-mark: a stem with perpendicular caps crossing both ends."""
    x0i, y0i, x1i, y1i = int(x0), int(y0), int(x1), int(y1)
    ch = int(cap_half)
    if y0i == y1i:  # horizontal stem, vertical caps
        _draw_wall(arr, "h", y0i, min(x0i, x1i), max(x0i, x1i), contrast, 1)
        for cx in (x0i, x1i):
            _draw_wall(arr, "v", cx, y0i - ch, y0i + ch, contrast, 1)
    else:  # vertical stem, horizontal caps
        _draw_wall(arr, "v", x0i, min(y0i, y1i), max(y0i, y1i), contrast, 1)
        for cy in (y0i, y1i):
            _draw_wall(arr, "h", cy, x0i - ch, x0i + ch, contrast, 1)


def case_study_sketch(noise_sigma: float = 0.0, seed: int = 0) -> SyntheticPlan:
    """The bundled three-variable fixture sketch (640x640).

    Outer square 80..560 plus three full-span interior walls, each drawn
    off its symmetric position and annotated with an I-mark: two verticals
    (drawn at 270 and 370; symmetric at 240 and 400) and one horizontal
    (drawn at 270; symmetric at 320). Mark lengths 120/120/140 give ranges
    wide enough to reach the symmetric layout.
    """
    size = 640
    contrast = 0.55
    arr = np.full((size, size), BG)
    walls = [
        GroundTruthWall("h", 80, 80, 560),
        GroundTruthWall("h", 560, 80, 560),
        GroundTruthWall("v", 80, 80, 560),
        GroundTruthWall("v", 560, 80, 560),
        GroundTruthWall("v", 270, 80, 560),
        GroundTruthWall("v", 370, 80, 560),
        GroundTruthWall("h", 270, 80, 560),
    ]
    for w in walls:
        _draw_wall(arr, w.orientation, w.center, w.lo, w.hi, contrast, 1)
    marks = (
        # horizontal stem across the first vertical wall (x=270)
        {"stem": ((210.0, 180.0), (330.0, 180.0)), "target_axis_x": 270.0},
        # horizontal stem across the second vertical wall (x=370)
        {"stem": ((310.0, 460.0), (430.0, 460.0)), "target_axis_x": 370.0},
        # vertical stem across the horizontal wall (y=270)
        {"stem": ((180.0, 200.0), (180.0, 340.0)), "target_axis_y": 270.0},
    )
    for m in marks:
        (x0, y0), (x1, y1) = m["stem"]
        _draw_mark(arr, x0, y0, x1, y1, cap_half=8, contrast=contrast)
    (r0, r1), (c0, c1) = REF_PATCH
    arr[r0:r1, c0:c1] = 0.0
    if noise_sigma > 0:
        rng = np.random.default_rng(seed)
        arr = np.clip(arr + rng.normal(0, noise_sigma, arr.shape), 0.0, 1.0)
    img = RasterImage.from_array(arr, source_depth=32)
    return SyntheticPlan(
        image=img,
        walls=tuple(walls),
        contrast=contrast,
        stroke_width=1,
        marks=marks,
    )


def random_orthogonal_plan(
    rng: np.random.Generator,
    size: int = 1024,
    margin: int = 80,
    min_walls: int = 5,
    max_walls: int = 25,
    noise_sigma: float = 1e-3,
    min_spacing: float = 16.0,
) -> SyntheticPlan:
    """A random orthogonal floorplan with known centerline ground truth.

    Perimeter rectangle plus interior walls spanning between two existing
    perpendicular walls; parallel walls keep min_spacing. One stroke
    contrast per plan (a sketch has one pen), stroke width 1 or 2 px,
    additive Gaussian noise, and a black reference patch pinning the
    luminosity range to 1.
    """
    x0 = y0 = margin
    x1 = y1 = size - margin
    contrast = float(rng.uniform(0.01, 0.6))
    width = int(rng.integers(1, 3))
    walls = [
        ("h", float(y0), float(x0), float(x1)),
        ("h", float(y1), float(x0), float(x1)),
        ("v", float(x0), float(y0), float(y1)),
        ("v", float(x1), float(y0), float(y1)),
    ]
    hs = [float(y0), float(y1)]
    vs = [float(x0), float(x1)]
    n_target = int(rng.integers(min_walls, max_walls + 1))
    tries = 0
    while len(walls) < n_target and tries < 500:
        tries += 1
        if rng.random() < 0.5:
            cand = float(rng.uniform(x0 + 30, x1 - 30))
            if min(abs(cand - v) for v in vs) < min_spacing:
                continue
            lo, hi = sorted(rng.choice(hs, 2, replace=False))
            if hi - lo < 60:
                continue
            walls.append(("v", cand, float(lo), float(hi)))
            vs.append(cand)
        else:
            cand = float(rng.uniform(y0 + 30, y1 - 30))
            if min(abs(cand - h) for h in hs) < min_spacing:
                continue
            lo, hi = sorted(rng.choice(vs, 2, replace=False))
            if hi - lo < 60:
                continue
            walls.append(("h", cand, float(lo), float(hi)))
            hs.append(cand)
    arr = np.full((size, size), BG)
    gt = []
    for orientation, coord, lo, hi in walls:
        c0 = int(round(coord))
        _draw_wall(arr, orientation, c0, lo, hi, contrast, width)
        center = float(c0) if width == 1 else c0 + 0.5
        gt.append(
            GroundTruthWall(orientation, center, float(round(lo)), float(round(hi)))
        )
    (r0, r1), (c0_, c1_) = REF_PATCH
    arr[r0:r1, c0_:c1_] = 0.0
    if noise_sigma > 0:
        arr = np.clip(arr + rng.normal(0, noise_sigma, arr.shape), 0.0, 1.0)
    return SyntheticPlan(
        image=RasterImage.from_array(arr, source_depth=32),
        walls=tuple(gt),
        contrast=contrast,
        stroke_width=width,
    )


def marked_scene_plan(
    rng: np.random.Generator,
    n_marks: int,
    size: int = 1024,
) -> SyntheticPlan:
    """A plan with n well-separated I-marks bound to distinct interior walls.

    Interior walls are spaced widely enough that every mark's nearest
    eligible axis is unambiguous.
    """
    if not 0 <= n_marks <= 10:
        raise ValueError("n_marks must be in [0, 10]")
    margin = 80
    x0 = y0 = margin
    x1 = y1 = size - margin
    contrast = 0.5
    arr = np.full((size, size), BG)
    walls = [
        GroundTruthWall("h", y0, x0, x1),
        GroundTruthWall("h", y1, x0, x1),
        GroundTruthWall("v", x0, y0, y1),
        GroundTruthWall("v", x1, y0, y1),
    ]
    marks = []
    # Interior vertical walls, evenly spaced; one mark per wall.
    slots = np.linspace(x0 + 90, x1 - 90, max(n_marks, 1))
    for k in range(n_marks):
        wx = float(round(slots[k]))
        walls.append(GroundTruthWall("v", wx, y0, y1))
        stem_len = float(rng.integers(40, 71))
        my = float(round(rng.uniform(y0 + 120, y1 - 120)))
        half = stem_len / 2.0
        marks.append(
            {
                "stem": ((wx - half, my), (wx + half, my)),
                "target_axis_x": wx,
                "length": stem_len,
            }
        )
    for w in walls:
        _draw_wall(arr, w.orientation, w.center, w.lo, w.hi, contrast, 1)
    for m in marks:
        (sx0, sy0), (sx1, sy1) = m["stem"]
        _draw_mark(arr, sx0, sy0, sx1, sy1, cap_half=8, contrast=contrast)
    (r0, r1), (c0_, c1_) = REF_PATCH
    arr[r0:r1, c0_:c1_] = 0.0
    return SyntheticPlan(
        image=RasterImage.from_array(arr, source_depth=32),
        walls=tuple(walls),
        contrast=contrast,
        stroke_width=1,
        marks=tuple(marks),
    )
