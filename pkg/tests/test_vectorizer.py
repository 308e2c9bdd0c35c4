import json
import math

import numpy as np
import pytest

from sketchopt.errors import ParamError
from sketchopt.raster import RasterImage, build_pyramid, overall_luminosity
from sketchopt.vectorizer import (
    DetectorParams,
    LevelResponse,
    Vectorizer,
    detect_linearity,
    merge_resolutions,
    snap_orthogonal,
)

from conftest import angle_diff, make_scene, make_segment


def vectorize_array(arr, **kwargs):
    vec = Vectorizer(snap_tol_deg=0, **kwargs)
    return vec.transform(RasterImage.from_array(arr, source_depth=32))


def detect_merged(arr, params=None):
    img = RasterImage.from_array(arr, source_depth=32)
    stack = build_pyramid(img, 5)
    params = params or DetectorParams()
    responses = detect_linearity(stack, params)
    return merge_resolutions(
        responses,
        params,
        luminosity_range=overall_luminosity(img),
        base_intensity=img.intensity,
    )


class TestDetectLinearity:
    def test_low_contrast_line_detected_with_orientation(self):
        # range pinned to 1 by reference pixels; line contrast 0.05% of range
        arr = np.ones((64, 64))
        arr[2, 2] = 0.0
        arr[2, 3] = 1.0
        arr[40, 8:56] = 0.9995
        merged = detect_merged(arr)
        # at exactly-threshold contrast only full-support pixels respond:
        # the strip needs its whole 21-sample length on the stroke
        on_line = merged.flag[40, 19:45]
        assert on_line.all()
        orients = merged.orientation[40, 19:45]
        dev = np.minimum(orients % math.pi, math.pi - (orients % math.pi))
        assert dev.max() <= 0.05

    def test_constant_image_no_linearity(self):
        merged = detect_merged(np.full((64, 64), 0.6))
        assert not merged.flag.any()

    def test_diagonal_line_argmax_bin(self):
        arr = np.ones((96, 96))
        for i in range(15, 75):
            arr[i, i] = 0.5
        merged = detect_merged(arr)
        ys, xs = np.nonzero(merged.flag)
        onset = (ys >= 30) & (ys <= 60) & (ys == xs)
        assert onset.any()
        bin_width = math.pi / 16
        for theta in merged.orientation[ys[onset], xs[onset]]:
            assert angle_diff(theta, math.pi / 4) <= bin_width / 2 + 1e-9

    def test_param_validation(self):
        img = RasterImage.from_array(np.full((32, 32), 0.5))
        stack = build_pyramid(img, 2)
        with pytest.raises(ParamError):
            detect_linearity(stack, DetectorParams(orientations=3))
        with pytest.raises(ParamError):
            detect_linearity(stack, DetectorParams(threshold_fraction=0.0))
        with pytest.raises(ParamError):
            detect_linearity(stack, DetectorParams(strip_length=2, strip_width=1))

    def test_contrast_scale_equivariance(self):
        # affine intensity changes leave the detected set unchanged
        rng = np.random.default_rng(3)
        base = np.ones((96, 96))
        base[30, 20:70] = 0.4
        base[20:70, 60] = 0.4
        base[4, 4] = 0.0
        noise = rng.normal(0, 1e-3, base.shape)
        a1 = np.clip(base + noise, 0, 1)
        a2 = np.clip(0.5 * a1 + 0.25, 0, 1)
        m1 = detect_merged(a1)
        m2 = detect_merged(a2)
        assert np.array_equal(m1.flag, m2.flag)

    def test_rotation_shifts_argmax_bin(self):
        # rotating the line moves the best bin to the nearest bin multiple
        size = 129
        bin_width = math.pi / 16
        for k in (0, 2, 4, 6):
            theta = k * bin_width
            arr = np.ones((size, size))
            c = size // 2
            for t in np.linspace(-40, 40, 401):
                x = c + t * math.cos(theta)
                y = c + t * math.sin(theta)
                xi, yi = int(round(x)), int(round(y))
                if 0 <= xi < size and 0 <= yi < size:
                    arr[yi, xi] = 0.3
            merged = detect_merged(arr)
            assert merged.flag[c, c]
            assert angle_diff(merged.orientation[c, c], theta) <= bin_width / 2 + 1e-9


class TestMergeResolutions:
    def _level(self, shape, flags, gains, orients, level=0):
        gain = np.zeros(shape)
        orient = np.zeros(shape)
        flag = np.zeros(shape, dtype=bool)
        for (y, x), g, th in zip(flags, gains, orients):
            flag[y, x] = True
            gain[y, x] = g
            orient[y, x] = th
        return LevelResponse(level=level, gain=gain, orientation=orient, flag=flag)

    def test_single_contributor_identity(self):
        shape = (8, 8)
        levels = [self._level(shape, [(3, 4)], [0.02], [0.7])]
        for k in range(1, 5):
            h = (shape[0] + 2**k - 1) // 2**k
            w = (shape[1] + 2**k - 1) // 2**k
            levels.append(self._level((h, w), [], [], [], level=k))
        merged = merge_resolutions(levels)
        node = merged.response_at(4, 3)
        assert node is not None
        assert node.gain == pytest.approx(0.02)
        assert node.orientation == pytest.approx(0.7)
        assert node.level_weights == pytest.approx((1.0, 0.0, 0.0, 0.0, 0.0))
        assert sum(node.level_weights) == pytest.approx(1.0, abs=1e-9)

    def test_identical_orientation_preserved(self):
        theta = 1.1
        shape = (8, 8)
        levels = [self._level(shape, [(2, 2)], [0.01], [theta], level=0)]
        for k in range(1, 5):
            h = (shape[0] + 2**k - 1) // 2**k
            w = (shape[1] + 2**k - 1) // 2**k
            levels.append(
                self._level((h, w), [(2 >> k, 2 >> k)], [0.01 / 2**k], [theta], level=k)
            )
        merged = merge_resolutions(levels)
        node = merged.response_at(2, 2)
        assert node.orientation == pytest.approx(theta)
        assert sum(node.level_weights) == pytest.approx(1.0, abs=1e-9)

    def test_antipodal_cancellation_rejected(self):
        # equal gains at orientations 0 and pi/2: doubled angles cancel
        shape = (4, 4)
        l0 = self._level(shape, [(1, 1)], [0.01], [0.0], level=0)
        l1 = self._level((2, 2), [(0, 0)], [0.01], [math.pi / 2], level=1)
        merged = merge_resolutions([l0, l1])
        assert merged.response_at(1, 1) is None
        assert not merged.flag[1, 1]
        # hand evaluation: v = 0.5*0.01*(1,0) + 0.5*0.01*(-1,0) = 0
        v = 0.5 * 0.01 * np.array([1, 0]) + 0.5 * 0.01 * np.array([-1, 0])
        assert np.hypot(*v) == pytest.approx(0.0, abs=1e-15)


class TestTraceSegments:
    def test_clean_horizontal_stroke_single_segment(self):
        arr = np.ones((128, 128))
        arr[20, 10:91] = 0.5
        scene = vectorize_array(arr)
        assert len(scene.segments) == 1
        seg = scene.segments[0]
        ends = sorted([seg.p0, seg.p1])
        assert math.hypot(ends[0][0] - 10, ends[0][1] - 20) <= 2.0
        assert math.hypot(ends[1][0] - 90, ends[1][1] - 20) <= 2.0

    def test_empty_field_empty_scene(self):
        scene = vectorize_array(np.full((64, 64), 0.8))
        assert scene.segments == ()

    def test_l_shape_two_segments_meeting_at_corner(self):
        arr = np.ones((96, 96))
        arr[20, 20:71] = 0.4
        arr[20:71, 20] = 0.4
        scene = vectorize_array(arr)
        assert len(scene.segments) == 2
        corner_dists = []
        for seg in scene.segments:
            d = min(
                math.hypot(seg.p0[0] - 20, seg.p0[1] - 20),
                math.hypot(seg.p1[0] - 20, seg.p1[1] - 20),
            )
            corner_dists.append(d)
        assert max(corner_dists) <= 2.0

    def test_min_length_discard(self):
        arr = np.ones((64, 64))
        arr[30, 28:34] = 0.3  # 6 px < default min_length 8
        scene = vectorize_array(arr)
        assert scene.segments == ()

    def test_rectangle_four_segments(self):
        arr = np.ones((128, 128))
        arr[20, 20:101] = 0.5
        arr[100, 20:101] = 0.5
        arr[20:101, 20] = 0.5
        arr[20:101, 100] = 0.5
        scene = vectorize_array(arr)
        assert len(scene.segments) == 4
        corners = [(20, 20), (100, 20), (100, 100), (20, 100)]
        for seg in scene.segments:
            for p in (seg.p0, seg.p1):
                assert min(math.hypot(p[0] - cx, p[1] - cy) for cx, cy in corners) <= 2.0


class TestSnapOrthogonal:
    def test_near_horizontal_snaps(self):
        seg = make_segment(0, 0, 50, 50 * math.tan(math.radians(1.2)))
        scene = make_scene(seg)
        out = snap_orthogonal(scene, 5.0)
        snapped = out.segments[0]
        assert snapped.p0[1] == snapped.p1[1]
        assert snapped.midpoint == pytest.approx(seg.midpoint)
        assert snapped.length == pytest.approx(seg.length)

    def test_outside_tolerance_unchanged(self):
        seg = make_segment(0, 0, 50, 50 * math.tan(math.radians(30)))
        out = snap_orthogonal(make_scene(seg), 5.0)
        assert out.segments[0] == seg

    def test_jittered_rectangle_fully_axis_aligned(self):
        rng = np.random.default_rng(11)
        corners = [(20.0, 20.0), (120.0, 20.0), (120.0, 90.0), (20.0, 90.0)]
        segs = []
        for (x0, y0), (x1, y1) in zip(corners, corners[1:] + corners[:1]):
            ang = math.atan2(y1 - y0, x1 - x0) + math.radians(rng.normal(0, 1.0))
            length = math.hypot(x1 - x0, y1 - y0)
            segs.append(
                make_segment(
                    x0, y0, x0 + length * math.cos(ang), y0 + length * math.sin(ang)
                )
            )
        out = snap_orthogonal(make_scene(segs[0], segs[1], segs[2], segs[3]), 5.0)
        for seg in out.segments:
            ang = seg.angle
            assert (
                angle_diff(ang, 0.0) < 1e-12 or angle_diff(ang, math.pi / 2) < 1e-12
            )

    def test_bad_tolerance(self):
        with pytest.raises(ParamError):
            snap_orthogonal(make_scene(make_segment(0, 0, 10, 0)), 45.0)


class TestDeterminism:
    def test_byte_identical_scene(self):
        rng = np.random.default_rng(21)
        arr = np.ones((128, 128))
        arr[30, 20:110] = 0.45
        arr[20:110, 70] = 0.45
        arr[4, 4] = 0.0
        arr = np.clip(arr + rng.normal(0, 1e-3, arr.shape), 0, 1)
        vec = Vectorizer()
        img = RasterImage.from_array(arr, source_depth=32)
        s1 = vec.transform(img)
        s2 = vec.transform(img)

        def encode(scene):
            return json.dumps(
                [[s.p0, s.p1, s.gain, s.width_estimate] for s in scene.segments]
            )

        assert encode(s1) == encode(s2)

    def test_estimator_get_params_roundtrip(self):
        vec = Vectorizer(threshold_fraction=1e-3, min_length=12.0)
        params = vec.get_params()
        clone = Vectorizer(**params)
        assert clone.get_params() == params
