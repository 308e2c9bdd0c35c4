import math

import numpy as np
import pytest

from sketchopt.vectorizer import LineSegment, VectorScene


def make_segment(x0, y0, x1, y1, gain=0.5, width=1.0):
    return LineSegment(p0=(float(x0), float(y0)), p1=(float(x1), float(y1)),
                       gain=gain, width_estimate=width)


def make_scene(*segments, size=(200, 200)):
    return VectorScene(
        segments=tuple(segments), image_size=size, luminosity_range=1.0
    )


def square_scene(x0=20.0, y0=20.0, side=10.0):
    """Axis-aligned square outline as four segments."""
    x1, y1 = x0 + side, y0 + side
    return make_scene(
        make_segment(x0, y0, x1, y0),
        make_segment(x1, y0, x1, y1),
        make_segment(x1, y1, x0, y1),
        make_segment(x0, y1, x0, y0),
    )


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def angle_diff(a, b):
    d = abs(a - b) % math.pi
    return min(d, math.pi - d)
