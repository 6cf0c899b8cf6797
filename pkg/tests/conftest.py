import numpy as np
import pytest

from dynkc.metric import MetricSpace


def line_metric(xs):
    """Points on the real line; id i sits at xs[i]."""
    m = MetricSpace.euclidean(1)
    for i, x in enumerate(xs):
        m.add_point(i, [float(x)])
    return m


def plane_metric(pts):
    m = MetricSpace.euclidean(2)
    for i, p in enumerate(pts):
        m.add_point(i, [float(p[0]), float(p[1])])
    return m


def two_groups(rng, per=5, gap=100.0):
    """Two groups of unit diameter, gap apart."""
    pts = []
    for base in (0.0, gap):
        for _ in range(per):
            pts.append((base + rng.uniform(0, 0.5), rng.uniform(0, 0.5)))
    return plane_metric(pts)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
