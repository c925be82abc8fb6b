import numpy as np
import pytest

from gridprop import build_planar_graph, minimum_spanning_tree


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_guide(rng, height, width, channels=1, integer=False):
    """Random guide in [0, 1]; integer guides quantize to 8-bit levels."""
    if integer:
        return rng.integers(0, 256, size=(height, width, channels)).astype(np.float64) / 255.0
    return rng.random((height, width, channels))


def random_field(rng, height, width, channels=1, scale=3.0):
    return rng.normal(size=(channels, height, width)) * scale


def grid_tree(guide):
    return minimum_spanning_tree(build_planar_graph(guide))
