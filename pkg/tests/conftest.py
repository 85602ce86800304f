"""Shared fixtures and helpers for the test suite."""

import math

import numpy as np
import pytest

from bcvgeo.ambient import BcvParams
from bcvgeo.immersion import ParametricSurface

# parameter pairs exercised throughout: flat, product spaces, twisted models
PAIRS6 = [
    BcvParams(0.0, 0.0),
    BcvParams(1.0, 0.0),
    BcvParams(-1.0, 0.0),
    BcvParams(0.0, 0.5),
    BcvParams(1.0, 0.5),
    BcvParams(4.0, 1.0),
]

# non-space-form pairs that admit vertical cylinders of radius 0.5, 1 and 2
CYLINDER_PAIRS = [
    BcvParams(1.0, 0.0),
    BcvParams(0.0, 0.5),
    BcvParams(1.0, 1.0),
]


def make_rng(seed=42):
    return np.random.default_rng(seed)


def flat_plane():
    """z = 0 plane with the identity chart."""
    return ParametricSurface(
        lambda u, v: (u, v, 0.0),
        ((-1.0, 1.0), (-1.0, 1.0)),
        partials=lambda u, v: ((1.0, 0.0, 0.0), (0.0, 1.0, 0.0)),
        name="flat-plane",
    )


def sphere_surface(radius=1.0):
    """Round sphere in the flat ambient space, normal chosen so that the
    mean curvature comes out +2/R."""
    R = radius

    def chart(u, v):
        return (R * math.sin(u) * math.cos(v),
                R * math.sin(u) * math.sin(v),
                R * math.cos(u))

    def partials(u, v):
        xu = (R * math.cos(u) * math.cos(v),
              R * math.cos(u) * math.sin(v),
              -R * math.sin(u))
        xv = (-R * math.sin(u) * math.sin(v),
              R * math.sin(u) * math.cos(v),
              0.0)
        return xu, xv

    return ParametricSurface(chart, ((0.3, math.pi - 0.3), (0.0, 2 * math.pi)),
                             partials=partials, normal_sign=-1.0, name="sphere")


@pytest.fixture
def rng():
    return make_rng()
