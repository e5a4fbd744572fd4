"""
Shared fixtures: the two-plane example map and random finite laminations
"""

import math
from typing import Tuple

import numpy as np
import pytest

from ads_earthquake.circlemap import TwoPlaneVariant, two_plane_map
from ads_earthquake.mobius import IDENTITY, INFINITY, ZERO, Geodesic, Mobius, RP1Point, Side
from ads_earthquake.models import LaminationSpec

# z -> z/4; id on the negative reals and z -> 4z on the positive reals
QUARTER = Mobius(0.5, 0.0, 0.0, 2.0)


def random_lamination(
    rng: np.random.Generator,
    n: int,
    side: Side = Side.LEFT,
    weight_range: Tuple[float, float] = (0.2, 1.5),
    through_infinity: bool = False,
) -> LaminationSpec:
    """n disjoint leaves: a random non-crossing matching of 2n random circle points"""
    # jittered equal spacing keeps endpoints apart
    spacing = math.pi / n
    angles = 0.1 + spacing * (np.arange(2 * n) + rng.uniform(-0.3, 0.3, 2 * n))
    if through_infinity:
        angles[0] = 0.0
    stack, leaves, opened = [], [], 0
    for k in range(2 * n):
        must_open = not stack
        may_open = opened < n
        if may_open and (must_open or rng.random() < 0.5):
            stack.append(k)
            opened += 1
        else:
            start = stack.pop()
            leaves.append(Geodesic(RP1Point.from_angle(angles[start]), RP1Point.from_angle(angles[k])))
    weights = tuple(float(w) for w in rng.uniform(*weight_range, n))
    return LaminationSpec(tuple(leaves), weights, side, 0)


@pytest.fixture
def simple_map():
    return two_plane_map(IDENTITY, QUARTER, TwoPlaneVariant.PLUS)


@pytest.fixture
def simple_spec():
    return LaminationSpec((Geodesic(INFINITY, ZERO),), (math.log(4.0),), Side.LEFT, 0)


@pytest.fixture
def nested_spec():
    leaves = (
        Geodesic(RP1Point.from_real(-1.0), RP1Point.from_real(1.0)),
        Geodesic(RP1Point.from_real(-2.0), RP1Point.from_real(2.0)),
    )
    return LaminationSpec(leaves, (0.7, 1.1), Side.LEFT, 0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240617)
