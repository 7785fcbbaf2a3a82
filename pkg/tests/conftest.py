from __future__ import annotations

import numpy as np
import pytest

from weilcalc.harness.sampling import Sampler
from weilcalc.prolongation import Microcube
from weilcalc.weil import FLOAT, RATIONAL


@pytest.fixture
def rsampler():
    return Sampler(11, RATIONAL)


@pytest.fixture
def fsampler():
    return Sampler(12, FLOAT)


def direction(t: Microcube) -> np.ndarray:
    """The b_1 entry of a tangent, as floats."""
    return np.array([float(v.scalar_part) for v in t.b({1})])


def value(x) -> float:
    return float(x.scalar_part)
