"""共用測試夾具：體、曲線 y² = x³ + 1 與固定種子的亂數產生器"""

import numpy as np
import pytest

from src.elliptic import Curve
from src.exact_core import Field


@pytest.fixture
def rationals():
    return Field(None)


@pytest.fixture
def fp():
    return Field(10007)


@pytest.fixture
def curve(fp):
    """y² = x³ + 1：含 (0, ±1)、(−1, 0)、(2, ±3)"""
    return Curve.make(fp, 0, 1)


@pytest.fixture
def rng():
    return np.random.default_rng(20240521)
