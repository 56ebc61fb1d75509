import numpy as np
import pytest

from rydberg_xpm import defaults


@pytest.fixture
def params():
    return defaults.eit_params()


@pytest.fixture
def geom():
    return defaults.geometry()


@pytest.fixture
def blk():
    return defaults.blockade_params()


@pytest.fixture
def ds_op():
    return defaults.operating_detuning()


def angle_diff(a: float, b: float) -> float:
    """Signed difference of two angles folded into (-pi, pi]."""
    return float((np.asarray(a) - b + np.pi) % (2 * np.pi) - np.pi)
