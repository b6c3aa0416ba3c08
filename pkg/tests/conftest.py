import math
import warnings

import numpy as np
import pytest

from c3t.profiles import CodeProfile, StretchMode, unit_radii


@pytest.fixture
def circle():
    return CodeProfile(2, (1.0,))


@pytest.fixture
def table4():
    """n=4 reference profile with exact radii [sqrt(2/3), sqrt(1/3)]."""
    return CodeProfile(4, unit_radii([math.sqrt(2.0 / 3.0), math.sqrt(1.0 / 3.0)]))


@pytest.fixture
def table4_alias(table4):
    return CodeProfile(4, table4.radii, stretch=StretchMode.ALIASING_SAFE)


@pytest.fixture
def helix3():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return CodeProfile(3, (0.6,), helix_coeff=0.2)


def random_even_profile(n, rng, stretch=StretchMode.FULL_CIRCLE):
    radii = rng.uniform(0.3, 1.0, n // 2)
    return CodeProfile(n, unit_radii(radii), stretch=stretch)


def random_odd_profile(n, rng):
    radii = rng.uniform(0.3, 1.0, n // 2)
    radii *= math.sqrt(rng.uniform(0.5, 0.9)) / np.linalg.norm(radii)
    slack = 1.0 - float(radii @ radii)
    b = math.sqrt(slack * rng.uniform(0.3, 0.9)) / math.pi
    return CodeProfile(n, tuple(radii), helix_coeff=b)
