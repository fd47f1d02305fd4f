import random
from fractions import Fraction

import pytest

from recolorlab.core import Instance


@pytest.fixture
def rng():
    return random.Random(12345)


def unit2(c0, eps=Fraction(1, 2)):
    return Instance.unit(tuple(c0), 2, eps)
