import os
import sys

import pytest
from hypothesis import settings

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

settings.register_profile("lab", deadline=None, max_examples=40)
settings.load_profile("lab")


@pytest.fixture(scope="session")
def params316():
    from invsq.core import derived_constants
    return derived_constants(-3.0 / 16.0)


@pytest.fixture(scope="session")
def gfix(params316):
    from invsq.core import fixed_points
    return fixed_points(params316)
