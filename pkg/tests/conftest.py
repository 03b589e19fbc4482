import itertools
import os

import pytest
from hypothesis import HealthCheck, settings

from kneserlab.setfam import Family, mask_of

settings.register_profile(
    "default", max_examples=200, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("ci", max_examples=50, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def fam(n, r, *sets):
    """Family from literal element tuples."""
    return Family(n, r, [mask_of(s) for s in sets])


def naive_cross(f, g, t=1):
    return all(len(set(a) & set(b)) >= t for a in f for b in g)


def naive_intersecting(f):
    return all(set(a) & set(b) for a, b in itertools.combinations(f, 2))


@pytest.fixture
def fam_factory():
    return fam
