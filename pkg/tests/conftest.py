import random

import pytest
from hypothesis import HealthCheck, settings

from didmember import bbs
from didmember.crypto import SigningKeyPair

settings.register_profile(
    "default", deadline=None, max_examples=50,
    suppress_health_check=[HealthCheck.function_scoped_fixture])
settings.load_profile("default")


@pytest.fixture
def rng():
    return random.Random(1234)


@pytest.fixture(scope="module")
def group():
    """An 8-member group: (gpk, tpsk, {member_id: gsk}, tp signing keys)."""
    r = random.Random(99)
    gpk, tpsk = bbs.keygen(rng=r)
    keys = {f"m{i}": bbs.join(tpsk, gpk, f"m{i}", rng=r) for i in range(8)}
    return gpk, tpsk, keys, SigningKeyPair.generate(r)
