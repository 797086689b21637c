import zlib

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

# First call into a compiled kernel pays JIT/cache-load latency; wall-clock
# deadlines would flag that as flaky.
settings.register_profile(
    "cpgen",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("cpgen")


@pytest.fixture
def rng(request) -> np.random.Generator:
    """Per-test deterministic generator, seeded from the test's node id."""
    return np.random.default_rng(zlib.crc32(request.node.nodeid.encode()))
