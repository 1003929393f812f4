import sys
from pathlib import Path

import pytest

# Repo root = one level above tests/
REPO_ROOT = Path(__file__).resolve().parents[1]

# Ensure repo root is on sys.path so `import cli` works (root file).
if str(REPO_ROOT) not in sys.path:
    sys.path.insert(0, str(REPO_ROOT))

from uaconvert.core import RngStream  # noqa: E402
from uaconvert.toyworld import GmmWorld, make_world  # noqa: E402


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: Monte-Carlo checks with large sample counts")


@pytest.fixture
def stream():
    """Factory: stream(seed, index=0)."""

    def make(seed: int = 0, index: int = 0) -> RngStream:
        return RngStream(seed, index)

    return make


@pytest.fixture
def symmetric_world_1d() -> GmmWorld:
    """w=(0.5, 0.5), means -2/+2, unit variances, channel sigma 1."""
    return GmmWorld(
        weights=[0.5, 0.5],
        means=[[-2.0], [2.0]],
        covariances=[[[1.0]], [[1.0]]],
        component_class=[0, 1],
        channel_sigma=1.0,
    )


@pytest.fixture
def example_world_2d() -> GmmWorld:
    return make_world(dim=2, n_components=4, separation=2.0, spread=0.5, channel_sigma=1.0)


@pytest.fixture
def world_d8() -> GmmWorld:
    return make_world(dim=8, n_components=4, separation=2.0, spread=0.5, channel_sigma=0.5)
