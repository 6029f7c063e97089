import pytest

from quadstab.geometry import Geometry, GeometryConfig
from quadstab.harness import Context, default_config


@pytest.fixture(scope="session")
def geom():
    return Geometry(GeometryConfig(-1, -1))


@pytest.fixture(scope="session")
def ctx():
    """Shared default-configuration context (memoized engine)."""
    return Context(default_config())


@pytest.fixture(scope="session")
def calc(ctx):
    return ctx.calc


@pytest.fixture(scope="session")
def kt(ctx):
    return ctx.kt
