import pytest

from charfield.tower import build_tower


@pytest.fixture(scope="session")
def tower():
    """Shared context factory; build_tower caches per-parameter instances."""

    def get(p, s, m, **kw):
        return build_tower(p, s, m, **kw)

    return get


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "acceptance: end-to-end acceptance criteria (slow)"
    )
