import pytest
from hypothesis import HealthCheck, settings

# Deterministic property tests: same examples on every run.
settings.register_profile(
    "ci",
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("ci")


# Eight 2-dimensional items used across oracle and sampling tests.
D0_ROWS = [(1, 1), (1, 1), (1, 2), (2, 1), (2, 2), (1, 1), (2, 1), (1, 2)]


@pytest.fixture
def d0_handle():
    from subcubehh.stream_io import from_items

    h = from_items(D0_ROWS)
    h.replay(lambda _i, _c: None)
    return h
