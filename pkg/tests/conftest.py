import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st
from scipy.sparse.csgraph import shortest_path

from porosity_lab import AugmentedSpace

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

KINDS = ("line", "plane", "metric", "snowflake")


def metric_table(rng, N):
    """Shortest-path metric of a random complete graph; off-diagonal entries are positive."""
    W = rng.integers(1, 20, size=(N, N)).astype(float)
    W = np.triu(W, 1)
    W = W + W.T
    return shortest_path(W, method="FW", directed=False)


def random_space(rng, n, n_obs, kind):
    """A space of ``n`` sample points and ``n_obs`` obstacles of the given kind.

    line and plane are euclidean (the line kind uses the interval backend),
    metric is a graph metric table and snowflake raises it to a power in (1, 2].
    """
    N = n + n_obs
    mu = rng.integers(1, 5, size=n).astype(float)
    if kind in ("line", "plane"):
        dim = 1 if kind == "line" else 2
        side = max(40, 2 * N)
        cells = rng.choice(side**dim, size=N, replace=False)
        xy = np.stack(np.unravel_index(cells, (side,) * dim), axis=1).astype(float) / 4
        if kind == "line":
            order = np.argsort(xy[:n, 0])
            xy[:n] = xy[:n][order]
        return AugmentedSpace(
            sample_ids=np.arange(n), measure=mu, obstacle_ids=np.arange(n, N), coords=xy, metric="euclidean"
        )
    T = metric_table(rng, N)
    if kind == "snowflake":
        T = T ** rng.choice([1.25, 1.5, 2.0])
    return AugmentedSpace(sample_ids=np.arange(n), measure=mu, obstacle_ids=np.arange(n, N), table=T)


@st.composite
def spaces(draw, max_n=8, max_obs=3, kinds=KINDS, min_obs=1, min_n=1):
    seed = draw(st.integers(0, 2**31 - 1))
    n = draw(st.integers(min_n, max_n))
    n_obs = draw(st.integers(min_obs, max_obs))
    kind = draw(st.sampled_from(kinds))
    return random_space(np.random.default_rng(seed), n, n_obs, kind)


@pytest.fixture
def line4():
    """Sample {1,2,3,4} with unit weights and obstacle {0}."""
    return AugmentedSpace(
        sample_ids=[1, 2, 3, 4], measure=[1, 1, 1, 1], obstacle_ids=[0], coords=[1, 2, 3, 4, 0], metric="euclidean"
    )


@pytest.fixture
def line4_table(line4):
    """The same space through the explicit-table backend."""
    return line4.generic()


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(mod.VERDICTS):
        terminalreporter.write_line(line)
