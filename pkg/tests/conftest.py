import numpy as np
import pytest

from tvconsensus import Graph, erdos_renyi


def random_connected_graph(rng: np.random.Generator, n_max: int = 12, p: float = 0.5) -> Graph:
    """Seeded connected Erdos-Renyi sample by rejection."""
    while True:
        n = int(rng.integers(3, n_max + 1))
        g = erdos_renyi(n, p, int(rng.integers(0, 2**31)))
        if g.is_connected:
            return g


def mean_zero_field(rng: np.random.Generator, n: int) -> np.ndarray:
    u = rng.normal(size=n)
    return u - u.mean()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)
