import numpy as np
import pytest

import config
import corpus_service
from extensions import shutdown_executors
from models import PartialLatinSquare
from pls_service import cyclic_square, xor_square


@pytest.fixture(autouse=True)
def single_worker(monkeypatch):
    """Run everything inline; results never depend on the worker count."""
    monkeypatch.setenv("CRITSET_THREADS", "1")
    config.get_settings.cache_clear()
    yield
    config.get_settings.cache_clear()
    shutdown_executors()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def cyclic4():
    return cyclic_square(4)


@pytest.fixture
def xor4():
    return xor_square(2)


@pytest.fixture
def cs5():
    return corpus_service.get("cs5-11").square


@pytest.fixture
def cs7():
    return corpus_service.get("cs7-25").square


@pytest.fixture
def full2():
    return PartialLatinSquare.from_rows([[1, 2], [2, 1]])


def naive_count(P: PartialLatinSquare, cap: int | None = None) -> int:
    """Depth-first fill of every empty cell in row-major order, no propagation."""
    n = P.order
    grid = P.rows()
    empties = [(i, j) for i in range(n) for j in range(n) if not grid[i][j]]

    def fill(pos: int) -> int:
        if pos == len(empties):
            return 1
        i, j = empties[pos]
        total = 0
        for k in range(1, n + 1):
            if k in grid[i] or any(grid[r][j] == k for r in range(n)):
                continue
            grid[i][j] = k
            total += fill(pos + 1)
            grid[i][j] = 0
            if cap is not None and total >= cap:
                break
        return total

    return fill(0)


@pytest.fixture
def oracle():
    return naive_count
