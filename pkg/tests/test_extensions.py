import extensions
from extensions import parallel_map, shared_executor, shutdown_executors


def _square(x: int) -> int:
    return x * x


def test_parallel_map_keeps_input_order():
    items = list(range(20, 0, -1))
    assert parallel_map(_square, items, max_workers=3) == [x * x for x in items]


def test_parallel_map_runs_inline_for_one_worker():
    assert parallel_map(_square, [1, 2, 3], max_workers=1) == [1, 4, 9]
    assert not extensions._executors


def test_pool_is_reused_across_calls():
    parallel_map(_square, range(5), max_workers=2)
    pool = shared_executor(2)
    parallel_map(_square, range(7), max_workers=2)
    assert shared_executor(2) is pool
    assert len(extensions._executors) == 1
    shutdown_executors()
    assert not extensions._executors
