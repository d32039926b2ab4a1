from functools import partial
from time import sleep

import trio

from pytest import raises

from pair_spectrum.utils import map_concurrently, write_text_async


def slow_square(value: int) -> int:
    sleep(0.01 * (5 - value))
    return value * value


def fail_on_odd(value: int) -> int:
    if value % 2:
        raise ValueError(f"odd: {value}")
    return value


def test_results_keep_item_order():
    results = trio.run(partial(map_concurrently, slow_square, range(5), max_workers=3))
    assert results == [0, 1, 4, 9, 16]


def test_empty_input():
    assert trio.run(map_concurrently, slow_square, []) == []


def test_first_failing_item_is_reported():
    with raises(ValueError, match="odd: 1"):
        trio.run(map_concurrently, fail_on_odd, [0, 1, 2, 3])


def test_write_text_keeps_line_endings(tmp_path):
    path = tmp_path / "out.txt"
    trio.run(write_text_async, path, "a,b\n1,2\n")
    assert path.read_bytes() == b"a,b\n1,2\n"
