import io
import math

import pytest

from powsim.util import derive_seed, mean_and_stderr, parallel_map, print_columns


def test_print_columns_aligns_values():
    stream = io.StringIO()
    print_columns(["name", "n"], [["a", 1], ["long name", 100]], file=stream)
    assert stream.getvalue().splitlines() == [
        "name      n  ",
        "a           1",
        "long name 100",
    ]


def test_derive_seed():
    assert derive_seed(1, 2) == derive_seed(1, 2)
    assert len({derive_seed(1, i) for i in range(100)}) == 100
    assert derive_seed(1, 2) != derive_seed(2, 2)
    assert 0 <= derive_seed(0, 0) < 2 ** 63


def test_mean_and_stderr():
    mean, stderr = mean_and_stderr([1.0, 2.0, 3.0])
    assert mean == 2.0
    assert stderr == pytest.approx(1 / math.sqrt(3))
    assert math.isnan(mean_and_stderr([4.0])[1])
    assert math.isnan(mean_and_stderr([])[0])


def test_parallel_map_keeps_order():
    assert parallel_map(abs, [-3, 2, -1]) == [3, 2, 1]
    assert parallel_map(abs, [-3, 2, -1], workers=2) == [3, 2, 1]
