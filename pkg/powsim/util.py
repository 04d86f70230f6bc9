from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, TypeVar

import numpy as np
import pandas as pd

T = TypeVar('T')
R = TypeVar('R')


def print_columns(header: (list[str] | tuple[str, ...]),
                  entries: list[list[int | float | str] | tuple[int | float | str, ...]],
                  file=None):
    column_widths = [len(column) for column in header]
    for entry in entries:
        for i in range(len(entry)):
            length = len(str(entry[i]))
            if len(column_widths) <= i:
                column_widths.append(length)
            elif length > column_widths[i]:
                column_widths[i] = length
    print(" ".join(value.ljust(width) for value, width in zip(header, column_widths)), file=file)
    for entry in entries:
        line = []
        for value, width in zip(entry, column_widths):
            if isinstance(value, (int, float)):
                line.append(str(value).rjust(width))
            else:
                line.append(str(value).ljust(width))
        print(" ".join(line), file=file)


def derive_seed(seed: int, *keys: int) -> int:
    sequence = np.random.SeedSequence(entropy=seed, spawn_key=tuple(keys))
    return int(sequence.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))


def mean_and_stderr(values: list[float]) -> tuple[float, float]:
    series = pd.Series(values, dtype=float)
    return float(series.mean()), float(series.sem())


def parallel_map(fn: Callable[[T], R], items: Iterable[T], workers: int = 1) -> list[R]:
    """Order-preserving map, fanned out over processes when workers > 1."""
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ProcessPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(fn, items))
