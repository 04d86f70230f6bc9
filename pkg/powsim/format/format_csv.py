from typing import Optional

import pandas as pd

from powsim.io import ResultFormat, Rows


def dump_csv(rows: Rows, stream, columns: Optional[list[str]] = None):
    pd.DataFrame(rows, columns=columns).to_csv(stream, index=False, lineterminator="\n")


def read_csv(filepath: str) -> Rows:
    # cells stay strings, callers convert what they need
    frame = pd.read_csv(filepath, dtype=str, keep_default_na=False)
    return frame.to_dict('records')


def write_csv(filepath: str, rows: Rows):
    with open(filepath, 'wt', newline='') as stream:
        dump_csv(rows, stream)


ResultFormatCSV: ResultFormat = ('.csv', read_csv, write_csv)
