import logging

import pandas as pd

from powsim.io import Rows

logger = logging.getLogger(__name__)

MinimumRuns = 10


def aggregate(rows: Rows, keys: list[str], value: str, force: bool = False) -> Rows:
    """Mean, standard error and run count of value per group, in order of first appearance."""
    if len(rows) == 0:
        return []
    frame = pd.DataFrame(rows)
    frame[value] = frame[value].astype(float)
    stats = frame.groupby(keys, sort=False, dropna=False)[value].agg(['mean', 'sem', 'count']).reset_index()
    stats = stats.rename(columns={'sem': 'stderr', 'count': 'runs'})
    thin = stats['runs'] < MinimumRuns
    if not force:
        for entry in stats[thin].to_dict('records'):
            logger.warning("no aggregate for %s: %d runs, need %d", {key: entry[key] for key in keys},
                           entry['runs'], MinimumRuns)
        stats = stats[~thin]
    return stats.to_dict('records')
