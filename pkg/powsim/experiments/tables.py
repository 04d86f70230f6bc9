import numpy as np

from powsim.io import Rows
from powsim.metrics import OrphanBoundInputs, orphan_bound, short_term_rates
from powsim.network import AttackerNetwork, default_epsilon, staged_races
from powsim.util import print_columns

Intervals = (75.0, 150.0, 300.0, 600.0)
SubblockCounts = (1, 5, 10, 15)
# propagation latency and full-block transmission time of the measured network
Tau0 = 5.0
Transmit = 2.56


def cmd_orphan_table(intervals=Intervals, ks=SubblockCounts, tau0: float = Tau0,
                     transmit: float = Transmit) -> Rows:
    rows = []
    for interval in intervals:
        for k in ks:
            bound = orphan_bound(OrphanBoundInputs(tau0, transmit, interval, k))
            rows.append({'T': interval, 'k': k, 'orphan_bound_pct': round(100 * bound, 4)})
    return rows


def print_orphan_table(rows: Rows, file=None):
    ks = sorted({row['k'] for row in rows})
    intervals = sorted({row['T'] for row in rows})
    cells = {(row['T'], row['k']): row['orphan_bound_pct'] for row in rows}
    header = ["T \\ k"] + [str(k) for k in ks]
    entries = [[str(interval)] + ["{0:.2f}%".format(cells[interval, k]) for k in ks] for interval in intervals]
    print_columns(header, entries, file=file)


def cmd_short_term(ks=(2, 4, 8, 16, 32, 64)) -> Rows:
    return [dict(k=k, **short_term_rates(k)._asdict()) for k in ks]


def cmd_race(gammas=(0.05, 0.5, 0.95), n: int = 32, races: int = 100_000, seed: int = 0) -> Rows:
    rng = np.random.default_rng(seed)
    rows = []
    for gamma in gammas:
        network = AttackerNetwork(n, default_epsilon(1.0), gamma)
        rows.append({'gamma': gamma, 'n': n, 'races': races, 'win_fraction': staged_races(network, races, rng)})
    return rows
