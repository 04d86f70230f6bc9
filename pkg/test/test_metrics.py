import pytest

from powsim.errors import ConfigError, UndefinedMetricError
from powsim.metrics import OrphanBoundInputs, RewardLedger, accumulate_rewards, measured_orphan_rate, \
    normalized_reward, orphan_bound, relative_reward, selfish_mining_bound, short_term_rates, winning_chain
from powsim.protocol.protocol_bitcoin import bitcoin
from powsim.protocol.protocol_tailstorm import TailstormParams, tailstorm
from helpers import Builder

# percent, rows T = 75, 150, 300, 600 and columns k = 1, 5, 10, 15
orphan_table = {
    75: (10.08, 7.35, 7.01, 6.89),
    150: (5.04, 3.67, 3.50, 3.45),
    300: (2.52, 1.84, 1.75, 1.72),
    600: (1.26, 0.92, 0.88, 0.86),
}


@pytest.mark.parametrize('interval', sorted(orphan_table))
def test_orphan_bound_table(interval):
    for k, expected in zip((1, 5, 10, 15), orphan_table[interval]):
        bound = orphan_bound(OrphanBoundInputs(5.0, 2.56, interval, k))
        assert 100 * bound == pytest.approx(expected, abs=0.01)


def test_orphan_bound_scaling():
    base = orphan_bound(OrphanBoundInputs(5.0, 2.56, 300.0, 5))
    assert orphan_bound(OrphanBoundInputs(5.0, 2.56, 600.0, 5)) == pytest.approx(base / 2)
    assert orphan_bound(OrphanBoundInputs(5.0, 2.56, 300.0, 10 ** 9)) == pytest.approx(5.0 / 300.0)


def test_orphan_bound_rejects_nonsense():
    with pytest.raises(ConfigError):
        orphan_bound(OrphanBoundInputs(5.0, 2.56, 0.0, 1))
    with pytest.raises(ConfigError):
        orphan_bound(OrphanBoundInputs(5.0, 2.56, 600.0, 0))
    with pytest.raises(ConfigError):
        orphan_bound(OrphanBoundInputs(-1.0, 2.56, 600.0, 1))


def test_short_term_rates():
    rates = short_term_rates(2)
    assert rates.summarize_now == pytest.approx(1 / 2)
    assert rates.delay == pytest.approx(2 / 3)
    assert rates.difference == pytest.approx(1 / 3)
    assert rates.gap == pytest.approx(1 / 6)
    assert short_term_rates(8).delay > short_term_rates(8).summarize_now
    with pytest.raises(ConfigError):
        short_term_rates(1)


def test_selfish_mining_bound():
    assert selfish_mining_bound(0.25) == pytest.approx(1 / 3)
    assert selfish_mining_bound(0.0) == 0.0


def test_normalized_reward():
    assert normalized_reward(RewardLedger({0: 3.0, 1: 5.0}, 7, 10), 0) == pytest.approx(0.3)
    assert normalized_reward(RewardLedger({1: 5.0}, 7, 10), 0) == 0.0
    with pytest.raises(UndefinedMetricError):
        normalized_reward(RewardLedger({}, 0, 0), 0)


def test_relative_reward():
    ledger = RewardLedger({0: 1.0, 1: 99.0}, 5, 100)
    assert relative_reward(ledger, 0, 0.01) == pytest.approx(1.0)
    assert relative_reward(ledger, 1, 0.5) == pytest.approx(1.98)
    with pytest.raises(UndefinedMetricError):
        relative_reward(RewardLedger({}, 0, 0), 0, 0.5)


def bitcoin_fork():
    dag = Builder()
    a = dag.btc(dag.genesis, miner=0)
    b = dag.btc(dag.genesis, miner=1)
    c = dag.btc(a, miner=1)
    return dag, a, b, c


def test_winning_chain_prefers_height_then_smaller_id():
    dag, a, b, c = bitcoin_fork()
    assert winning_chain(dag.view(), bitcoin()) == c
    dag2 = Builder()
    first = dag2.btc(dag2.genesis)
    dag2.btc(dag2.genesis)
    assert winning_chain(dag2.view(), bitcoin()) == first


def test_accumulate_rewards_walks_the_chain():
    dag, a, b, c = bitcoin_fork()
    ledger = accumulate_rewards(dag.view(), c, bitcoin())
    assert ledger.rewards == {0: 1.0, 1: 1.0}
    assert ledger.progress == 2
    assert ledger.basis == c


def test_tailstorm_rewards_along_two_summaries():
    dag = Builder()
    a = dag.sub(dag.genesis, miner=0)
    b = dag.sub(dag.genesis, miner=1)
    s = dag.summary((a, b), 1)
    c = dag.sub(s, miner=1)
    d = dag.sub(c, miner=1)
    t = dag.summary((d,), 2)
    ledger = accumulate_rewards(dag.view(), t, tailstorm(TailstormParams(k=2)))
    assert ledger.rewards == pytest.approx({0: 0.5, 1: 2.5})
    assert ledger.progress == 4


def test_measured_orphan_rate():
    dag, a, b, c = bitcoin_fork()
    assert measured_orphan_rate(dag.view(), c) == pytest.approx(0.5)
    dag.btc(c)
    assert measured_orphan_rate(dag.view(), c) == pytest.approx(0.5)
    assert measured_orphan_rate(dag.view(), dag.genesis) == 0.0
