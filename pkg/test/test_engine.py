import dataclasses

import numpy as np
import pytest

from powsim.config import SimConfig, StopCondition, attack_config
from powsim.dag import ProtocolFields, Template
from powsim.engine import Environment, EventDelivery, GenesisMiner, MiningProcess, run
from powsim.errors import UsageError
from powsim.metrics import OrphanBoundInputs, measured_orphan_rate, orphan_bound, winning_chain
from powsim.network import UniformNetwork


def blocks_of(result):
    return [(b.parents, b.pow, b.miner, b.hash_value, b.reified_at, b.fields) for b in result.view.blocks()]


def test_same_seed_same_dag():
    config = attack_config('tailstorm', 0.3, 0.5, 'minordelay', k=4, n=8, stop_blocks=150, seed=9)
    assert blocks_of(run(config)) == blocks_of(run(config))
    other = run(dataclasses.replace(config, seed=10))
    assert blocks_of(run(config)) != blocks_of(other)


def test_blocks_stop_condition():
    config = attack_config('bitcoin', 0.2, 0.5, 'honest', n=8, stop_blocks=100, seed=1)
    result = run(config)
    assert len(list(result.view.blocks())) == 100
    genesis = result.view.block(0)
    assert genesis.miner == GenesisMiner
    assert not genesis.pow
    assert all(p < b.id for b in result.view.blocks() for p in b.parents)


def test_seconds_stop_condition():
    config = SimConfig(protocol='bitcoin', network=UniformNetwork(0.5), stop=StopCondition('seconds', 20.0), seed=4)
    result = run(config)
    assert result.seconds == 20.0
    assert all(b.reified_at <= 20.0 for b in result.view.blocks())


def test_delivery_reaches_every_node():
    config = SimConfig(protocol='bitcoin', n=4, hashrates=(1.0,) * 4, network=UniformNetwork(1.0),
                       stop=StopCondition('pows', 30), seed=2)
    environment = Environment(config)
    for _ in environment.events():
        pass
    store = environment.store
    early = [b.id for b in store.blocks if b.reified_at < environment.now - 1.0]
    assert all(store.is_visible(b, node) for b in early for node in range(4))
    assert environment.counts['pow'] == 30


def test_mining_process_follows_hash_rates():
    rng = np.random.default_rng(0)
    process = MiningProcess.of(2.0, (0.0, 1.0, 0.0))
    draws = [process.next_pow(rng) for _ in range(200)]
    assert {miner for _, miner in draws} == {1}
    assert np.mean([delay for delay, _ in draws]) == pytest.approx(0.5, rel=0.25)


def test_environment_runs_once():
    environment = Environment(SimConfig(stop=StopCondition('pows', 5)))
    environment.drive()
    with pytest.raises(UsageError):
        environment.drive()


def test_attacker_needs_a_policy():
    config = attack_config('bitcoin', 0.2, 0.5, None, n=8, stop_blocks=10)
    with pytest.raises(UsageError):
        Environment(config, with_attacker=True).drive()


def test_mining_process_concentrates_over_many_draws():
    rng = np.random.default_rng(1)
    process = MiningProcess.of(2.0, (1.0, 2.0, 1.0))
    draws = [process.next_pow(rng) for _ in range(100_000)]
    assert np.mean([delay for delay, _ in draws]) == pytest.approx(0.5, rel=0.02)
    counts = np.bincount([miner for _, miner in draws], minlength=3) / len(draws)
    assert counts == pytest.approx([0.25, 0.5, 0.25], abs=0.01)


def chain_of_two():
    config = SimConfig(protocol='bitcoin', n=2, network=UniformNetwork(1.0), stop=StopCondition('pows', 5))
    environment = Environment(config)
    store = environment.store
    genesis = store.reify(environment.protocol.root(), GenesisMiner, False, 0.0)
    store.set_visible(genesis, 0)
    store.set_visible(genesis, 1)
    environment.tips = [genesis, genesis]
    a = store.reify(Template((genesis,), ProtocolFields(True, 1, 0)), 0, True, 0.0)
    b = store.reify(Template((a,), ProtocolFields(True, 2, 0)), 0, True, 0.0)
    store.set_visible(a, 0)
    store.set_visible(b, 0)
    return environment, a, b


def test_child_waits_for_its_parent():
    environment, a, b = chain_of_two()
    list(environment._deliver(b, 1))
    assert not environment.store.is_visible(b, 1)
    assert environment.tips[1] == 0
    list(environment._deliver(a, 1))
    assert environment.tips[1] == a
    assert [(event.kind, event.block, event.node) for event in environment._queue] == [(EventDelivery, b, 1)]
    list(environment._deliver(b, 1))
    assert environment.store.is_visible(b, 1)
    assert environment.tips[1] == b


def test_duplicate_delivery_changes_nothing():
    environment, a, b = chain_of_two()
    list(environment._deliver(a, 1))
    list(environment._deliver(b, 1))
    queued = list(environment._queue)
    list(environment._deliver(b, 1))
    list(environment._deliver(a, 1))
    assert environment.tips[1] == b
    assert environment._queue == queued
    assert len(environment.store) == 3


@pytest.mark.parametrize('seed', range(2))
def test_measured_orphans_stay_under_the_analytic_bound(seed):
    config = SimConfig(protocol='bitcoin', n=2, pow_rate=0.1, network=UniformNetwork(0.5),
                       stop=StopCondition('pows', 2000), seed=seed)
    result = run(config)
    tip = winning_chain(result.view, result.protocol)
    assert measured_orphan_rate(result.view, tip) <= orphan_bound(OrphanBoundInputs(0.5, 0.0, 10.0, 1))


@pytest.mark.parametrize('seed', range(3))
def test_reward_scheme_does_not_change_a_forkless_dag(seed):
    def dag(protocol):
        config = SimConfig(protocol=protocol, k=3, n=3, hashrates=(1.0, 1.0, 1.0), stop=StopCondition('pows', 120),
                           seed=seed)
        return blocks_of(run(config))

    assert dag('tailstorm') == dag('tsconst')
