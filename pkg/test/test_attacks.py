import itertools

import numpy as np
import pytest

from powsim.attack.attacker import Attacker
from powsim.attack.episode import Episode
from powsim.attack.observation import Action, ExtendMode, Observation, Withhold, observe, situation
from powsim.attack.policy import ThresholdGetAhead, ThresholdHonest, ThresholdMinorDelay, ThresholdPolicy, \
    ThresholdSM1, policy_from_name, policy_get_ahead, policy_honest, policy_minor_delay, policy_sm1
from powsim.attack.search import SearchBudget, threshold_search
from powsim.config import attack_config
from powsim.engine import run
from powsim.errors import ConfigError, UsageError
from powsim.metrics import attack_outcome
from powsim.protocol.protocol_bitcoin import bitcoin
from powsim.protocol.protocol_tailstorm import TailstormParams, tailstorm
from helpers import Builder


def forked_tailstorm():
    # attacker (node 0) and defender (node 1) each summarized two own subblocks and mined two more
    dag = Builder()
    a1 = dag.sub(dag.genesis, miner=0)
    a2 = dag.sub(a1, miner=0)
    attacker_tip = dag.summary((a2,), 1, miner=0)
    d1 = dag.sub(dag.genesis, miner=1)
    d2 = dag.sub(d1, miner=1)
    defender_tip = dag.summary((d2,), 1, miner=1)
    dag.sub(dag.sub(attacker_tip, miner=0), miner=0)
    dag.sub(dag.sub(defender_tip, miner=1), miner=1)
    return dag, attacker_tip, defender_tip


def test_observation_of_a_forked_tree():
    dag, attacker_tip, defender_tip = forked_tailstorm()
    protocol = tailstorm(TailstormParams(k=2))
    current = situation(dag.view(), [attacker_tip, defender_tip], protocol)
    assert tuple(current.observation) == (1, 1, 2, 2, 2, 2, 2, 2)
    assert current.common == dag.genesis
    assert current.defender_tip == defender_tip


def test_observation_counts_only_own_subblocks_as_exclusive():
    dag = Builder()
    x = dag.sub(dag.genesis, miner=1)
    dag.sub(x, miner=0)
    dag.sub(dag.genesis, miner=0)
    protocol = tailstorm(TailstormParams(k=4))
    observation = observe(dag.view(), [dag.genesis, dag.genesis], protocol)
    assert observation == Observation(0, 0, 3, 1, 3, 2, 1, 2)


def test_private_subblocks_stay_out_of_the_defender_tree():
    dag = Builder()
    dag.sub(dag.sub(dag.genesis, miner=0, hidden=(1,)), miner=0, hidden=(1,))
    protocol = tailstorm(TailstormParams(k=3))
    observation = observe(dag.view(), [dag.genesis, dag.genesis], protocol)
    assert observation == Observation(h_a=0, h_d=0, s_a=2, s_a_excl=2, s_d=0, d_a=2, d_a_excl=2, d_d=0)


def test_defender_tip_is_ranked_on_public_blocks():
    dag = Builder(nodes=3)
    a = dag.sub(dag.genesis, miner=1)
    b = dag.sub(dag.genesis, miner=2)
    left = dag.summary((a,), 1, miner=1)
    right = dag.summary((b,), 1, miner=2)
    dag.sub(left, miner=1)
    private = dag.sub(right, miner=0, hidden=(1, 2))
    dag.sub(private, miner=0, hidden=(1, 2))
    protocol = tailstorm(TailstormParams(k=2))
    current = situation(dag.view(), [right, left, right], protocol)
    assert current.defender_tip == left
    assert current.observation.s_d == 1
    assert current.observation.s_a == 2


def test_reference_policies():
    assert policy_honest(Observation(h_a=0, h_d=1)).withhold is Withhold.ADOPT
    assert policy_honest(Observation(h_a=2, h_d=1)).withhold is Withhold.OVERRIDE
    assert policy_get_ahead(Observation(h_a=1, h_d=1)).withhold is Withhold.WAIT
    assert policy_get_ahead(Observation(h_a=2, h_d=1)).withhold is Withhold.OVERRIDE
    assert policy_minor_delay(Observation(h_a=1, h_d=0)).withhold is Withhold.WAIT
    assert policy_minor_delay(Observation(h_a=1, h_d=1)).withhold is Withhold.OVERRIDE
    assert policy_sm1(Observation(h_a=1, h_d=1)).withhold is Withhold.MATCH
    assert policy_sm1(Observation(h_a=2, h_d=1)).withhold is Withhold.OVERRIDE
    assert policy_sm1(Observation(h_a=3, h_d=1)).withhold is Withhold.WAIT
    assert policy_sm1(Observation(h_a=2, h_d=2)).withhold is Withhold.WAIT
    assert policy_sm1(Observation(h_a=0, h_d=1)).withhold is Withhold.ADOPT
    assert all(policy(Observation()).extend is ExtendMode.INCLUSIVE
               for policy in (policy_honest, policy_get_ahead, policy_minor_delay, policy_sm1))


@pytest.mark.parametrize('named,threshold', [
    (policy_honest, ThresholdHonest),
    (policy_get_ahead, ThresholdGetAhead),
    (policy_minor_delay, ThresholdMinorDelay),
    (policy_sm1, ThresholdSM1),
])
def test_threshold_members_match_reference_policies(named, threshold):
    for h_a, h_d in itertools.product(range(5), repeat=2):
        observation = Observation(h_a=h_a, h_d=h_d, s_a=3, s_d=1)
        assert threshold(observation) == named(observation)


def test_threshold_exclusive_extension():
    policy = ThresholdPolicy(exclusive_min_own=2, exclusive_min_depth=2)
    assert policy(Observation(s_a_excl=2, d_a_excl=2)).extend is ExtendMode.EXCLUSIVE
    assert policy(Observation(s_a_excl=2, d_a_excl=1)).extend is ExtendMode.INCLUSIVE
    assert ThresholdHonest(Observation(s_a_excl=8, d_a_excl=8)).extend is ExtendMode.INCLUSIVE


def test_unknown_policy_name():
    with pytest.raises(ConfigError):
        policy_from_name('selfish')


def drive(generator, action):
    observation = next(generator)
    try:
        generator.send(action)
    except StopIteration as e:
        return observation, e.value
    raise AssertionError("attacker asked twice")


def test_attacker_withholds_until_released():
    dag = Builder()
    defender = dag.btc(dag.genesis, miner=1)
    own = dag.btc(dag.genesis, miner=0)
    attacker = Attacker(bitcoin())
    attacker.on_reify(own)
    observation, result = drive(attacker.update(dag.view(0), [own, defender], own), Action(Withhold.WAIT))
    assert observation.h_a == 1 and observation.h_d == 1
    assert result.share == []
    assert list(attacker.withheld) == [own]
    observation, result = drive(attacker.update(dag.view(0), [own, defender], own), Action(Withhold.MATCH))
    assert result.share == [own]
    assert attacker.withheld == {}


def test_attacker_adopts_the_defender_tip():
    dag = Builder()
    d1 = dag.btc(dag.genesis, miner=1)
    d2 = dag.btc(d1, miner=1)
    attacker = Attacker(bitcoin())
    _, result = drive(attacker.update(dag.view(0), [dag.genesis, d2], d2), Action(Withhold.ADOPT))
    assert result.tip == d2


def test_override_releases_only_what_is_needed():
    dag = Builder()
    d1 = dag.btc(dag.genesis, miner=1)
    a1 = dag.btc(dag.genesis, miner=0)
    a2 = dag.btc(a1, miner=0)
    a3 = dag.btc(a2, miner=0)
    attacker = Attacker(bitcoin())
    for b in (a1, a2, a3):
        attacker.on_reify(b)
    _, result = drive(attacker.update(dag.view(0), [a3, d1], d1), Action(Withhold.OVERRIDE))
    assert result.share == [a1, a2]
    assert list(attacker.withheld) == [a3]


def attacker_tree():
    # two own subblocks in a chain and one defender subblock, all on genesis
    dag = Builder()
    a1 = dag.sub(dag.genesis, miner=0)
    a2 = dag.sub(a1, miner=0)
    d1 = dag.sub(dag.genesis, miner=1)
    return dag, a1, a2, d1


def test_inclusive_summary_takes_defender_subblocks():
    dag, a1, a2, d1 = attacker_tree()
    attacker = Attacker(tailstorm(TailstormParams(k=3)))
    _, result = drive(attacker.update(dag.view(0), [dag.genesis, dag.genesis], d1),
                      Action(Withhold.WAIT, ExtendMode.INCLUSIVE))
    assert len(result.append) == 1
    assert result.append[0].parents == (a2, d1)
    assert result.append[0].fields.summary and result.append[0].fields.height == 1


def test_exclusive_summary_needs_k_own_subblocks():
    dag, a1, a2, d1 = attacker_tree()
    attacker = Attacker(tailstorm(TailstormParams(k=3)))
    _, result = drive(attacker.update(dag.view(0), [dag.genesis, dag.genesis], d1),
                      Action(Withhold.WAIT, ExtendMode.EXCLUSIVE))
    assert result.append == []
    a3 = dag.sub(a2, miner=0)
    _, result = drive(attacker.update(dag.view(0), [dag.genesis, dag.genesis], a3),
                      Action(Withhold.WAIT, ExtendMode.EXCLUSIVE))
    assert [template.parents for template in result.append] == [(a3,)]


def test_honest_attacker_earns_its_share():
    rewards = []
    for seed in range(6):
        config = attack_config('bitcoin', 0.3, 0.5, 'honest', n=8, stop_blocks=400, seed=seed)
        result = run(config)
        rewards.append(attack_outcome(result.view, result.protocol, 0).normalized_reward)
    assert np.mean(rewards) == pytest.approx(0.3, abs=0.06)


@pytest.mark.slow
def test_selfish_mining_pays_with_a_strong_network():
    rewards = []
    for seed in range(5):
        config = attack_config('bitcoin', 0.45, 0.95, 'sm1', n=32, stop_blocks=1000, seed=seed)
        result = run(config)
        rewards.append(attack_outcome(result.view, result.protocol, 0).normalized_reward)
    assert np.mean(rewards) > 0.5


def test_episode_matches_a_policy_run():
    config = attack_config('tailstorm', 0.3, 0.5, None, k=2, n=8, stop_blocks=80, seed=12)
    episode = Episode()
    observation = episode.reset(config)
    total = 0.0
    done = episode.done
    while not done:
        observation, delta, done = episode.step(policy_honest(observation))
        total += delta
    reference = run(attack_config('tailstorm', 0.3, 0.5, 'honest', k=2, n=8, stop_blocks=80, seed=12))
    assert episode.result().view.store.blocks == reference.view.store.blocks
    outcome = attack_outcome(reference.view, reference.protocol, 0)
    assert total == pytest.approx(outcome.normalized_reward)


def test_episode_misuse():
    episode = Episode()
    with pytest.raises(UsageError):
        episode.step(Action(Withhold.WAIT))
    episode.reset(attack_config('bitcoin', 0.3, 0.5, None, n=8, stop_blocks=20))
    while not episode.done:
        episode.step(Action(Withhold.OVERRIDE))
    with pytest.raises(UsageError):
        episode.step(Action(Withhold.WAIT))


def test_episode_reset_seed_overrides_config():
    config = attack_config('bitcoin', 0.3, 0.5, None, n=8, stop_blocks=30, seed=0)
    first = Episode()
    first.reset(config, seed=4)
    second = Episode()
    second.reset(attack_config('bitcoin', 0.3, 0.5, None, n=8, stop_blocks=30, seed=4))
    for episode in (first, second):
        while not episode.done:
            episode.step(Action(Withhold.OVERRIDE))
    assert first.result().view.store.blocks == second.result().view.store.blocks


def test_search_starts_from_reference_members():
    config = attack_config('tailstorm', 0.3, 0.5, None, k=2, n=8, stop_blocks=60)
    result = threshold_search(config, SearchBudget(candidates=5, runs=1), seed=1)
    assert [policy for policy, _ in result.evaluated[:4]] == \
           [ThresholdHonest, ThresholdMinorDelay, ThresholdGetAhead, ThresholdSM1]
    assert len(result.evaluated) == 5
    assert len({policy for policy, _ in result.evaluated}) == 5
    assert result.score == max(score for _, score in result.evaluated)


def test_search_without_candidates():
    config = attack_config('tailstorm', 0.3, 0.5, None, k=2, n=8, stop_blocks=60)
    with pytest.raises(ConfigError):
        threshold_search(config, SearchBudget(candidates=0, runs=1))
    with pytest.raises(ConfigError):
        threshold_search(config, SearchBudget(candidates=2, runs=1), start=())
