import dataclasses
import logging
from typing import NamedTuple

from powsim.config import SimConfig, config_hash, fairness_config
from powsim.engine import run
from powsim.errors import ConfigError
from powsim.io import Rows
from powsim.metrics import accumulate_rewards, measured_orphan_rate, relative_reward, winning_chain
from powsim.util import derive_seed, parallel_map

logger = logging.getLogger(__name__)

WeakMiner = 0
DeskBudget = 100_000
FullBudget = 1_000_000


class FairnessSettings(NamedTuple):
    protocol: str = 'bitcoin'
    ks: tuple[int, ...] = (1,)
    intervals: tuple[float, ...] = (600.0,)
    weak: float = 0.01
    delay: float = 6.0
    budget: int = DeskBudget
    seed: int = 0


def fairness_observation(job: tuple[SimConfig, float, int]) -> dict:
    config, interval, observation = job
    result = run(config)
    tip = winning_chain(result.view, result.protocol)
    ledger = accumulate_rewards(result.view, tip, result.protocol)
    weak_share = config.hashrates[WeakMiner] / sum(config.hashrates)
    return {
        'protocol': config.protocol,
        'k': config.k,
        'interval': interval,
        'observation': observation,
        'weak_relative_reward_pct': 100 * relative_reward(ledger, WeakMiner, weak_share),
        'orphans': measured_orphan_rate(result.view, tip),
        'seed': config.seed,
        'config_hash': config_hash(config),
    }


def fairness_jobs(settings: FairnessSettings) -> list[tuple[SimConfig, float, int]]:
    grid = [(k, interval) for k in settings.ks for interval in settings.intervals]
    jobs = []
    for k, interval in grid:
        try:
            config = fairness_config(settings.protocol, k, interval, settings.weak, settings.delay)
        except ConfigError as e:
            if len(grid) == 1:
                raise
            logger.warning("skipping k = %d, T = %s: %s", k, interval, e)
            continue
        observations = max(1, settings.budget // int(config.stop.value))
        logger.info("fairness %s k = %d T = %s: %d observations of %d PoWs", settings.protocol, k, interval,
                    observations, int(config.stop.value))
        for i in range(observations):
            jobs.append((dataclasses.replace(config, seed=derive_seed(settings.seed, i)), interval, i))
    if len(jobs) == 0:
        raise ConfigError("no valid fairness configuration in the requested grid")
    return jobs


def cmd_fairness(settings: FairnessSettings, workers: int = 1) -> Rows:
    return parallel_map(fairness_observation, fairness_jobs(settings), workers)
