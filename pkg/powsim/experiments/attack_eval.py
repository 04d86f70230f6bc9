import logging
from typing import NamedTuple

from powsim.config import SimConfig, attack_config, config_hash
from powsim.engine import run
from powsim.experiments.aggregate import aggregate
from powsim.io import Rows
from powsim.metrics import attack_outcome, selfish_mining_bound
from powsim.network import ATTACKER
from powsim.util import derive_seed, parallel_map

logger = logging.getLogger(__name__)

AlphaGrid = (0.20, 0.25, 0.30, 0.35, 0.40, 0.45)
GammaGrid = (0.05, 0.5, 0.95)
DeskRuns = 30
FullRuns = 100


class AttackSettings(NamedTuple):
    protocols: tuple[str, ...] = ('tailstorm',)
    policies: tuple[str, ...] = ('minordelay',)
    alphas: tuple[float, ...] = AlphaGrid
    gammas: tuple[float, ...] = GammaGrid
    k: int = 8
    c: float = 1.0
    n: int = 32
    runs: int = DeskRuns
    stop_blocks: int = 2048
    seed: int = 0


def attack_row(job: tuple[SimConfig, int]) -> dict:
    config, index = job
    result = run(config)
    outcome = attack_outcome(result.view, result.protocol, ATTACKER)
    return {
        'protocol': config.protocol,
        'k': config.k,
        'alpha': config.hashrates[ATTACKER],
        'gamma': config.network.gamma,
        'policy': config.policy,
        'run': index,
        'normalized_reward': outcome.normalized_reward,
        'orphans': outcome.orphans,
        'simulated_seconds': result.seconds,
        'n': config.n,
        'seed': config.seed,
        'config_hash': config_hash(config),
    }


def attack_jobs(settings: AttackSettings) -> list[tuple[SimConfig, int]]:
    jobs = []
    for protocol in sorted(set(settings.protocols)):
        for policy in sorted(set(settings.policies)):
            for alpha in sorted(set(settings.alphas)):
                for gamma in sorted(set(settings.gammas)):
                    for i in range(settings.runs):
                        config = attack_config(protocol, alpha, gamma, policy, k=settings.k, c=settings.c,
                                               n=settings.n, stop_blocks=settings.stop_blocks,
                                               seed=derive_seed(settings.seed, i))
                        jobs.append((config, i))
    return jobs


def cmd_attack_eval(settings: AttackSettings, workers: int = 1) -> Rows:
    jobs = attack_jobs(settings)
    logger.info("attack evaluation: %d runs", len(jobs))
    return parallel_map(attack_row, jobs, workers)


def summarize_attacks(rows: Rows, force: bool = False) -> Rows:
    summary = aggregate(rows, ['protocol', 'k', 'alpha', 'gamma', 'policy'], 'normalized_reward', force)
    best: dict[tuple, dict] = {}
    for entry in summary:
        entry['selfish_mining_bound'] = selfish_mining_bound(entry['alpha'])
        key = (entry['protocol'], entry['alpha'], entry['gamma'])
        if key not in best or entry['mean'] > best[key]['mean']:
            best[key] = entry
    for entry in summary:
        key = (entry['protocol'], entry['alpha'], entry['gamma'])
        entry['best_reference_policy'] = best[key]['policy']
    return summary
