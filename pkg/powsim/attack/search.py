import dataclasses
import logging
from typing import NamedTuple, Optional, Sequence

import numpy as np

from powsim.attack.policy import ThresholdGetAhead, ThresholdHonest, ThresholdMinorDelay, ThresholdPolicy, \
    ThresholdSM1
from powsim.config import SimConfig
from powsim.engine import run
from powsim.errors import ConfigError
from powsim.metrics import attack_outcome
from powsim.network import ATTACKER
from powsim.util import derive_seed, parallel_map

logger = logging.getLogger(__name__)

SearchStart = (ThresholdHonest, ThresholdMinorDelay, ThresholdGetAhead, ThresholdSM1)


class SearchBudget(NamedTuple):
    candidates: int
    runs: int


class SearchResult(NamedTuple):
    policy: ThresholdPolicy
    score: float
    evaluated: list[tuple[ThresholdPolicy, float]]


def evaluate_run(job: tuple[SimConfig, ThresholdPolicy]) -> float:
    config, policy = job
    result = run(config, policy)
    return attack_outcome(result.view, result.protocol, ATTACKER).normalized_reward


def evaluate_policy(config: SimConfig, policy: ThresholdPolicy, runs: int, seed: int, workers: int = 1) -> float:
    # every candidate sees the same run seeds
    jobs = [(dataclasses.replace(config, seed=derive_seed(seed, i)), policy) for i in range(runs)]
    return float(np.mean(parallel_map(evaluate_run, jobs, workers)))


def mutate(policy: ThresholdPolicy, k: int, rng: np.random.Generator) -> ThresholdPolicy:
    name = ThresholdPolicy._fields[int(rng.integers(len(ThresholdPolicy._fields)))]
    if name == 'adopt_deficit':
        value = int(rng.integers(1, 4))
    elif name in ('min_defender_height', 'match_max_height'):
        value = int(rng.integers(0, 3))
    elif name == 'override_min_lead':
        value = int(rng.integers(0, 4))
    elif name == 'override_max_lead':
        value = None if rng.random() < 0.5 else policy.override_min_lead + int(rng.integers(0, 3))
    elif name == 'exclusive_min_own':
        value = None if rng.random() < 0.5 else int(rng.integers(1, k + 1))
    else:
        value = int(rng.integers(0, k + 1))
    return policy._replace(**{name: value})


def threshold_search(config: SimConfig, budget: SearchBudget, seed: int = 0,
                     start: Optional[Sequence[ThresholdPolicy]] = None, workers: int = 1) -> SearchResult:
    """Reference members first, then single-field mutations of the best so far."""
    rng = np.random.default_rng(seed)
    pending = list(SearchStart if start is None else start)
    if budget.candidates < 1 or len(pending) == 0:
        raise ConfigError("search needs at least one candidate and one start policy, got budget {0}".format(
            budget.candidates))
    evaluated: list[tuple[ThresholdPolicy, float]] = []
    seen: set[ThresholdPolicy] = set()
    best: Optional[tuple[ThresholdPolicy, float]] = None
    while len(evaluated) < budget.candidates:
        if len(pending) > 0:
            candidate = pending.pop(0)
        else:
            candidate = mutate(best[0], config.k, rng)
            for _ in range(20):
                if candidate not in seen:
                    break
                candidate = mutate(candidate, config.k, rng)
        if candidate in seen:
            continue
        seen.add(candidate)
        score = evaluate_policy(config, candidate, budget.runs, seed, workers)
        evaluated.append((candidate, score))
        logger.info("candidate %d/%d scored %.4f: %s", len(evaluated), budget.candidates, score, candidate)
        if best is None or score > best[1]:
            best = (candidate, score)
    return SearchResult(best[0], best[1], evaluated)
