from dataclasses import dataclass
from typing import Union

import numpy as np

from powsim.errors import ConfigError

ATTACKER = 0


def default_epsilon(pow_rate: float) -> float:
    return 1e-6 / pow_rate


@dataclass(frozen=True)
class UniformNetwork:
    delay: float = 0.0

    def __post_init__(self):
        if self.delay < 0:
            raise ConfigError("network delay must not be negative: {0}".format(self.delay))

    def network_delay(self, src: int, dst: int, rng: np.random.Generator) -> float:
        return self.delay


@dataclass(frozen=True)
class AttackerNetwork:
    """Attacker at node 0 hears everything at once and wins a share gamma of block races."""
    n: int
    epsilon: float
    gamma: float

    def __post_init__(self):
        if not 0 <= self.gamma < 1:
            raise ConfigError("gamma must be in [0, 1): {0}".format(self.gamma))
        if self.epsilon <= 0:
            raise ConfigError("epsilon must be positive: {0}".format(self.epsilon))
        if self.n <= 1 / (1 - self.gamma) + 1:
            raise ConfigError("attacker network needs n > 1/(1-gamma) + 1, got n = {0} for gamma = {1}".format(
                self.n, self.gamma))

    @property
    def release_bound(self) -> float:
        # gamma = 0: the attacker's release always arrives after the defenders' gossip
        if self.gamma == 0:
            return 2 * self.epsilon
        return (self.n - 2) / (self.n - 1) * self.epsilon / self.gamma

    def network_delay(self, src: int, dst: int, rng: np.random.Generator) -> float:
        if dst == ATTACKER:
            return 0.0
        if src == ATTACKER:
            if self.gamma == 0:
                return self.release_bound
            return float(rng.uniform(0.0, self.release_bound))
        return self.epsilon


NetworkModel = Union[UniformNetwork, AttackerNetwork]


def staged_races(network: AttackerNetwork, races: int, rng: np.random.Generator) -> float:
    """Fraction of defenders that see the attacker's block first when it is
    released the moment a defender block appears. The defender who mined
    the competing block never switches."""
    if network.gamma == 0 or races <= 0:
        return 0.0
    others = network.n - 2
    arrivals = rng.uniform(0.0, network.release_bound, size=(races, others))
    wins = (arrivals < network.epsilon).sum(axis=1) / (network.n - 1)
    return float(np.mean(wins))
