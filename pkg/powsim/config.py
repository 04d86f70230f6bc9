import hashlib
import json
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

from powsim.errors import ConfigError
from powsim.network import AttackerNetwork, NetworkModel, UniformNetwork, default_epsilon

PROTOCOL_NAMES = ('bitcoin', 'tailstorm', 'tsconst', 'bk')
POLICY_NAMES = ('honest', 'getahead', 'minordelay', 'sm1')
REWARD_SCHEMES = ('discount', 'constant')
STOP_KINDS = ('blocks', 'pows', 'seconds')

SECONDS_PER_DAY = 24 * 3600


class StopCondition(NamedTuple):
    kind: str
    value: float


@dataclass(frozen=True)
class SimConfig:
    protocol: str = 'bitcoin'
    k: int = 1
    c: float = 1.0
    reward_scheme: str = 'discount'
    n: int = 2
    hashrates: tuple[float, ...] = (1.0, 1.0)
    pow_rate: float = 1.0
    network: NetworkModel = field(default_factory=UniformNetwork)
    seed: int = 0
    stop: StopCondition = StopCondition('pows', 100)
    policy: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, 'hashrates', tuple(float(x) for x in self.hashrates))
        object.__setattr__(self, 'stop', StopCondition(*self.stop))
        if self.protocol not in PROTOCOL_NAMES:
            raise ConfigError("unsupported protocol: {0}".format(self.protocol))
        if self.reward_scheme not in REWARD_SCHEMES:
            raise ConfigError("unsupported reward scheme: {0}".format(self.reward_scheme))
        if self.protocol == 'bitcoin' and self.k != 1:
            raise ConfigError("bitcoin has no subblocks, k must be 1: {0}".format(self.k))
        if self.protocol in ('tailstorm', 'tsconst') and self.k < 2:
            raise ConfigError("tailstorm needs k >= 2: {0}".format(self.k))
        if self.protocol == 'bk' and self.k < 1:
            raise ConfigError("bk needs k >= 1: {0}".format(self.k))
        if self.c <= 0:
            raise ConfigError("reward cap c must be positive: {0}".format(self.c))
        if self.n < 1:
            raise ConfigError("need at least one node: {0}".format(self.n))
        if len(self.hashrates) != self.n:
            raise ConfigError("expected {0} hash rates, got {1}".format(self.n, len(self.hashrates)))
        if any(x < 0 for x in self.hashrates) or sum(self.hashrates) <= 0:
            raise ConfigError("hash rates must be non-negative with a positive sum: {0}".format(self.hashrates))
        if not self.pow_rate > 0:
            raise ConfigError("pow rate must be positive: {0}".format(self.pow_rate))
        if isinstance(self.network, AttackerNetwork) and self.network.n != self.n:
            raise ConfigError("attacker network is built for {0} nodes, config has {1}".format(
                self.network.n, self.n))
        if self.stop.kind not in STOP_KINDS:
            raise ConfigError("unsupported stop condition: {0}".format(self.stop.kind))
        if not self.stop.value > 0:
            raise ConfigError("stop value must be positive: {0}".format(self.stop.value))
        if self.policy is not None:
            if self.policy not in POLICY_NAMES:
                raise ConfigError("unsupported policy: {0}".format(self.policy))
            if self.n < 2:
                raise ConfigError("an attacker needs at least one defender")


def network_from_dict(data: dict, n: int, pow_rate: float) -> NetworkModel:
    kind = data.get('type', 'uniform')
    if kind == 'uniform':
        return UniformNetwork(float(data.get('delay', 0.0)))
    if kind == 'attacker':
        epsilon = float(data.get('epsilon', default_epsilon(pow_rate)))
        return AttackerNetwork(n, epsilon, float(data.get('gamma', 0.5)))
    raise ConfigError("unsupported network type: {0}".format(kind))


def network_to_dict(data: NetworkModel) -> dict:
    if isinstance(data, AttackerNetwork):
        return {'type': 'attacker', 'epsilon': data.epsilon, 'gamma': data.gamma}
    return {'type': 'uniform', 'delay': data.delay}


ConfigKeys = ('protocol', 'k', 'c', 'reward_scheme', 'n', 'kappa', 'lambda', 'network', 'seed', 'stop', 'policy')


def config_from_dict(data: dict) -> SimConfig:
    unknown = [key for key in data if key not in ConfigKeys]
    if len(unknown) > 0:
        raise ConfigError("unknown configuration keys: {0}".format(", ".join(sorted(unknown))))
    kappa = data.get('kappa', [1.0, 1.0])
    n = int(data.get('n', len(kappa)))
    pow_rate = float(data.get('lambda', 1.0))
    stop = data.get('stop', {})
    return SimConfig(
        protocol=data.get('protocol', 'bitcoin'),
        k=int(data.get('k', 1)),
        c=float(data.get('c', 1.0)),
        reward_scheme=data.get('reward_scheme', 'discount'),
        n=n,
        hashrates=tuple(kappa),
        pow_rate=pow_rate,
        network=network_from_dict(data.get('network', {}), n, pow_rate),
        seed=int(data.get('seed', 0)),
        stop=StopCondition(stop.get('kind', 'pows'), stop.get('value', 100)),
        policy=data.get('policy'),
    )


def config_to_dict(data: SimConfig) -> dict:
    serialized = {
        'protocol': data.protocol,
        'k': data.k,
        'c': data.c,
        'reward_scheme': data.reward_scheme,
        'n': data.n,
        'kappa': list(data.hashrates),
        'lambda': data.pow_rate,
        'network': network_to_dict(data.network),
        'seed': data.seed,
        'stop': {'kind': data.stop.kind, 'value': data.stop.value},
    }
    if data.policy is not None:
        serialized['policy'] = data.policy
    return serialized


def config_hash(data: SimConfig) -> str:
    serialized = config_to_dict(data)
    del serialized['seed']
    canonical = json.dumps(serialized, sort_keys=True, separators=(',', ':'))
    return hashlib.sha256(canonical.encode('utf-8')).hexdigest()[:12]


def attack_config(protocol: str, alpha: float, gamma: float, policy: Optional[str],
                  k: int = 8, c: float = 1.0, n: int = 32, stop_blocks: int = 2048,
                  pow_rate: float = 1.0, seed: int = 0) -> SimConfig:
    if not 0 <= alpha < 1:
        raise ConfigError("attacker hash rate must be in [0, 1): {0}".format(alpha))
    if n < 2:
        raise ConfigError("an attack needs at least one defender")
    if protocol == 'bitcoin':
        k = 1
    defender = (1 - alpha) / (n - 1)
    return SimConfig(
        protocol=protocol,
        k=k,
        c=c,
        reward_scheme='constant' if protocol == 'tsconst' else 'discount',
        n=n,
        hashrates=(alpha,) + (defender,) * (n - 1),
        pow_rate=pow_rate,
        network=AttackerNetwork(n, default_epsilon(pow_rate), gamma),
        seed=seed,
        stop=StopCondition('blocks', stop_blocks),
        policy=policy,
    )


def observation_pows(k: int, interval: float) -> int:
    return math.floor(SECONDS_PER_DAY * k / interval)


def fairness_config(protocol: str, k: int, interval: float, weak: float = 0.01,
                    delay: float = 6.0, seed: int = 0) -> SimConfig:
    if protocol not in ('bitcoin', 'tailstorm'):
        raise ConfigError("fairness is measured for bitcoin and tailstorm only: {0}".format(protocol))
    if not 0 < weak < 1:
        raise ConfigError("invalid miner split: {0}".format(weak))
    if interval <= 0:
        raise ConfigError("block interval must be positive: {0}".format(interval))
    if interval / k < delay:
        raise ConfigError("expected subblock interval T/k = {0:.2f} s is below the network delay of {1} s".format(
            interval / k, delay))
    return SimConfig(
        protocol=protocol,
        k=k,
        n=2,
        hashrates=(weak, 1 - weak),
        pow_rate=k / interval,
        network=UniformNetwork(delay),
        seed=seed,
        stop=StopCondition('pows', observation_pows(k, interval)),
    )
