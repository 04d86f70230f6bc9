from typing import Callable

from powsim.config import SimConfig
from powsim.consensus import ProtocolSpec
from powsim.errors import ConfigError
from powsim.protocol.protocol_bitcoin import bitcoin
from powsim.protocol.protocol_bk import BkParams, bk
from powsim.protocol.protocol_tailstorm import SchemeConstant, TailstormParams, tailstorm

ProtocolFactory = Callable[[SimConfig], ProtocolSpec]

protocols: dict[str, ProtocolFactory] = {
    'bitcoin': lambda config: bitcoin(),
    'tailstorm': lambda config: tailstorm(TailstormParams(config.k, config.c, config.reward_scheme)),
    'tsconst': lambda config: tailstorm(TailstormParams(config.k, config.c, SchemeConstant)),
    'bk': lambda config: bk(BkParams(config.k, config.c)),
}


def protocol_from_config(config: SimConfig) -> ProtocolSpec:
    factory = protocols.get(config.protocol)
    if factory is None:
        raise ConfigError("unsupported protocol: {0}".format(config.protocol))
    return factory(config)
