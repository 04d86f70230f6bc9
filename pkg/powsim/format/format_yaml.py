import yaml

from powsim.config import SimConfig, config_from_dict, config_to_dict
from powsim.errors import ConfigError
from powsim.io import ConfigFormat


def read_yaml(filepath: str) -> SimConfig:
    with open(filepath, 'r') as stream:
        data = yaml.safe_load(stream)
        if not isinstance(data, dict):
            raise ConfigError("configuration must be a mapping: {0}".format(filepath))
        return config_from_dict(data)


def write_yaml(filepath: str, config: SimConfig):
    with open(filepath, 'wt') as stream:
        yaml.safe_dump(config_to_dict(config), stream, default_flow_style=None)


ConfigFormatYAML: ConfigFormat = ('.yaml', read_yaml, write_yaml)
