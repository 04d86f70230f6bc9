import json

from powsim.config import SimConfig, config_from_dict, config_to_dict
from powsim.io import ConfigFormat, ResultFormat, Rows


def dump_json(data, stream):
    json.dump(data, stream, indent=2, sort_keys=True)
    stream.write("\n")


def read_json(filepath: str) -> Rows:
    with open(filepath, 'r') as stream:
        data = json.load(stream)
    return data if isinstance(data, list) else [data]


def write_json(filepath: str, rows: Rows):
    with open(filepath, 'wt') as stream:
        dump_json(rows, stream)


def read_json_config(filepath: str) -> SimConfig:
    with open(filepath, 'r') as stream:
        return config_from_dict(json.load(stream))


def write_json_config(filepath: str, config: SimConfig):
    with open(filepath, 'wt') as stream:
        dump_json(config_to_dict(config), stream)


ResultFormatJSON: ResultFormat = ('.json', read_json, write_json)
ConfigFormatJSON: ConfigFormat = ('.json', read_json_config, write_json_config)
