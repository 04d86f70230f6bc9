from typing import Optional, TypeVar

from powsim.config import SimConfig
from powsim.dag import DagView
from powsim.errors import ConfigError
from powsim.format.format_csv import ResultFormatCSV
from powsim.format.format_json import ConfigFormatJSON, ResultFormatJSON
from powsim.format.format_jsonl import DagFormatJSONL
from powsim.format.format_yaml import ConfigFormatYAML
from powsim.io import ConfigFormat, ConfigReader, ConfigWriter, DagFormat, DagWriter, ResultFormat, ResultReader, \
    ResultWriter, Rows

config_formats: list[ConfigFormat] = [ConfigFormatYAML, ConfigFormatJSON]
result_formats: list[ResultFormat] = [ResultFormatCSV, ResultFormatJSON]
dag_formats: list[DagFormat] = [DagFormatJSONL]

config_readers: dict[str, ConfigReader] = dict([(suffix, reader) for suffix, reader, writer in config_formats])
config_writers: dict[str, ConfigWriter] = dict([(suffix, writer) for suffix, reader, writer in config_formats])
result_readers: dict[str, ResultReader] = dict([(suffix, reader) for suffix, reader, writer in result_formats])
result_writers: dict[str, ResultWriter] = dict([(suffix, writer) for suffix, reader, writer in result_formats])
dag_writers: dict[str, DagWriter] = dict([(suffix, writer) for suffix, reader, writer in dag_formats])

F = TypeVar('F')


def lookup(handlers: dict[str, F], filepath: str) -> F:
    handler: Optional[F] = None
    for suffix in handlers:
        if filepath.endswith(suffix):
            handler = handlers.get(suffix)
    if handler is None:
        raise ConfigError("unrecognized format: {0}".format(filepath))
    return handler


def read_config(filepath: str) -> SimConfig:
    return lookup(config_readers, filepath)(filepath)


def write_config(filepath: str, config: SimConfig):
    lookup(config_writers, filepath)(filepath, config)


def read_results(filepath: str) -> Rows:
    return lookup(result_readers, filepath)(filepath)


def write_results(filepath: str, rows: Rows):
    lookup(result_writers, filepath)(filepath, rows)


def write_dag(filepath: str, view: DagView):
    lookup(dag_writers, filepath)(filepath, view)
