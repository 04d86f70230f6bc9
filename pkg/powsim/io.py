from typing import Callable

from powsim.config import SimConfig
from powsim.dag import DagView

Rows = list[dict]

ConfigReader = Callable[[str], SimConfig]
ConfigWriter = Callable[[str, SimConfig], None]
ConfigFormat = tuple[str, ConfigReader, ConfigWriter]

ResultReader = Callable[[str], Rows]
ResultWriter = Callable[[str, Rows], None]
ResultFormat = tuple[str, ResultReader, ResultWriter]

DagReader = Callable[[str], list[dict]]
DagWriter = Callable[[str, DagView], None]
DagFormat = tuple[str, DagReader, DagWriter]
