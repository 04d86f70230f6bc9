class SimulationError(Exception):
    pass


class StructuralError(SimulationError):
    pass


class VisibilityError(SimulationError):
    pass


class ConfigError(SimulationError):
    pass


class UsageError(SimulationError):
    pass


class UndefinedMetricError(SimulationError):
    pass
