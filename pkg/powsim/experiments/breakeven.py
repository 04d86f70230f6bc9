import logging
import math
from typing import Callable, NamedTuple, Optional

from scipy import stats

from powsim.config import SimConfig, attack_config, config_hash
from powsim.experiments.attack_eval import attack_row
from powsim.util import derive_seed, mean_and_stderr, parallel_map

logger = logging.getLogger(__name__)

StatusFound = 'found'
StatusBelowFloor = 'below-floor'
StatusNotInRange = 'not-in-range'

# evaluate(alpha, first_run, runs) -> normalized rewards of runs [first_run, first_run + runs)
Evaluator = Callable[[float, int, int], list[float]]


class Probe(NamedTuple):
    alpha: float
    mean: float
    stderr: float
    runs: int

    @property
    def excess(self) -> float:
        return self.mean - self.alpha

    @property
    def profitable(self) -> bool:
        return self.mean > self.alpha


class BreakEven(NamedTuple):
    alpha: Optional[float]
    status: str
    probes: list[Probe]

    def describe(self) -> str:
        if self.status == StatusBelowFloor:
            return "<= {0:.0%} (grid floor)".format(self.alpha)
        if self.status == StatusNotInRange:
            return "no break-even in range"
        return "{0:.1%}".format(self.alpha)


def is_ambiguous(probe: Probe, confidence: float) -> bool:
    if probe.runs < 2 or math.isnan(probe.stderr):
        return False
    quantile = stats.t.ppf(1 - (1 - confidence) / 2, probe.runs - 1)
    return abs(probe.excess) < quantile * probe.stderr


def probe_alpha(evaluate: Evaluator, alpha: float, runs: int, max_runs: int, confidence: float,
                consistent: Callable[[Probe], bool] = lambda probe: True) -> Probe:
    """Evaluate at alpha, doubling the batch while the sign of the excess
    reward is not resolved or contradicts the neighbouring probes."""
    values = list(evaluate(alpha, 0, runs))
    while True:
        mean, stderr = mean_and_stderr(values)
        probe = Probe(alpha, mean, stderr, len(values))
        if len(values) >= max_runs or (not is_ambiguous(probe, confidence) and consistent(probe)):
            return probe
        extra = min(len(values), max_runs - len(values))
        logger.info("alpha = %.4f unresolved after %d runs, adding %d", alpha, len(values), extra)
        values.extend(evaluate(alpha, len(values), extra))


def bisect_breakeven(evaluate: Evaluator, low: float = 0.05, high: float = 0.5, tolerance: float = 0.005,
                     runs: int = 30, max_runs: int = 120, confidence: float = 0.95) -> BreakEven:
    probes = []
    bottom = probe_alpha(evaluate, low, runs, max_runs, confidence)
    probes.append(bottom)
    if bottom.profitable:
        return BreakEven(low, StatusBelowFloor, probes)
    top = probe_alpha(evaluate, high, runs, max_runs, confidence)
    probes.append(top)
    if not top.profitable:
        return BreakEven(None, StatusNotInRange, probes)
    while high - low > tolerance:
        middle = (low + high) / 2

        def monotone(probe: Probe) -> bool:
            return bottom.excess <= probe.excess <= top.excess

        probe = probe_alpha(evaluate, middle, runs, max_runs, confidence, monotone)
        probes.append(probe)
        if not monotone(probe):
            logger.warning("non-monotone excess reward at alpha = %.4f after %d runs", middle, probe.runs)
        if probe.profitable:
            high, top = middle, probe
        else:
            low, bottom = middle, probe
    return BreakEven((low + high) / 2, StatusFound, probes)


class BreakEvenSettings(NamedTuple):
    protocol: str = 'tailstorm'
    policy: str = 'minordelay'
    gamma: float = 0.5
    k: int = 8
    n: int = 32
    stop_blocks: int = 2048
    runs: int = 30
    max_runs: int = 120
    low: float = 0.05
    high: float = 0.5
    tolerance: float = 0.005
    confidence: float = 0.95
    seed: int = 0


def breakeven_config(settings: BreakEvenSettings, alpha: float, seed: int = 0) -> SimConfig:
    return attack_config(settings.protocol, alpha, settings.gamma, settings.policy, k=settings.k, n=settings.n,
                         stop_blocks=settings.stop_blocks, seed=seed)


def simulation_evaluator(settings: BreakEvenSettings, workers: int = 1) -> Evaluator:
    def evaluate(alpha: float, first_run: int, runs: int) -> list[float]:
        jobs = [(breakeven_config(settings, alpha, derive_seed(settings.seed, i)), i)
                for i in range(first_run, first_run + runs)]
        return [row['normalized_reward'] for row in parallel_map(attack_row, jobs, workers)]

    return evaluate


def breakeven_row(settings: BreakEvenSettings, result: BreakEven) -> dict:
    # without a crossing the hash names the configuration at the grid floor
    alpha = result.alpha if result.alpha is not None else settings.low
    return {
        'protocol': settings.protocol,
        'policy': settings.policy,
        'gamma': settings.gamma,
        'k': settings.k,
        'status': result.status,
        'breakeven': result.alpha,
        'breakeven_label': result.describe(),
        'probes': len(result.probes),
        'runs': sum(probe.runs for probe in result.probes),
        'seed': settings.seed,
        'config_hash': config_hash(breakeven_config(settings, alpha)),
    }


def cmd_breakeven(settings: BreakEvenSettings, workers: int = 1) -> dict:
    result = bisect_breakeven(simulation_evaluator(settings, workers), settings.low, settings.high,
                              settings.tolerance, settings.runs, settings.max_runs, settings.confidence)
    logger.info("%s/%s at gamma = %s: %s", settings.protocol, settings.policy, settings.gamma, result.describe())
    return breakeven_row(settings, result)
