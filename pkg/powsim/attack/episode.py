import dataclasses
import logging
from typing import Generator, Optional

from powsim.attack.observation import Action, Observation, observe
from powsim.config import SimConfig
from powsim.dag import DagView
from powsim.engine import Environment, RunResult
from powsim.errors import UsageError
from powsim.metrics import accumulate_rewards, normalized_reward, winning_chain

logger = logging.getLogger(__name__)


class Episode:
    """Step-by-step control of the attacker, one decision per attacker Update.

    The reward of a step is the change of the attacker's normalized reward on
    the chain up to the common summary. At the end the value switches to the
    normalized reward on the winning chain, so the deltas of an episode sum to
    its final normalized reward.
    """

    def __init__(self):
        self._environment: Optional[Environment] = None
        self._driver: Optional[Generator[Observation, Action, None]] = None
        self._observation = Observation()
        self._value = 0.0
        self._done = True
        self._chain: dict[int, float] = {}

    @property
    def done(self) -> bool:
        return self._done

    def reset(self, config: SimConfig, seed: Optional[int] = None) -> Observation:
        if seed is not None:
            config = dataclasses.replace(config, seed=seed)
        self._environment = Environment(config, with_attacker=True)
        self._driver = self._environment.events()
        self._value = 0.0
        self._chain = {}
        self._done = False
        try:
            self._observation = next(self._driver)
        except StopIteration:
            self._finish()
        return self._observation

    def step(self, action: Action) -> tuple[Observation, float, bool]:
        if self._driver is None:
            raise UsageError("step called before reset")
        if self._done:
            raise UsageError("step called on a finished episode")
        try:
            self._observation = self._driver.send(action)
            value = self._common_value()
        except StopIteration:
            value = self._finish()
        delta = value - self._value
        self._value = value
        return self._observation, delta, self._done

    def result(self) -> RunResult:
        if self._environment is None:
            raise UsageError("no episode has been started")
        return self._environment.result()

    def _attacker_reward(self, view: DagView, s: int) -> float:
        protocol = self._environment.protocol
        attacker = self._environment.attacker.node
        path = []
        current = s
        while current not in self._chain:
            block = view.block(current)
            if len(block.parents) == 0:
                self._chain[current] = 0.0
                break
            path.append(current)
            current = view.last_summary_before(block)
        total = self._chain[current]
        for summary in reversed(path):
            total += protocol.reward(view, summary).get(attacker, 0.0)
            self._chain[summary] = total
        return total

    def _common_value(self) -> float:
        environment = self._environment
        view = environment.store.view()
        common = environment.attacker.last_situation.common
        progress = environment.protocol.progress(view.block(common))
        if progress == 0:
            return 0.0
        return self._attacker_reward(view, common) / progress

    def _finish(self) -> float:
        self._done = True
        environment = self._environment
        view = environment.store.view()
        protocol = environment.protocol
        self._observation = observe(view, environment.tips, protocol, environment.attacker.node)
        ledger = accumulate_rewards(view, winning_chain(view, protocol), protocol)
        if ledger.progress == 0:
            return 0.0
        value = normalized_reward(ledger, environment.attacker.node)
        logger.debug("episode finished with normalized reward %.4f", value)
        return value
