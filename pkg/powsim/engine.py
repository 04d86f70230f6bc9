import bisect
import heapq
import logging
import math
from collections import Counter
from typing import Generator, NamedTuple, Optional

import numpy as np

from powsim.attack.attacker import Attacker
from powsim.attack.observation import Action, Observation, Policy
from powsim.attack.policy import policy_from_name
from powsim.config import SimConfig
from powsim.consensus import ProtocolSpec
from powsim.dag import DagStore, DagView, Template
from powsim.errors import UsageError
from powsim.network import ATTACKER
from powsim.protocol.registry import protocol_from_config

logger = logging.getLogger(__name__)

EventPow = 'pow'
EventDelivery = 'delivery'

GenesisMiner = -1


class Event(NamedTuple):
    time: float
    seq: int
    kind: str
    block: int
    node: int


class MiningProcess(NamedTuple):
    pow_rate: float
    cumulative: tuple[float, ...]

    @classmethod
    def of(cls, pow_rate: float, hashrates) -> 'MiningProcess':
        return cls(pow_rate, tuple(float(x) for x in np.cumsum(hashrates)))

    def next_pow(self, rng: np.random.Generator) -> tuple[float, int]:
        delay = float(rng.exponential(1 / self.pow_rate))
        target = rng.random() * self.cumulative[-1]
        return delay, bisect.bisect_right(self.cumulative, target)


class RunResult(NamedTuple):
    view: DagView
    tips: list[int]
    events: dict[str, int]
    seconds: float
    pows: int
    protocol: ProtocolSpec


class Environment:
    """Continuous-time mining, validity-gated reification and ordered delivery.

    events() is a generator. When an attacker is present it yields an
    Observation on every attacker Update and resumes with the Action sent in.
    """

    config: SimConfig
    protocol: ProtocolSpec
    rng: np.random.Generator
    store: DagStore
    attacker: Optional[Attacker]
    tips: list[int]
    now: float
    pows: int

    def __init__(self, config: SimConfig, with_attacker: Optional[bool] = None):
        if with_attacker is None:
            with_attacker = config.policy is not None
        self.config = config
        self.protocol = protocol_from_config(config)
        self.rng = np.random.default_rng(config.seed)
        self.store = DagStore(self.rng)
        self.mining = MiningProcess.of(config.pow_rate, config.hashrates)
        self.attacker = Attacker(self.protocol, ATTACKER) if with_attacker else None
        self.tips = []
        self.now = 0.0
        self.pows = 0
        self.counts: Counter = Counter()
        self._queue: list[Event] = []
        self._seq = 0
        self._parked: dict[tuple[int, int], list[int]] = {}
        self._arrival: dict[int, list[float]] = {}
        self._started = False

    def _push(self, time: float, kind: str, block: int, node: int):
        heapq.heappush(self._queue, Event(time, self._seq, kind, block, node))
        self._seq += 1

    def _schedule_pow(self):
        delay, miner = self.mining.next_pow(self.rng)
        self._push(self.now + delay, EventPow, -1, miner)

    def _stopped(self) -> bool:
        stop = self.config.stop
        if stop.kind == 'blocks':
            return len(self.store) >= stop.value
        if stop.kind == 'pows':
            return self.pows >= stop.value
        return False

    def _is_attacker(self, node: int) -> bool:
        return self.attacker is not None and node == self.attacker.node

    def events(self) -> Generator[Observation, Action, None]:
        if self._started:
            raise UsageError("environment has already been run")
        self._started = True
        genesis = self.store.reify(self.protocol.root(), GenesisMiner, False, 0.0)
        for node in range(self.config.n):
            self.store.set_visible(genesis, node)
        self.tips = [genesis] * self.config.n
        self._schedule_pow()
        stop = self.config.stop
        while self._queue:
            event = heapq.heappop(self._queue)
            if stop.kind == 'seconds' and event.time > stop.value:
                self.now = stop.value
                break
            self.now = event.time
            self.counts[event.kind] += 1
            if event.kind == EventPow:
                yield from self._mine(event.node)
            else:
                yield from self._deliver(event.block, event.node)
            if self._stopped():
                break
        logger.debug("run finished: seed %d, %d blocks, %d pows, %.3f s",
                     self.config.seed, len(self.store), self.pows, self.now)

    def _mine(self, node: int):
        self.pows += 1
        view = self.store.view(node)
        template = self.protocol.extend(view, self.tips[node])
        block = self.store.prepare(template, node, True, self.now)
        if self.protocol.validate(view, block):
            self.store.commit(block)
            if self._is_attacker(node):
                self.attacker.on_reify(block.id)
            yield from self._deliver(block.id, node)
        else:
            logger.debug("node %d mined an invalid block on %s", node, template.parents)
        self._schedule_pow()

    def _deliver(self, b: int, node: int):
        store = self.store
        if store.is_visible(b, node):
            return
        for parent in store.blocks[b].parents:
            if not store.is_visible(parent, node):
                self._parked.setdefault((node, parent), []).append(b)
                return
        store.set_visible(b, node)
        for child in self._parked.pop((node, b), ()):
            self._push(self.now, EventDelivery, child, node)
        view = store.view(node)
        if self._is_attacker(node):
            result = yield from self.attacker.update(view, self.tips, b)
        else:
            result = self.protocol.update(view, self.tips[node], b, node)
        self.tips[node] = result.tip
        for x in result.share:
            self._broadcast(x, node)
        for template in result.append:
            yield from self._append(template, node)

    def _append(self, template: Template, node: int):
        view = self.store.view(node)
        block = self.store.prepare(template, node, False, self.now)
        if not self.protocol.validate(view, block):
            logger.debug("node %d: dropped invalid append on %s", node, template.parents)
            return
        existing = self.store.find_equivalent(template)
        if existing is not None:
            if self._is_attacker(node):
                self.attacker.on_reify(existing, fresh=False)
            yield from self._deliver(existing, node)
            return
        self.store.commit(block)
        if self._is_attacker(node):
            self.attacker.on_reify(block.id)
        yield from self._deliver(block.id, node)

    def _broadcast(self, b: int, src: int):
        arrival = self._arrival.get(b)
        if arrival is None:
            arrival = [math.inf] * self.config.n
            self._arrival[b] = arrival
        network = self.config.network
        for dst in range(self.config.n):
            if dst == src or self.store.is_visible(b, dst):
                continue
            time = self.now + network.network_delay(src, dst, self.rng)
            if time < arrival[dst]:
                arrival[dst] = time
                self._push(time, EventDelivery, b, dst)

    def result(self) -> RunResult:
        return RunResult(self.store.view(), list(self.tips), dict(self.counts), self.now, self.pows, self.protocol)

    def drive(self, policy: Optional[Policy] = None) -> RunResult:
        if self.attacker is not None and policy is None:
            raise UsageError("an attacker needs a policy")
        driver = self.events()
        try:
            observation = next(driver)
            while True:
                observation = driver.send(policy(observation))
        except StopIteration:
            pass
        return self.result()


def run(config: SimConfig, policy: Optional[Policy] = None) -> RunResult:
    if policy is None and config.policy is not None:
        policy = policy_from_name(config.policy)
    environment = Environment(config, with_attacker=policy is not None)
    return environment.drive(policy)
