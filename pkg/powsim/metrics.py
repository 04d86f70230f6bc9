from typing import NamedTuple

from powsim.consensus import ProtocolSpec, best_block
from powsim.dag import DagView
from powsim.errors import ConfigError, UndefinedMetricError


class RewardLedger(NamedTuple):
    rewards: dict[int, float]
    basis: int
    progress: int

    @property
    def total(self) -> float:
        return sum(self.rewards.values())


class OrphanBoundInputs(NamedTuple):
    tau0: float
    transmit: float
    T: float
    k: int


class ShortTermRates(NamedTuple):
    summarize_now: float
    delay: float
    difference: float
    gap: float


def winning_chain(view: DagView, protocol: ProtocolSpec) -> int:
    top = max(block.height for block in view.blocks() if block.summary)
    candidates = [block.id for block in view.blocks() if block.summary and block.height == top]
    return best_block(view, candidates, protocol)


def accumulate_rewards(view: DagView, tip: int, protocol: ProtocolSpec) -> RewardLedger:
    rewards: dict[int, float] = {}
    current = view.block(tip)
    while len(current.parents) > 0:
        for miner, amount in protocol.reward(view, current.id).items():
            rewards[miner] = rewards.get(miner, 0.0) + amount
        current = view.block(view.last_summary_before(current))
    return RewardLedger(rewards, tip, protocol.progress(view.block(tip)))


def normalized_reward(ledger: RewardLedger, attacker: int) -> float:
    if ledger.progress <= 0:
        raise UndefinedMetricError("normalized reward is undefined at zero progress (block {0})".format(
            ledger.basis))
    return ledger.rewards.get(attacker, 0.0) / ledger.progress


def relative_reward(ledger: RewardLedger, miner: int, hashrate_share: float) -> float:
    """Reward share over hash-rate share; 1.0 is a fair payout."""
    if ledger.total <= 0:
        raise UndefinedMetricError("no reward was paid up to block {0}".format(ledger.basis))
    return ledger.rewards.get(miner, 0.0) / ledger.total / hashrate_share


def selfish_mining_bound(alpha: float) -> float:
    return alpha / (1 - alpha)


def orphan_bound(inputs: OrphanBoundInputs) -> float:
    if inputs.T <= 0 or inputs.k < 1:
        raise ConfigError("orphan bound needs T > 0 and k >= 1: {0}".format(inputs))
    if inputs.tau0 < 0 or inputs.transmit < 0:
        raise ConfigError("latencies must not be negative: {0}".format(inputs))
    return inputs.tau0 / inputs.T + inputs.transmit / (inputs.k * inputs.T)


def measured_orphan_rate(view: DagView, tip: int) -> float:
    confirmed = view.ancestors(tip) | {tip}
    pending: set[int] = set()
    stack = [tip]
    while stack:
        for child in view.children(stack.pop()):
            if child not in pending:
                pending.add(child)
                stack.append(child)
    included = 0
    orphaned = 0
    for block in view.blocks():
        if not block.pow:
            continue
        if block.id in confirmed:
            included += 1
        elif block.id not in pending:
            orphaned += 1
    if included == 0:
        return 0.0
    return orphaned / included


class AttackOutcome(NamedTuple):
    normalized_reward: float
    orphans: float
    progress: int


def attack_outcome(view: DagView, protocol: ProtocolSpec, attacker: int) -> AttackOutcome:
    tip = winning_chain(view, protocol)
    ledger = accumulate_rewards(view, tip, protocol)
    return AttackOutcome(normalized_reward(ledger, attacker), measured_orphan_rate(view, tip), ledger.progress)


def short_term_rates(k: int) -> ShortTermRates:
    if k < 2:
        raise ConfigError("short-term rates need k >= 2: {0}".format(k))
    summarize_now = (k - 1) / k
    delay = k / (k + 1)
    # difference is the published closed form, gap the plain subtraction
    return ShortTermRates(summarize_now, delay, 1 / (k * k - 1), delay - summarize_now)
