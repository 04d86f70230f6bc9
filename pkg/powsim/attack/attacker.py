import logging
from typing import Generator, Optional

from powsim.attack.observation import Action, ExtendMode, Observation, Situation, Withhold, situation
from powsim.consensus import ProtocolSpec, UpdateResult, summary_template
from powsim.dag import DagView
from powsim.network import ATTACKER

logger = logging.getLogger(__name__)


class Attacker:
    """Update rule of the attacking node for any protocol.

    Own blocks stay withheld until a Match or Override releases them. The policy
    is consulted once per Update through the generator protocol: update() yields
    an Observation and expects the Action to be sent back.
    """

    protocol: ProtocolSpec
    node: int
    withheld: dict[int, None]
    claimed: set[int]
    last_situation: Optional[Situation]

    def __init__(self, protocol: ProtocolSpec, node: int = ATTACKER):
        self.protocol = protocol
        self.node = node
        self.withheld = {}
        self.claimed = set()
        self.last_situation = None

    def on_reify(self, b: int, fresh: bool = True):
        self.claimed.add(b)
        if fresh:
            self.withheld[b] = None

    def release(self, withhold: Withhold, defender_tip: int, view: DagView) -> list[int]:
        if withhold is Withhold.WAIT or withhold is Withhold.ADOPT or len(self.withheld) == 0:
            return []
        limit = self.protocol.progress(view.block(defender_tip))
        if withhold is Withhold.OVERRIDE:
            limit += 1
        share = [x for x in self.withheld if self.protocol.progress(view.block(x)) <= limit]
        if len(share) == 0:
            share = list(self.withheld)
        for x in share:
            del self.withheld[x]
        logger.debug("attacker releases %d blocks (%s), %d still withheld", len(share), withhold.value,
                     len(self.withheld))
        return share

    def update(self, view: DagView, tips: list[int], b: int) -> Generator[Observation, Action, UpdateResult]:
        protocol = self.protocol
        block = view.block(b)
        pref = tips[self.node]
        if block.summary and b in self.claimed:
            pref = b
        global_view = view.store.view()
        current = list(tips)
        current[self.node] = pref
        self.last_situation = situation(global_view, current, protocol, self.node)
        action = yield self.last_situation.observation
        share = self.release(action.withhold, self.last_situation.defender_tip, global_view)
        if action.withhold is Withhold.ADOPT:
            pref = self.last_situation.defender_tip
        append = []
        if protocol.select is not None:
            if action.extend is ExtendMode.EXCLUSIVE:
                candidates = view.confirming_mined_by(pref, self.node)
            else:
                candidates = view.confirming(pref)
            if len(candidates) >= protocol.k:
                template = summary_template(view, pref, protocol.select(view, candidates, self.node))
                existing = view.store.find_equivalent(template)
                if existing is not None and view.visible(existing):
                    self.claimed.add(existing)
                    pref = existing
                else:
                    append.append(template)
        return UpdateResult(pref, share, append)
