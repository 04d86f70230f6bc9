import numpy as np

from powsim.dag import DagStore, ProtocolFields, Template


class Builder:
    """Hand-built DAGs for protocol and metric checks. Every block is visible
    to every node unless hidden is given."""

    def __init__(self, nodes: int = 2, seed: int = 0):
        self.store = DagStore(np.random.default_rng(seed))
        self.nodes = nodes
        self.genesis = self.add((), ProtocolFields(True, 0, 0), miner=-1, pow=False)

    def add(self, parents, fields: ProtocolFields, miner: int = 0, pow: bool = True, hidden=()) -> int:
        b = self.store.reify(Template(tuple(parents), fields), miner, pow, float(len(self.store)))
        for node in range(self.nodes):
            if node not in hidden:
                self.store.set_visible(b, node)
        return b

    def btc(self, parent: int, miner: int = 0) -> int:
        height = self.store.blocks[parent].height + 1
        return self.add((parent,), ProtocolFields(True, height, 0), miner)

    def sub(self, parent: int, miner: int = 0, hidden=()) -> int:
        block = self.store.blocks[parent]
        depth = 0 if block.summary else block.depth
        return self.add((parent,), ProtocolFields(False, block.height, depth + 1), miner, hidden=hidden)

    def vote(self, parent: int, miner: int = 0) -> int:
        return self.add((parent,), ProtocolFields(False, self.store.blocks[parent].height, 0), miner)

    def summary(self, parents, height: int, miner: int = 0) -> int:
        return self.add(parents, ProtocolFields(True, height, 0), miner, pow=False)

    def view(self, observer=None):
        return self.store.view(observer)
