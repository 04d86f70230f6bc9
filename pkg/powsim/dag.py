from typing import Iterable, Iterator, NamedTuple, Optional, Union

import numpy as np

from powsim.errors import StructuralError, VisibilityError

GLOBAL = None


class ProtocolFields(NamedTuple):
    summary: bool = True
    height: int = 0
    depth: int = 0


class Template(NamedTuple):
    parents: tuple[int, ...]
    fields: ProtocolFields


class Block(NamedTuple):
    id: int
    parents: tuple[int, ...]
    pow: bool
    miner: int
    hash_value: int
    reified_at: float
    fields: ProtocolFields

    @property
    def summary(self) -> bool:
        return self.fields.summary

    @property
    def height(self) -> int:
        return self.fields.height

    @property
    def depth(self) -> int:
        return self.fields.depth


BlockRef = Union[int, Block]


class DagStore:
    """Append-only block DAG. Visibility is kept as one bit mask per block."""

    def __init__(self, rng: np.random.Generator):
        self.rng = rng
        self.blocks: list[Block] = []
        self._children: list[list[int]] = []
        self._visible: list[int] = []
        self._last_summary: dict[int, int] = {}
        self._summarized: dict[int, frozenset[int]] = {}

    def __len__(self) -> int:
        return len(self.blocks)

    def prepare(self, template: Template, miner: int, pow: bool, now: float) -> Block:
        for parent in template.parents:
            if parent < 0 or parent >= len(self.blocks):
                raise StructuralError("unknown parent block: {0}".format(parent))
        hash_value = int.from_bytes(self.rng.bytes(8), 'little')
        return Block(len(self.blocks), tuple(template.parents), pow, miner, hash_value, now, template.fields)

    def commit(self, block: Block) -> int:
        if block.id != len(self.blocks):
            raise StructuralError("block {0} was prepared against an older store".format(block.id))
        self.blocks.append(block)
        self._children.append([])
        self._visible.append(0)
        for parent in block.parents:
            self._children[parent].append(block.id)
        return block.id

    def reify(self, template: Template, miner: int, pow: bool, now: float) -> int:
        return self.commit(self.prepare(template, miner, pow, now))

    def set_visible(self, b: int, node: int):
        self._visible[b] |= 1 << node

    def is_visible(self, b: int, node: Optional[int]) -> bool:
        if node is GLOBAL:
            return 0 <= b < len(self.blocks)
        return (self._visible[b] >> node) & 1 == 1

    def is_public(self, b: int, excluded: int) -> bool:
        return self._visible[b] & ~(1 << excluded) != 0

    def children(self, b: int) -> list[int]:
        return self._children[b]

    def view(self, observer: Optional[int] = GLOBAL) -> 'DagView':
        return DagView(self, observer)

    def public_view(self, excluded: int) -> 'PublicView':
        return PublicView(self, excluded)

    def find_equivalent(self, template: Template) -> Optional[int]:
        if len(template.parents) == 0:
            return None
        for child in self._children[template.parents[0]]:
            block = self.blocks[child]
            if not block.pow and block.parents == template.parents and block.fields == template.fields:
                return child
        return None

    # Ancestry is fixed at reification, so these caches hold for every observer.
    def last_summary_before(self, block: Block) -> int:
        if len(block.parents) == 0:
            raise StructuralError("no summary before block {0}".format(block.id))
        parent = self.blocks[block.parents[0]]
        if parent.summary:
            return parent.id
        cached = self._last_summary.get(parent.id)
        if cached is None:
            cached = self.last_summary_before(parent)
            self._last_summary[parent.id] = cached
        return cached

    def subblocks_between(self, block: Block, p: int) -> set[int]:
        result: set[int] = set()
        stack = list(block.parents)
        if not block.summary and self.last_summary_before(block) == p:
            result.add(block.id)
        while stack:
            current = self.blocks[stack.pop()]
            if current.summary or current.id in result:
                continue
            if self.last_summary_before(current) != p:
                continue
            result.add(current.id)
            stack.extend(current.parents)
        return result

    def summarized(self, s: int) -> frozenset[int]:
        cached = self._summarized.get(s)
        if cached is None:
            block = self.blocks[s]
            if len(block.parents) == 0:
                cached = frozenset()
            else:
                cached = frozenset(self.subblocks_between(block, self.last_summary_before(block)))
            self._summarized[s] = cached
        return cached


class DagView:
    """Blocks of a store as seen by one node, or by everyone for GLOBAL.

    The engine never changes visibility while a protocol function holds a view.
    """
    __slots__ = ('store', 'observer')

    def __init__(self, store: DagStore, observer: Optional[int] = GLOBAL):
        self.store = store
        self.observer = observer

    def visible(self, b: int) -> bool:
        return self.store.is_visible(b, self.observer)

    def block(self, b: BlockRef) -> Block:
        if isinstance(b, Block):
            return b
        if not self.visible(b):
            raise VisibilityError("block {0} is not visible to node {1}".format(b, self.observer))
        return self.store.blocks[b]

    def blocks(self) -> Iterator[Block]:
        for block in self.store.blocks:
            if self.visible(block.id):
                yield block

    def children(self, b: int) -> list[int]:
        return [child for child in self.store.children(b) if self.visible(child)]

    def ancestors(self, b: BlockRef) -> set[int]:
        result: set[int] = set()
        stack = list(self.block(b).parents)
        while stack:
            current = stack.pop()
            if current in result:
                continue
            result.add(current)
            stack.extend(self.store.blocks[current].parents)
        return result

    def last_summary_before(self, b: BlockRef) -> int:
        return self.store.last_summary_before(self.block(b))

    def subblocks_between(self, b: BlockRef, p: int) -> set[int]:
        return self.store.subblocks_between(self.block(b), p)

    def confirming(self, s: int) -> list[int]:
        result = []
        stack = [s]
        while stack:
            for child in self.store.children(stack.pop()):
                if not self.visible(child) or self.store.blocks[child].summary:
                    continue
                result.append(child)
                stack.append(child)
        return sorted(result)

    def confirming_mined_by(self, s: int, miner: int) -> list[int]:
        result = []
        stack = [s]
        while stack:
            for child in self.store.children(stack.pop()):
                block = self.store.blocks[child]
                if not self.visible(child) or block.summary or block.miner != miner:
                    continue
                result.append(child)
                stack.append(child)
        return sorted(result)

    def max_depth(self, blocks: Iterable[int]) -> int:
        return max((self.store.blocks[b].depth for b in blocks), default=0)


class PublicView(DagView):
    """Blocks that at least one node other than the excluded one has received."""
    __slots__ = ('excluded',)

    def __init__(self, store: DagStore, excluded: int):
        super().__init__(store, GLOBAL)
        self.excluded = excluded

    def visible(self, b: int) -> bool:
        return 0 <= b < len(self.store) and self.store.is_public(b, self.excluded)
