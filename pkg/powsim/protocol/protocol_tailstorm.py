from functools import partial
from typing import NamedTuple

from powsim.consensus import ProtocolSpec, UpdateResult, genesis_template, summary_template
from powsim.dag import Block, DagView, ProtocolFields, Template
from powsim.errors import StructuralError

SchemeDiscount = 'discount'
SchemeConstant = 'constant'


class TailstormParams(NamedTuple):
    k: int
    c: float = 1.0
    reward_scheme: str = SchemeDiscount


def ts_validate(params: TailstormParams, view: DagView, b: Block) -> bool:
    if b.summary:
        if b.depth != 0 or len(b.parents) == 0:
            return False
        parents = [view.block(p) for p in b.parents]
        if any(parent.summary for parent in parents):
            return False
        p = view.last_summary_before(b)
        if any(view.last_summary_before(parent) != p for parent in parents):
            return False
        if b.height != view.block(p).height + 1:
            return False
        return len(view.subblocks_between(b, p)) == params.k
    if not b.pow or len(b.parents) != 1:
        return False
    parent = view.block(b.parents[0])
    return b.depth == parent.depth + 1 and b.height == parent.height


def ts_discount(params: TailstormParams, view: DagView, summary: int) -> float:
    if params.reward_scheme == SchemeConstant:
        return params.c
    subblocks = view.store.summarized(summary)
    return params.c / params.k * view.max_depth(subblocks)


def own_reward(params: TailstormParams, view: DagView, summary: int, node: int) -> float:
    subblocks = view.store.summarized(summary)
    own = sum(1 for x in subblocks if view.store.blocks[x].miner == node)
    if own == 0:
        return 0.0
    return own * ts_discount(params, view, summary)


def ts_preference(params: TailstormParams, view: DagView, s: int, b: int, node: int) -> bool:
    block_s = view.block(s)
    block_b = view.block(b)
    if block_b.height != block_s.height:
        return block_b.height > block_s.height
    count_s = len(view.confirming(s))
    count_b = len(view.confirming(b))
    if count_b != count_s:
        return count_b > count_s
    return own_reward(params, view, b, node) > own_reward(params, view, s, node)


def ts_extend(params: TailstormParams, view: DagView, tip: int) -> Template:
    tree = [view.block(x) for x in view.confirming(tip)]
    if len(tree) == 0:
        parent = view.block(tip)
    else:
        parent = min(tree, key=lambda x: (-x.depth, x.hash_value, x.id))
    return Template((parent.id,), ProtocolFields(False, parent.height, parent.depth + 1))


def ts_select_subblocks(params: TailstormParams, view: DagView, candidates: list[int], node: int) -> list[int]:
    """Greedy choice of k connected subblocks maximizing the node's own share.

    Returns the leaves of the chosen tree, which become the summary's parents.
    """
    pool = set(candidates)
    if len(pool) < params.k:
        raise StructuralError("need {0} subblocks to summarize, got {1}".format(params.k, len(pool)))
    blocks = {x: view.block(x) for x in pool}
    chains: dict[int, list[int]] = {}
    for x in pool:
        chain = []
        current = x
        while current in pool:
            chain.append(current)
            current = blocks[current].parents[0]
        chains[x] = chain
    selected: set[int] = set()
    while len(selected) < params.k:
        best = None
        best_key = None
        for x in pool - selected:
            extra = [y for y in chains[x] if y not in selected]
            if len(selected) + len(extra) > params.k:
                continue
            own = sum(1 for y in extra if blocks[y].miner == node)
            key = (-own, len(extra), -blocks[x].depth, blocks[x].hash_value, x)
            if best_key is None or key < best_key:
                best = extra
                best_key = key
        if best is None:
            raise StructuralError("subblock candidates are not connected to their summary")
        selected.update(best)
    inner = {blocks[x].parents[0] for x in selected}
    return sorted(selected - inner)


def ts_update(params: TailstormParams, view: DagView, tip: int, b: int, node: int) -> UpdateResult:
    block = view.block(b)
    pref = tip
    if block.summary:
        if ts_preference(params, view, pref, b, node):
            pref = b
    else:
        p = view.last_summary_before(block)
        if p != pref and ts_preference(params, view, pref, p, node):
            pref = p
    append = []
    tree = view.confirming(pref)
    if len(tree) >= params.k:
        leaves = ts_select_subblocks(params, view, tree, node)
        append.append(summary_template(view, pref, leaves))
    return UpdateResult(pref, [b], append)


def ts_progress(params: TailstormParams, b: Block) -> int:
    return params.k * b.height + b.depth


def ts_rank(params: TailstormParams, view: DagView, s: int) -> tuple:
    return view.block(s).height, len(view.confirming(s))


def ts_reward(params: TailstormParams, view: DagView, s: int) -> dict[int, float]:
    rewards: dict[int, float] = {}
    subblocks = view.store.summarized(s)
    if len(subblocks) == 0:
        return rewards
    amount = ts_discount(params, view, s)
    for x in subblocks:
        miner = view.store.blocks[x].miner
        rewards[miner] = rewards.get(miner, 0.0) + amount
    return rewards


def tailstorm(params: TailstormParams) -> ProtocolSpec:
    return ProtocolSpec(
        name='tsconst' if params.reward_scheme == SchemeConstant else 'tailstorm',
        k=params.k,
        root=genesis_template,
        validate=partial(ts_validate, params),
        update=partial(ts_update, params),
        extend=partial(ts_extend, params),
        preference=partial(ts_preference, params),
        progress=partial(ts_progress, params),
        rank=partial(ts_rank, params),
        reward=partial(ts_reward, params),
        select=partial(ts_select_subblocks, params),
    )
