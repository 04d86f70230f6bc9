from functools import partial
from typing import NamedTuple

from powsim.consensus import ProtocolSpec, UpdateResult, genesis_template, summary_template
from powsim.dag import Block, DagView, ProtocolFields, Template
from powsim.errors import StructuralError


class BkParams(NamedTuple):
    k: int
    c: float = 1.0


def leader(view: DagView, subblocks) -> Block:
    return min((view.block(x) for x in subblocks), key=lambda x: (x.hash_value, x.id))


def bk_validate(params: BkParams, view: DagView, b: Block) -> bool:
    if b.summary:
        if len(b.parents) != params.k:
            return False
        parents = [view.block(p) for p in b.parents]
        if any(parent.summary or len(parent.parents) != 1 for parent in parents):
            return False
        p = parents[0].parents[0]
        if any(parent.parents[0] != p for parent in parents):
            return False
        if b.height != view.block(p).height + 1:
            return False
        return b.miner == leader(view, b.parents).miner
    if not b.pow or len(b.parents) != 1:
        return False
    parent = view.block(b.parents[0])
    return parent.summary and b.height == parent.height


def min_parent_hash(view: DagView, s: int) -> float:
    parents = view.block(s).parents
    if len(parents) == 0:
        return float('inf')
    return min(view.block(p).hash_value for p in parents)


def bk_preference(params: BkParams, view: DagView, s: int, b: int, node: int) -> bool:
    block_s = view.block(s)
    block_b = view.block(b)
    if block_b.height != block_s.height:
        return block_b.height > block_s.height
    count_s = len(view.confirming(s))
    count_b = len(view.confirming(b))
    if count_b != count_s:
        return count_b > count_s
    return min_parent_hash(view, b) < min_parent_hash(view, s)


def bk_select_subblocks(params: BkParams, view: DagView, candidates: list[int], node: int) -> list[int]:
    if len(candidates) < params.k:
        raise StructuralError("need {0} subblocks to summarize, got {1}".format(params.k, len(candidates)))
    ordered = sorted((view.block(x) for x in candidates), key=lambda x: (x.miner != node, x.hash_value, x.id))
    return sorted(x.id for x in ordered[:params.k])


def bk_update(params: BkParams, view: DagView, tip: int, b: int, node: int) -> UpdateResult:
    block = view.block(b)
    pref = tip
    if block.summary:
        if bk_preference(params, view, pref, b, node):
            pref = b
    else:
        p = block.parents[0]
        if p != pref and bk_preference(params, view, pref, p, node):
            pref = p
    append = []
    votes = view.confirming(pref)
    if len(votes) >= params.k:
        append.append(summary_template(view, pref, bk_select_subblocks(params, view, votes, node)))
    return UpdateResult(pref, [b], append)


def bk_extend(params: BkParams, view: DagView, tip: int) -> Template:
    return Template((tip,), ProtocolFields(False, view.block(tip).height, 0))


def bk_progress(params: BkParams, b: Block) -> int:
    return params.k * b.height + (0 if b.summary else 1)


def bk_rank(params: BkParams, view: DagView, s: int) -> tuple:
    return view.block(s).height, len(view.confirming(s)), -min_parent_hash(view, s)


def bk_reward(params: BkParams, view: DagView, s: int) -> dict[int, float]:
    rewards: dict[int, float] = {}
    for x in view.store.summarized(s):
        miner = view.store.blocks[x].miner
        rewards[miner] = rewards.get(miner, 0.0) + params.c
    return rewards


def bk(params: BkParams) -> ProtocolSpec:
    return ProtocolSpec(
        name='bk',
        k=params.k,
        root=genesis_template,
        validate=partial(bk_validate, params),
        update=partial(bk_update, params),
        extend=partial(bk_extend, params),
        preference=partial(bk_preference, params),
        progress=partial(bk_progress, params),
        rank=partial(bk_rank, params),
        reward=partial(bk_reward, params),
        select=partial(bk_select_subblocks, params),
    )
