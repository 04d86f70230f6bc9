from powsim.consensus import ProtocolSpec, UpdateResult, genesis_template
from powsim.dag import Block, DagView, ProtocolFields, Template


def btc_validate(view: DagView, b: Block) -> bool:
    if not b.pow or len(b.parents) != 1:
        return False
    parent = view.block(b.parents[0])
    return b.height == parent.height + 1


def btc_preference(view: DagView, s: int, b: int, node: int) -> bool:
    return view.block(b).height > view.block(s).height


def btc_update(view: DagView, tip: int, b: int, node: int) -> UpdateResult:
    # strict inequality keeps the first-seen block on ties
    if btc_preference(view, tip, b, node):
        return UpdateResult(b, [b], [])
    return UpdateResult(tip, [], [])


def btc_extend(view: DagView, tip: int) -> Template:
    return Template((tip,), ProtocolFields(True, view.block(tip).height + 1, 0))


def btc_progress(b: Block) -> int:
    return b.height


def btc_rank(view: DagView, b: int) -> tuple:
    return (view.block(b).height,)


def btc_reward(view: DagView, s: int) -> dict[int, float]:
    block = view.block(s)
    if len(block.parents) == 0:
        return {}
    return {block.miner: 1.0}


def bitcoin() -> ProtocolSpec:
    return ProtocolSpec(
        name='bitcoin',
        k=1,
        root=genesis_template,
        validate=btc_validate,
        update=btc_update,
        extend=btc_extend,
        preference=btc_preference,
        progress=btc_progress,
        rank=btc_rank,
        reward=btc_reward,
    )
