from typing import Callable, NamedTuple, Optional

from powsim.dag import Block, DagView, ProtocolFields, Template


class UpdateResult(NamedTuple):
    tip: int
    share: list[int]
    append: list[Template]


ProtocolRoot = Callable[[], Template]
ProtocolValidate = Callable[[DagView, Block], bool]
ProtocolUpdate = Callable[[DagView, int, int, int], UpdateResult]
ProtocolExtend = Callable[[DagView, int], Template]
ProtocolPreference = Callable[[DagView, int, int, int], bool]
ProtocolProgress = Callable[[Block], int]
ProtocolRank = Callable[[DagView, int], tuple]
ProtocolSelect = Callable[[DagView, list[int], int], list[int]]
ProtocolReward = Callable[[DagView, int], dict[int, float]]


class ProtocolSpec(NamedTuple):
    name: str
    k: int
    root: ProtocolRoot
    validate: ProtocolValidate
    update: ProtocolUpdate
    extend: ProtocolExtend
    preference: ProtocolPreference
    progress: ProtocolProgress
    rank: ProtocolRank
    reward: ProtocolReward
    select: Optional[ProtocolSelect] = None


def genesis_template() -> Template:
    return Template((), ProtocolFields(True, 0, 0))


def summary_template(view: DagView, s: int, parents: list[int]) -> Template:
    return Template(tuple(sorted(parents)), ProtocolFields(True, view.block(s).height + 1, 0))


def best_block(view: DagView, candidates, protocol: ProtocolSpec) -> int:
    """Highest protocol rank; equal ranks go to the smaller block id."""
    best = None
    best_key = None
    for b in candidates:
        key = protocol.rank(view, b)
        if best is None or key > best_key or (key == best_key and b < best):
            best = b
            best_key = key
    return best
