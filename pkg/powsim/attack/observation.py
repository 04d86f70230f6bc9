from enum import Enum
from typing import Callable, NamedTuple

from powsim.consensus import ProtocolSpec
from powsim.dag import DagView
from powsim.network import ATTACKER


class Observation(NamedTuple):
    h_a: int = 0
    h_d: int = 0
    s_a: int = 0
    s_a_excl: int = 0
    s_d: int = 0
    d_a: int = 0
    d_a_excl: int = 0
    d_d: int = 0


class Withhold(Enum):
    WAIT = 'wait'
    MATCH = 'match'
    OVERRIDE = 'override'
    ADOPT = 'adopt'


class ExtendMode(Enum):
    INCLUSIVE = 'inclusive'
    EXCLUSIVE = 'exclusive'


class Action(NamedTuple):
    withhold: Withhold
    extend: ExtendMode = ExtendMode.INCLUSIVE


Policy = Callable[[Observation], Action]


class Situation(NamedTuple):
    observation: Observation
    defender_tip: int
    common: int


def common_summary(view: DagView, a: int, b: int) -> int:
    block_a = view.block(a)
    block_b = view.block(b)
    while a != b:
        if block_a.height >= block_b.height:
            a = view.last_summary_before(block_a)
            block_a = view.block(a)
        else:
            b = view.last_summary_before(block_b)
            block_b = view.block(b)
    return a


def preferred_defender_tip(public: DagView, tips: list[int], protocol: ProtocolSpec, attacker: int) -> int:
    best = None
    for node, tip in enumerate(tips):
        if node == attacker or tip == best:
            continue
        if best is None or protocol.preference(public, best, tip, node):
            best = tip
    return best


def situation(view: DagView, tips: list[int], protocol: ProtocolSpec, attacker: int = ATTACKER) -> Situation:
    """The attacker's trees come from its own view, the defenders' from what any defender has received."""
    store = view.store
    own = store.view(attacker)
    public = store.public_view(attacker)
    b_a = tips[attacker]
    b_d = preferred_defender_tip(public, tips, protocol, attacker)
    b_c = common_summary(view, b_a, b_d)
    height_c = view.block(b_c).height
    tree_a = own.confirming(b_a)
    tree_a_excl = own.confirming_mined_by(b_a, attacker)
    tree_d = public.confirming(b_d)
    observation = Observation(
        h_a=view.block(b_a).height - height_c,
        h_d=view.block(b_d).height - height_c,
        s_a=len(tree_a),
        s_a_excl=len(tree_a_excl),
        s_d=len(tree_d),
        d_a=view.max_depth(tree_a),
        d_a_excl=view.max_depth(tree_a_excl),
        d_d=view.max_depth(tree_d),
    )
    return Situation(observation, b_d, b_c)


def observe(view: DagView, tips: list[int], protocol: ProtocolSpec, attacker: int = ATTACKER) -> Observation:
    return situation(view, tips, protocol, attacker).observation
