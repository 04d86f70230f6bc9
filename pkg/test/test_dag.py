import numpy as np
import pytest

from powsim.dag import DagStore, GLOBAL, ProtocolFields, Template
from powsim.errors import StructuralError, VisibilityError
from helpers import Builder


def test_reify_assigns_dense_ids():
    dag = Builder()
    a = dag.sub(dag.genesis)
    b = dag.sub(a)
    assert (dag.genesis, a, b) == (0, 1, 2)
    assert all(p < block.id for block in dag.store.blocks for p in block.parents)


def test_unknown_parent_is_rejected():
    store = DagStore(np.random.default_rng(0))
    with pytest.raises(StructuralError):
        store.reify(Template((3,), ProtocolFields()), 0, True, 0.0)


def test_hash_values_are_fixed_per_seed():
    first = Builder(seed=5)
    second = Builder(seed=5)
    for dag in (first, second):
        dag.btc(dag.btc(dag.genesis))
    assert [b.hash_value for b in first.store.blocks] == [b.hash_value for b in second.store.blocks]
    assert len({b.hash_value for b in first.store.blocks}) == 3


def test_visibility_is_per_node():
    dag = Builder(nodes=3)
    hidden = dag.sub(dag.genesis, hidden=(1, 2))
    assert dag.view(0).block(hidden).id == hidden
    with pytest.raises(VisibilityError):
        dag.view(1).block(hidden)
    assert dag.view(GLOBAL).visible(hidden)
    assert [b.id for b in dag.view(2).blocks()] == [dag.genesis]
    assert dag.view(1).children(dag.genesis) == []
    dag.store.set_visible(hidden, 1)
    assert dag.view(1).children(dag.genesis) == [hidden]


def test_subblock_tree_queries():
    dag = Builder()
    a = dag.sub(dag.genesis, miner=0)
    b = dag.sub(a, miner=0)
    c = dag.sub(dag.genesis, miner=1)
    s = dag.summary((b, c), 1)
    view = dag.view()
    assert view.confirming(dag.genesis) == [a, b, c]
    assert view.confirming_mined_by(dag.genesis, 0) == [a, b]
    assert view.last_summary_before(s) == dag.genesis
    assert view.last_summary_before(b) == dag.genesis
    assert view.subblocks_between(s, dag.genesis) == {a, b, c}
    assert dag.store.summarized(s) == frozenset({a, b, c})
    assert view.ancestors(s) == {dag.genesis, a, b, c}
    assert view.max_depth([a, b, c]) == 2
    assert view.confirming(s) == []


def test_genesis_has_no_summary_before_it():
    dag = Builder()
    with pytest.raises(StructuralError):
        dag.view().last_summary_before(dag.genesis)


def test_find_equivalent_matches_pow_free_blocks_only():
    dag = Builder()
    a = dag.sub(dag.genesis)
    s = dag.summary((a,), 1)
    assert dag.store.find_equivalent(Template((a,), ProtocolFields(True, 1, 0))) == s
    assert dag.store.find_equivalent(Template((a,), ProtocolFields(True, 2, 0))) is None
    dag.sub(a)
    assert dag.store.find_equivalent(Template((a,), ProtocolFields(False, 0, 2))) is None
