import numpy as np
import pytest
from hypothesis import given, strategies as st

from jchcontrol.graph import (HoppingGraph, collective_reduction_check, is_connected, is_tree,
                              leaf_order, replay_leaf_order, spanning_tree)
from jchcontrol.hilbert import enumerate_basis


def random_connected(rng, M, extra):
    edges = {(int(rng.integers(1, v)), v) for v in range(2, M + 1)}  # random tree
    for _ in range(extra):
        i, j = sorted(rng.choice(np.arange(1, M + 1), size=2, replace=False))
        edges.add((int(i), int(j)))
    return HoppingGraph(M, edges)


def test_connectivity_examples():
    assert is_connected(HoppingGraph.path(3))
    assert not is_connected(HoppingGraph(3, [(1, 2)]))
    assert is_connected(HoppingGraph.complete(4))
    assert is_connected(HoppingGraph(1))


def test_graph_validation():
    for bad in ([(1, 1)], [(0, 1)], [(1, 4)], [(1, 2), (2, 1)], [(1, 2, 3)]):
        with pytest.raises(ValueError):
            HoppingGraph(3, bad)


def test_spanning_tree_triangle():
    tree = spanning_tree(HoppingGraph(3, [(1, 2), (1, 3), (2, 3)]))
    assert tree.sorted_edges() == [(1, 2), (1, 3)]


def test_spanning_tree_of_tree_is_itself():
    g = HoppingGraph(5, [(1, 2), (2, 3), (2, 4), (4, 5)])
    assert spanning_tree(g).edges == g.edges


def test_spanning_tree_six_vertex_graph():
    g = HoppingGraph(6, [(1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 1), (2, 5), (3, 6)])
    tree = spanning_tree(g)
    assert len(tree.edges) == 5 and tree.edges <= g.edges and is_connected(tree)


def test_spanning_tree_rejects_disconnected():
    with pytest.raises(ValueError):
        spanning_tree(HoppingGraph(3, [(1, 2)]))


@given(st.integers(0, 10**6), st.integers(1, 9), st.integers(0, 6))
def test_spanning_tree_properties(seed, M, extra):
    g = random_connected(np.random.default_rng(seed), M, extra if M > 1 else 0)
    tree = spanning_tree(g)
    assert len(tree.edges) == M - 1 and is_connected(tree) and tree.edges <= g.edges
    assert spanning_tree(g) == tree  # deterministic


def test_leaf_order_path():
    lo = leaf_order(HoppingGraph.path(3))
    assert lo.order == [3, 2] and lo.survivor == 1


def test_leaf_order_star_keeps_center():
    lo = leaf_order(HoppingGraph.star(4))
    assert lo.order == [4, 3, 2]
    assert 1 not in lo.order
    assert all(s.attached_to == 1 for s in lo.steps)


@given(st.integers(0, 10**6))
def test_leaf_order_replay_random_trees(seed):
    tree = random_connected(np.random.default_rng(seed), 8, 0)
    assert is_tree(tree)
    lo = leaf_order(tree)
    assert replay_leaf_order(tree, lo.order)
    assert sorted(lo.relabel.values()) == list(range(1, 9))


def test_replay_rejects_bad_order():
    assert not replay_leaf_order(HoppingGraph.path(3), [2, 3])


def test_leaf_order_needs_tree():
    with pytest.raises(ValueError):
        leaf_order(HoppingGraph.complete(3))


def test_collective_reduction_path():
    results = collective_reduction_check(None, HoppingGraph.path(3), K=2)
    assert [r.context["edge"] for r in results] == [[1, 2], [2, 3]]
    assert all(r.relative_residual <= 1e-12 for r in results)


def test_collective_reduction_non_edge_mismatch():
    (r,) = collective_reduction_check(None, HoppingGraph.path(3), K=2, pairs=[(1, 3)])
    assert not r.passed


def test_collective_reduction_single_edge():
    results = collective_reduction_check(enumerate_basis(2, 3), HoppingGraph.path(2))
    assert len(results) == 1 and results[0].passed


@pytest.mark.parametrize("M", [2, 3, 4])
def test_collective_reduction_connected_graphs(M, rng):
    for _ in range(2):
        g = random_connected(rng, M, 2)
        assert all(r.passed for r in collective_reduction_check(None, g, K=3))
