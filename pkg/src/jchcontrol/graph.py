"""Hopping graphs: connectivity, spanning trees, leaf peeling and the edge reduction check."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from .constructive import IdentityResult, verify_identity
from .exceptions import PreconditionError
from .hilbert import TruncatedSpace, enumerate_basis


@dataclass(frozen=True)
class HoppingGraph:
    """Undirected graph on vertices ``1..M`` with edges stored as sorted pairs."""

    M: int
    edges: frozenset

    def __init__(self, M: int, edges: Iterable[Sequence[int]] = ()):
        if M < 1:
            raise ValueError(f"need at least one vertex, got M={M}")
        seen = set()
        for e in edges:
            if len(e) != 2:
                raise ValueError(f"edge {tuple(e)} is not a pair")
            i, j = int(e[0]), int(e[1])
            if i == j:
                raise ValueError(f"self-loop at vertex {i}")
            if not (1 <= i <= M and 1 <= j <= M):
                raise ValueError(f"edge ({i},{j}) has a vertex outside 1..{M}")
            key = (min(i, j), max(i, j))
            if key in seen:
                raise ValueError(f"duplicate edge {key}")
            seen.add(key)
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "edges", frozenset(seen))

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def neighbors(self, v: int) -> list[int]:
        return sorted({j for i, j in self.edges if i == v} | {i for i, j in self.edges if j == v})

    @classmethod
    def path(cls, M: int) -> "HoppingGraph":
        return cls(M, [(i, i + 1) for i in range(1, M)])

    @classmethod
    def complete(cls, M: int) -> "HoppingGraph":
        return cls(M, [(i, j) for i in range(1, M + 1) for j in range(i + 1, M + 1)])

    @classmethod
    def star(cls, M: int) -> "HoppingGraph":
        return cls(M, [(1, j) for j in range(2, M + 1)])


def _reachable(g: HoppingGraph, start: int, removed: frozenset = frozenset()) -> set[int]:
    seen = {start}
    queue = deque([start])
    while queue:
        v = queue.popleft()
        for w in g.neighbors(v):
            if w not in seen and w not in removed:
                seen.add(w)
                queue.append(w)
    return seen


def is_connected(g: HoppingGraph) -> bool:
    return len(_reachable(g, 1)) == g.M


def is_tree(g: HoppingGraph) -> bool:
    return len(g.edges) == g.M - 1 and is_connected(g)


def spanning_tree(g: HoppingGraph) -> HoppingGraph:
    """Breadth-first tree from vertex 1, neighbours visited in increasing order."""
    if not is_connected(g):
        raise ValueError("graph is not connected")
    seen = {1}
    queue = deque([1])
    tree = []
    while queue:
        v = queue.popleft()
        for w in g.neighbors(v):
            if w not in seen:
                seen.add(w)
                tree.append((v, w))
                queue.append(w)
    return HoppingGraph(g.M, tree)


@dataclass(frozen=True)
class LeafStep:
    leaf: int
    attached_to: int


@dataclass(frozen=True)
class LeafOrder:
    """Order in which vertices are peeled from a tree.

    ``relabel`` maps each original vertex to its position in the peeling
    schedule counted from the last survivor, so the first removed leaf gets
    label ``M`` and the survivor label ``1``.
    """

    steps: tuple[LeafStep, ...]
    survivor: int

    @property
    def order(self) -> list[int]:
        return [s.leaf for s in self.steps]

    @property
    def relabel(self) -> dict[int, int]:
        M = len(self.steps) + 1
        labels = {s.leaf: M - k for k, s in enumerate(self.steps)}
        labels[self.survivor] = 1
        return labels


def leaf_order(tree: HoppingGraph) -> LeafOrder:
    """Repeatedly remove the largest-labelled leaf of the remaining tree."""
    if not is_tree(tree):
        raise ValueError("leaf_order needs a tree")
    remaining = set(range(1, tree.M + 1))
    edges = set(tree.edges)
    steps = []
    while len(remaining) > 1:
        degree = {v: 0 for v in remaining}
        for i, j in edges:
            degree[i] += 1
            degree[j] += 1
        leaf = max(v for v in remaining if degree[v] == 1)
        (edge,) = [e for e in edges if leaf in e]
        steps.append(LeafStep(leaf, edge[0] if edge[1] == leaf else edge[1]))
        edges.remove(edge)
        remaining.remove(leaf)
    return LeafOrder(tuple(steps), remaining.pop())


def replay_leaf_order(tree: HoppingGraph, order: Sequence[int]) -> bool:
    """True if removing ``order`` one by one always removes a leaf of a connected remainder."""
    removed: set[int] = set()
    for v in order:
        alive = [w for w in tree.neighbors(v) if w not in removed]
        if len(alive) != 1:
            return False
        removed.add(v)
        rest = [w for w in range(1, tree.M + 1) if w not in removed]
        if len(_reachable(tree, rest[0], frozenset(removed))) != len(rest):
            return False
    return len(removed) == tree.M - 1


def collective_reduction_check(space: TruncatedSpace | None, g: HoppingGraph, K: int | None = None,
                               pairs: Sequence[Sequence[int]] | None = None,
                               tol: float = 1e-12) -> list[IdentityResult]:
    """Check that ``[n_i, [H_H(I), n_k]]`` isolates ``hop(i, k)`` for each pair.

    Defaults to every edge of ``g``; ``pairs`` may include non-edges to see
    the identity fail there.
    """
    if space is None:
        if K is None:
            raise ValueError("give a space or a cutoff K")
        space = enumerate_basis(g.M, K)
    if space.M != g.M:
        raise ValueError(f"graph has {g.M} vertices but the space has M={space.M}")
    if space.K < 1:
        raise PreconditionError("hopping needs K >= 1")
    edges = g.sorted_edges()
    targets = edges if pairs is None else [tuple(p) for p in pairs]
    return [verify_identity("I6", space, edge=e, edges=edges, tol=tol) for e in targets]
