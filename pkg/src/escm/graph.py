"""Directed acyclic graphs, causal orders and the ancestral violation rate.

Nodes are labelled ``1..d``. A causal order is stored as a rank vector:
``order.ranks[v - 1]`` is the position of node ``v``.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field
from graphlib import CycleError, TopologicalSorter
from typing import Iterable, Sequence

import numpy as np

MAX_BRUTEFORCE_NODES = 8


class EmptyAncestralSetWarning(UserWarning):
    """Raised (as a warning) when a DAG has no ancestor/descendant pairs."""


@dataclass(frozen=True)
class Dag:
    node_count: int
    edges: frozenset[tuple[int, int]]
    _parents: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)
    _topo: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __init__(self, node_count: int, edges: Iterable[tuple[int, int]] = ()):
        if int(node_count) != node_count or node_count < 1:
            raise ValueError(f"node_count must be a positive integer, got {node_count!r}")
        node_count = int(node_count)
        edge_list = [(int(u), int(v)) for u, v in edges]
        seen = set()
        for u, v in edge_list:
            if not (1 <= u <= node_count and 1 <= v <= node_count):
                raise ValueError(f"edge ({u}, {v}) references a node outside 1..{node_count}")
            if u == v:
                raise ValueError(f"self-loop on node {u}")
            if (u, v) in seen:
                raise ValueError(f"duplicate edge ({u}, {v})")
            seen.add((u, v))

        parents: list[list[int]] = [[] for _ in range(node_count)]
        for u, v in edge_list:
            parents[v - 1].append(u)
        sorter = TopologicalSorter({v: parents[v - 1] for v in range(1, node_count + 1)})
        try:
            topo = tuple(sorter.static_order())
        except CycleError as exc:
            raise ValueError(f"graph contains a directed cycle: {exc.args[1]}") from None

        object.__setattr__(self, "node_count", node_count)
        object.__setattr__(self, "edges", frozenset(edge_list))
        object.__setattr__(self, "_parents", tuple(tuple(sorted(p)) for p in parents))
        object.__setattr__(self, "_topo", topo)

    @property
    def nodes(self) -> range:
        return range(1, self.node_count + 1)

    def parents(self, v: int) -> tuple[int, ...]:
        self._check_node(v)
        return self._parents[v - 1]

    def children(self, v: int) -> tuple[int, ...]:
        self._check_node(v)
        return tuple(sorted(w for u, w in self.edges if u == v))

    def topological_order(self) -> tuple[int, ...]:
        return self._topo

    def descendants(self, v: int) -> set[int]:
        self._check_node(v)
        return {w for w in self.nodes if v in self._ancestor_sets()[w - 1]}

    def non_descendants(self, v: int) -> set[int]:
        """``nd(v)``: every node that is neither ``v`` nor one of its descendants."""
        return set(self.nodes) - self.descendants(v) - {v}

    def ancestral_pairs(self) -> list[tuple[int, int]]:
        """All ``(u, v)`` with ``u`` an ancestor of ``v``, sorted."""
        sets = self._ancestor_sets()
        return sorted((u, v) for v in self.nodes for u in sets[v - 1])

    def _ancestor_sets(self) -> tuple[frozenset[int], ...]:
        cached = self.__dict__.get("_anc_cache")
        if cached is None:
            anc: list[set[int]] = [set() for _ in range(self.node_count)]
            for v in self._topo:
                for u in self._parents[v - 1]:
                    anc[v - 1].add(u)
                    anc[v - 1] |= anc[u - 1]
            cached = tuple(frozenset(a) for a in anc)
            object.__setattr__(self, "_anc_cache", cached)
        return cached

    def _check_node(self, v: int) -> None:
        if not (isinstance(v, (int, np.integer)) and 1 <= v <= self.node_count):
            raise ValueError(f"unknown node {v!r} (valid: 1..{self.node_count})")


@dataclass(frozen=True)
class CausalOrder:
    """Permutation of ``1..d`` given as node -> rank."""

    ranks: tuple[int, ...]

    def __init__(self, ranks: Sequence[int]):
        ranks = tuple(int(r) for r in ranks)
        if sorted(ranks) != list(range(1, len(ranks) + 1)):
            raise ValueError(f"ranks {ranks} are not a permutation of 1..{len(ranks)}")
        object.__setattr__(self, "ranks", ranks)

    @classmethod
    def from_sequence(cls, nodes: Sequence[int]) -> "CausalOrder":
        """Build from the nodes listed first-to-last."""
        ranks = [0] * len(nodes)
        for position, v in enumerate(nodes, start=1):
            ranks[v - 1] = position
        return cls(ranks)

    def rank(self, v: int) -> int:
        return self.ranks[v - 1]

    def sequence(self) -> tuple[int, ...]:
        """Nodes sorted by rank."""
        return tuple(sorted(range(1, len(self.ranks) + 1), key=self.rank))

    def __len__(self) -> int:
        return len(self.ranks)


def random_dag(d: int, avg_degree: float, rng: np.random.Generator) -> Dag:
    """Random DAG with expected total degree ``avg_degree`` per node.

    Nodes are shuffled, then every pair (lower rank -> higher rank) is kept
    independently with probability ``avg_degree / (d - 1)``.
    """
    if int(d) != d or d < 2:
        raise ValueError(f"d must be an integer >= 2, got {d!r}")
    if not (0 < avg_degree <= d - 1):
        raise ValueError(f"avg_degree must lie in (0, {d - 1}], got {avg_degree!r}")
    d = int(d)
    p = avg_degree / (d - 1)
    perm = rng.permutation(d) + 1
    iu, ju = np.triu_indices(d, k=1)
    keep = rng.random(iu.size) < p
    return Dag(d, zip(perm[iu[keep]].tolist(), perm[ju[keep]].tolist()))


def ancestors(dag: Dag, v: int) -> set[int]:
    """``an(v)``: nodes with a directed path into ``v`` (``v`` excluded)."""
    dag._check_node(v)
    return set(dag._ancestor_sets()[v - 1])


def _check_order(dag: Dag, order: CausalOrder) -> None:
    if len(order) != dag.node_count:
        raise ValueError(f"order has {len(order)} nodes but the DAG has {dag.node_count}")


def is_valid_order(dag: Dag, order: CausalOrder) -> bool:
    _check_order(dag, order)
    return all(order.rank(u) < order.rank(v) for u, v in dag.ancestral_pairs())


def ancestral_violation_rate(dag: Dag, order: CausalOrder) -> float:
    """Fraction of ancestor/descendant pairs that ``order`` ranks backwards.

    A DAG without ancestral pairs scores 0.0 and emits
    :class:`EmptyAncestralSetWarning`.
    """
    _check_order(dag, order)
    pairs = dag.ancestral_pairs()
    if not pairs:
        warnings.warn("DAG has no ancestral pairs; violation rate defined as 0",
                      EmptyAncestralSetWarning, stacklevel=2)
        return 0.0
    bad = sum(order.rank(u) > order.rank(v) for u, v in pairs)
    return bad / len(pairs)


def valid_orders_bruteforce(dag: Dag) -> list[CausalOrder]:
    """Every causal order of ``dag``, by enumerating all permutations."""
    if dag.node_count > MAX_BRUTEFORCE_NODES:
        raise ValueError(f"brute force limited to d <= {MAX_BRUTEFORCE_NODES}, got {dag.node_count}")
    pairs = dag.ancestral_pairs()
    out = []
    for ranks in itertools.permutations(range(1, dag.node_count + 1)):
        if all(ranks[u - 1] < ranks[v - 1] for u, v in pairs):
            out.append(CausalOrder(ranks))
    return out
