import logging
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from core.rays.relation import RayRelation
from core.rays.transport_sets import TransportSets

logger = logging.getLogger(__name__)


class UnionFind:
    """Disjoint sets over ``0..n-1`` with union by rank and path halving."""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.rank = [0] * n

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, x: int, y: int) -> None:
        px, py = self.find(x), self.find(y)
        if px == py:
            return
        if self.rank[px] < self.rank[py]:
            px, py = py, px
        self.parent[py] = px
        if self.rank[px] == self.rank[py]:
            self.rank[px] += 1


@dataclass(frozen=True, eq=False)
class ChainPartition:
    """Classes of ``T`` under finite R-paths through interior nodes.

    ``class_id`` is -1 outside ``T``; ``attached`` gives endpoint nodes the
    class of their lowest-index interior R-neighbour, for reporting only.
    """

    class_id: np.ndarray
    classes: dict[int, list[int]]
    attached: np.ndarray

    def __len__(self) -> int:
        return len(self.classes)

    def label_of(self, node: int) -> int:
        label = int(self.class_id[node])
        return label if label >= 0 else int(self.attached[node])


def _interior_edges(rel: RayRelation, sets: TransportSets) -> tuple[np.ndarray, np.ndarray]:
    inner = np.flatnonzero(sets.T)
    sub = rel.R[np.ix_(inner, inner)]
    rows, cols = np.nonzero(np.triu(sub, k=1))
    return inner[rows], inner[cols]


def chains(rel: RayRelation, sets: TransportSets) -> ChainPartition:
    n = len(rel.phi)
    uf = UnionFind(n)
    for u, v in zip(*_interior_edges(rel, sets)):
        uf.union(int(u), int(v))

    # NOTE: labels follow the lowest member index so they do not depend on union order
    class_id = np.full(n, -1)
    roots: dict[int, int] = {}
    classes: dict[int, list[int]] = {}
    for node in np.flatnonzero(sets.T):
        root = uf.find(int(node))
        label = roots.setdefault(root, len(roots))
        class_id[node] = label
        classes.setdefault(label, []).append(int(node))

    attached = np.full(n, -1)
    R = rel.R
    for node in np.flatnonzero(sets.T_e & ~sets.T):
        neighbours = np.flatnonzero(R[node] & sets.T)
        if len(neighbours):
            attached[node] = class_id[neighbours[0]]

    logger.info('%d chain classes over %d interior nodes', len(classes), int(sets.T.sum()))
    return ChainPartition(class_id=class_id, classes=classes, attached=attached)


def components_by_search(rel: RayRelation, sets: TransportSets) -> np.ndarray:
    """Class labels of ``T`` from a graph search, independent of the union-find pass."""
    n = len(rel.phi)
    rows, cols = _interior_edges(rel, sets)
    graph = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    _, labels = connected_components(graph, directed=False)
    return np.where(sets.T, labels, -1)


def same_partition(a: np.ndarray, b: np.ndarray) -> bool:
    """True when two labelings induce the same classes on the nodes labelled in ``a``."""
    if np.any((a < 0) != (b < 0)):
        return False
    pairs = {(int(x), int(y)) for x, y in zip(a, b) if x >= 0}
    return len(pairs) == len({x for x, _ in pairs}) == len({y for _, y in pairs})
