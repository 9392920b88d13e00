import numpy as np

from core.rays.chains import UnionFind, components_by_search, same_partition
from core.rays.relation import NodeKind
from tests.rays.rays_setup import TestRays


class TestChains(TestRays):
    def test_sets_are_consistent(self):
        assert self.sets.consistency_errors() == []

    def test_samples_are_interior(self):
        samples = self.nodes.mask(NodeKind.SAMPLE)
        assert np.all(self.sets.T[samples])

    def test_atoms_are_endpoints(self):
        src = self.nodes.mask(NodeKind.SOURCE)
        tgt = self.nodes.mask(NodeKind.TARGET)
        assert not np.any(self.sets.b_set[src])
        assert not np.any(self.sets.a_set[tgt])
        assert np.all(self.sets.T_e[src | tgt])

    def test_matches_graph_search(self):
        searched = components_by_search(self.rel, self.sets)
        assert same_partition(self.partition.class_id, searched)

    def test_samples_of_one_geodesic_share_a_class(self):
        for g in range(len(self.plan)):
            members = np.flatnonzero(
                self.nodes.mask(NodeKind.SAMPLE) & (self.nodes.geodesic == g)
            )
            assert len({int(self.partition.class_id[k]) for k in members}) == 1

    def test_endpoints_attach_to_their_class(self):
        for g in range(len(self.plan)):
            src = self.nodes.index_of(NodeKind.SOURCE, int(self.plan.rows[g]))
            assert self.partition.class_id[src] == -1
            assert self.partition.label_of(src) >= 0

    def test_labels_cover_classes(self):
        labelled = self.partition.class_id[self.partition.class_id >= 0]
        assert set(labelled.tolist()) == set(self.partition.classes)
        assert len(self.partition) == len(self.partition.classes)


class TestPartitionHelpers:
    def test_union_find(self):
        uf = UnionFind(5)
        uf.union(0, 1)
        uf.union(3, 4)
        uf.union(1, 4)
        assert uf.find(0) == uf.find(3)
        assert uf.find(2) != uf.find(0)

    def test_union_is_idempotent(self):
        uf = UnionFind(3)
        uf.union(0, 1)
        uf.union(1, 0)
        assert uf.find(0) == uf.find(1)
        assert uf.rank[uf.find(0)] == 1

    def test_same_partition_ignores_labels(self):
        a = np.array([0, 0, 1, -1, 1])
        b = np.array([7, 7, 3, -1, 3])
        assert same_partition(a, b)

    def test_same_partition_detects_merge(self):
        a = np.array([0, 0, 1, 1])
        b = np.array([5, 5, 5, 5])
        assert not same_partition(a, b)
        assert not same_partition(b, a)

    def test_same_partition_detects_domain_change(self):
        assert not same_partition(np.array([0, -1]), np.array([0, 0]))
