import math

import numpy as np
import pytest

import dscluster as d
from dscluster.errors import FixtureFormatError, InvalidArgumentError

from conftest import random_edge_graph


class TestDeployRandom:
    def test_single_node_inside_square(self):
        pos = d.deploy_random(1, 50.0, seed=9)
        assert pos.shape == (1, 2)
        assert 0 <= pos[0, 0] <= 50 and 0 <= pos[0, 1] <= 50

    def test_identical_seed_identical_positions(self):
        a = d.deploy_random(23, 100.0, seed=7)
        b = d.deploy_random(23, 100.0, seed=7)
        assert a.tobytes() == b.tobytes()

    def test_different_seed_differs(self):
        a = d.deploy_random(23, 100.0, seed=7)
        b = d.deploy_random(23, 100.0, seed=8)
        assert not np.array_equal(a, b)

    def test_monte_carlo_uniform_mean(self):
        # mean of U[0, 100] is 50; n=500 keeps the sample mean within +/-5
        pos = d.deploy_random(500, 100.0, seed=3)
        assert abs(pos[:, 0].mean() - 50.0) < 5.0
        assert abs(pos[:, 1].mean() - 50.0) < 5.0

    @pytest.mark.parametrize("n,terrain", [(0, 100.0), (-1, 100.0), (5, 0.0), (5, -2.0)])
    def test_invalid_arguments(self, n, terrain):
        with pytest.raises(InvalidArgumentError):
            d.deploy_random(n, terrain, seed=0)


class TestBuildGraph:
    def test_exact_range_is_adjacent(self):
        graph = d.build_graph(np.array([[0.0, 0.0], [10.0, 0.0]]), range_=10.0)
        assert graph.adjacent(0, 1)

    def test_beyond_range_not_adjacent(self):
        graph = d.build_graph(np.array([[0.0, 0.0], [10.0 + 1e-9, 0.0]]), range_=10.0)
        assert not graph.adjacent(0, 1)

    def test_matches_pairwise_distance_oracle(self):
        pos = d.deploy_random(10, 100.0, seed=5)
        graph = d.build_graph(pos, range_=30.0)
        for u in range(10):
            for v in range(u + 1, 10):
                expected = math.hypot(*(pos[u] - pos[v])) <= 30.0
                assert graph.adjacent(u, v) == expected

    def test_bad_range(self):
        with pytest.raises(InvalidArgumentError):
            d.build_graph(np.zeros((3, 2)), range_=0.0)


class TestHopTable:
    def test_zero_diagonal(self, bundle):
        assert (bundle.tables.hop.diagonal() == 0).all()

    def test_path_graph_enumeration(self):
        graph = d.graph_from_edges(4, [(0, 1), (1, 2), (2, 3)])
        hop = d.hop_distance_table(graph)
        assert hop[0, 3] == 3
        assert hop[0, 2] == 2
        assert hop[1, 3] == 2

    def test_reference_topology_entries(self, bundle):
        hop = bundle.tables.hop
        assert hop[0, 12] == 7
        assert hop[16, 17] == 2

    def test_symmetry_and_adjacency_coherence(self):
        rng = np.random.default_rng(42)
        for _ in range(25):
            graph = random_edge_graph(rng, n_high=9)
            hop = d.hop_distance_table(graph)
            assert np.array_equal(hop, hop.T)
            ones = hop == 1
            assert np.array_equal(ones, graph.adj)

    def test_unreachable_pairs_marked(self):
        graph = d.graph_from_edges(4, [(0, 1), (2, 3)])
        hop = d.hop_distance_table(graph)
        assert hop[0, 2] == d.UNREACHABLE
        assert hop[0, 1] == 1


class TestEuclideanTable:
    def test_coincident_zero(self):
        table = d.euclidean_distance_table(np.array([[2.0, 2.0], [2.0, 2.0]]))
        assert table[0, 1] == 0.0

    def test_pythagorean_triple(self):
        table = d.euclidean_distance_table(np.array([[0.0, 0.0], [3.0, 4.0]]))
        assert table[0, 1] == pytest.approx(5.0)

    def test_fixture_table_ingested_verbatim(self, bundle):
        assert bundle.tables.euclid[0, 1] == pytest.approx(0.32)


class TestComponents:
    def test_connected_fixture(self, bundle):
        assert bundle.graph.is_connected
        assert bundle.graph.components() == [list(range(23))]

    def test_split_components(self):
        graph = d.graph_from_edges(5, [(0, 1), (2, 3)])
        assert graph.components() == [[0, 1], [2, 3], [4]]


class TestIngestFixture:
    def _euclid(self, n):
        pos = d.deploy_random(n, 10.0, seed=1)
        return d.euclidean_distance_table(pos)

    def test_asymmetric_matrix_rejected(self):
        euclid = self._euclid(3)
        euclid[0, 1] += 0.5
        with pytest.raises(FixtureFormatError, match="asymmetric"):
            d.ingest_fixture([(0, 1)], euclid)

    def test_nonzero_diagonal_rejected(self):
        euclid = self._euclid(3)
        euclid[1, 1] = 2.0
        with pytest.raises(FixtureFormatError, match="diagonal"):
            d.ingest_fixture([(0, 1)], euclid)

    def test_self_loop_rejected(self):
        with pytest.raises(FixtureFormatError, match="self-loop"):
            d.ingest_fixture([(1, 1)], self._euclid(3))

    def test_edge_out_of_range_rejected(self):
        with pytest.raises(FixtureFormatError, match="out of range"):
            d.ingest_fixture([(0, 5)], self._euclid(3))

    def test_override_length_validated(self):
        with pytest.raises(FixtureFormatError, match="override"):
            d.ingest_fixture(
                [(0, 1)], self._euclid(3), d.FixtureOverrides(ns=[1.0, 2.0])
            )

    def test_hop_recomputed_from_adjacency(self):
        euclid = self._euclid(4)
        graph, tables, _ = d.ingest_fixture([(0, 1), (1, 2), (2, 3)], euclid)
        assert tables.hop[0, 3] == 3
        assert np.array_equal(tables.euclid, euclid)

    def test_fixture_hop_one_matches_edges(self, bundle):
        edges_from_hop = {
            (u, v)
            for u in range(23)
            for v in range(u + 1, 23)
            if bundle.tables.hop[u, v] == 1
        }
        assert edges_from_hop == set(bundle.graph.edges())
