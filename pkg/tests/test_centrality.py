import numpy as np
import pytest

import oracles
from trendcast.social import (
    SocialGraph,
    compute_influence,
    influence_in_degree,
    influence_leaderrank,
    influence_pagerank,
    load_social_graph,
)


def relabel(edges, mapping):
    return [(mapping[a], mapping[b]) for a, b in edges]


class TestSocialGraph:
    def test_drops_self_loops_and_duplicates(self):
        g = SocialGraph([(1, 2), (1, 2), (1, 2), (3, 3), (2, 1)])
        assert g.num_links == 2
        assert g.duplicates_dropped == 2
        assert g.self_loops_dropped == 1

    def test_degree_sums_match(self):
        g = SocialGraph([(1, 2), (2, 3), (3, 1), (1, 3)])
        assert g.in_degrees.sum() == g.out_degrees.sum() == g.num_links

    def test_explicit_users_allow_isolates(self):
        g = SocialGraph([(1, 2)], users=[1, 2, 3])
        assert g.num_users == 3


class TestLoadEdgeList:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "edges.txt"
        path.write_text("# follower leader\n1 2\n2 1\n")
        g = load_social_graph(path)
        assert g.num_links == 2
        assert g.in_degrees.tolist() == [1, 1]
        assert g.out_degrees.tolist() == [1, 1]

    def test_repeated_edge_collapses(self, tmp_path):
        path = tmp_path / "edges.txt"
        path.write_text("1 2\n1 2\n1 2\n")
        g = load_social_graph(path)
        assert g.num_links == 1
        assert g.duplicates_dropped == 2

    def test_malformed_line_reports_number(self, tmp_path):
        path = tmp_path / "edges.txt"
        path.write_text("1 2\n1 2 3\n")
        with pytest.raises(ValueError, match="edges.txt:2"):
            load_social_graph(path)
        path.write_text("1 2\n\nfoo bar\n")
        with pytest.raises(ValueError, match="edges.txt:3"):
            load_social_graph(path)


class TestInDegree:
    def test_star(self):
        g = SocialGraph([(u, 0) for u in range(1, 6)])
        infl = influence_in_degree(g)
        assert infl.get(0) == 5
        assert all(infl.get(u) == 0 for u in range(1, 6))

    def test_empty_edges(self):
        g = SocialGraph([], users=[1, 2, 3])
        assert influence_in_degree(g).values.tolist() == [0, 0, 0]

    def test_cycle(self):
        g = SocialGraph([(0, 1), (1, 2), (2, 0)])
        assert influence_in_degree(g).values.tolist() == [1, 1, 1]


class TestPageRank:
    def test_cycle_is_uniform(self):
        g = SocialGraph([(0, 1), (1, 2), (2, 0)])
        infl = influence_pagerank(g)
        assert np.allclose(infl.values, 1 / 3, atol=1e-9)

    def test_isolated_users_pure_teleport(self):
        g = SocialGraph([], users=[7, 9])
        infl = influence_pagerank(g)
        assert np.allclose(infl.values, 0.5, atol=1e-12)

    def test_matches_dense_solve_on_fixture(self):
        # node 4 is dangling, node 3 has no followers
        edges = [(0, 1), (0, 2), (1, 2), (2, 0), (3, 2), (1, 4)]
        g = SocialGraph(edges, users=range(5))
        infl = influence_pagerank(g)
        want = oracles.pagerank_dense_solve(5, edges)
        assert np.abs(infl.values - want).max() < 1e-8

    def test_sums_to_one(self, rng):
        for _ in range(10):
            n = int(rng.integers(2, 30))
            m = int(rng.integers(0, n * (n - 1) // 2 + 1))
            edges = {(int(a), int(b)) for a, b in rng.integers(0, n, size=(m, 2)) if a != b}
            g = SocialGraph(list(edges), users=range(n))
            infl = influence_pagerank(g)
            assert abs(infl.values.sum() - 1.0) < 1e-8

    def test_rejects_bad_damping(self):
        g = SocialGraph([(0, 1)])
        with pytest.raises(ValueError):
            influence_pagerank(g, delta=1.0)

    def test_nonconvergence_flagged(self):
        g = SocialGraph([(0, 1), (1, 0), (2, 0)])
        infl = influence_pagerank(g, max_iter=2)
        assert not infl.converged
        assert infl.residual > 0


class TestLeaderRank:
    def test_symmetric_complete_graph_uniform(self):
        edges = [(a, b) for a in range(3) for b in range(3) if a != b]
        infl = influence_leaderrank(SocialGraph(edges))
        assert np.allclose(infl.values, 1.0, atol=1e-8)
        assert abs(infl.values.sum() - 3.0) < 1e-6 * 3

    def test_single_user_holds_everything(self):
        infl = influence_leaderrank(SocialGraph([], users=[42]))
        assert infl.values.shape == (1,)
        assert abs(infl.values[0] - 1.0) < 1e-9

    def test_matches_dense_power_iteration_oracle(self):
        edges = [(0, 1), (1, 2), (2, 0), (3, 0), (4, 1), (5, 4), (2, 5)]
        g = SocialGraph(edges, users=range(6))
        infl = influence_leaderrank(g)
        want = oracles.leaderrank_dense_power(6, edges)
        assert np.abs(infl.values - want).max() < 1e-8

    def test_user_total_is_preserved(self, rng):
        for _ in range(10):
            n = int(rng.integers(1, 25))
            m = int(rng.integers(0, max(n * (n - 1) // 3, 1)))
            edges = {(int(a), int(b)) for a, b in rng.integers(0, n, size=(m, 2)) if a != b}
            g = SocialGraph(list(edges), users=range(n))
            infl = influence_leaderrank(g)
            assert abs(infl.values.sum() - n) < 1e-6 * n


class TestMeasureProperties:
    FIXTURE = [(0, 1), (1, 2), (2, 0), (3, 1), (4, 3), (5, 1), (2, 4)]

    @pytest.mark.parametrize("measure", ["in_degree", "pagerank", "leaderrank"])
    def test_permutation_invariance(self, measure, rng):
        n = 6
        perm = rng.permutation(n)
        mapping = {i: int(100 + perm[i]) for i in range(n)}
        a = compute_influence(SocialGraph(self.FIXTURE, users=range(n)), measure)
        b = compute_influence(
            SocialGraph(relabel(self.FIXTURE, mapping), users=mapping.values()), measure
        )
        for i in range(n):
            assert a.get(i) == pytest.approx(b.get(mapping[i]), abs=1e-9)

    @pytest.mark.parametrize("measure", ["in_degree", "pagerank", "leaderrank"])
    def test_vertex_transitive_graph_is_uniform(self, measure):
        cycle = [(i, (i + 1) % 5) for i in range(5)]
        infl = compute_influence(SocialGraph(cycle), measure)
        assert np.allclose(infl.values, infl.values[0], atol=1e-8)

    @pytest.mark.parametrize("measure", ["in_degree", "pagerank", "leaderrank"])
    def test_star_center_is_strictly_largest(self, measure):
        g = SocialGraph([(u, 0) for u in range(1, 8)])
        infl = compute_influence(g, measure)
        center = infl.get(0)
        assert all(center > infl.get(u) for u in range(1, 8))

    def test_unknown_measure(self):
        with pytest.raises(ValueError):
            compute_influence(SocialGraph([(0, 1)]), "betweenness")

    def test_lookup_defaults_unknown_users_to_zero(self):
        infl = influence_in_degree(SocialGraph([(0, 1)]))
        out = infl.lookup(np.array([0, 1, 99]))
        assert out.tolist() == [0.0, 1.0, 0.0]
