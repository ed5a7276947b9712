import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from spherical_rgg.exceptions import DomainError
from spherical_rgg.graphs import (
    Graph,
    GraphStats,
    class_membership,
    contains,
    graph_stats,
    sample_er,
    sample_gram,
    sample_rgg,
    sample_sphere_points,
)
from spherical_rgg.specialfns import edge_prob_exact, threshold


@st.composite
def graphs(draw, max_n=9):
    n = draw(st.integers(1, max_n))
    pairs = [(j, k) for j in range(n) for k in range(j + 1, n)]
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Graph(n, [e for e, keep in zip(pairs, mask) if keep])


def brute_stats(g):
    a = np.zeros((g.n, g.n), dtype=int)
    for j, k in g.edges:
        a[j, k] = a[k, j] = 1
    deg = a.sum(axis=1)
    tri = int(np.trace(a @ a @ a)) // 6
    return GraphStats(int((deg > 0).sum()), len(g.edges), int(deg.max(initial=0)), tri)


class TestGraph:
    def test_canonical_edges(self):
        g = Graph(4, [(2, 1), (0, 3)])
        assert g.edges == ((0, 3), (1, 2))
        assert g == Graph(4, [(1, 2), (3, 0)])
        assert hash(g) == hash(Graph(4, [(1, 2), (3, 0)]))

    @pytest.mark.parametrize("edges", [[(1, 1)], [(0, 4)], [(0, 1), (1, 0)], [(-1, 2)]])
    def test_rejects_bad_edges(self, edges):
        with pytest.raises(DomainError):
            Graph(4, edges)

    def test_named_graphs(self):
        assert Graph.complete(5).num_edges == 10
        assert Graph.empty(3).num_edges == 0
        assert Graph.path(4).edges == ((0, 1), (1, 2), (2, 3))

    def test_text_round_trip_with_comment(self):
        g = Graph(5, [(0, 1), (3, 4)])
        text = g.to_text(comment="model=rgg seed=3")
        assert text.splitlines()[0] == "# model=rgg seed=3"
        assert Graph.from_text(text) == g

    @pytest.mark.parametrize("text", ["", "0 1\n", "n 3\n0\n", "n 3\n0 5\n"])
    def test_bad_text(self, text):
        with pytest.raises(DomainError):
            Graph.from_text(text)

    @given(graphs())
    def test_round_trip_property(self, g):
        assert Graph.from_text(g.to_text()) == g

    def test_strip_isolated(self):
        g, kept = Graph(6, [(1, 4), (4, 5)]).strip_isolated()
        assert kept == [1, 4, 5]
        assert g == Graph(3, [(0, 1), (1, 2)])


class TestStats:
    def test_triangle(self):
        assert graph_stats(Graph.complete(3)) == GraphStats(3, 3, 2, 1)

    def test_k5(self):
        assert graph_stats(Graph.complete(5)) == GraphStats(5, 10, 4, 10)

    def test_empty(self):
        assert graph_stats(Graph.empty(4)) == GraphStats(0, 0, 0, 0)

    @given(graphs())
    def test_matches_adjacency_algebra(self, g):
        assert graph_stats(g) == brute_stats(g)

    @given(graphs())
    def test_isolated_vertices_do_not_matter(self, g):
        h, _ = g.strip_isolated()
        assert graph_stats(g) == graph_stats(h)
        # padding with isolated vertices changes nothing either
        assert graph_stats(Graph(g.n + 3, g.edges)) == graph_stats(g)


class TestContainsAndClass:
    def test_labeled_inclusion(self):
        host = Graph(4, [(0, 1), (1, 2), (2, 3)])
        assert contains(host, Graph(3, [(0, 1), (1, 2)]))
        assert not contains(host, Graph(4, [(0, 2)]))
        with pytest.raises(DomainError):
            contains(Graph(2, [(0, 1)]), Graph(3, [(0, 1)]))

    @given(graphs(), graphs())
    def test_inclusion_is_edge_subset(self, a, b):
        host = Graph(max(a.n, b.n), a.edges)
        pat = Graph(max(a.n, b.n), b.edges)
        assert contains(host, pat) == set(b.edges).issubset(a.edges)

    def test_membership(self):
        n = 100  # log n = 4.6
        assert class_membership(GraphStats(50, 60, 4, 4), n, 1)
        assert not class_membership(GraphStats(50, 60, 5, 0), n, 1)
        assert not class_membership(GraphStats(50, 60, 0, 5), n, 1)
        assert not class_membership(GraphStats(50, 201, 0, 0), n, 2)
        assert not class_membership(GraphStats(101, 0, 0, 0), n, 2)


class TestSamplers:
    def test_points_on_sphere(self):
        x = sample_sphere_points(100, 7, 1)
        assert x.shape == (100, 7)
        assert np.allclose(np.linalg.norm(x, axis=1), 1.0, atol=1e-14)

    def test_same_seed_same_graph(self):
        assert sample_rgg(30, 20, 0.2, 5) == sample_rgg(30, 20, 0.2, 5)
        assert sample_er(30, 0.1, 5) == sample_er(30, 0.1, 5)

    def test_er_edge_rate(self):
        g = sample_er(400, 0.05, 2)
        m = 400 * 399 // 2
        assert abs(g.num_edges - 0.05 * m) < 5 * math.sqrt(m * 0.05 * 0.95)

    def test_rgg_edge_rate(self):
        d, p = 30, 0.1
        t = threshold(p, d)
        counts = [sample_rgg(60, d, t, s).num_edges for s in range(20)]
        m = 60 * 59 // 2 * 20
        # edges of one RGG are pairwise independent, so the binomial sd is exact
        assert abs(sum(counts) - p * m) < 5 * math.sqrt(m * p * (1 - p))

    def test_inner_product_law(self):
        # <x, y> for independent points has density f_d; compare the tail
        d = 9
        x = sample_sphere_points(20000, d, 3)
        y = sample_sphere_points(20000, d, 4)
        v = np.sum(x * y, axis=1)
        res = stats.kstest(v, lambda s: 1.0 - edge_prob_exact(np.asarray(s), d))
        assert res.pvalue > 1e-3


class TestGram:
    @pytest.mark.parametrize("n,d", [(3, 5), (4, 40), (2, 2), (3, 2)])
    def test_shape_and_diagonal(self, n, d):
        g = sample_gram(n, d, 50, 0)
        assert g.shape == (50, n, n)
        assert np.allclose(np.diagonal(g, axis1=1, axis2=2), 1.0)
        assert np.allclose(g, np.swapaxes(g, 1, 2))

    @pytest.mark.parametrize("n,d", [(3, 5), (4, 12)])
    def test_bartlett_matches_literal_points(self, n, d):
        size = 20000
        fast = sample_gram(n, d, size, 11)
        slow = np.empty_like(fast)
        rng = np.random.default_rng(12)
        for s in range(size):
            x = sample_sphere_points(n, d, rng)
            slow[s] = x @ x.T
        for j, k in itertools.combinations(range(n), 2):
            assert stats.ks_2samp(fast[:, j, k], slow[:, j, k]).pvalue > 1e-3
        # joint structure: the product of two entries sharing a vertex
        a = fast[:, 0, 1] * fast[:, 1, 2] * fast[:, 0, 2]
        b = slow[:, 0, 1] * slow[:, 1, 2] * slow[:, 0, 2]
        assert stats.ks_2samp(a, b).pvalue > 1e-3

    def test_triple_product_mean(self):
        # E[<x,y><y,z><z,x>] = 1/d^2 for uniform points
        d = 6
        g = sample_gram(3, d, 200000, 7)
        v = g[:, 0, 1] * g[:, 1, 2] * g[:, 0, 2]
        assert abs(v.mean() - 1 / d**2) < 5 * v.std() / math.sqrt(v.size)

    @settings(max_examples=10, deadline=None)
    @given(st.integers(2, 6), st.integers(6, 60), st.integers(0, 2**32 - 1))
    def test_positive_semidefinite(self, n, d, seed):
        g = sample_gram(n, d, 20, seed)
        assert np.linalg.eigvalsh(g).min() > -1e-12
