"""Tests for the exact minimum-weight perfect matching solver."""

import random
import time

import numpy as np
import pytest

from kagomez4.matching import (
    WeightedGraph,
    all_perfect_matchings,
    brute_force_mwpm,
    mwpm,
    mwpm_complete,
)


def random_complete(rng, n, wmax=30):
    g = WeightedGraph(n)
    for u in range(n):
        for v in range(u + 1, n):
            g.add_edge(u, v, rng.randint(0, wmax))
    return g


def matching_cost(g, pairs):
    return sum(g.weight(u, v) for u, v in pairs)


class TestBasics:
    def test_two_nodes(self):
        g = WeightedGraph(2)
        g.add_edge(0, 1, 7)
        assert mwpm(g) == {(0, 1)}

    def test_four_nodes_unique_optimum(self):
        g = WeightedGraph(4)
        for u in range(4):
            for v in range(u + 1, 4):
                g.add_edge(u, v, 2)
        g.add_edge(0, 1, 1)
        g.add_edge(2, 3, 1)
        assert mwpm(g) == {(0, 1), (2, 3)}

    def test_odd_count_rejected(self):
        g = WeightedGraph(3)
        g.add_edge(0, 1, 1)
        with pytest.raises(ValueError):
            mwpm(g)
        with pytest.raises(ValueError):
            brute_force_mwpm(g)

    def test_no_perfect_matching(self):
        g = WeightedGraph(4)
        g.add_edge(0, 1, 1)
        g.add_edge(0, 2, 1)
        g.add_edge(0, 3, 1)
        with pytest.raises(ValueError):
            mwpm(g)

    def test_empty_graph(self):
        assert mwpm(WeightedGraph(0)) == set()


class TestBruteForceOracle:
    def test_uniform_k4_tie_break(self):
        g = WeightedGraph(4)
        for u in range(4):
            for v in range(u + 1, 4):
                g.add_edge(u, v, 5)
        assert brute_force_mwpm(g) == {(0, 1), (2, 3)}

    def test_k6_matching_count(self):
        assert sum(1 for _ in all_perfect_matchings(6)) == 15

    def test_node_limit(self):
        with pytest.raises(ValueError):
            brute_force_mwpm(WeightedGraph(14))


class TestOracleEquivalence:
    def test_k10_vs_all_945_matchings(self):
        rng = random.Random(42)
        g = random_complete(rng, 10, wmax=100)
        got = matching_cost(g, mwpm(g))
        best = min(
            matching_cost(g, m) for m in all_perfect_matchings(10)
        )
        assert got == best

    def test_thousand_random_small_graphs(self):
        rng = random.Random(2024)
        for _ in range(1000):
            n = rng.choice([2, 4, 6, 8, 10, 12])
            g = random_complete(rng, n)
            assert matching_cost(g, mwpm(g)) == matching_cost(
                g, brute_force_mwpm(g)
            )

    def test_sparse_graphs(self):
        rng = random.Random(9)
        for _ in range(300):
            n = rng.choice([6, 8, 10, 12])
            perm = list(range(n))
            rng.shuffle(perm)
            g = WeightedGraph(n)
            for i in range(0, n, 2):
                g.add_edge(perm[i], perm[i + 1], rng.randint(0, 30))
            for _ in range(rng.randint(0, 2 * n)):
                u, v = rng.sample(range(n), 2)
                if (min(u, v), max(u, v)) not in g.weights:
                    g.add_edge(u, v, rng.randint(0, 30))
            assert matching_cost(g, mwpm(g)) == matching_cost(
                g, brute_force_mwpm(g)
            )

    def test_matrix_fast_path_agrees(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            n = int(rng.choice([4, 8, 12]))
            mat = rng.integers(0, 40, size=(n, n))
            mat = mat + mat.T
            np.fill_diagonal(mat, 0)
            g = WeightedGraph.complete(mat)
            a = matching_cost(g, set(mwpm_complete(mat)))
            b = matching_cost(g, brute_force_mwpm(g))
            assert a == b


class TestPerformance:
    def test_k200_under_ten_seconds(self):
        rng = np.random.default_rng(1)
        mat = rng.integers(1, 1000, size=(200, 200))
        mat = mat + mat.T
        np.fill_diagonal(mat, 0)
        mwpm_complete(np.zeros((2, 2), dtype=np.int64))  # warm the JIT
        t0 = time.perf_counter()
        pairs = mwpm_complete(mat)
        assert time.perf_counter() - t0 < 10.0
        assert len(pairs) == 100
