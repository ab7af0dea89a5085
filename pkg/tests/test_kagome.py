"""Tests for the trihexagonal-lattice code construction."""

import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kagomez4 import kagome
from kagomez4.pauli import PhasedPauli


def edge_set(plaquette):
    """Unordered site pairs of consecutive corners of a plaquette."""
    sites = [s for s, _ in plaquette]
    return {
        frozenset((sites[t], sites[(t + 1) % len(sites)]))
        for t in range(len(sites))
    }


class TestLattice:
    def test_counts_at_l4(self):
        code = kagome.build(4)
        assert code.n_sites == 48
        assert len(code.triangles) == 32
        assert len(code.hexagons) == 16

    @pytest.mark.parametrize("bad", [3, 5, 2, 0, -4])
    def test_rejects_bad_sizes(self, bad):
        with pytest.raises(ValueError):
            kagome.build(bad)

    def test_every_vertex_in_two_triangles_and_two_hexagons(self):
        code = kagome.build(4)
        tri_count = np.zeros(code.n_sites, dtype=int)
        hex_count = np.zeros(code.n_sites, dtype=int)
        for plq in code.triangles.values():
            for s, _ in plq:
                tri_count[s] += 1
        for plq in code.hexagons.values():
            for s, _ in plq:
                hex_count[s] += 1
        assert np.all(tri_count == 2)
        assert np.all(hex_count == 2)

    def test_every_edge_in_one_triangle_and_one_hexagon(self):
        code = kagome.build(4)
        tri_edges = [edge_set(p) for p in code.triangles.values()]
        hex_edges = [edge_set(p) for p in code.hexagons.values()]
        all_edges = set().union(*tri_edges)
        assert all_edges == set().union(*hex_edges)
        for e in all_edges:
            assert sum(e in p for p in tri_edges) == 1
            assert sum(e in p for p in hex_edges) == 1

    def test_triangle_sectors(self):
        code = kagome.build(4)
        for key, plq in code.triangles.items():
            exps = {e for _, e in plq}
            assert exps == ({1} if key[0] == "up" else {3})

    def test_hexagon_words_alternate(self):
        code = kagome.build(4)
        for plq in code.hexagons.values():
            exps = [e for _, e in plq]
            assert exps == [1, 3, 1, 3, 1, 3]


class TestGenerators:
    def test_split_sizes_at_l4(self):
        code = kagome.build(4)
        s_set, r_set = code.transform_stabilizers()
        assert len(s_set) == 16
        assert len(r_set) == 32

    def test_all_pairs_commute_exhaustively(self):
        code = kagome.build(4)
        gens = list(code.stabilizers.values())
        for g, h in itertools.combinations(gens, 2):
            assert g.commutation_exponent(h) % 4 == 0

    def test_charge_presentation_commutes_too(self):
        code = kagome.build(4)
        gens = list(code.charge_generators.values())
        for g, h in itertools.combinations(gens, 2):
            assert g.commutation_exponent(h) % 4 == 0

    @pytest.mark.parametrize("source", ["stabilizers", "charge_generators"])
    def test_global_product_is_identity(self, source):
        code = kagome.build(4)
        prod = PhasedPauli.identity(code.n_sites)
        for g in getattr(code, source).values():
            prod = prod * g
        assert prod.is_identity_word()

    def test_sector_products_are_identity(self):
        code = kagome.build(4)
        s_set, r_set = code.transform_stabilizers()
        for group in (s_set, r_set):
            prod = PhasedPauli.identity(code.n_sites)
            for g in group.values():
                prod = prod * g
            assert prod.is_identity_word()

    def test_independent_generator_count(self):
        code = kagome.build(4)
        # Each independent order-4 generator contributes two binary
        # log-units to the group order.
        assert kagome.z4_generator_log_order(code) == 2 * (3 * 16 - 2)

    def test_merged_generators_are_seven_site_pentagons(self):
        code = kagome.build(4)
        image = set(code.phi.values())
        for key in code.triangles:
            name = f"R[{key[0]},{key[1]},{key[2]}]"
            expected = 7 if key in image else 3
            assert len(code.stabilizers[name].support()) == expected

    def test_assignment_map_must_be_injective(self):
        code = kagome.build(4)
        hexes = list(code.phi)
        code.phi[hexes[0]] = code.phi[hexes[1]]
        with pytest.raises(ValueError):
            code._build_stabilizers()

    def test_assignment_map_must_respect_adjacency(self):
        code = kagome.build(4)
        code.phi[(0, 0)] = ("down", 2, 2)
        with pytest.raises(ValueError):
            code._build_stabilizers()

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=25, deadline=None)
    def test_any_error_deposits_zero_total_charge(self, seed):
        code = kagome.build(4)
        rng = np.random.default_rng(seed)
        z = rng.integers(0, 4, code.n_sites)
        x = rng.integers(0, 4, code.n_sites)
        err = PhasedPauli.from_exponents(
            code.n_sites,
            z_sites=dict(enumerate(z.tolist())),
            x_sites=dict(enumerate(x.tolist())),
        )
        s_set, r_set = code.transform_stabilizers()
        for group in (s_set, r_set):
            total = sum(err.commutation_exponent(g) for g in group.values())
            assert total % 4 == 0


class TestDefectLines:
    def test_line_length_at_l20(self):
        code = kagome.build_with_defect_pair(20)
        assert len(code.defect_lines) == 2
        for line in code.defect_lines:
            assert line.n_qudits == 11

    def test_pinning_terms_commute_with_all_generators(self):
        code = kagome.build(8).add_defect_line((2, 2))
        (line,) = code.defect_lines
        assert [t[:1] for t in line.term_types] == ["y", "x"] * 2 + ["y"]
        for term in code.defect_terms(line):
            for g in code.stabilizers.values():
                assert g.commutes_with(term)

    def test_generators_avoid_pinned_qudits(self):
        code = kagome.build(8).add_defect_line((2, 2))
        pinned = set(code.defect_lines[0].sites)
        for g in code.stabilizers.values():
            assert not set(g.support()) & pinned

    def test_hexagons_removed_along_line(self):
        code = kagome.build(8).add_defect_line((2, 2))
        (line,) = code.defect_lines
        assert line.removed_stabilizers
        for name in line.removed_stabilizers:
            assert name not in code.stabilizers

    def test_endpoint_regions_carry_no_hexagon_generator(self):
        code = kagome.build(8).add_defect_line((2, 2))
        (line,) = code.defect_lines
        endpoint_sites = set().union(
            *(set(p) for p in line.endpoint_plaquettes)
        )
        s_set, _ = code.transform_stabilizers()
        for g in s_set.values():
            assert not set(g.support()) >= endpoint_sites

    def test_overlapping_lines_rejected(self):
        code = kagome.build(8).add_defect_line((2, 2))
        with pytest.raises(ValueError):
            code.add_defect_line((2, 3))
        with pytest.raises(ValueError):
            code.add_defect_line((3, 2))

    def test_line_may_not_touch_its_own_wrap(self):
        with pytest.raises(ValueError):
            kagome.build(8).add_defect_line((2, 2), length=13)

    def test_line_length_must_be_odd(self):
        with pytest.raises(ValueError):
            kagome.build(8).add_defect_line((2, 2), length=4)

    def test_defect_code_generator_count(self):
        code = kagome.build_with_defect_pair(8)
        n_active = len(code.active_sites)
        # Three logical qudits: two from the torus plus one from the
        # defect pair.
        assert kagome.z4_generator_log_order(code) == 2 * (n_active - 3)


class TestLogicals:
    def test_defect_free_pair_algebra(self):
        code = kagome.build(8)
        lg = code.logicals
        assert set(lg) == {"X1", "Z1", "X2", "Z2"}
        for n in ("1", "2"):
            assert lg["Z" + n].commutation_exponent(lg["X" + n]) % 4 == 1
        for a, b in (("Z1", "X2"), ("Z1", "Z2"), ("X1", "X2"), ("X1", "Z2")):
            assert lg[a].commutation_exponent(lg[b]) % 4 == 0

    def test_logicals_commute_with_every_generator(self):
        code = kagome.build(8)
        for logical in code.logicals.values():
            for g in code.stabilizers.values():
                assert logical.commutes_with(g)

    def test_defect_pair_adds_conjugate_logicals(self):
        code = kagome.build_with_defect_pair(8)
        lg = code.logicals
        assert lg["ZL"].commutation_exponent(lg["XL"]) % 4 == 1
        for logical in lg.values():
            for g in code.stabilizers.values():
                assert logical.commutes_with(g)
        pinned = set().union(*(line.sites for line in code.defect_lines))
        for logical in lg.values():
            assert not set(logical.support()) & pinned


class TestDistances:
    def test_unknown_logical_rejected(self):
        with pytest.raises(ValueError):
            kagome.code_distance(kagome.build(4), "Q7")

    def test_search_matches_brute_force_at_l4(self):
        code = kagome.build(4)
        d = kagome.code_distance(code, "Z1")
        assert d == kagome.brute_force_distance(code, "Z1", max_weight=5)
        assert d == 4

    @pytest.mark.parametrize("L", [8, 12])
    def test_defect_pair_distances(self, L):
        code = kagome.build_with_defect_pair(L)
        assert kagome.code_distance(code, "ZL") == L // 2 + 4
        assert kagome.code_distance(code, "XL") == L + 2

    def test_distance_scales_with_size_defect_free(self):
        assert kagome.code_distance(kagome.build(4), "Z1") == 4
        assert kagome.code_distance(kagome.build(6), "Z1") == 6


class TestMoveGraph:
    def test_every_move_touches_two_generators(self):
        code = kagome.build(6)
        graph = kagome.build_move_graph(code)
        seen = {}
        for site, kind, u, v, cu, cv in graph.edges:
            assert cu in (1, 3) and cv in (1, 3)
            seen.setdefault((site, kind), []).append((u, v))
        active = set(code.active_sites)
        assert {s for s, _ in seen} == active
        assert all(len(ends) == 1 for ends in seen.values())

    def test_hop_distances_symmetric_and_connected(self):
        code = kagome.build(6)
        graph = kagome.build_move_graph(code)
        dist = kagome.all_pairs_distances(graph)
        assert np.array_equal(dist, dist.T)
        n = len(graph.node_names)
        by_sector = {}
        for idx, name in enumerate(graph.node_names):
            by_sector.setdefault(name[0], []).append(idx)
        # Hexagon and triangle sectors are disjoint transport networks.
        for sector, nodes in by_sector.items():
            sub = dist[np.ix_(nodes, nodes)]
            assert np.all(sub >= 0)
        a, b = by_sector["S"], by_sector["R"]
        assert np.all(dist[np.ix_(a, b)] == -1)


class TestSerialization:
    def test_describe_is_deterministic(self):
        one = kagome.build_with_defect_pair(8).describe()
        two = kagome.build_with_defect_pair(8).describe()
        assert one == two
        assert "defect strip=" in one

    def test_describe_mentions_every_generator_and_logical(self):
        code = kagome.build(4)
        text = code.describe()
        for name in code.stabilizers:
            assert name in text
        for name in code.logicals:
            assert f"logical {name} " in text
