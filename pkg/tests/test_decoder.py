"""Tests for syndrome extraction, the move-count metric, and decoding."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kagomez4 import kagome
from kagomez4.decoder import (
    DistanceTable,
    SyndromeConfig,
    build_distance_table,
    decode,
    distance_table,
    extract_syndrome,
    logical_verdict,
    observable_failures,
)
from kagomez4.noise import ErrorFrame, apply_depolarizing, frame_charges


@pytest.fixture(scope="module")
def code4():
    return kagome.build(4)


@pytest.fixture(scope="module")
def code6():
    return kagome.build(6)


@pytest.fixture(scope="module")
def defect8():
    return kagome.build_with_defect_pair(8)


def frame_from_word(code, word):
    return ErrorFrame(
        np.array(word.z_exps, dtype=np.int8) % 4,
        np.array(word.x_exps, dtype=np.int8) % 4,
    )


class TestSyndrome:
    def test_identity_frame_is_trivial(self, code4):
        syn = extract_syndrome(code4, ErrorFrame.identity(code4.n_sites))
        assert syn.is_trivial()
        assert syn.odd.size == 0 and syn.even.size == 0

    @pytest.mark.parametrize("s", [1, 2, 3])
    def test_single_z_charges_two_hexagons(self, code4, s):
        for site in code4.active_sites[:6]:
            frame = ErrorFrame.identity(code4.n_sites)
            frame.apply(site, s, 0)
            syn = extract_syndrome(code4, frame)
            hit = np.flatnonzero(syn.charges)
            assert len(hit) == 2
            assert all(syn.names[i].startswith("S") for i in hit)
            assert int(syn.charges[hit].sum()) % 4 == 0

    @pytest.mark.parametrize("s", [1, 2, 3])
    def test_single_x_charges_two_triangles(self, code4, s):
        for site in code4.active_sites[:6]:
            frame = ErrorFrame.identity(code4.n_sites)
            frame.apply(site, 0, s)
            syn = extract_syndrome(code4, frame)
            hit = np.flatnonzero(syn.charges)
            assert len(hit) == 2
            assert all(syn.names[i].startswith("R") for i in hit)
            assert int(syn.charges[hit].sum()) % 4 == 0

    def test_odd_population_must_be_even(self, code4):
        charges = np.zeros(len(code4.charge_generators), dtype=np.int64)
        charges[0] = 1
        with pytest.raises(ValueError):
            SyndromeConfig(charges, list(code4.charge_generators))

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=30, deadline=None)
    def test_sampled_frames_conserve_charge(self, seed):
        code = kagome.build(4)
        frame = apply_depolarizing(code, 0.2, np.random.default_rng(seed))
        syn = extract_syndrome(code, frame)
        tri = [i for i, n in enumerate(syn.names) if n.startswith("R")]
        hexa = [i for i, n in enumerate(syn.names) if n.startswith("S")]
        assert int(syn.charges[tri].sum()) % 4 == 0
        assert int(syn.charges[hexa].sum()) % 4 == 0


class TestDistanceTable:
    def test_cached_and_spec_spelling(self, code4):
        table = distance_table(code4)
        assert build_distance_table(code4) is table
        assert distance_table(code4) is table

    def test_symmetric_with_unit_adjacency(self, code4):
        table = distance_table(code4)
        assert np.array_equal(table.dist, table.dist.T)
        for site, kind, u, v, cu, cv in table.graph.edges:
            assert table.dist[u, v] == 1

    def test_triangle_inequality_on_samples(self, code6):
        table = distance_table(code6)
        rng = np.random.default_rng(5)
        n = len(table.graph.node_names)
        for _ in range(400):
            a, b, c = rng.integers(0, n, size=3)
            if min(table.dist[a, b], table.dist[b, c], table.dist[a, c]) < 0:
                continue
            assert table.dist[a, c] <= table.dist[a, b] + table.dist[b, c]

    def test_path_endpoints_and_disconnection(self, code4):
        table = distance_table(code4)
        names = table.graph.node_names
        hexa = next(i for i, n in enumerate(names) if n.startswith("S"))
        tri = next(i for i, n in enumerate(names) if n.startswith("R"))
        assert table.path(hexa, hexa) == []
        with pytest.raises(ValueError):
            table.path(hexa, tri)

    def test_defect_line_inflates_equal_type_gaps(self, defect8):
        free = kagome.build(8)
        t_free = distance_table(free)
        t_def = distance_table(defect8)
        free_idx = {n: i for i, n in enumerate(t_free.graph.node_names)}
        def_idx = {n: i for i, n in enumerate(t_def.graph.node_names)}
        shared = [n for n in free_idx if n in def_idx]
        inflated = 0
        for a in shared:
            for b in shared:
                if a >= b or a[0] != b[0]:
                    continue
                d0 = t_free.dist[free_idx[a], free_idx[b]]
                d1 = t_def.dist[def_idx[a], def_idx[b]]
                if d0 == 1 and d1 >= d0 + 2:
                    inflated += 1
        assert inflated > 0

    def test_defect_connects_the_sectors(self, defect8):
        table = distance_table(defect8)
        names = table.graph.node_names
        hexa = next(i for i, n in enumerate(names) if n.startswith("S"))
        tri = next(i for i, n in enumerate(names) if n.startswith("R"))
        assert table.dist[hexa, tri] >= 1
        assert table.component[hexa] == table.component[tri]


class _MinimalWordOracle:
    """Brute-force minimal single-qudit-word counts for a charge target.

    Enumerates every nontrivial single-site word, then searches sums of
    up to four of them (meet in the middle through a hash of single-word
    charge vectors) for the cheapest combination producing a requested
    charge configuration.
    """

    def __init__(self, code):
        names, z_mat, x_mat = code.generator_arrays(charge_basis=True)
        z_mat = z_mat.astype(np.int64)
        x_mat = x_mat.astype(np.int64)
        rows = []
        for site in code.active_sites:
            for dz in range(4):
                for dx in range(4):
                    if dz == 0 and dx == 0:
                        continue
                    rows.append((x_mat[:, site] * dz - z_mat[:, site] * dx) % 4)
        self.singles = np.array(rows, dtype=np.int8)
        self.single_set = {row.tobytes() for row in self.singles}

    def _weight_at_most_2(self, target):
        if target.tobytes() in self.single_set:
            return 1
        rest = (target[None, :] - self.singles) % 4
        for row in rest:
            if row.tobytes() in self.single_set:
                return 2
        return None

    def min_weight(self, target, cap):
        target = target.astype(np.int8) % 4
        small = self._weight_at_most_2(target)
        if small is not None:
            return small
        if cap <= 2:
            return None
        for first in self.singles:
            if self._weight_at_most_2((target - first) % 4) == 2:
                return 3
        return 4 if cap >= 4 else None


class TestMetricExactness:
    def test_bfs_distance_equals_minimal_word_count(self, code6):
        table = distance_table(code6)
        oracle = _MinimalWordOracle(code6)
        n = len(table.graph.node_names)
        rng = np.random.default_rng(9)
        checked = {1: 0, 2: 0, 3: 0, 4: 0}
        budget = {1: 3, 2: 3, 3: 3, 4: 1}
        order = rng.permutation(n * n)
        for flat in order:
            u, v = divmod(int(flat), n)
            d = int(table.dist[u, v])
            if d not in budget or checked[d] >= budget[d]:
                continue
            best = None
            for g in (1, 3):
                target = np.zeros(len(table.graph.node_names), dtype=np.int8)
                target[u] = g
                target[v] = (-g) % 4
                w = oracle.min_weight(target, cap=d)
                if w is not None:
                    best = w if best is None else min(best, w)
            assert best == d, (u, v, d, best)
            checked[d] += 1
            if all(checked[k] >= budget[k] for k in budget):
                break
        assert all(checked[k] >= budget[k] for k in budget)


class TestDecode:
    def test_empty_syndrome_gives_identity(self, code4):
        syn = extract_syndrome(code4, ErrorFrame.identity(code4.n_sites))
        assert decode(code4, syn).is_trivial()

    def test_single_z_error_fixed_at_weight_one(self, code4):
        site = code4.active_sites[0]
        frame = ErrorFrame.identity(code4.n_sites)
        frame.apply(site, 1, 0)
        correction = decode(code4, extract_syndrome(code4, frame))
        support = np.flatnonzero((correction.z % 4) | (correction.x % 4))
        assert len(support) == 1
        residual = frame.compose(correction)
        assert not frame_charges(code4, residual).any()
        assert all(logical_verdict(code4, frame, correction).values())

    def test_double_z_squared_handled_by_round_two(self, code4):
        hexagon = next(iter(code4.stabilizers.values()))
        sites = sorted(hexagon.support())[:2]
        frame = ErrorFrame.identity(code4.n_sites)
        for site in sites:
            frame.apply(site, 2, 0)
        syn = extract_syndrome(code4, frame)
        assert syn.odd.size == 0
        assert syn.even.size >= 2
        correction = decode(code4, syn)
        assert not frame_charges(code4, frame.compose(correction)).any()

    @given(st.integers(0, 2**32 - 1), st.sampled_from([0.05, 0.15, 0.3]))
    @settings(max_examples=25, deadline=None)
    def test_always_annihilates_defect_free(self, seed, p):
        code = kagome.build(4)
        frame = apply_depolarizing(code, p, np.random.default_rng(seed))
        correction = decode(code, extract_syndrome(code, frame))
        assert not frame_charges(code, frame.compose(correction)).any()

    @given(st.integers(0, 2**32 - 1), st.sampled_from([0.05, 0.15, 0.3]))
    @settings(max_examples=15, deadline=None)
    def test_always_annihilates_with_defects(self, seed, p):
        code = kagome.build_with_defect_pair(8)
        frame = apply_depolarizing(code, p, np.random.default_rng(seed))
        correction = decode(code, extract_syndrome(code, frame))
        assert not frame_charges(code, frame.compose(correction)).any()


class TestVerdicts:
    def test_identity_all_pass(self, code4):
        frame = ErrorFrame.identity(code4.n_sites)
        verdict = logical_verdict(code4, frame, ErrorFrame.identity(code4.n_sites))
        assert all(verdict.values())

    def test_logical_representative_fails_its_partner(self, code4):
        frame = frame_from_word(code4, code4.logicals["X1"])
        identity = ErrorFrame.identity(code4.n_sites)
        verdict = logical_verdict(code4, frame, identity)
        assert not verdict["Z1"]
        assert verdict["X1"] and verdict["X2"] and verdict["Z2"]
        failures = observable_failures(code4, frame, identity)
        assert failures["X1"]
        assert not failures["Z1"] and not failures["X2"] and not failures["Z2"]

    def test_nonempty_residual_rejected(self, code4):
        frame = ErrorFrame.identity(code4.n_sites)
        frame.apply(code4.active_sites[0], 1, 0)
        with pytest.raises(ValueError):
            logical_verdict(code4, frame, ErrorFrame.identity(code4.n_sites))

    def test_verdict_invariant_under_stabilizer_multiplication(self, code4):
        rng = np.random.default_rng(17)
        generators = list(code4.stabilizers.values())
        for seed in range(20):
            frame = apply_depolarizing(code4, 0.2, np.random.default_rng(seed))
            correction = decode(code4, extract_syndrome(code4, frame))
            base = logical_verdict(code4, frame, correction)
            g = generators[rng.integers(len(generators))]
            shifted = correction.compose(frame_from_word(code4, g))
            assert logical_verdict(code4, frame, shifted) == base

    def test_failures_shrink_with_size_below_threshold(self):
        rates = {}
        for L in (8, 12):
            code = kagome.build(L)
            distance_table(code)
            fails = 0
            trials = 600
            for t in range(trials):
                rng = np.random.default_rng(
                    np.random.SeedSequence((23, L, t))
                )
                frame = apply_depolarizing(code, 0.06, rng)
                correction = decode(code, extract_syndrome(code, frame))
                fails += observable_failures(code, frame, correction)["Z1"]
            rates[L] = fails / trials
        assert rates[12] <= rates[8]


class TestSectorFactorization:
    def test_joint_decoding_equals_per_sector_decoding(self, code6):
        """Defect-free sectors decouple, so sector-wise decoding matches.

        The joint correction equals the composition of the two
        single-sector corrections trial by trial, which implies identical
        verdict statistics at any sample size.
        """
        table = distance_table(code6)
        names = table.graph.node_names
        tri = np.array([n.startswith("R") for n in names])
        for seed in range(200):
            frame = apply_depolarizing(code6, 0.1, np.random.default_rng(seed))
            syn = extract_syndrome(code6, frame)
            joint = decode(code6, syn)
            combined = ErrorFrame.identity(code6.n_sites)
            for mask in (tri, ~tri):
                part = SyndromeConfig(
                    np.where(mask, syn.charges, 0), syn.names
                )
                combined = combined.compose(decode(code6, part))
            assert np.array_equal(joint.z % 4, combined.z % 4)
            assert np.array_equal(joint.x % 4, combined.x % 4)
