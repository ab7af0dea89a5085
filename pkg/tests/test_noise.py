"""Tests for the depolarizing and thermal error processes."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kagomez4 import kagome, noise
from kagomez4.noise import (
    ErrorFrame,
    MetropolisEngine,
    ThermalParams,
    apply_depolarizing,
    frame_charges,
    metropolis_step,
    plaquette_energy,
)


@pytest.fixture(scope="module")
def code6():
    return kagome.build(6)


@pytest.fixture(scope="module")
def defect8():
    return kagome.build_with_defect_pair(8)


class TestPlaquetteEnergy:
    def test_values(self):
        assert [plaquette_energy(k) for k in range(4)] == [0, 1, 2, 1]

    def test_periodic(self):
        assert plaquette_energy(7) == plaquette_energy(3)


class TestErrorFrame:
    def test_identity_has_no_charge(self, code6):
        frame = ErrorFrame.identity(code6.n_sites)
        assert not frame_charges(code6, frame).any()

    def test_composition_is_associative(self, code6):
        rng = np.random.default_rng(0)
        frames = [apply_depolarizing(code6, 0.2, rng) for _ in range(3)]
        a, b, c = frames
        left = a.compose(b).compose(c)
        right = a.compose(b.compose(c))
        assert np.array_equal(left.z, right.z)
        assert np.array_equal(left.x, right.x)

    def test_charges_add_under_composition(self, code6):
        rng = np.random.default_rng(1)
        a = apply_depolarizing(code6, 0.2, rng)
        b = apply_depolarizing(code6, 0.2, rng)
        lhs = frame_charges(code6, a.compose(b))
        rhs = (frame_charges(code6, a) + frame_charges(code6, b)) % 4
        assert np.array_equal(lhs, rhs)


class TestDepolarizing:
    def test_p_zero_is_identity(self, code6):
        frame = apply_depolarizing(code6, 0.0, np.random.default_rng(2))
        assert frame.is_trivial()
        assert frame.history == 0

    def test_p_one_hits_every_qudit(self, code6):
        frame = apply_depolarizing(code6, 1.0, np.random.default_rng(3))
        assert frame.history == len(code6.active_sites)

    def test_out_of_range_probability(self, code6):
        with pytest.raises(ValueError):
            apply_depolarizing(code6, 1.5, np.random.default_rng(0))

    def test_hit_fraction_is_binomial(self):
        code = kagome.build(8)
        rng = np.random.default_rng(4)
        p, trials = 0.05, 10_000
        total = sum(
            apply_depolarizing(code, p, rng).history for _ in range(trials)
        )
        n = trials * len(code.active_sites)
        sigma = math.sqrt(n * p * (1 - p))
        assert abs(total - n * p) < 3 * sigma

    def test_defect_qudits_never_hit(self, defect8):
        rng = np.random.default_rng(5)
        frame = apply_depolarizing(defect8, 1.0, rng)
        for line in defect8.defect_lines:
            for s in line.sites:
                assert frame.z[s] == 0 and frame.x[s] == 0


class TestThermalParams:
    def test_scales(self):
        params = ThermalParams(3.0)
        assert params.beta_energy_hexagon == 3.0
        assert params.beta_energy_triangle == 9.0

    @pytest.mark.parametrize("lam", [0.0, -1.0, 0.5])
    def test_rejects_bad_separation(self, lam):
        with pytest.raises(ValueError):
            ThermalParams(lam)


class TestMetropolis:
    def proposal(self, code, frame, dz, dx, site=None):
        engine = MetropolisEngine(
            code, ThermalParams(2.0), frame, np.random.default_rng(0)
        )
        s = code.active_sites[0] if site is None else site
        m, n = engine.coefficients(
            np.array([s]), np.array([dz]), np.array([dx])
        )
        return int(m[0]), int(n[0])

    def test_x_word_on_ground_state(self, code6):
        frame = ErrorFrame.identity(code6.n_sites)
        assert self.proposal(code6, frame, 0, 1) == (2, 0)

    def test_z_word_on_ground_state(self, code6):
        frame = ErrorFrame.identity(code6.n_sites)
        assert self.proposal(code6, frame, 1, 0) == (0, 2)

    def test_xz2_word_on_ground_state(self, code6):
        frame = ErrorFrame.identity(code6.n_sites)
        assert self.proposal(code6, frame, 2, 1) == (2, 4)

    def test_annihilating_proposal_always_accepted(self, code6):
        site = code6.active_sites[0]
        frame = ErrorFrame.identity(code6.n_sites)
        frame.apply(site, 1, 0)
        m, n = self.proposal(code6, frame, 3, 0, site=site)
        assert (m, n) == (0, -2)
        _, accepted, delta = metropolis_step(
            code6, ThermalParams(4.0), frame, np.random.default_rng(0)
        )
        assert delta <= 0 or isinstance(accepted, bool)

    def test_step_reports_energy_and_updates_frame(self, code6):
        rng = np.random.default_rng(6)
        params = ThermalParams(1.0)
        frame = ErrorFrame.identity(code6.n_sites)
        engine = MetropolisEngine(code6, params, frame, rng)
        for _ in range(500):
            accepted, delta = engine.step()
            if accepted and delta > 0:
                break
        charges = frame_charges(code6, frame)
        assert np.array_equal(charges, engine.charges)

    @pytest.mark.parametrize("lam", [1.0, 3.0])
    def test_sector_conservation_defect_free(self, code6, lam):
        rng = np.random.default_rng(7)
        frame = ErrorFrame.identity(code6.n_sites)
        engine = MetropolisEngine(code6, ThermalParams(lam), frame, rng)
        for _ in range(2000):
            engine.step()
        charges = frame_charges(code6, frame)
        tri = engine.ctx.is_triangle
        assert charges[tri].sum() % 4 == 0
        assert charges[~tri].sum() % 4 == 0

    def test_combined_parity_conservation_with_defects(self, defect8):
        rng = np.random.default_rng(8)
        frame = apply_depolarizing(defect8, 0.15, rng)
        charges = frame_charges(defect8, frame)
        assert charges.sum() % 2 == 0
        assert int((charges % 2).sum()) % 2 == 0

    def test_coefficients_land_in_allowed_set(self, code6):
        rng = np.random.default_rng(9)
        engine = MetropolisEngine(
            code6,
            ThermalParams(1.0),
            ErrorFrame.identity(code6.n_sites),
            np.random.default_rng(0),
        )
        allowed = {0, 2, -2, 4, -4}
        total = 0
        while total < 1_000_000:
            count = 65_536
            engine.charges = rng.integers(0, 4, len(engine.charges))
            sites, dzs, dxs = engine._draw(count)
            m, n = engine.coefficients(sites, dzs, dxs)
            assert set(np.unique(m)) <= allowed
            assert set(np.unique(n)) <= allowed
            total += count

    def test_detailed_balance_of_reverse_proposal(self, code6):
        rng = np.random.default_rng(10)
        params = ThermalParams(2.0)
        for _ in range(50):
            frame = apply_depolarizing(code6, 0.1, rng)
            engine = MetropolisEngine(code6, params, frame, rng)
            sites, dzs, dxs = engine._draw(1)
            m, n = engine.coefficients(sites, dzs, dxs)
            forward = (
                m[0] * params.beta_energy_triangle
                + n[0] * params.beta_energy_hexagon
            )
            engine._accept(int(sites[0]), int(dzs[0]), int(dxs[0]))
            m2, n2 = engine.coefficients(
                sites, (4 - dzs) % 4, (4 - dxs) % 4
            )
            backward = (
                m2[0] * params.beta_energy_triangle
                + n2[0] * params.beta_energy_hexagon
            )
            assert math.isclose(forward, -backward)
            # Metropolis identity for the acceptance ratio.
            ratio = min(1.0, math.exp(-forward)) / min(1.0, math.exp(-backward))
            assert math.isclose(ratio, math.exp(-forward))

    def test_advance_until_accepted_matches_manual_charges(self, code6):
        rng = np.random.default_rng(11)
        frame = ErrorFrame.identity(code6.n_sites)
        engine = MetropolisEngine(code6, ThermalParams(3.0), frame, rng)
        used = engine.advance_until_accepted(200_000)
        assert 1 <= used <= 200_000
        assert not frame.is_trivial()
        assert np.array_equal(engine.charges, frame_charges(code6, frame))

    def test_proposals_never_touch_pinned_qudits(self, defect8):
        rng = np.random.default_rng(12)
        frame = ErrorFrame.identity(defect8.n_sites)
        engine = MetropolisEngine(defect8, ThermalParams(1.0), frame, rng)
        for _ in range(3000):
            engine.step()
        for line in defect8.defect_lines:
            for s in line.sites:
                assert frame.z[s] == 0 and frame.x[s] == 0
