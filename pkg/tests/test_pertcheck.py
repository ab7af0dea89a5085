"""Route census exactness and the three-body gadget spectrum."""

from fractions import Fraction
from itertools import permutations

import pytest

from kagomez4.noise import plaquette_energy
from kagomez4.pertcheck import enumerate_routes, gadget_check


def simulate_route(order, vertex_map=None):
    """Independent re-simulation of one assembly ordering."""
    charges = [0] * 6
    energies = [0]
    for raw in order:
        vertex = raw if vertex_map is None else vertex_map[raw]
        shift = 1 if vertex % 2 == 0 else -1
        charges[vertex] = (charges[vertex] + shift) % 4
        charges[(vertex + 1) % 6] = (charges[(vertex + 1) % 6] + shift) % 4
        energies.append(sum(plaquette_energy(c) for c in charges))
    assert not any(charges)
    return tuple(energies)


@pytest.fixture(scope="module")
def census():
    return enumerate_routes()


class TestRouteCensus:

    def test_total_is_720(self, census):
        assert census.total == 720

    def test_prefactor_exact(self, census):
        assert census.prefactor == Fraction(63, 8)

    def test_multiplicity_multiset(self, census):
        assert sorted(census.routes.values()) == [
            24,
            48,
            48,
            48,
            72,
            96,
            96,
            96,
            192,
        ]

    def test_flat_route_multiplicity(self, census):
        assert census.routes[(0, 2, 2, 2, 2, 2, 0)] == 96

    def test_peak_route_multiplicity(self, census):
        assert census.routes[(0, 2, 4, 6, 4, 2, 0)] == 72

    def test_routes_start_and_end_at_ground(self, census):
        for route in census.routes:
            assert route[0] == 0 and route[-1] == 0
            assert all(e > 0 for e in route[1:-1])

    def test_prefactor_consistent_with_routes(self, census):
        total = Fraction(0)
        for route, mult in census.routes.items():
            denom = 1
            for energy in route[1:-1]:
                denom *= energy
            total += Fraction(mult, denom)
        assert total == census.prefactor

    def test_matches_independent_simulation(self, census):
        routes = {}
        for order in permutations(range(6)):
            route = simulate_route(order)
            routes[route] = routes.get(route, 0) + 1
        assert routes == census.routes

    def test_dihedral_invariance(self, census):
        # Relabeling the hexagon's vertices by any rotation or reflection
        # permutes the orderings but leaves the census unchanged (odd
        # rotations swap the shift and its inverse, and the excitation
        # energy is symmetric under charge negation).
        for rot in range(6):
            for refl in (False, True):
                vertex_map = [
                    ((-v if refl else v) + rot) % 6 for v in range(6)
                ]
                routes = {}
                for order in permutations(range(6)):
                    route = simulate_route(order, vertex_map)
                    routes[route] = routes.get(route, 0) + 1
                assert routes == census.routes


class TestGadget:
    def test_three_body_coefficient(self):
        delta = 1.0
        alpha = beta = 0.02
        fit = gadget_check(alpha, beta, delta)
        expected = -4 * alpha ** 2 * beta / delta ** 2
        assert fit["expected_abc"] == pytest.approx(expected)
        assert fit["abc"] == pytest.approx(expected, rel=0.05)

    def test_residuals_are_cancelled_to_tolerance(self):
        delta = 1.0
        alpha = beta = 0.02
        fit = gadget_check(alpha, beta, delta)
        small = max(alpha, beta) / delta
        # The explicit compensations cancel the O(beta) one-body and the
        # O(alpha**2/delta) two-body couplings; what survives is at least
        # one order smaller.
        assert abs(fit["c"]) < small * beta
        assert abs(fit["ab"]) < small * 2 * alpha ** 2 / delta
        for key in ("a", "b", "ac", "bc"):
            assert abs(fit[key]) < 1e-12

    def test_three_body_scaling(self):
        delta = 1.0
        base = gadget_check(0.01, 0.01, delta)["abc"]
        doubled_beta = gadget_check(0.01, 0.02, delta)["abc"]
        quadrupled_alpha = gadget_check(0.02, 0.01, delta)["abc"]
        assert doubled_beta == pytest.approx(2 * base, rel=0.02)
        assert quadrupled_alpha == pytest.approx(4 * base, rel=0.02)

    def test_rejects_non_perturbative_inputs(self):
        with pytest.raises(ValueError):
            gadget_check(0.1, 0.1, 1.0)
        with pytest.raises(ValueError):
            gadget_check(0.0, 0.0, 1.0)
