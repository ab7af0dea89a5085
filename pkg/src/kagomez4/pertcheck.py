"""Combinatorial and spectral checks of the effective couplings.

Two independent verifications of the perturbative origin of the code
Hamiltonian: a census of the 720 orderings in which a hexagon loop can
be assembled one vertex at a time (with the exact rational prefactor the
census implies), and exact diagonalization of the four-qubit gadget that
trades a three-body interaction for two-body couplings to a gapped
mediator spin.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations

import numpy as np

from .noise import plaquette_energy

__all__ = ["RouteCensus", "enumerate_routes", "gadget_check"]


@dataclass(frozen=True)
class RouteCensus:
    """Multiplicity of every excitation-energy route and its prefactor.

    Keys of ``routes`` are tuples of total excitation energies (in gap
    units) after each of the six assembly steps, starting and ending at
    zero.  ``prefactor`` is the exact sum of multiplicity divided by the
    product of the five intermediate energies.
    """

    routes: dict
    prefactor: Fraction

    @property
    def total(self) -> int:
        return sum(self.routes.values())


def enumerate_routes() -> RouteCensus:
    """Census of the 6! orderings of the hexagon's single-site factors.

    The six factors sit on the hexagon's vertices; vertex ``i`` is shared
    by the adjacent triangles ``i`` and ``i + 1`` (mod 6), and applying
    the factor shifts both triangle charges by ``+1`` on even vertices
    and ``-1`` on odd ones (the factors alternate between a shift and its
    inverse around the hexagon).  Every ordering must return all six
    charges to zero; the intermediate energies bin the orderings into
    routes.
    """
    routes: dict = {}
    prefactor = Fraction(0)
    for order in permutations(range(6)):
        charges = [0] * 6
        energies = [0]
        for vertex in order:
            shift = 1 if vertex % 2 == 0 else -1
            charges[vertex] = (charges[vertex] + shift) % 4
            charges[(vertex + 1) % 6] = (charges[(vertex + 1) % 6] + shift) % 4
            energies.append(sum(plaquette_energy(c) for c in charges))
        if any(charges):
            raise AssertionError(
                f"ordering {order} does not return to the ground state"
            )
        if energies[-1] != 0:
            raise AssertionError(f"ordering {order} ends with excitations")
        route = tuple(energies)
        routes[route] = routes.get(route, 0) + 1
    for route, multiplicity in routes.items():
        denom = 1
        for energy in route[1:-1]:
            denom *= energy
        prefactor += Fraction(multiplicity, denom)
    return RouteCensus(routes=routes, prefactor=prefactor)


def gadget_check(alpha: float, beta: float, delta: float) -> dict:
    """Fitted effective couplings of the three-body gadget.

    The gadget couples three system qubits ``a``, ``b``, ``c`` to one
    gapped mediator qubit: the mediator is polarized by a field of
    strength ``delta/2``, qubits ``a`` and ``b`` couple with strength
    ``alpha`` to the mediator's flip, and ``c`` couples with strength
    ``beta`` to the mediator's polarization.  The compensating direct
    couplings ``2*alpha**2/delta`` (on ``ab``) and ``-beta`` (on ``c``)
    are included, so the leading surviving term in the mediator's low
    sector is the three-body coupling ``-4*alpha**2*beta/delta**2``.

    Returns the exact expansion of the per-configuration ground energy
    in products of the three system polarizations, keyed by subsets such
    as ``"c"``, ``"ab"``, ``"abc"`` (empty string for the constant).
    """
    scale = max(abs(alpha), abs(beta))
    if scale == 0 or delta / scale < 50:
        raise ValueError("gadget check requires the perturbative regime")
    gamma = 2 * alpha ** 2 / delta
    compensation_c = -beta

    energies = {}
    for sa in (1, -1):
        for sb in (1, -1):
            for sc in (1, -1):
                # The system polarizations are conserved, so the mediator
                # sees a 2x2 block: diagonal -delta/2 * su + beta*sc*su,
                # off-diagonal alpha*(sa+sb).
                coupling = alpha * (sa + sb)
                block = np.array(
                    [
                        [-delta / 2 + beta * sc, coupling],
                        [coupling, delta / 2 - beta * sc],
                    ]
                )
                ground = np.linalg.eigvalsh(block)[0]
                ground += gamma * sa * sb + compensation_c * sc
                energies[(sa, sb, sc)] = ground

    labels = {
        (): "",
        (0,): "a",
        (1,): "b",
        (2,): "c",
        (0, 1): "ab",
        (0, 2): "ac",
        (1, 2): "bc",
        (0, 1, 2): "abc",
    }
    coefficients = {}
    for subset, label in labels.items():
        total = 0.0
        for (sa, sb, sc), energy in energies.items():
            sign = 1
            for axis in subset:
                sign *= (sa, sb, sc)[axis]
            total += sign * energy
        coefficients[label] = total / 8
    coefficients["expected_abc"] = -4 * alpha ** 2 * beta / delta ** 2
    return coefficients
