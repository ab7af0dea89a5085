"""Depolarizing and thermal-Metropolis error processes.

Errors are tracked as Pauli frames: an :class:`ErrorFrame` stores the
``Z``/``X`` exponents accumulated on every qudit, and plaquette charges
are read off through the symplectic form against the working
generators.  The thermal process proposes single-qubit Pauli flips,
lifts them to qudit words, and accepts with the Metropolis rule on the
energy of the charge configuration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .kagome import KagomeCode
from .pauli import PhasedPauli, qubit_pauli_words

__all__ = [
    "ErrorFrame",
    "ThermalParams",
    "MetropolisEngine",
    "apply_depolarizing",
    "frame_charges",
    "metropolis_step",
    "plaquette_energy",
]

# Energy of a plaquette holding charge k, in units of that plaquette's
# gap: eigenvalue gap of -(W + W^dagger) when W has eigenvalue i^k.
_CHARGE_ENERGY = np.array([0, 1, 2, 1], dtype=np.int64)

_AXES = ("x", "y", "z")


def plaquette_energy(k: int) -> int:
    """Energy of charge ``k`` in units of the plaquette's gap."""
    return int(_CHARGE_ENERGY[k % 4])


class ErrorFrame:
    """Accumulated Pauli error, stored as exponent arrays per qudit.

    Composition is exponent addition mod 4 (word phases are irrelevant
    to syndromes and verdicts), so frames compose associatively.
    """

    __slots__ = ("z", "x", "history")

    def __init__(self, z: np.ndarray, x: np.ndarray, history: int = 0):
        self.z = z
        self.x = x
        self.history = history

    @classmethod
    def identity(cls, n_sites: int) -> "ErrorFrame":
        return cls(
            np.zeros(n_sites, dtype=np.int8),
            np.zeros(n_sites, dtype=np.int8),
        )

    def copy(self) -> "ErrorFrame":
        return ErrorFrame(self.z.copy(), self.x.copy(), self.history)

    def apply(self, site: int, dz: int, dx: int) -> None:
        """Compose one single-qudit word into the frame."""
        self.z[site] = (self.z[site] + dz) % 4
        self.x[site] = (self.x[site] + dx) % 4
        self.history += 1

    def compose(self, other: "ErrorFrame") -> "ErrorFrame":
        return ErrorFrame(
            (self.z + other.z) % 4,
            (self.x + other.x) % 4,
            self.history + other.history,
        )

    @property
    def word(self) -> PhasedPauli:
        return PhasedPauli.from_exponents(
            len(self.z),
            z_sites=dict(enumerate(self.z.tolist())),
            x_sites=dict(enumerate(self.x.tolist())),
        )

    def is_trivial(self) -> bool:
        return not (self.z.any() or self.x.any())


@dataclass(frozen=True)
class ThermalParams:
    """Energy scales of the thermal process, in units of ``k_B T``.

    ``lam`` is the dimensionless separation of the three energy scales
    ``k_B T : gap_hexagon : gap_triangle = 1 : lam : lam**2``.  The
    microscopic couplings ``J`` and ``h`` are accepted for
    documentation (``gap_triangle = 2J`` and ``gap_hexagon`` is the
    sixth-order coefficient ``2 * (63/8) h^6 / (2J)^5``) but play no
    role in the dynamics.
    """

    lam: float
    J: float | None = None
    h: float | None = None

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError("the scale separation must be positive")
        if self.beta_energy_triangle < self.beta_energy_hexagon:
            raise ValueError(
                "the triangle gap must dominate the hexagon gap (lam >= 1)"
            )

    @property
    def beta_energy_hexagon(self) -> float:
        return self.lam

    @property
    def beta_energy_triangle(self) -> float:
        return self.lam**2


class _ChargeContext:
    """Cached array views of a code's charge generators."""

    def __init__(self, code: KagomeCode):
        names, z_mat, x_mat = code.generator_arrays(charge_basis=True)
        self.names = names
        self.z_mat = z_mat.astype(np.int64)
        self.x_mat = x_mat.astype(np.int64)
        self.is_triangle = np.array(
            [name.startswith("R") for name in names], dtype=bool
        )
        self.active_sites = np.array(code.active_sites, dtype=np.int64)


def charge_context(code: KagomeCode) -> _ChargeContext:
    ctx = getattr(code, "_charge_ctx", None)
    if ctx is None:
        ctx = _ChargeContext(code)
        code._charge_ctx = ctx
    return ctx


def frame_charges(code: KagomeCode, frame: ErrorFrame) -> np.ndarray:
    """Charge of every working generator under ``frame``.

    The charge of generator ``g`` is the symplectic form of the frame
    word against ``g`` (``sum z_f x_g - x_f z_g`` mod 4), i.e. the
    generator's measured eigenvalue is ``omega**charge``.
    """
    ctx = charge_context(code)
    zf = frame.z.astype(np.int64)
    xf = frame.x.astype(np.int64)
    return (ctx.x_mat @ zf - ctx.z_mat @ xf) % 4


def apply_depolarizing(code: KagomeCode, p: float, rng) -> ErrorFrame:
    """Depolarizing noise at rate ``p`` per active qudit.

    Each hit qudit receives one single-qubit Pauli (uniform over the
    three axes), lifted to a uniformly chosen qudit word realizing
    that axis.  One event per qudit keeps the effective odd-charge
    error rate per sector at ``2p/3``, which is the rate the published
    threshold values (and their two-level-code comparison arithmetic)
    correspond to; independent per-qubit events would double-hit
    qudits and shift the crossings far below the published window.
    """
    if not 0 <= p <= 1:
        raise ValueError("depolarizing probability must lie in [0, 1]")
    frame = ErrorFrame.identity(code.n_sites)
    active = charge_context(code).active_sites
    hits = rng.random(len(active)) < p
    for q in np.flatnonzero(hits):
        site = int(active[q])
        words = qubit_pauli_words(_AXES[rng.integers(3)])
        dz, dx = words[rng.integers(len(words))]
        frame.apply(site, dz, dx)
    return frame


class MetropolisEngine:
    """Thermal dynamics on one frame, with incremental charge tracking.

    The engine owns ``frame`` and a charge vector kept in sync with it;
    proposals draw a uniform active qubit and a uniform Pauli axis with
    a uniform qudit lift, and are accepted with probability
    ``min(1, exp(-delta))`` where ``delta`` is the energy change of the
    charge configuration in units of ``k_B T``.
    """

    _CHUNK = 256

    def __init__(self, code: KagomeCode, params: ThermalParams, frame, rng):
        self.code = code
        self.params = params
        self.frame = frame
        self.rng = rng
        self.ctx = charge_context(code)
        self.charges = frame_charges(code, frame)
        self.gaps = np.where(
            self.ctx.is_triangle,
            params.beta_energy_triangle,
            params.beta_energy_hexagon,
        )
        self.steps = 0

    # -- proposal machinery -------------------------------------------

    def _draw(self, count: int):
        """Uniform proposals: sites and lifted ``(dz, dx)`` words."""
        rng = self.rng
        qubits = rng.integers(2 * len(self.ctx.active_sites), size=count)
        sites = self.ctx.active_sites[qubits // 2]
        axes = rng.integers(3, size=count)
        words = np.empty((count, 2), dtype=np.int64)
        for a, axis in enumerate(_AXES):
            mask = axes == a
            table = np.array(qubit_pauli_words(axis), dtype=np.int64)
            words[mask] = table[rng.integers(len(table), size=mask.sum())]
        return sites, words[:, 0], words[:, 1]

    def coefficients(self, sites, dzs, dxs):
        """Per-proposal ``(m, n)``: gap multiples for the two sectors."""
        dc = (
            dzs[:, None] * self.ctx.x_mat[:, sites].T
            - dxs[:, None] * self.ctx.z_mat[:, sites].T
        )
        de = (
            _CHARGE_ENERGY[(self.charges[None, :] + dc) % 4]
            - _CHARGE_ENERGY[self.charges[None, :]]
        )
        m = de[:, self.ctx.is_triangle].sum(axis=1)
        n = de[:, ~self.ctx.is_triangle].sum(axis=1)
        return m, n

    def _accept(self, site: int, dz: int, dx: int) -> None:
        self.charges = (
            self.charges
            + dz * self.ctx.x_mat[:, site]
            - dx * self.ctx.z_mat[:, site]
        ) % 4
        self.frame.apply(site, dz, dx)

    # -- public stepping ----------------------------------------------

    def step(self):
        """One Metropolis proposal; returns ``(accepted, delta_tot)``."""
        sites, dzs, dxs = self._draw(1)
        m, n = self.coefficients(sites, dzs, dxs)
        delta = (
            m[0] * self.params.beta_energy_triangle
            + n[0] * self.params.beta_energy_hexagon
        )
        self.steps += 1
        accepted = delta <= 0 or self.rng.random() < math.exp(-delta)
        if accepted:
            self._accept(int(sites[0]), int(dzs[0]), int(dxs[0]))
        return accepted, float(delta)

    def advance_until_accepted(self, max_steps: int) -> int:
        """Run proposals until one is accepted or the budget runs out.

        Returns the number of proposals consumed (the accepted one
        included); between acceptances the frame is constant, so
        proposals are drawn and evaluated in vectorized chunks.
        """
        consumed = 0
        while consumed < max_steps:
            count = min(self._CHUNK, max_steps - consumed)
            sites, dzs, dxs = self._draw(count)
            m, n = self.coefficients(sites, dzs, dxs)
            delta = (
                m * self.params.beta_energy_triangle
                + n * self.params.beta_energy_hexagon
            )
            accept = (delta <= 0) | (
                self.rng.random(count) < np.exp(-np.maximum(delta, 0.0))
            )
            hit = np.flatnonzero(accept)
            if hit.size:
                t = int(hit[0])
                consumed += t + 1
                self.steps += t + 1
                self._accept(int(sites[t]), int(dzs[t]), int(dxs[t]))
                return consumed
            consumed += count
            self.steps += count
        return consumed


def metropolis_step(code: KagomeCode, params: ThermalParams, frame, rng):
    """One thermal proposal on ``frame`` (mutated in place).

    Returns ``(frame, accepted, delta_tot)``.  For bulk dynamics build
    one :class:`MetropolisEngine` and step it instead; this wrapper
    rebuilds the charge vector on every call.
    """
    engine = MetropolisEngine(code, params, frame, rng)
    accepted, delta = engine.step()
    return frame, accepted, delta
