"""Phased generalized Pauli operators on qudits of dimension 4.

A generalized Pauli word on ``n`` qudits is stored in the canonical form

    zeta**phase_exp * prod_i Z_i**z_exps[i] * X_i**x_exps[i]

where ``zeta = exp(i*pi/4)`` is a primitive eighth root of unity,
``omega = zeta**2 = i``, and on each qudit ``Z X = omega * X Z`` with
``X**4 = Z**4 = 1``.  The phase exponent lives in Z_8 and the per-qudit
exponents live in Z_4, which is closed under multiplication, inversion
and integer powers.

The module also provides exact symbolic sums of phased words with
coefficients in the cyclotomic ring Q(zeta) (used for eigenprojector
calculus) and a dense-matrix realization for small qudit counts, used
as an independent numerical oracle in the tests.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

OMEGA = 1j
ZETA = np.exp(1j * np.pi / 4)

# Dense single-qudit matrices: Z|j> = i**j |j>,  X|j> = |j+1 mod 4>.
_Z_MAT = np.diag([1, 1j, -1, -1j]).astype(complex)
_X_MAT = np.roll(np.eye(4, dtype=complex), 1, axis=0)


class PhasedPauli:
    """An immutable phased generalized Pauli word on qudits of dimension 4."""

    __slots__ = ("phase_exp", "z_exps", "x_exps", "_hash")

    def __init__(
        self,
        phase_exp: int,
        z_exps: Sequence[int],
        x_exps: Sequence[int],
    ) -> None:
        if len(z_exps) != len(x_exps):
            raise ValueError("z_exps and x_exps must have equal length")
        object.__setattr__(self, "phase_exp", phase_exp % 8)
        object.__setattr__(self, "z_exps", tuple(z % 4 for z in z_exps))
        object.__setattr__(self, "x_exps", tuple(x % 4 for x in x_exps))
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("PhasedPauli is immutable")

    # ------------------------------------------------------------------
    # Constructors
    # ------------------------------------------------------------------

    @classmethod
    def identity(cls, n: int) -> "PhasedPauli":
        return cls(0, (0,) * n, (0,) * n)

    @classmethod
    def z(cls, site: int, n: int, power: int = 1) -> "PhasedPauli":
        z = [0] * n
        z[site] = power
        return cls(0, z, [0] * n)

    @classmethod
    def x(cls, site: int, n: int, power: int = 1) -> "PhasedPauli":
        x = [0] * n
        x[site] = power
        return cls(0, [0] * n, x)

    @classmethod
    def from_exponents(
        cls,
        n: int,
        z_sites: Mapping[int, int] | None = None,
        x_sites: Mapping[int, int] | None = None,
        phase_exp: int = 0,
    ) -> "PhasedPauli":
        """Build a word from sparse ``site -> exponent`` maps."""
        z = [0] * n
        x = [0] * n
        for site, e in (z_sites or {}).items():
            z[site] = e
        for site, e in (x_sites or {}).items():
            x[site] = e
        return cls(phase_exp, z, x)

    # ------------------------------------------------------------------
    # Group operations
    # ------------------------------------------------------------------

    @property
    def num_qudits(self) -> int:
        return len(self.z_exps)

    def __mul__(self, other: "PhasedPauli") -> "PhasedPauli":
        """Operator product ``self @ other`` in canonical form.

        Reordering ``X**b Z**c = omega**(-b c) Z**c X**b`` on each qudit
        contributes ``-2*b*c`` to the Z_8 phase exponent.
        """
        if self.num_qudits != other.num_qudits:
            raise ValueError("qudit counts differ")
        phase = self.phase_exp + other.phase_exp
        for b, c in zip(self.x_exps, other.z_exps):
            phase -= 2 * b * c
        z = [a + c for a, c in zip(self.z_exps, other.z_exps)]
        x = [b + d for b, d in zip(self.x_exps, other.x_exps)]
        return PhasedPauli(phase, z, x)

    def dagger(self) -> "PhasedPauli":
        """Hermitian conjugate (= group inverse, since words are unitary)."""
        phase = -self.phase_exp
        for a, b in zip(self.z_exps, self.x_exps):
            phase -= 2 * a * b
        return PhasedPauli(
            phase,
            [-a for a in self.z_exps],
            [-b for b in self.x_exps],
        )

    def __pow__(self, k: int) -> "PhasedPauli":
        """Closed form: the reorderings contribute ``-k(k-1) sum(a b)``."""
        if k < 0:
            return self.dagger() ** (-k)
        cross = sum(a * b for a, b in zip(self.z_exps, self.x_exps))
        return PhasedPauli(
            k * self.phase_exp - k * (k - 1) * cross,
            [k * a for a in self.z_exps],
            [k * b for b in self.x_exps],
        )

    def scale(self, phase_exp: int) -> "PhasedPauli":
        """Multiply by the global phase ``zeta**phase_exp``."""
        return PhasedPauli(self.phase_exp + phase_exp, self.z_exps, self.x_exps)

    # ------------------------------------------------------------------
    # Relations
    # ------------------------------------------------------------------

    def commutation_exponent(self, other: "PhasedPauli") -> int:
        """Exponent ``t`` in Z_4 with ``self * other = omega**t * other * self``.

        For words ``Z**a X**b`` and ``Z**c X**d`` this is
        ``sum_i (a_i d_i - b_i c_i) mod 4``; it vanishes iff the two
        operators commute.
        """
        if self.num_qudits != other.num_qudits:
            raise ValueError("qudit counts differ")
        t = 0
        for a, b, c, d in zip(self.z_exps, self.x_exps, other.z_exps, other.x_exps):
            t += a * d - b * c
        return t % 4

    def commutes_with(self, other: "PhasedPauli") -> bool:
        return self.commutation_exponent(other) == 0

    def word(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """The phaseless word ``(z_exps, x_exps)``."""
        return (self.z_exps, self.x_exps)

    def support(self) -> tuple[int, ...]:
        return tuple(
            i
            for i, (a, b) in enumerate(zip(self.z_exps, self.x_exps))
            if a or b
        )

    def is_identity_word(self) -> bool:
        return not any(self.z_exps) and not any(self.x_exps)

    # ------------------------------------------------------------------
    # Dense oracle
    # ------------------------------------------------------------------

    def dense_matrix(self) -> np.ndarray:
        """Dense ``4**n x 4**n`` complex matrix (intended for n <= 6)."""
        n = self.num_qudits
        if n > 6:
            raise ValueError("dense_matrix is limited to at most 6 qudits")
        out = np.array([[ZETA ** self.phase_exp]], dtype=complex)
        for a, b in zip(self.z_exps, self.x_exps):
            local = np.linalg.matrix_power(_Z_MAT, a) @ np.linalg.matrix_power(
                _X_MAT, b
            )
            out = np.kron(out, local)
        return out

    # ------------------------------------------------------------------
    # Dunder plumbing
    # ------------------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PhasedPauli):
            return NotImplemented
        return (
            self.phase_exp == other.phase_exp
            and self.z_exps == other.z_exps
            and self.x_exps == other.x_exps
        )

    def __hash__(self) -> int:
        h = object.__getattribute__(self, "_hash")
        if h is None:
            h = hash((self.phase_exp, self.z_exps, self.x_exps))
            object.__setattr__(self, "_hash", h)
        return h

    def __repr__(self) -> str:
        terms = []
        for i, (a, b) in enumerate(zip(self.z_exps, self.x_exps)):
            if a:
                terms.append(f"Z{i}" + (f"^{a}" if a != 1 else ""))
            if b:
                terms.append(f"X{i}" + (f"^{b}" if b != 1 else ""))
        body = "*".join(terms) if terms else "I"
        if self.phase_exp:
            return f"zeta^{self.phase_exp}*{body}"
        return body


def equal_up_to_phase(p: PhasedPauli, q: PhasedPauli) -> bool:
    return p.z_exps == q.z_exps and p.x_exps == q.x_exps


# ----------------------------------------------------------------------
# Qubit-axis conversion
# ----------------------------------------------------------------------

# Each physical qudit stands for a pair of qubits; a single-qubit Pauli
# acting on either member of the pair lifts to a uniform mixture of
# single-qudit words (global phases are irrelevant for error dynamics
# and are dropped).  Entries are (z_exp, x_exp) pairs.
QUBIT_AXIS_WORDS: dict[str, tuple[tuple[int, int], ...]] = {
    "x": ((0, 1), (0, 3), (2, 1), (2, 3)),
    "y": ((1, 1), (1, 3), (3, 1), (3, 3)),
    "z": ((1, 0), (3, 0)),
}


def qubit_pauli_words(axis: str) -> tuple[tuple[int, int], ...]:
    """Single-qudit ``(z_exp, x_exp)`` words realizing a qubit Pauli axis.

    The lift of a qubit Pauli is any one of the listed words with equal
    probability; which qubit of the pair is hit does not change the set.
    """
    try:
        return QUBIT_AXIS_WORDS[axis.lower()]
    except KeyError:
        raise ValueError(f"axis must be one of x, y, z; got {axis!r}") from None


# ----------------------------------------------------------------------
# Parafermion chain
# ----------------------------------------------------------------------


def parafermion_transform(n: int) -> list[PhasedPauli]:
    """Return ``2n`` parafermion generators on an ``n``-qudit chain.

    The odd generator at site ``i`` is ``(prod_{j<i} X_j) Z_i`` and the
    even one is ``zeta**5 (prod_{j<=i} X_j) Z_i``; consecutive
    generators ``g_a g_b = omega g_b g_a`` for ``a < b`` and every
    generator has order 4.
    """
    gens: list[PhasedPauli] = []
    x_prefix = PhasedPauli.identity(n)
    for i in range(n):
        z_i = PhasedPauli.z(i, n)
        x_i = PhasedPauli.x(i, n)
        gens.append(x_prefix * z_i)
        x_prefix = x_prefix * x_i
        gens.append((x_prefix * z_i).scale(5))
    return gens


# ----------------------------------------------------------------------
# Exact cyclotomic coefficients and symbolic operator sums
# ----------------------------------------------------------------------


class Cyclo8:
    """An element of Q(zeta) with ``zeta = exp(i*pi/4)``.

    Stored as rational coordinates ``c0 + c1 zeta + c2 zeta^2 + c3 zeta^3``
    with the reduction ``zeta**4 = -1``.  All arithmetic is exact.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence[Fraction | int] = (0, 0, 0, 0)) -> None:
        if len(coeffs) != 4:
            raise ValueError("Cyclo8 needs exactly 4 coordinates")
        object.__setattr__(
            self, "coeffs", tuple(Fraction(c) for c in coeffs)
        )

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("Cyclo8 is immutable")

    @classmethod
    def zero(cls) -> "Cyclo8":
        return cls()

    @classmethod
    def one(cls) -> "Cyclo8":
        return cls((1, 0, 0, 0))

    @classmethod
    def zeta_power(cls, k: int) -> "Cyclo8":
        k %= 8
        coeffs = [Fraction(0)] * 4
        coeffs[k % 4] = Fraction(1) if k < 4 else Fraction(-1)
        return cls(coeffs)

    def __add__(self, other: "Cyclo8") -> "Cyclo8":
        return Cyclo8([a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other: "Cyclo8") -> "Cyclo8":
        return Cyclo8([a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __neg__(self) -> "Cyclo8":
        return Cyclo8([-a for a in self.coeffs])

    def __mul__(self, other: "Cyclo8 | Fraction | int") -> "Cyclo8":
        if isinstance(other, (int, Fraction)):
            return Cyclo8([a * other for a in self.coeffs])
        out = [Fraction(0)] * 4
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            for j, b in enumerate(other.coeffs):
                if not b:
                    continue
                k = i + j
                if k < 4:
                    out[k] += a * b
                else:
                    out[k - 4] -= a * b
        return Cyclo8(out)

    __rmul__ = __mul__

    def __truediv__(self, other: "Cyclo8") -> "Cyclo8":
        """Exact division: solve ``other * q = self`` by 4x4 elimination."""
        # Column j of the multiplication matrix is other * zeta**j.
        cols = [(other * Cyclo8.zeta_power(j)).coeffs for j in range(4)]
        aug = [
            [cols[j][i] for j in range(4)] + [self.coeffs[i]] for i in range(4)
        ]
        for col in range(4):
            pivot = next(
                (r for r in range(col, 4) if aug[r][col] != 0), None
            )
            if pivot is None:
                raise ZeroDivisionError("division by zero in Q(zeta)")
            aug[col], aug[pivot] = aug[pivot], aug[col]
            inv = 1 / aug[col][col]
            aug[col] = [v * inv for v in aug[col]]
            for r in range(4):
                if r != col and aug[r][col]:
                    f = aug[r][col]
                    aug[r] = [v - f * w for v, w in zip(aug[r], aug[col])]
        return Cyclo8([aug[r][4] for r in range(4)])

    def __bool__(self) -> bool:
        return any(self.coeffs)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Cyclo8((other, 0, 0, 0))
        if not isinstance(other, Cyclo8):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def as_zeta_exponent(self) -> int | None:
        """Return ``k`` if this value equals ``zeta**k``, else ``None``."""
        for k in range(8):
            if self == Cyclo8.zeta_power(k):
                return k
        return None

    def complex_value(self) -> complex:
        return sum(
            float(c) * ZETA ** k for k, c in enumerate(self.coeffs)
        )

    def __repr__(self) -> str:
        return f"Cyclo8({[str(c) for c in self.coeffs]})"


Word = tuple[tuple[int, ...], tuple[int, ...]]


class PauliSum:
    """An exact linear combination of generalized Pauli words.

    Keys are canonical phaseless words; values are Q(zeta) coefficients
    (any zeta-power carried by a :class:`PhasedPauli` is folded into the
    coefficient).  Generalized Pauli words are linearly independent, so
    equality of sums is equality of coefficient maps.
    """

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Mapping[Word, Cyclo8] | None = None) -> None:
        self.n = n
        self.terms: dict[Word, Cyclo8] = {}
        if terms:
            for w, c in terms.items():
                if c:
                    self.terms[w] = c

    @classmethod
    def from_pauli(
        cls, p: PhasedPauli, coeff: Cyclo8 | Fraction | int = 1
    ) -> "PauliSum":
        if isinstance(coeff, (int, Fraction)):
            coeff = Cyclo8((coeff, 0, 0, 0))
        c = coeff * Cyclo8.zeta_power(p.phase_exp)
        return cls(p.num_qudits, {p.word(): c})

    def __add__(self, other: "PauliSum") -> "PauliSum":
        out = dict(self.terms)
        for w, c in other.terms.items():
            s = out.get(w, Cyclo8.zero()) + c
            if s:
                out[w] = s
            else:
                out.pop(w, None)
        return PauliSum(self.n, out)

    def __mul__(self, other: "PauliSum") -> "PauliSum":
        out: dict[Word, Cyclo8] = {}
        for (za, xa), ca in self.terms.items():
            pa = PhasedPauli(0, za, xa)
            for (zb, xb), cb in other.terms.items():
                prod = pa * PhasedPauli(0, zb, xb)
                w = prod.word()
                c = ca * cb * Cyclo8.zeta_power(prod.phase_exp)
                s = out.get(w, Cyclo8.zero()) + c
                if s:
                    out[w] = s
                else:
                    out.pop(w, None)
        return PauliSum(self.n, out)

    def scaled(self, coeff: Cyclo8 | Fraction | int) -> "PauliSum":
        if isinstance(coeff, (int, Fraction)):
            coeff = Cyclo8((coeff, 0, 0, 0))
        return PauliSum(self.n, {w: coeff * c for w, c in self.terms.items()})

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PauliSum):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def dense_matrix(self) -> np.ndarray:
        dim = 4 ** self.n
        out = np.zeros((dim, dim), dtype=complex)
        for (z, x), c in self.terms.items():
            out += c.complex_value() * PhasedPauli(0, z, x).dense_matrix()
        return out

    def __repr__(self) -> str:
        return f"PauliSum(n={self.n}, {len(self.terms)} terms)"


def eigenprojector(op: PhasedPauli, sector: int) -> PauliSum:
    """Projector onto the ``omega**sector`` eigenspace of an order-4 word.

    ``P = (1/4) sum_m omega**(-sector*m) op**m``; requires ``op**4 = 1``.
    """
    if op ** 4 != PhasedPauli.identity(op.num_qudits):
        raise ValueError("operator must have order dividing 4 with trivial phase")
    quarter = Fraction(1, 4)
    total = PauliSum(op.num_qudits)
    power = PhasedPauli.identity(op.num_qudits)
    for m in range(4):
        coeff = Cyclo8.zeta_power((-2 * sector * m) % 8) * quarter
        total = total + PauliSum.from_pauli(power, coeff)
        power = power * op
    return total


class SectorOutcome:
    """Result of a projector sandwich restricted to one charge sector."""

    __slots__ = ("sector", "annihilated", "phase", "phase_exp", "amplitude")

    def __init__(
        self,
        sector: int,
        annihilated: bool,
        phase: Cyclo8 | None,
        amplitude: Fraction | None = None,
    ) -> None:
        self.sector = sector
        self.annihilated = annihilated
        self.phase = phase
        self.phase_exp = None if phase is None else phase.as_zeta_exponent()
        self.amplitude = amplitude

    def __repr__(self) -> str:
        if self.annihilated:
            return f"SectorOutcome(sector={self.sector}, annihilated)"
        return f"SectorOutcome(sector={self.sector}, phase_exp={self.phase_exp})"


def _conjugate(value: Cyclo8) -> Cyclo8:
    """Complex conjugation in Q(zeta): zeta -> zeta**(-1) = -zeta**3."""
    c = value.coeffs
    return Cyclo8((c[0], -c[3], -c[2], -c[1]))


def _fraction_sqrt(value: Fraction) -> Fraction | None:
    """Exact square root of a nonnegative rational, or ``None``."""
    import math

    if value < 0:
        return None
    num, den = value.numerator, value.denominator
    rn, rd = math.isqrt(num), math.isqrt(den)
    if rn * rn != num or rd * rd != den:
        return None
    return Fraction(rn, rd)


def _split_phase(ratio: Cyclo8) -> tuple[Fraction, Cyclo8] | None:
    """Write ``ratio = amplitude * phase`` with rational amplitude > 0.

    Returns ``None`` if ``|ratio|`` is not rational (then no unique exact
    split exists and the raw ratio should be reported as the phase).
    """
    mod_sq = ratio * _conjugate(ratio)
    if any(mod_sq.coeffs[1:]):
        return None
    amp = _fraction_sqrt(mod_sq.coeffs[0])
    if amp is None or amp == 0:
        return None
    inv = Cyclo8((Fraction(1, 1) / amp, 0, 0, 0))
    return amp, ratio * inv


def projector_sandwich(
    sequence: Sequence[tuple[PhasedPauli, int]],
    charge_label: PhasedPauli,
) -> dict[int, SectorOutcome]:
    """Evaluate an alternating product of eigenprojectors, sector by sector.

    ``sequence`` lists ``(operator, sector)`` pairs; the returned product
    is ``P_{op_0,k_0} P_{op_1,k_1} ... `` as an operator (leftmost factor
    applied last).  ``charge_label`` must commute with the first and last
    operators of the sequence.  The label is an operator that creates one
    unit of charge, so the charge-``g`` sector is the ``omega**g``
    eigenspace of its adjoint.  Restricted to each sector the sandwich is
    either zero ("annihilated") or a pure phase times the boundary
    projector (up to an overall sector-independent positive amplitude),
    and that phase is returned exactly.
    """
    if not sequence:
        raise ValueError("sequence must be nonempty")
    first_op, first_sector = sequence[0]
    last_op, last_sector = sequence[-1]
    if not charge_label.commutes_with(first_op) or not charge_label.commutes_with(
        last_op
    ):
        raise ValueError("charge label must commute with the boundary operators")
    if (first_op.word(), first_sector) != (last_op.word(), last_sector):
        raise ValueError("sequence must start and end with the same projector")

    product = eigenprojector(first_op, first_sector)
    for op, sector in sequence[1:]:
        product = product * eigenprojector(op, sector)

    boundary = eigenprojector(first_op, first_sector)
    adjoint_label = charge_label.dagger()
    out: dict[int, SectorOutcome] = {}
    for g in range(4):
        label_proj = eigenprojector(adjoint_label, g)
        restricted = label_proj * product * label_proj
        reference = label_proj * boundary
        if restricted.is_zero():
            out[g] = SectorOutcome(g, True, None)
            continue
        # Find the proportionality constant from any shared word.
        ratio: Cyclo8 | None = None
        for w, c in restricted.terms.items():
            ref = reference.terms.get(w)
            if ref:
                ratio = c / ref
                break
        if ratio is None or restricted != reference.scaled(ratio):
            raise ValueError(
                "restricted sandwich is not proportional to the boundary projector"
            )
        split = _split_phase(ratio)
        if split is None:
            out[g] = SectorOutcome(g, False, ratio)
        else:
            amp, phase = split
            out[g] = SectorOutcome(g, False, phase, amp)
    return out
