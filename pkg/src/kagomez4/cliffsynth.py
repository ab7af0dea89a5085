"""Clifford tableaux over Z_4 and synthesis into a nearest-neighbor gate set.

A Clifford unitary on qudits of dimension 4 is represented by its
conjugation action on the generators ``Z_i``, ``X_i`` as exact
:class:`~kagomez4.pauli.PhasedPauli` images.  The synthesis routine
rewrites any valid tableau as a word over the primitive gates
``{S_i, T_i, Z_i, C_Z(i, i+1)}`` and verifies the result by conjugation,
so the output is correct by construction or the routine raises.
"""

from __future__ import annotations

from collections import deque
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from .pauli import PhasedPauli

__all__ = [
    "CliffordTableau",
    "classify_pauli_orbit",
    "embed_tableau",
    "enumerate_sl2z4",
    "evaluate_word",
    "gate_tableau",
    "identity_tableau",
    "invert_word",
    "synthesize",
    "word_search",
]

GateWord = list  # sequence of ("S", i) | ("T", i) | ("Z", i) | ("C_Z", i, j)

_ODD_INVERSE = {1: 1, 3: 3}


# ----------------------------------------------------------------------
# Tableaux
# ----------------------------------------------------------------------


class CliffordTableau:
    """Conjugation action of a Clifford unitary, with exact phases.

    ``images[("Z", i)]`` and ``images[("X", i)]`` give the images of the
    generators under conjugation.  Validity requires that the images
    reproduce the generator commutation relations and that each image
    has exact order four (which pins the image phase parity).
    """

    __slots__ = ("n", "images")

    def __init__(self, n: int, images: Mapping[tuple, PhasedPauli]) -> None:
        self.n = n
        self.images = dict(images)
        self._validate()

    @classmethod
    def _trusted(cls, n: int, images: dict) -> "CliffordTableau":
        out = object.__new__(cls)
        out.n = n
        out.images = images
        return out

    def _validate(self) -> None:
        keys = {(kind, i) for kind in ("Z", "X") for i in range(self.n)}
        if set(self.images) != keys:
            raise ValueError("tableau must supply images of every Z_i and X_i")
        gens = {}
        for kind, i in keys:
            img = self.images[(kind, i)]
            if img.num_qudits != self.n:
                raise ValueError("image qudit count mismatch")
            parity = sum(a * b for a, b in zip(img.z_exps, img.x_exps))
            if (img.phase_exp - parity) % 2:
                raise ValueError(
                    f"image of {kind}_{i} does not have order four "
                    "(phase incompatible with its exponent word)"
                )
            gens[(kind, i)] = img
        for kind_a, i in keys:
            for kind_b, j in keys:
                want = 0
                if i == j and (kind_a, kind_b) == ("Z", "X"):
                    want = 1
                if i == j and (kind_a, kind_b) == ("X", "Z"):
                    want = 3
                got = gens[(kind_a, i)].commutation_exponent(gens[(kind_b, j)])
                if got != want:
                    raise ValueError(
                        "images violate the symplectic form on "
                        f"({kind_a}_{i}, {kind_b}_{j})"
                    )

    def conjugate(self, p: PhasedPauli) -> PhasedPauli:
        """Image of an arbitrary word under the tableau's conjugation."""
        if p.num_qudits != self.n:
            raise ValueError("qudit count mismatch")
        return _conjugate_via(self.images, p, self.n)

    def compose(self, other: "CliffordTableau") -> "CliffordTableau":
        """Tableau of ``self`` applied after ``other`` (operator product)."""
        if self.n != other.n:
            raise ValueError("qudit count mismatch")
        return CliffordTableau._trusted(
            self.n, {key: self.conjugate(img) for key, img in other.images.items()}
        )

    def invert(self) -> "CliffordTableau":
        """Tableau of the inverse unitary."""
        n = self.n
        order = [("Z", i) for i in range(n)] + [("X", i) for i in range(n)]
        exponent = [[0] * (2 * n) for _ in range(2 * n)]
        for col, key in enumerate(order):
            img = self.images[key]
            for r in range(n):
                exponent[r][col] = img.z_exps[r]
                exponent[n + r][col] = img.x_exps[r]
        inverse = _inv_mod4(exponent)
        images = {}
        for idx, key in enumerate(order):
            vec = [inverse[r][idx] % 4 for r in range(2 * n)]
            pre = PhasedPauli(0, vec[:n], vec[n:])
            out = self.conjugate(pre)
            expect_z = [0] * n
            expect_x = [0] * n
            (expect_z if key[0] == "Z" else expect_x)[key[1]] = 1
            if out.z_exps != tuple(expect_z) or out.x_exps != tuple(expect_x):
                raise AssertionError("exponent inverse failed")
            images[key] = pre.scale(-out.phase_exp)
        return CliffordTableau._trusted(n, images)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CliffordTableau):
            return NotImplemented
        return self.n == other.n and self.images == other.images

    def __hash__(self) -> int:
        return hash((self.n, tuple(sorted(self.images.items()))))

    def __repr__(self) -> str:
        rows = ", ".join(
            f"{kind}{i}->{self.images[(kind, i)]!r}"
            for kind in ("Z", "X")
            for i in range(self.n)
        )
        return f"CliffordTableau({rows})"


def _identity_images(n: int) -> dict:
    images = {}
    for i in range(n):
        images[("Z", i)] = PhasedPauli.z(i, n)
        images[("X", i)] = PhasedPauli.x(i, n)
    return images


def identity_tableau(n: int) -> CliffordTableau:
    return CliffordTableau._trusted(n, _identity_images(n))


def _conjugate_via(images: Mapping[tuple, PhasedPauli], p: PhasedPauli, n: int) -> PhasedPauli:
    out = PhasedPauli.identity(n).scale(p.phase_exp)
    for i in p.support():
        a = p.z_exps[i]
        if a:
            out = out * images[("Z", i)] ** a
        b = p.x_exps[i]
        if b:
            out = out * images[("X", i)] ** b
    return out


def _inv_mod4(mat: Sequence[Sequence[int]]) -> list:
    """Inverse of an invertible matrix over Z_4 (odd-pivot elimination)."""
    k = len(mat)
    work = [list(row) for row in mat]
    inv = [[1 if r == c else 0 for c in range(k)] for r in range(k)]
    for col in range(k):
        pivot = next((r for r in range(col, k) if work[r][col] % 2), None)
        if pivot is None:
            raise ValueError("matrix is not invertible over Z_4")
        work[col], work[pivot] = work[pivot], work[col]
        inv[col], inv[pivot] = inv[pivot], inv[col]
        f = _ODD_INVERSE[work[col][col] % 4]
        work[col] = [(f * v) % 4 for v in work[col]]
        inv[col] = [(f * v) % 4 for v in inv[col]]
        for r in range(k):
            if r != col and work[r][col]:
                m = work[r][col]
                work[r] = [(v - m * w) % 4 for v, w in zip(work[r], work[col])]
                inv[r] = [(v - m * w) % 4 for v, w in zip(inv[r], inv[col])]
    return inv


# ----------------------------------------------------------------------
# Gate library
# ----------------------------------------------------------------------


def _tab(n: int, **named_images) -> CliffordTableau:
    images = _identity_images(n)
    for key, value in named_images.items():
        images[(key[0], int(key[1:]))] = value
    return CliffordTableau(n, images)


def gate_tableau(name: str, s: int | None = None, t: int | None = None) -> CliffordTableau:
    """Exact tableau of a library gate.

    One-qudit gates: ``S``, ``T``, ``Z``, ``X``, ``H``; two-qudit gates:
    ``C_Z``, ``C_X``, ``SWAP`` and the parametrized controlled gate
    ``C_st`` (pass ``s`` and ``t``), all on qudits ``(0, 1)``.
    """

    def w(n, phase, z_sites=None, x_sites=None):
        return PhasedPauli.from_exponents(
            n, z_sites=z_sites, x_sites=x_sites, phase_exp=phase
        )

    if name == "S":
        return _tab(1, X0=w(1, 7, {0: 1}, {0: 1}))
    if name == "T":
        return _tab(1, Z0=w(1, 1, {0: 1}, {0: 3}))
    if name == "Z":
        return _tab(1, X0=w(1, 2, None, {0: 1}))
    if name == "X":
        return _tab(1, Z0=w(1, 6, {0: 1}))
    if name == "H":
        return _tab(1, Z0=w(1, 0, None, {0: 3}), X0=w(1, 0, {0: 1}))
    if name == "C_Z":
        return _tab(
            2,
            X0=w(2, 0, {1: 1}, {0: 1}),
            X1=w(2, 0, {0: 1}, {1: 1}),
        )
    if name == "C_X":
        return _tab(
            2,
            X0=w(2, 0, None, {0: 1, 1: 1}),
            Z1=w(2, 0, {0: 3, 1: 1}),
        )
    if name == "SWAP":
        return _tab(
            2,
            Z0=w(2, 0, {1: 1}),
            Z1=w(2, 0, {0: 1}),
            X0=w(2, 0, None, {1: 1}),
            X1=w(2, 0, None, {0: 1}),
        )
    if name == "C_st":
        if s is None or t is None:
            raise ValueError("C_st requires the exponents s and t")
        s, t = s % 4, t % 4
        return _tab(
            2,
            X0=w(2, -s * t, {1: t}, {0: 1, 1: s}),
            Z1=w(2, 0, {0: (-s) % 4, 1: 1}),
            X1=w(2, 0, {0: t}, {1: 1}),
        )
    raise ValueError(f"unknown gate {name!r}")


def embed_tableau(tab: CliffordTableau, n: int, sites: Sequence[int]) -> CliffordTableau:
    """Place a small tableau on the given qudits of an ``n``-qudit register."""
    if len(sites) != tab.n or len(set(sites)) != tab.n:
        raise ValueError("sites must list one distinct qudit per tableau qudit")

    def lift(p: PhasedPauli) -> PhasedPauli:
        z = [0] * n
        x = [0] * n
        for local, site in enumerate(sites):
            z[site] = p.z_exps[local]
            x[site] = p.x_exps[local]
        return PhasedPauli(p.phase_exp, z, x)

    images = _identity_images(n)
    for (kind, local), img in tab.images.items():
        images[(kind, sites[local])] = lift(img)
    return CliffordTableau._trusted(n, images)


# ----------------------------------------------------------------------
# Gate words
# ----------------------------------------------------------------------

_PRIMITIVES = ("S", "T", "Z", "C_Z")


def _check_word(word: Iterable[tuple], n: int) -> None:
    for entry in word:
        name = entry[0]
        if name not in _PRIMITIVES:
            raise ValueError(f"gate {name!r} is not in the primitive set")
        sites = entry[1:]
        if any(not (0 <= i < n) for i in sites):
            raise ValueError(f"gate {entry!r} addresses a qudit outside 0..{n - 1}")
        if name == "C_Z":
            if len(sites) != 2 or abs(sites[0] - sites[1]) != 1:
                raise ValueError(f"{entry!r} is not a nearest-neighbor pair")
        elif len(sites) != 1:
            raise ValueError(f"{entry!r} must address one qudit")


def _gate_updates(entry: tuple, n: int) -> tuple:
    """Nontrivial generator images of one primitive gate."""
    name = entry[0]
    i = entry[1]
    if name == "S":
        return ((("X", i), PhasedPauli.from_exponents(n, {i: 1}, {i: 1}, 7)),)
    if name == "T":
        return ((("Z", i), PhasedPauli.from_exponents(n, {i: 1}, {i: 3}, 1)),)
    if name == "Z":
        return ((("X", i), PhasedPauli.from_exponents(n, None, {i: 1}, 2)),)
    j = entry[2]
    return (
        (("X", i), PhasedPauli.from_exponents(n, {j: 1}, {i: 1}, 0)),
        (("X", j), PhasedPauli.from_exponents(n, {i: 1}, {j: 1}, 0)),
    )


def evaluate_word(word: Iterable[tuple], n: int) -> CliffordTableau:
    """Tableau of a primitive-gate word (leftmost gate applied last)."""
    word = list(word)
    _check_word(word, n)
    images = _identity_images(n)
    for entry in word:
        updates = {
            key: _conjugate_via(images, img, n)
            for key, img in _gate_updates(entry, n)
        }
        images.update(updates)
    return CliffordTableau(n, images)


_INVERSE_REPS = {"S": 7, "T": 7, "Z": 3, "C_Z": 3}


def invert_word(word: Iterable[tuple]) -> GateWord:
    """Primitive word whose conjugation inverts the given word's."""
    out: GateWord = []
    for entry in reversed(list(word)):
        out.extend([entry] * _INVERSE_REPS[entry[0]])
    return out


def _h_word(i: int) -> GateWord:
    # conj(STS) equals conj(H) exactly (they differ by a global phase).
    return [("S", i), ("T", i), ("S", i)]


def _h_inv(i: int) -> GateWord:
    # The conjugation action of H has order four.
    return _h_word(i) * 3


def _x_conj_word(i: int) -> GateWord:
    # X = H Z**3 H^dag exactly, so this word conjugates like X does.
    return _h_word(i) + [("Z", i)] * 3 + _h_inv(i)


def _cz_adj(i: int, j: int) -> GateWord:
    return [("C_Z", min(i, j), max(i, j))]


def _cx_adj(i: int, j: int) -> GateWord:
    """Controlled shift (control ``i``, target ``j``) on adjacent qudits."""
    return _h_inv(j) + _cz_adj(i, j) + _h_word(j)


def _cx_adj_inv(i: int, j: int) -> GateWord:
    return _h_inv(j) + _cz_adj(i, j) * 3 + _h_word(j)


def _swap_adj(i: int, j: int) -> GateWord:
    # SWAP agrees with CX(i,j) CX(j,i)^dag CX(i,j) H_j^2 up to a phase,
    # and is its own inverse.
    return (
        _cx_adj(i, j)
        + _cx_adj_inv(j, i)
        + _cx_adj(i, j)
        + _h_word(j)
        + _h_word(j)
    )


def _swap_chain(i: int, j: int) -> GateWord:
    """Self-inverse word whose conjugation exchanges qudits i and j."""
    i, j = min(i, j), max(i, j)
    if j == i:
        return []
    if j == i + 1:
        return _swap_adj(i, j)
    inner = _swap_chain(i + 1, j)
    return inner + _swap_adj(i, i + 1) + inner


def _route(i: int, k: int) -> GateWord:
    """Self-inverse word bringing qudit ``k`` adjacent to qudit ``i``."""
    if abs(i - k) <= 1:
        return []
    step = i + 1 if k > i else i - 1
    return _swap_chain(step, k)


def _cst_word(i: int, k: int, s: int, t: int) -> GateWord:
    """Controlled gate attaching ``X_k**s Z_k**t`` to the image of X_i."""
    s, t = s % 4, t % 4
    route = _route(i, k)
    j = k if abs(i - k) <= 1 else (i + 1 if k > i else i - 1)
    core: GateWord = [("S", i)] * ((s * t) % 8)
    core += _cx_adj(i, j) * s
    core += _cz_adj(i, j) * t
    return route + core + route


def _cz_pair(i: int, k: int) -> GateWord:
    route = _route(i, k)
    j = k if abs(i - k) <= 1 else (i + 1 if k > i else i - 1)
    return route + _cz_adj(i, j) + route


# ----------------------------------------------------------------------
# SL(2, Z_4) and the single-qudit word search
# ----------------------------------------------------------------------


def _mat_mul(a, b):
    return (
        (
            (a[0][0] * b[0][0] + a[0][1] * b[1][0]) % 4,
            (a[0][0] * b[0][1] + a[0][1] * b[1][1]) % 4,
        ),
        (
            (a[1][0] * b[0][0] + a[1][1] * b[1][0]) % 4,
            (a[1][0] * b[0][1] + a[1][1] * b[1][1]) % 4,
        ),
    )


def _mat_inv(m):
    det = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) % 4
    f = _ODD_INVERSE[det]
    return (
        ((f * m[1][1]) % 4, (-f * m[0][1]) % 4),
        ((-f * m[1][0]) % 4, (f * m[0][0]) % 4),
    )


def _tableau_matrix(tab: CliffordTableau):
    """Exponent matrix of a single-qudit tableau (columns: Z, X images)."""
    pz, px = tab.images[("Z", 0)], tab.images[("X", 0)]
    return (
        (pz.z_exps[0], px.z_exps[0]),
        (pz.x_exps[0], px.x_exps[0]),
    )


def enumerate_sl2z4() -> frozenset:
    """All 2x2 matrices over Z_4 with determinant 1 (exactly 48)."""
    out = set()
    for a in range(4):
        for b in range(4):
            for c in range(4):
                for d in range(4):
                    if (a * d - b * c) % 4 == 1:
                        out.add(((a, b), (c, d)))
    return frozenset(out)


@lru_cache(maxsize=1)
def word_search() -> dict:
    """Shortest S/T letter word for every determinant-1 exponent matrix.

    Breadth-first search over right multiplication; every target is
    reached with at most nine letters.
    """
    generators = {
        "S": _tableau_matrix(gate_tableau("S")),
        "T": _tableau_matrix(gate_tableau("T")),
    }
    identity = ((1, 0), (0, 1))
    words = {identity: ()}
    queue = deque([identity])
    while queue:
        cur = queue.popleft()
        for letter, gen in generators.items():
            nxt = _mat_mul(cur, gen)
            if nxt not in words:
                words[nxt] = words[cur] + (letter,)
                queue.append(nxt)
    assert set(words) == set(enumerate_sl2z4()), "BFS failed to cover SL(2, Z_4)"
    assert max(len(w) for w in words.values()) <= 9
    return words


# ----------------------------------------------------------------------
# Orbit classification
# ----------------------------------------------------------------------


def classify_pauli_orbit(p: PhasedPauli) -> str:
    """Conjugation-invariant eigenvalue class of a phased word.

    ``identity``: scalar.  ``even``: the square is a scalar, so the
    spectrum is two antipodal values.  ``odd-odd``: the fourth power is
    ``-1`` and the eigenvalues are primitive eighth roots of unity.
    ``mixed-parity``: order four with all four fourth roots of unity.
    """
    if p.is_identity_word():
        return "identity"
    fourth = p ** 4
    if not fourth.is_identity_word():
        raise ValueError("operator order does not divide four")
    if fourth.phase_exp % 8 == 4:
        return "odd-odd"
    if (p * p).is_identity_word():
        return "even"
    return "mixed-parity"


# ----------------------------------------------------------------------
# Synthesis
# ----------------------------------------------------------------------


def _blocks(p: PhasedPauli, q: PhasedPauli, start: int) -> dict:
    """Per-qudit 2x2 exponent blocks [[a, c], [b, d]] from qudit start on."""
    return {
        i: (
            (p.z_exps[i], q.z_exps[i]),
            (p.x_exps[i], q.x_exps[i]),
        )
        for i in range(start, p.num_qudits)
    }


def _block_det(block) -> int:
    return (block[0][0] * block[1][1] - block[0][1] * block[1][0]) % 4


def _single_word(matrix, site: int) -> GateWord:
    return [(letter, site) for letter in word_search()[matrix]]


def _single_word_inv(matrix, site: int) -> GateWord:
    return _single_word(_mat_inv(matrix), site)


def _pair_word(p: PhasedPauli, q: PhasedPauli, off: int) -> tuple:
    """Word (and its tableau) sending Z_off to p and X_off to q exactly."""
    n = p.num_qudits
    target_z, target_x = p.phase_exp, q.phase_exp
    reduction: GateWord = []
    reduction_inv: GateWord = []

    def apply(piece: GateWord, piece_inv: GateWord):
        nonlocal p, q, reduction, reduction_inv
        if not piece:
            return
        tab = evaluate_word(piece, n)
        p, q = tab.conjugate(p), tab.conjugate(q)
        reduction = piece + reduction
        reduction_inv = reduction_inv + piece_inv

    blocks = _blocks(p, q, off)
    odd = [i for i in blocks if _block_det(blocks[i]) % 2]
    j = next((i for i in odd if _block_det(blocks[i]) == 1), odd[0])

    if _block_det(blocks[j]) == 3:
        # Rotate the anchor block to the off-diagonal normal form, give a
        # partner qudit an x-exponent of 2 in the X-image, and use one
        # controlled phase to flip the anchor determinant to +1.
        flip = ((0, 1), (1, 0))
        rot = _mat_mul(flip, _mat_inv(blocks[j]))
        apply(_single_word(rot, j), _single_word_inv(rot, j))
        partner = None
        for k, block in _blocks(p, q, off).items():
            if k == j:
                continue
            for mat in word_search():
                if _mat_mul(mat, block)[1][1] % 4 == 2:
                    partner = (k, mat)
                    break
            if partner:
                break
        if partner is None:
            raise ValueError("no partner qudit can absorb the determinant flip")
        k, mat = partner
        apply(_single_word(mat, k), _single_word_inv(mat, k))
        apply(_cz_pair(j, k), _cz_pair(j, k) * 3)
        if _block_det(_blocks(p, q, off)[j]) != 1:
            raise AssertionError("determinant normalization failed")

    rot = _mat_inv(_blocks(p, q, off)[j])
    apply(_single_word(rot, j), _single_word_inv(rot, j))
    if j != off:
        chain = _swap_chain(off, j)
        apply(chain, chain)

    blocks = _blocks(p, q, off)
    if blocks[off] != ((1, 0), (0, 1)):
        raise AssertionError("anchor block normalization failed")

    # Rebuild the images on top of the reduced pair: one controlled layer
    # conjugated into the Z-frame supplies the Z-image tail, a second
    # layer supplies the X-image tail.
    z_layer: GateWord = []
    x_layer: GateWord = []
    for k in range(off + 1, n):
        (a, c), (b, d) = blocks[k]
        if a or b:
            z_layer += _cst_word(off, k, s=b, t=a)
        if c or d:
            x_layer += _cst_word(off, k, s=d, t=c)
    build = _h_word(off) + z_layer + _h_inv(off) + x_layer

    word = reduction_inv + build
    tab = evaluate_word(word, n)
    img_z = tab.images[("Z", off)]
    img_x = tab.images[("X", off)]
    if (img_z.phase_exp - target_z) % 2 or (img_x.phase_exp - target_x) % 2:
        raise AssertionError("image phase parity mismatch")
    k_x = ((img_z.phase_exp - target_z) // 2) % 4
    k_z = ((target_x - img_x.phase_exp) // 2) % 4
    fix = [("Z", off)] * k_z + _x_conj_word(off) * k_x
    if fix:
        word = word + fix
        tab = evaluate_word(word, n)
    return word, tab


def synthesize(target: CliffordTableau) -> GateWord:
    """Primitive-gate word realizing the target conjugation action.

    The word uses only ``S``, ``T``, ``Z`` and nearest-neighbor ``C_Z``
    and evaluates to a tableau equal to the target (global phases are
    unobservable under conjugation).  Raises if the target is invalid or
    the verification fails.
    """
    n = target.n
    word: GateWord = []
    remaining = target
    for off in range(n):
        p = remaining.images[("Z", off)]
        q = remaining.images[("X", off)]
        if any(
            p.z_exps[i] or p.x_exps[i] or q.z_exps[i] or q.x_exps[i]
            for i in range(off)
        ):
            raise AssertionError("residual tableau leaks onto finished qudits")
        piece, piece_tab = _pair_word(p, q, off)
        word = word + piece
        remaining = piece_tab.invert().compose(remaining)
    if evaluate_word(word, n) != target:
        raise AssertionError("synthesis verification failed")
    return word
