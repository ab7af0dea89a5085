"""Trihexagonal (kagome) lattice code over four-level qudits.

One qudit (= two qubits) sits on every vertex of an L-by-L kagome
lattice with periodic boundaries.  Each unit cell ``(column i, row j)``
holds three sublattice sites:

* ``a(i, j)`` at position ``R(i, j) + (1, 0)``,
* ``b(i, j)`` at ``R(i, j) + (1/2, sqrt(3)/2)``,
* ``c(i, j)`` at ``R(i, j) + (3/2, sqrt(3)/2)``,

where ``R(i, j) = i * (2, 0) + j * (1, sqrt(3))`` runs over a
triangular Bravais lattice.

Plaquette conventions:

* Hexagon ``H(i, j)`` is centred on ``R(i, j)``.  Its generator is the
  X-word with exponents alternating ``+1, -1`` around the six corners,
  listed anti-clockwise starting from the top-right corner ``b(i, j)``.
* Triangles come in two orientations.  The three cell sites
  ``{a, b, c}(i, j)`` form the downward-pointing triangle, which
  carries ``Z^-1 Z^-1 Z^-1``; the upward-pointing triangle
  ``{c(i, j), b(i+1, j), a(i, j+1)}`` carries ``Z Z Z``.
* An injective map ``phi`` assigns to each hexagon one adjacent
  triangle (its top-right neighbour, the cell triangle, by default).
  The working generator set keeps every hexagon word as ``S`` and
  replaces the triangle word of ``t = phi(h)`` by the seven-site
  pentagon product ``M_t * E_h^-1``; triangles outside the image keep
  their bare three-site word.

Defect lines are vertical strings of strong single-qudit pinning terms
on alternating ``a``/``c`` sites in the strip between two hexagon
columns.  Pinned qudits leave the code; the hexagons flanking the
strip lose their standalone generator and are absorbed into pentagons
chosen so that every retained generator commutes with every pinning
term.  A pair of such lines stores one extra logical qudit whose
operators are a charge loop around one line and a string threading
both lines.
"""

from __future__ import annotations

from collections import OrderedDict, deque
from dataclasses import dataclass, field

import numpy as np

from .pauli import PhasedPauli

A, B, C = 0, 1, 2
_SUBLATTICE = "abc"


@dataclass(frozen=True)
class DefectLine:
    """A vertical string of pinning terms between two hexagon columns."""

    strip: int  # between hexagon columns `strip` and `strip + 1`
    start_row: int
    sites: tuple  # pinned qudits, bottom to top
    term_types: tuple  # "y" on a-sites / "xz_dagger" on c-sites
    removed_stabilizers: tuple  # names of dropped hexagon generators
    pentagon_stabilizers: tuple  # names of the merged generators
    endpoint_plaquettes: tuple  # the two end pentagons

    @property
    def n_qudits(self) -> int:
        return len(self.sites)


class KagomeCode:
    """The qudit code on an ``L x L`` periodic kagome lattice.

    Instances are immutable in practice: ``add_defect_line`` returns a
    new object.  ``stabilizers`` maps generator names to their words;
    hexagon generators are named ``S[i,j]``, triangle-family generators
    ``R[up,i,j]`` / ``R[down,i,j]`` (pentagons keep their triangle's
    name).
    """

    def __init__(self, L: int, _defect_specs=()):
        if L % 2 != 0 or L < 4:
            raise ValueError("linear size must be even and at least 4")
        self.L = L
        self.n_sites = 3 * L * L
        self.hexagons = {}  # (i, j) -> ((site, x_exp), ...)
        self.triangles = {}  # (kind, i, j) -> ((site, z_exp), ...)
        self._build_plaquettes()
        self.phi = {key: ("down", key[0], key[1]) for key in self.hexagons}
        self.defect_lines = []
        self.inactive_sites = frozenset()
        self._merged_hexagons = set()
        for spec in _defect_specs:
            self._install_defect_line(*spec)
        self._build_stabilizers()
        self._build_logicals()
        self._validate()

    # ------------------------------------------------------------------
    # Geometry
    # ------------------------------------------------------------------

    def site(self, i: int, j: int, sub: int) -> int:
        L = self.L
        return 3 * ((j % L) * L + (i % L)) + sub

    def site_cell(self, site: int):
        cell, sub = divmod(site, 3)
        j, i = divmod(cell, self.L)
        return i, j, sub

    def site_label(self, site: int) -> str:
        i, j, sub = self.site_cell(site)
        return f"{_SUBLATTICE[sub]}({i},{j})"

    def _build_plaquettes(self) -> None:
        L = self.L
        for j in range(L):
            for i in range(L):
                # Hexagon corners anti-clockwise from the top-right.
                self.hexagons[(i, j)] = (
                    (self.site(i, j, B), 1),
                    (self.site(i - 1, j, C), 3),
                    (self.site(i - 1, j, A), 1),
                    (self.site(i, j - 1, B), 3),
                    (self.site(i, j - 1, C), 1),
                    (self.site(i, j, A), 3),
                )
                self.triangles[("down", i, j)] = (
                    (self.site(i, j, A), 3),
                    (self.site(i, j, B), 3),
                    (self.site(i, j, C), 3),
                )
                self.triangles[("up", i, j)] = (
                    (self.site(i, j, C), 1),
                    (self.site(i + 1, j, B), 1),
                    (self.site(i, j + 1, A), 1),
                )

    def hexagon_neighbors(self, key):
        """The six triangles adjacent to hexagon ``key``, by position."""
        i, j = key
        L = self.L
        return OrderedDict(
            (
                ("top_right", ("down", i, j)),
                ("top", ("up", (i - 1) % L, j)),
                ("top_left", ("down", (i - 1) % L, j)),
                ("bottom_left", ("up", (i - 1) % L, (j - 1) % L)),
                ("bottom", ("down", i, (j - 1) % L)),
                ("bottom_right", ("up", i, (j - 1) % L)),
            )
        )

    # ------------------------------------------------------------------
    # Words and generators
    # ------------------------------------------------------------------

    def hexagon_word(self, key) -> PhasedPauli:
        return PhasedPauli.from_exponents(
            self.n_sites, x_sites={s: e for s, e in self.hexagons[key]}
        )

    def triangle_word(self, key) -> PhasedPauli:
        return PhasedPauli.from_exponents(
            self.n_sites, z_sites={s: e for s, e in self.triangles[key]}
        )

    def _build_stabilizers(self) -> None:
        image = {}
        for h, t in self.phi.items():
            if t in image:
                raise ValueError("triangle assignment map is not injective")
            image[t] = h
            if t not in self.hexagon_neighbors(h).values():
                raise ValueError("assigned triangle is not adjacent")
        merged = {f"S[{i},{j}]" for i, j in self._merged_hexagons}
        pinned_kind = {}
        for line in self.defect_lines:
            pinned_kind.update(zip(line.sites, line.term_types))

        def restrict_to_active(word):
            """Drop pinned-site tensor factors from a pentagon word.

            On a pinned qudit the word must act as a power of that
            qudit's pinning term; in the pinned sector that factor is a
            constant, so the effective generator lives on active sites.
            """
            if not set(word.support()) & self.inactive_sites:
                return word
            zs, xs = {}, {}
            for s in word.support():
                ze, xe = word.z_exps[s], word.x_exps[s]
                if s not in pinned_kind:
                    zs[s], xs[s] = ze, xe
                    continue
                ok = (
                    (ze - xe) % 4 == 0
                    if pinned_kind[s] == "y"
                    else (ze + xe) % 4 == 0
                )
                if not ok:
                    raise AssertionError(
                        "generator does not align with the pinning term"
                    )
            return PhasedPauli.from_exponents(
                self.n_sites, z_sites=zs, x_sites=xs
            )

        # Two presentations of the same group.  `stabilizers` applies
        # the hexagon-to-triangle merge to every hexagon (each R in the
        # image of phi is a pentagon word).  `charge_generators` merges
        # only along defect lines, leaving bare triangle words
        # elsewhere; there every single-qudit move excites exactly two
        # generators, which is what syndrome extraction and charge
        # transport rely on.
        defect_merge = {
            self.phi[h]: h for h in self._merged_hexagons
        }
        self.stabilizers = OrderedDict()
        self.stabilizer_sector = {}
        self.charge_generators = OrderedDict()
        for key in self.hexagons:
            name = f"S[{key[0]},{key[1]}]"
            if name in merged:
                continue
            self.stabilizers[name] = self.hexagon_word(key)
            self.stabilizer_sector[name] = "hex"
            self.charge_generators[name] = self.stabilizers[name]
        for key in self.triangles:
            name = f"R[{key[0]},{key[1]},{key[2]}]"
            word = self.triangle_word(key)
            if key in image:
                pentagon = word * self.hexagon_word(image[key]).dagger()
            else:
                pentagon = word
            self.stabilizers[name] = restrict_to_active(pentagon)
            self.stabilizer_sector[name] = "tri"
            if key in defect_merge:
                self.charge_generators[name] = restrict_to_active(
                    word * self.hexagon_word(defect_merge[key]).dagger()
                )
            else:
                self.charge_generators[name] = word

    def transform_stabilizers(self):
        """Split the working generators into hexagon and triangle sets."""
        s_set = OrderedDict(
            (n, w)
            for n, w in self.stabilizers.items()
            if self.stabilizer_sector[n] == "hex"
        )
        r_set = OrderedDict(
            (n, w)
            for n, w in self.stabilizers.items()
            if self.stabilizer_sector[n] == "tri"
        )
        return s_set, r_set

    # ------------------------------------------------------------------
    # Defect lines
    # ------------------------------------------------------------------

    def add_defect_line(self, anchor, length: int | None = None) -> "KagomeCode":
        """A new code with one more pinned vertical string.

        ``anchor = (strip, start_row)`` places the string between
        hexagon columns ``strip`` and ``strip + 1`` starting at row
        ``start_row``; ``length`` is the number of pinned qudits
        (default ``L // 2 + 1``).
        """
        specs = [
            (line.strip, line.start_row, line.n_qudits)
            for line in self.defect_lines
        ]
        strip, start_row = anchor
        specs.append((strip, start_row, length or (self.L // 2 + 1)))
        return KagomeCode(self.L, _defect_specs=specs)

    def _install_defect_line(self, strip: int, start_row: int, count: int) -> None:
        L = self.L
        if count < 3 or count % 2 == 0:
            raise ValueError("a defect line needs an odd count of at least 3")
        k = (count - 1) // 2  # pinned a-sites occupy rows start_row .. start_row+k
        if k + 3 > L:
            raise ValueError("defect line would touch its own periodic wrap")
        i0 = strip % L
        j0 = start_row % L

        sites = []
        types = []
        for t in range(count):
            j = (j0 + t // 2) % L
            if t % 2 == 0:
                sites.append(self.site(i0, j, A))
                types.append("y")
            else:
                sites.append(self.site(i0, j, C))
                types.append("xz_dagger")
        if self.inactive_sites.intersection(sites):
            raise ValueError("defect lines overlap")

        # Hexagons flanking the strip merge with the triangle sharing
        # exactly their pinned sites: left-column hexagons with their
        # bottom-right up-triangle, right-column hexagons with their
        # top-left down-triangle (the left hexagon's freed default).
        site_set = set(sites)
        removed = []
        pentagons = []
        for dj in range(k + 1):
            j = (j0 + dj) % L
            for col, pos in (
                ((i0, j), "bottom_right"),
                (((i0 + 1) % L, j), "top_left"),
            ):
                word_sites = {s for s, _ in self.hexagons[col]}
                if not word_sites & site_set:
                    raise AssertionError("flanking hexagon misses the line")
                if col in self._merged_hexagons:
                    raise ValueError("defect lines overlap")
                tri = self.hexagon_neighbors(col)[pos]
                owners = [h for h, t2 in self.phi.items() if t2 == tri and h != col]
                if owners:
                    raise ValueError("defect lines overlap")
                self.phi.pop(col, None)
                self.phi[col] = tri
                self._merged_hexagons.add(col)
                removed.append(f"S[{col[0]},{col[1]}]")
                pentagons.append(f"R[{tri[0]},{tri[1]},{tri[2]}]")

        line = DefectLine(
            strip=i0,
            start_row=j0,
            sites=tuple(sites),
            term_types=tuple(types),
            removed_stabilizers=tuple(removed),
            pentagon_stabilizers=tuple(pentagons),
            endpoint_plaquettes=(pentagons[0], pentagons[-1]),
        )
        self.defect_lines.append(line)
        self.inactive_sites = self.inactive_sites | site_set

    def defect_terms(self, line: DefectLine):
        """The pinning-term words along ``line`` (phases included)."""
        terms = []
        for s, kind in zip(line.sites, line.term_types):
            if kind == "y":
                # single-qudit Y = zeta^5 X^-1 Z^-1
                op = (
                    PhasedPauli.x(s, self.n_sites, 3)
                    * PhasedPauli.z(s, self.n_sites, 3)
                ).scale(5)
            else:
                # zeta^5 X Z^-1
                op = (
                    PhasedPauli.x(s, self.n_sites, 1)
                    * PhasedPauli.z(s, self.n_sites, 3)
                ).scale(5)
            terms.append(op)
        return terms

    # ------------------------------------------------------------------
    # Logical operators
    # ------------------------------------------------------------------

    def _free_row(self) -> int:
        blocked = {self.site_cell(s)[1] for s in self.inactive_sites}
        for j in range(self.L):
            if j not in blocked:
                return j
        raise ValueError("no defect-free row available")

    def _free_col(self) -> int:
        blocked = {self.site_cell(s)[0] for s in self.inactive_sites}
        for i in range(self.L):
            if i not in blocked:
                return i
        raise ValueError("no defect-free column available")

    def _build_logicals(self) -> None:
        n = self.n_sites
        self.logicals = OrderedDict()
        row = self._free_row()
        col = self._free_col()
        # First pair: horizontal alternating X-loop, vertical Z-loop.
        self.logicals["X1"] = PhasedPauli.from_exponents(
            n,
            x_sites={
                s: e
                for i in range(self.L)
                for s, e in (
                    (self.site(i, row, B), 1),
                    (self.site(i, row, C), 3),
                )
            },
        )
        self.logicals["Z1"] = PhasedPauli.from_exponents(
            n, z_sites={self.site(col, j, B): 1 for j in range(self.L)}
        )
        # Second pair: vertical alternating X-loop, horizontal Z-loop.
        x2 = {}
        for j in range(self.L):
            x2[self.site(col, j, C)] = 3
            x2[self.site(col, j + 1, A)] = 1
        self.logicals["X2"] = PhasedPauli.from_exponents(n, x_sites=x2)
        self.logicals["Z2"] = PhasedPauli.from_exponents(
            n, z_sites={self.site(i, row, A): 1 for i in range(self.L)}
        )
        if len(self.defect_lines) == 2:
            self._build_defect_logicals()
        pair_names = [("Z1", "X1"), ("Z2", "X2")]
        if "ZL" in self.logicals:
            pair_names.append(("ZL", "XL"))
        for zname, xname in pair_names:
            e = self.logicals[zname].commutation_exponent(self.logicals[xname]) % 4
            if e == 3:
                self.logicals[xname] = self.logicals[xname].dagger()
                e = 1
            if e != 1:
                raise AssertionError(f"{zname}/{xname} pair algebra is wrong")

    def _walk_word(self, steps) -> PhasedPauli:
        """Charge-transport word along ``steps = [(site, kind), ...]``.

        ``kind`` is "Z" or "X".  Each step excites exactly two working
        generators; exponents are chosen so the walk carries one unit
        of charge forward, cancelling at every intermediate generator.
        The walk must close (the final charge annihilates the one left
        at the start), which yields a word commuting with every
        generator.
        """
        gens = list(self.charge_generators.values())

        def effects(site, kind):
            eff = []
            for gi, g in enumerate(gens):
                coef = (
                    g.x_exps[site] % 4
                    if kind == "Z"
                    else (-g.z_exps[site]) % 4
                )
                if coef:
                    eff.append((gi, coef))
            if len(eff) != 2:
                raise ValueError("a unit move must touch exactly two generators")
            return eff

        eff_list = [effects(s, k) for s, k in steps]
        zs, xs = {}, {}

        def record(step, s):
            site, kind = step
            d = zs if kind == "Z" else xs
            d[site] = (d.get(site, 0) + s) % 4

        # Orient the first move toward the generator shared with step 2.
        second = {gi for gi, _ in eff_list[1]}
        first = eff_list[0]
        if first[1][0] in second and first[0][0] not in second:
            fwd, back = first[1], first[0]
        else:
            fwd, back = first[0], first[1]
        if fwd[0] not in second:
            raise ValueError("walk is not connected")
        record(steps[0], 1)
        carried = (fwd[0], fwd[1] % 4)
        debt = (back[0], back[1] % 4)
        for t in range(1, len(steps)):
            eff = eff_list[t]
            here = [e for e in eff if e[0] == carried[0]]
            if not here:
                raise ValueError("walk is not connected")
            coef = here[0][1]
            s = next(v for v in (1, 3) if (v * coef + carried[1]) % 4 == 0)
            other = [e for e in eff if e[0] != carried[0]][0]
            record(steps[t], s)
            carried = (other[0], (s * other[1]) % 4)
        if carried[0] != debt[0] or (carried[1] + debt[1]) % 4:
            raise ValueError("walk does not close")
        return PhasedPauli.from_exponents(self.n_sites, z_sites=zs, x_sites=xs)

    def _build_defect_logicals(self) -> None:
        la, lb = sorted(self.defect_lines, key=lambda l: l.strip)
        L = self.L
        ia, ib = la.strip, lb.strip
        j0 = la.start_row
        sep = (ib - ia) % L
        k = (la.n_qudits - 1) // 2
        stagger = (lb.start_row - la.start_row) % L
        if sep < 2 or la.n_qudits != lb.n_qudits or stagger > k:
            raise ValueError("unsupported defect pair layout")

        # Hexagon-sector charge loop around the left line.
        steps = [(self.site(ia, (j0 + t) % L, B), "Z") for t in range(k + 1)]
        steps.append((self.site(ia, (j0 + k) % L, C), "Z"))
        steps += [
            (self.site(ia + 1, (j0 + t) % L, B), "Z")
            for t in range(k - 1, -2, -1)
        ]
        steps.append((self.site(ia, (j0 - 1) % L, C), "Z"))
        self.logicals["ZL"] = self._walk_word(steps)

        # String threading both lines: a triangle-sector segment from a
        # pentagon of the left line to a pentagon of the right line,
        # closed by a hexagon-sector path around the torus.  The left
        # line converts at rows up to ``j0 + k - 1`` and the right one
        # from ``lb.start_row`` on; when the shift equals ``k`` those
        # windows are disjoint and the segment jogs up one row between
        # the lines.
        r = lb.start_row
        steps = []
        if stagger == k:
            steps.append((self.site(ia + 1, (r - 1) % L, B), "X"))
            steps.append((self.site(ia + 1, (r - 1) % L, C), "X"))
            steps.append((self.site(ia + 1, r, A), "X"))
            for d in range(1, sep):
                steps.append((self.site(ia + d, r, C), "X"))
                steps.append((self.site(ia + 1 + d, r, B), "X"))
            for d in range(L - sep - 2):
                steps.append((self.site(ib + 1 + d, r, A), "Z"))
            steps.append((self.site(ia - 1, r, A), "Z"))
        else:
            for d in range(sep):
                steps.append((self.site(ia + 1 + d, r, B), "X"))
                if d < sep - 1:
                    steps.append((self.site(ia + 1 + d, r, C), "X"))
            for d in range(L - sep - 2):
                steps.append((self.site(ib + 1 + d, r, A), "Z"))
            steps.append((self.site(ia - 1, r, B), "Z"))
            steps.append((self.site(ia - 1, (r + 1) % L, A), "Z"))
        self.logicals["XL"] = self._walk_word(steps)

    # ------------------------------------------------------------------
    # Validation
    # ------------------------------------------------------------------

    def _validate(self) -> None:
        acc_x = np.zeros(self.n_sites, dtype=np.int64)
        for word in self.hexagons.values():
            for s, e in word:
                acc_x[s] += e
        acc_z = np.zeros(self.n_sites, dtype=np.int64)
        for word in self.triangles.values():
            for s, e in word:
                acc_z[s] += e
        if np.any(acc_x % 4) or np.any(acc_z % 4):
            raise AssertionError("plaquette products are not trivial")
        for line in self.defect_lines:
            for term in self.defect_terms(line):
                for name, g in self.stabilizers.items():
                    if not g.commutes_with(term):
                        raise AssertionError(
                            f"{name} fails to commute with a pinning term"
                        )
        for name, g in self.stabilizers.items():
            if set(g.support()) & self.inactive_sites:
                raise AssertionError(f"{name} acts on pinned qudits")
        for name, logical in self.logicals.items():
            if set(logical.support()) & self.inactive_sites:
                raise AssertionError(f"logical {name} acts on pinned qudits")
            for gname, g in self.stabilizers.items():
                if not logical.commutes_with(g):
                    raise AssertionError(f"logical {name} fails against {gname}")

    # ------------------------------------------------------------------
    # Array views and serialization
    # ------------------------------------------------------------------

    @property
    def active_sites(self):
        return [s for s in range(self.n_sites) if s not in self.inactive_sites]

    def generator_arrays(self, charge_basis: bool = False):
        """``(names, z_mat, x_mat)`` with one int8 row per generator.

        With ``charge_basis=True`` the rows come from the
        ``charge_generators`` presentation used for syndrome
        extraction; otherwise from the merged ``stabilizers`` set.
        """
        source = self.charge_generators if charge_basis else self.stabilizers
        names = list(source)
        z_mat = np.zeros((len(names), self.n_sites), dtype=np.int8)
        x_mat = np.zeros((len(names), self.n_sites), dtype=np.int8)
        for r, name in enumerate(names):
            g = source[name]
            z_mat[r] = g.z_exps
            x_mat[r] = g.x_exps
        return names, z_mat, x_mat

    def describe(self) -> str:
        """Deterministic text dump of the code for diffing/debugging."""
        out = [f"kagome-code L={self.L} sites={self.n_sites}"]
        for line in self.defect_lines:
            labels = ",".join(self.site_label(s) for s in line.sites)
            out.append(f"defect strip={line.strip} row={line.start_row}: {labels}")

        def render(g):
            return " ".join(
                f"{self.site_label(s)}:Z{g.z_exps[s]}X{g.x_exps[s]}"
                for s in g.support()
            )

        for name, g in self.stabilizers.items():
            out.append(f"{name} = {render(g)}")
        for name, g in self.logicals.items():
            out.append(f"logical {name} = {render(g)}")
        return "\n".join(out)


def build(L: int) -> KagomeCode:
    """Defect-free code of linear size ``L`` (even, at least 4)."""
    return KagomeCode(L)


def build_with_defect_pair(
    L: int, separation: int = 3, stagger: int | None = None
) -> KagomeCode:
    """Code with the standard pair of vertical defect lines.

    The lines sit in the strips ``separation`` hexagon columns apart,
    each ``L // 2 + 1`` qudits long, with the right line shifted up by
    ``stagger`` rows (default ``(L - 8) / 2``, clamped to the span).
    The loop through both lines costs ``L + separation - 1`` moves and
    the detour around the line endpoints about ``10 + 2 * stagger``
    moves; the default shift balances the two so that at desk scales
    (``L`` up to 16) the pair's distances are ``L + 2`` and
    ``L/2 + 4``.
    """
    if stagger is None:
        stagger = min(L // 4, max(0, (L - 8) // 2))
    code = build(L)
    code = code.add_defect_line((2, 2))
    return code.add_defect_line((2 + separation, 2 + stagger))


# ----------------------------------------------------------------------
# Move graph and distances
# ----------------------------------------------------------------------


@dataclass
class MoveGraph:
    """Unit-charge transport graph over the working generators.

    Each edge is one single-qudit ``Z`` or ``X`` application; per unit
    exponent it adds ``cu`` / ``cv`` to the charges of exactly two
    generators ``u`` / ``v``.
    """

    node_names: list
    node_index: dict
    edges: list  # (site, kind, u, v, cu, cv)
    site_edges: dict = field(default_factory=dict)  # (site, kind) -> edge id


def build_move_graph(code: KagomeCode) -> MoveGraph:
    names, z_mat, x_mat = code.generator_arrays(charge_basis=True)
    index = {n: i for i, n in enumerate(names)}
    edges = []
    site_edges = {}
    inactive = code.inactive_sites
    for site in range(code.n_sites):
        if site in inactive:
            continue
        for kind, coefs in (
            ("Z", x_mat[:, site].astype(np.int64) % 4),
            ("X", (-z_mat[:, site].astype(np.int64)) % 4),
        ):
            touched = np.nonzero(coefs)[0]
            if len(touched) == 0:
                continue
            if len(touched) != 2:
                raise AssertionError("a unit move must touch two generators")
            u, v = int(touched[0]), int(touched[1])
            site_edges[(site, kind)] = len(edges)
            edges.append((site, kind, u, v, int(coefs[u]), int(coefs[v])))
    return MoveGraph(names, index, edges, site_edges)


def all_pairs_distances(graph: MoveGraph) -> np.ndarray:
    """Hop counts between generators (unreachable pairs get -1)."""
    n = len(graph.node_names)
    adj = [[] for _ in range(n)]
    for site, kind, u, v, cu, cv in graph.edges:
        adj[u].append(v)
        adj[v].append(u)
    dist = np.full((n, n), -1, dtype=np.int32)
    for src in range(n):
        d = dist[src]
        d[src] = 0
        dq = deque([src])
        while dq:
            x = dq.popleft()
            for y in adj[x]:
                if d[y] < 0:
                    d[y] = d[x] + 1
                    dq.append(y)
    return dist


def _edge_labels(graph: MoveGraph, reference: PhasedPauli):
    """Commutation contribution per unit exponent against ``reference``."""
    out = []
    for site, kind, u, v, cu, cv in graph.edges:
        if kind == "Z":
            out.append(reference.x_exps[site] % 4)
        else:
            out.append((-reference.z_exps[site]) % 4)
    return out


def _conjugate_partner(code: KagomeCode, logical_name: str):
    """The named logical together with the other half of its pair."""
    target = code.logicals[logical_name]
    mate = ("Z" if logical_name.startswith("X") else "X") + logical_name[1:]
    partner = code.logicals[mate]
    if target.commutation_exponent(partner) % 4 == 0:
        raise ValueError("logical has no conjugate partner")
    return target, partner


def code_distance(code: KagomeCode, logical_name: str) -> int:
    """Minimum weight over the logical's class, by labelled cycle search.

    Explores closed unit-charge walks in the move graph while tracking
    commutation exponents against the named logical and its conjugate
    partner; the lightest closed walk that reproduces the logical's
    commutation pattern (and commutes with the logical itself) gives
    the distance.
    """
    if logical_name not in code.logicals:
        raise ValueError(f"unknown logical {logical_name!r}")
    target, partner = _conjugate_partner(code, logical_name)
    graph = build_move_graph(code)
    lab_p = _edge_labels(graph, partner)
    lab_t = _edge_labels(graph, target)
    goal_p = target.commutation_exponent(partner) % 4

    n = len(graph.node_names)
    adj = [[] for _ in range(n)]
    for eid, (site, kind, u, v, cu, cv) in enumerate(graph.edges):
        adj[u].append((v, cu, cv, eid))
        adj[v].append((u, cv, cu, eid))

    best = None
    start_edges = [eid for eid, lab in enumerate(lab_p) if lab in (1, 3)]
    for eid0 in start_edges:
        site, kind, u0, v0, cu0, cv0 = graph.edges[eid0]
        for s in (1, 3):
            # One application leaves charge s*cu0 at u0 (the debt to
            # repay) and s*cv0 at v0 (the walking excitation).
            goal = (u0, (-s * cu0) % 4, goal_p, 0)
            state0 = (
                v0,
                (s * cv0) % 4,
                (s * lab_p[eid0]) % 4,
                (s * lab_t[eid0]) % 4,
            )
            dist = {state0: 1}
            dq = deque([state0])
            found = None
            while dq:
                st = dq.popleft()
                w = dist[st]
                if best is not None and w >= best:
                    break
                if st == goal:
                    found = w
                    break
                node, charge, lp, lt = st
                for nxt, cnear, cfar, eid in adj[node]:
                    if cnear % 2 == 0:
                        continue
                    # odd coefficients are self-inverse mod 4
                    sgn = (-charge * cnear) % 4
                    if sgn not in (1, 3):
                        continue
                    ns = (
                        nxt,
                        (sgn * cfar) % 4,
                        (lp + sgn * lab_p[eid]) % 4,
                        (lt + sgn * lab_t[eid]) % 4,
                    )
                    if ns not in dist:
                        dist[ns] = w + 1
                        dq.append(ns)
            if found is None and goal in dist:
                found = dist[goal]
            if found is not None and (best is None or found < best):
                best = found
    if best is None:
        raise ValueError("no nontrivial cycle found for the logical class")
    return best


# ----------------------------------------------------------------------
# Exhaustive small-size oracles
# ----------------------------------------------------------------------


def z4_generator_log_order(code: KagomeCode) -> int:
    """``log_2`` of the order of the group the generator words span.

    Computed by two-phase elimination mod 4 on the symplectic rows:
    unit pivots contribute an order-4 factor (2 bits), leftover even
    rows contribute order-2 factors (1 bit).  A set of ``r``
    independent order-4 generators therefore scores ``2 r``.
    """
    names, z_mat, x_mat = code.generator_arrays()
    rows = np.concatenate([z_mat, x_mat], axis=1).astype(np.int64) % 4
    m, ncols = rows.shape
    used = np.zeros(m, dtype=bool)
    log = 0
    for c in range(ncols):
        sel = None
        for r in range(m):
            if not used[r] and rows[r, c] % 2 == 1:
                sel = r
                break
        if sel is None:
            continue
        used[sel] = True
        rows[sel] = (rows[sel] * pow(int(rows[sel, c]), -1, 4)) % 4
        coef = rows[:, c].copy()
        coef[sel] = 0
        rows = (rows - np.outer(coef, rows[sel])) % 4
        log += 2
    for c in range(ncols):
        sel = None
        for r in range(m):
            if not used[r] and rows[r, c] % 4 == 2:
                sel = r
                break
        if sel is None:
            continue
        used[sel] = True
        hits = (~used) & (rows[:, c] % 4 == 2)
        rows[hits] = (rows[hits] - rows[sel]) % 4
        log += 1
    return log


def brute_force_distance(
    code: KagomeCode, logical_name: str, max_weight: int
) -> int | None:
    """Exhaustive class-minimum over connected supports.

    Enumerates plaquette-connected site sets by size; on each support
    it enumerates all nonzero single-qudit exponent assignments and
    keeps those commuting with every overlapping generator, checking
    the commutation pattern against the logical pair.  Defect-free
    codes are translation invariant, so only supports containing a
    site of cell (0, 0) need be tried.  Returns the first (minimal)
    hit, or None if nothing exists within ``max_weight``.  Intended
    for small lattices only.
    """
    target, partner = _conjugate_partner(code, logical_name)
    goal = target.commutation_exponent(partner) % 4
    names, z_mat, x_mat = code.generator_arrays(charge_basis=True)
    active = code.active_sites
    neighbors = {s: set() for s in active}
    site_gens = {s: [] for s in active}
    for r in range(len(names)):
        supp = [int(s) for s in np.nonzero((z_mat[r] % 4) | (x_mat[r] % 4))[0]]
        for s in supp:
            neighbors[s].update(supp)
            site_gens[s].append(r)
    for s in active:
        neighbors[s].discard(s)

    if code.defect_lines:
        anchors = active
    else:
        anchors = [code.site(0, 0, sub) for sub in range(3)]

    pairs = np.array(
        [(z, x) for z in range(4) for x in range(4) if z or x], dtype=np.int64
    )
    assign_cache = {}

    def assignments(w):
        if w not in assign_cache:
            grids = np.meshgrid(*([np.arange(15)] * w), indexing="ij")
            idx = np.stack([g.ravel() for g in grids], axis=1)
            assign_cache[w] = pairs[idx].reshape(len(idx), 2 * w)
        return assign_cache[w]

    def plausible(sites):
        # A generator meeting the support at a single site pins that
        # site's exponents; if both components get pinned to zero the
        # support cannot carry an all-nonzero word.
        sset = set(sites)
        for s in sites:
            z_dead = x_dead = False
            for r in site_gens[s]:
                inter = [
                    q for q in sset if z_mat[r, q] % 4 or x_mat[r, q] % 4
                ]
                if inter != [s]:
                    continue
                if x_mat[r, s] % 2 and not z_mat[r, s] % 4:
                    z_dead = True
                if z_mat[r, s] % 2 and not x_mat[r, s] % 4:
                    x_dead = True
            if z_dead and x_dead:
                return False
        return True

    def has_hit(sites):
        w = len(sites)
        rows = sorted({r for s in sites for r in site_gens[s]})
        mat = np.zeros((len(rows) + 2, 2 * w), dtype=np.int64)
        for ci, s in enumerate(sites):
            for ri, r in enumerate(rows):
                mat[ri, 2 * ci] = x_mat[r, s] % 4
                mat[ri, 2 * ci + 1] = (-z_mat[r, s]) % 4
            mat[-2, 2 * ci] = partner.x_exps[s] % 4
            mat[-2, 2 * ci + 1] = (-partner.z_exps[s]) % 4
            mat[-1, 2 * ci] = target.x_exps[s] % 4
            mat[-1, 2 * ci + 1] = (-target.z_exps[s]) % 4
        vals = (assignments(w) @ mat.T) % 4
        ok = (
            np.all(vals[:, : len(rows)] == 0, axis=1)
            & (vals[:, -2] == goal)
            & (vals[:, -1] == 0)
        )
        return bool(ok.any())

    frontier = {frozenset([anc]) for anc in anchors}
    for w in range(1, max_weight + 1):
        for supp in sorted(frontier, key=sorted):
            sites = sorted(supp)
            if plausible(sites) and has_hit(sites):
                return w
        grown = set()
        for supp in frontier:
            reach = set().union(*(neighbors[s] for s in supp)) - supp
            for s in reach:
                grown.add(supp | {s})
        frontier = grown
    return None
