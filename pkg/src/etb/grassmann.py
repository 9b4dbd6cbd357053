"""The general-position complex K(V) and the coinvariant double complex.

``C_r(V)`` are the oriented chains of K(V): ordered (r+1)-tuples of distinct
lines every <= n of which are in general position, modulo ``[s t] = sgn(s) [t]``.
``Cbar_r(n)`` is H_0(PGL_n, C_r(A^n)) for r >= n and zero below.  Since PGL
acts sharply transitively on frames (n+1 lines in general position), an
orbit of a long tuple is named by moving its first n+1 lines to
``e_1, ..., e_n, e_1 + ... + e_n``; shorter tuples form a single orbit each.

Only fields are supported here.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

from .budget import get_budget
from .complexes import SimplicialComplex
from .homology import AbelianGroup, HomologyBasis, homology, simplicial_chain_complex
from .modlin import (
    Line,
    _perm_sign,
    canonical_line,
    enumerate_lines,
    identity,
    line_submodule,
    mat_inv,
    mat_vec,
    quotient_pushforward,
    try_span,
)
from .ring import FiniteRing
from .snf import SparseIntMatrix, smith_normal_form


def _require_field(ring: FiniteRing):
    if not ring.is_field:
        raise ValueError("the coinvariant double complex is implemented over fields only")


def _independent(ring: FiniteRing, lines: Sequence[Line], n: int) -> bool:
    W = try_span(ring, [L.gen for L in lines], n)
    return W is not None and W.rank == len(lines)


def extends_simplex(ring: FiniteRing, chosen: Sequence[Line], new: Line, n: int) -> bool:
    """Whether chosen + [new] is still a simplex of K(A^n), given that chosen is one."""
    if new in chosen:
        return False
    for k in range(0, min(len(chosen), n - 1) + 1):
        for T in combinations(chosen, k):
            if not _independent(ring, list(T) + [new], n):
                return False
    return True


def is_k_simplex(ring: FiniteRing, lines: Sequence[Line], n: int) -> bool:
    """Brute-force definition: every subset of size <= n is in general position."""
    if len(set(lines)) != len(lines):
        return False
    for k in range(1, min(len(lines), n) + 1):
        for T in combinations(lines, k):
            if not _independent(ring, T, n):
                return False
    return True


@dataclass
class GPComplex:
    ring: FiniteRing
    n: int
    max_dim: int
    complex: SimplicialComplex

    def reduced_homology(self, coeff=0):
        hs = homology(simplicial_chain_complex(self.complex), coeff)
        if hs:
            h0 = hs[0]
            hs[0] = type(h0)(0, h0.betti - 1, h0.torsion)
        return hs


def build_k_complex(ring: FiniteRing, n: int, max_dim: int) -> GPComplex:
    """K(A^n) through dimension max_dim."""
    lines = enumerate_lines(ring, n)
    simplices = []
    budget = get_budget()

    def extend(chosen: list[int], start: int):
        simplices.append(tuple(chosen))
        budget.check("simplices", len(simplices))
        if len(chosen) > max_dim:
            return
        cl = [lines[i] for i in chosen]
        for j in range(start, len(lines)):
            if extends_simplex(ring, cl, lines[j], n):
                extend(chosen + [j], j + 1)

    for i in range(len(lines)):
        extend([i], i + 1)
    return GPComplex(ring, n, max_dim, SimplicialComplex(lines, simplices, close=False))


@dataclass
class DModule:
    ring: str
    n: int
    rank: int
    basis: list[dict[int, int]]
    z_equals_b: bool

    def to_dict(self) -> dict:
        return {"ring": self.ring, "n": self.n, "rank": self.rank, "z_equals_b": self.z_equals_b}


def compute_d(ring: FiniteRing, n: int) -> DModule:
    """D(V) = Z_{n-1} C(V); for n = 1 the reduced 0-cycles."""
    K = build_k_complex(ring, n, n)
    c = simplicial_chain_complex(K.complex)
    d = n - 1
    if d == 0:
        m = c.rank(0)
        basis = [{0: 1, i: -1} for i in range(1, m)]
        h0 = K.reduced_homology()[0]
        return DModule(ring.descriptor, n, m - 1, basis, h0.betti == 0 and not h0.torsion)
    res = c.snf(d, transforms=True)
    basis = res.kernel_basis()
    hb = homology(c, 0, degrees=[d])[0]
    return DModule(ring.descriptor, n, len(basis), basis, hb.betti == 0 and not hb.torsion)


# ------------------------------------------------------------------------------------
# orbit representatives


def standard_frame(ring: FiniteRing, n: int) -> tuple[Line, ...]:
    es = identity(n)
    return tuple(canonical_line(ring, e) for e in es) + (canonical_line(ring, (1,) * n),)


def frame_matrix(ring: FiniteRing, lines: Sequence[Line]):
    """g in GL_n with g L_i = e_i (i < n) and g L_n = e_1 + ... + e_n."""
    n = len(lines[0].gen)
    M = tuple(tuple(lines[j].gen[i] for j in range(n)) for i in range(n))
    Minv = mat_inv(ring, M)
    c = mat_vec(ring, Minv, lines[n].gen)
    if not all(c):
        raise ValueError("first n+1 lines are not a frame")
    h = tuple(tuple(ring.mul(M[i][j], c[j]) for j in range(n)) for i in range(n))
    return mat_inv(ring, h)


def normalize_tuple(ring: FiniteRing, t: Sequence[Line], n: int) -> tuple[Line, ...]:
    """Canonical representative of the PGL-orbit of an ordered K-simplex."""
    if len(t) <= n:
        return tuple(canonical_line(ring, e) for e in identity(n)[: len(t)])
    g = frame_matrix(ring, t[: n + 1])
    return standard_frame(ring, n) + tuple(canonical_line(ring, mat_vec(ring, g, L.gen)) for L in t[n + 1 :])


@dataclass
class CbarPresentation:
    """Cbar_r(n) presented by orbit generators and alternating relations."""

    ring: FiniteRing
    n: int
    r: int
    gens: list[tuple[Line, ...]]
    index: dict[tuple[Line, ...], int]
    group: AbelianGroup
    truncated: bool = True

    @property
    def ngens(self) -> int:
        return len(self.gens)

    @property
    def nrels(self) -> int:
        return self.group.relations.ncols

    def locate(self, t: Sequence[Line]) -> int:
        return self.index[normalize_tuple(self.ring, t, self.n)]


def _orbit_generators(ring: FiniteRing, n: int, r: int) -> list[tuple[Line, ...]]:
    size = r + 1
    if size <= n:
        return [normalize_tuple(ring, [None] * size, n)]  # type: ignore[list-item]
    frame = list(standard_frame(ring, n))
    if not is_k_simplex(ring, frame, n):
        return []
    lines = enumerate_lines(ring, n)
    out = []
    budget = get_budget()

    def extend(chosen):
        if len(chosen) == size:
            out.append(tuple(chosen))
            budget.check("simplices", len(out))
            return
        for L in lines:
            if extends_simplex(ring, chosen, L, n):
                extend(chosen + [L])

    extend(frame)
    return sorted(out)


def build_cbar(ring: FiniteRing, n: int, r: int, truncate: bool = True) -> CbarPresentation:
    """Cbar_r(n); with ``truncate=False`` the coinvariants H_0(PGL, C_r) for every r >= 0."""
    _require_field(ring)
    if r < 0 or (truncate and r < n):
        return CbarPresentation(ring, n, r, [], {}, AbelianGroup(0), truncate)
    gens = _orbit_generators(ring, n, r)
    index = {g: i for i, g in enumerate(gens)}
    rels = []
    for i, t in enumerate(gens):
        for a in range(r):
            s = list(t)
            s[a], s[a + 1] = s[a + 1], s[a]
            j = index[normalize_tuple(ring, s, n)]
            rel = {i: 1}
            rel[j] = rel.get(j, 0) + 1
            rels.append(rel)
    return CbarPresentation(ring, n, r, gens, index, AbelianGroup.from_relation_list(len(gens), rels, gens), truncate)


def _face(t, i):
    return t[:i] + t[i + 1 :]


def del_prime(src: CbarPresentation, tgt: CbarPresentation) -> SparseIntMatrix:
    """Alternating face map on generators: Cbar_r(n) -> Cbar_{r-1}(n)."""
    if tgt.n != src.n or tgt.r != src.r - 1:
        raise ValueError("incompatible presentations")
    ent = []
    if tgt.ngens:
        for j, t in enumerate(src.gens):
            for i in range(len(t)):
                ent.append((tgt.locate(_face(t, i)), j, -1 if i % 2 else 1))
    return SparseIntMatrix(tgt.ngens, src.ngens, ent)


def project_from(ring: FiniteRing, t: Sequence[Line], i: int) -> tuple[Line, ...] | None:
    """The tuple (L_j + L_i / L_i)_{j != i} in V/L_i, or None if two images coincide."""
    W = line_submodule(ring, t[i])
    img = tuple(quotient_pushforward(ring, L, W) for j, L in enumerate(t) if j != i)
    if len(set(img)) != len(img):
        return None
    return img


def del_doubleprime(src: CbarPresentation, tgt: CbarPresentation) -> SparseIntMatrix:
    """Induced by sum_i (-1)^i (projection from L_i): Cbar_r(n) -> Cbar_{r-1}(n-1)."""
    if tgt.n != src.n - 1 or tgt.r != src.r - 1:
        raise ValueError("incompatible presentations")
    ring = src.ring
    ent = []
    if tgt.ngens:
        for j, t in enumerate(src.gens):
            for i in range(len(t)):
                img = project_from(ring, t, i)
                if img is None:
                    continue
                if not is_k_simplex(ring, img, tgt.n):
                    raise ValueError("projected tuple is not in general position")
                ent.append((tgt.locate(img), j, -1 if i % 2 else 1))
    return SparseIntMatrix(tgt.ngens, src.ngens, ent)


def maps_relations(m: SparseIntMatrix, src: CbarPresentation, tgt: CbarPresentation) -> bool:
    """Whether m sends every source relation into the target relation lattice."""
    cols: dict[int, dict[int, int]] = {}
    for i, j, v in src.group.relations.entries():
        cols.setdefault(j, {})[i] = v
    for rel in cols.values():
        img: dict[int, int] = {}
        for g, a in rel.items():
            for k, v in _column(m, g).items():
                img[k] = img.get(k, 0) + a * v
        if not tgt.group.is_zero({k: v for k, v in img.items() if v}):
            return False
    return True


def _column(m: SparseIntMatrix, j: int) -> dict[int, int]:
    return {i: r[j] for i, r in m.rows.items() if j in r}


def well_defined_on_orbits(ring: FiniteRing, src: CbarPresentation, tgt: CbarPresentation, which: str,
                           trials: int = 5, seed: int = 0) -> bool:
    """Recompute a differential from moved and permuted representatives and compare classes."""
    import random

    from .equivariant import generators
    from .modlin import mat_mul

    rng = random.Random(seed)
    gens = generators(ring, src.n, "gl").elements
    mat = del_prime(src, tgt) if which == "prime" else del_doubleprime(src, tgt)
    for j, t in enumerate(src.gens):
        base = _column(mat, j)
        for _ in range(trials):
            g = identity(src.n)
            for _ in range(8):
                g = mat_mul(ring, rng.choice(gens), g)
            perm = list(range(len(t)))
            rng.shuffle(perm)
            moved = [canonical_line(ring, mat_vec(ring, g, t[k].gen)) for k in perm]
            sign = _perm_sign(perm)
            img: dict[int, int] = {}
            for i in range(len(moved)):
                if which == "prime":
                    face = _face(moved, i)
                else:
                    face = project_from(ring, moved, i)
                    if face is None:
                        continue
                if not tgt.ngens:
                    continue
                k = tgt.locate(face)
                img[k] = img.get(k, 0) + (-1 if i % 2 else 1)
            diff = {k: sign * img.get(k, 0) - base.get(k, 0) for k in set(img) | set(base)}
            if not tgt.group.is_zero({k: v for k, v in diff.items() if v}):
                return False
    return True


# ------------------------------------------------------------------------------------
# total complex F(A)


@dataclass
class TotalComplex:
    ring: FiniteRing
    max_r: int
    max_n: int
    pieces: dict[tuple[int, int], CbarPresentation]  # (r, n) -> Cbar_r(n)

    def offsets(self, r: int) -> dict[int, int]:
        off, acc = {}, 0
        for n in range(1, self.max_n + 1):
            off[n] = acc
            acc += self.pieces[(r, n)].ngens
        off[None] = acc
        return off

    def rank(self, r: int) -> int:
        return self.offsets(r)[None] if 0 <= r <= self.max_r else 0

    def differential(self, r: int) -> SparseIntMatrix:
        """d = d' + d'' : F_r -> F_{r-1} on generators."""
        so, to = self.offsets(r), self.offsets(r - 1)
        ent = []
        for n in range(1, self.max_n + 1):
            src = self.pieces[(r, n)]
            m1 = del_prime(src, self.pieces[(r - 1, n)])
            ent += [(to[n] + i, so[n] + j, v) for i, j, v in m1.entries()]
            if n >= 2:
                m2 = del_doubleprime(src, self.pieces[(r - 1, n - 1)])
                ent += [(to[n - 1] + i, so[n] + j, v) for i, j, v in m2.entries()]
        return SparseIntMatrix(to[None], so[None], ent)

    def relation_group(self, r: int) -> AbelianGroup:
        off = self.offsets(r)
        rels = []
        for n in range(1, self.max_n + 1):
            g = self.pieces[(r, n)].group
            cols: dict[int, dict[int, int]] = {}
            for i, j, v in g.relations.entries():
                cols.setdefault(j, {})[off[n] + i] = v
            rels += list(cols.values())
        return AbelianGroup.from_relation_list(off[None], rels)

    def square_is_zero(self, r: int) -> bool:
        """(d' + d'')^2 vanishes on F_r modulo the relations of F_{r-2}."""
        if r - 2 < 0:
            return True
        d1 = self.differential(r)
        d2 = self.differential(r - 1)
        sq = d2.matmul(d1)
        rel = self.relation_group(r - 2)
        for j in range(sq.ncols):
            col = _column(sq, j)
            if col and not rel.is_zero(col):
                return False
        return True

    def respects_relations(self, r: int) -> bool:
        d = self.differential(r)
        src = self.relation_group(r)
        tgt = self.relation_group(r - 1)
        cols: dict[int, dict[int, int]] = {}
        for i, j, v in src.relations.entries():
            cols.setdefault(j, {})[i] = v
        for rel in cols.values():
            img: dict[int, int] = {}
            for g, a in rel.items():
                for k, v in _column(d, g).items():
                    img[k] = img.get(k, 0) + a * v
            img = {k: v for k, v in img.items() if v}
            if img and not tgt.is_zero(img):
                return False
        return True


def build_total_complex(ring: FiniteRing, max_r: int, max_n: int) -> TotalComplex:
    _require_field(ring)
    pieces = {}
    for r in range(-1, max_r + 1):
        for n in range(0, max_n + 1):
            pieces[(r, n)] = build_cbar(ring, n, r) if n >= 1 else CbarPresentation(ring, n, r, [], {}, AbelianGroup(0))
    return TotalComplex(ring, max_r, max_n, pieces)


# ------------------------------------------------------------------------------------
# the claim and the Bloch cokernel


def _lattice_kernel_first(m: SparseIntMatrix, rels: SparseIntMatrix, k: int) -> list[dict[int, int]]:
    """Generators of {x in Z^k : m x in column span of rels}."""
    ent = list(m.entries()) + [(i, k + j, v) for i, j, v in rels.entries()]
    block = SparseIntMatrix(m.nrows, k + rels.ncols, ent)
    res = smith_normal_form(block, transforms=True)
    out = []
    for v in res.kernel_basis():
        x = {j: a for j, a in v.items() if j < k}
        if x:
            out.append(x)
    return out


def _block(*mats: SparseIntMatrix) -> SparseIntMatrix:
    nrows = mats[0].nrows
    ent, off = [], 0
    for m in mats:
        ent += [(i, off + j, v) for i, j, v in m.entries()]
        off += m.ncols
    return SparseIntMatrix(nrows, off, ent)


@dataclass
class ClaimReport:
    ring: str
    status: str  # "pass", "fail" or "vacuous"
    cycle_generators: int
    h4: str
    failures: int
    rational_failures: int
    sizes: dict[str, int]

    @property
    def passed(self) -> bool:
        return self.status in ("pass", "vacuous")

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        d["check"] = "claim"
        return d


def claim_check(ring: FiniteRing) -> ClaimReport:
    """H_4(Cbar(3)) -> H_3(Cbar(2)) induced by d'' vanishes.

    Integral test: for generators x of the d'-cycle lattice in Z^{gens of Cbar_4(3)},
    d''x must lie in d'(Z^{gens of Cbar_4(2)}) + relations of Cbar_3(2).
    """
    _require_field(ring)
    c43, c33, c53 = build_cbar(ring, 3, 4), build_cbar(ring, 3, 3), build_cbar(ring, 3, 5)
    c42, c32 = build_cbar(ring, 2, 4), build_cbar(ring, 2, 3)
    sizes = {"Cbar4(3)": c43.ngens, "Cbar3(3)": c33.ngens, "Cbar5(3)": c53.ngens,
             "Cbar4(2)": c42.ngens, "Cbar3(2)": c32.ngens}
    if c43.ngens == 0:
        return ClaimReport(ring.descriptor, "vacuous", 0, "0", 0, 0, sizes)
    dp = del_prime(c43, c33)
    cycles = _lattice_kernel_first(dp, c33.group.relations, c43.ngens)
    # H_4 = cycles / (relations + d' Cbar_5)
    d5 = del_prime(c53, c43)
    h4 = _subquotient(cycles, _block(c43.group.relations, d5), c43.ngens)
    ddp = del_doubleprime(c43, c32)
    target = _block(del_prime(c42, c32), c32.group.relations)
    snf = smith_normal_form(target, transforms=True)
    failures = 0
    rational_failures = 0
    from .fieldlin import QQ, Subspace

    tq = Subspace.image(QQ, target, target.nrows)
    for x in cycles:
        y = ddp.apply(x)
        if y and not snf.in_image(y):
            failures += 1
            if not tq.contains(y):
                rational_failures += 1
    return ClaimReport(ring.descriptor, "pass" if failures == 0 else "fail", len(cycles), str(h4), failures,
                       rational_failures, sizes)


def _subquotient(gens: list[dict[int, int]], rels: SparseIntMatrix, n: int):
    """Structure of L/B where L is spanned by gens and B (columns of rels) lies in L."""
    from .homology import HomologyGroup

    if not gens:
        return HomologyGroup(0, 0, ())
    G = SparseIntMatrix(n, len(gens), ((i, j, v) for j, g in enumerate(gens) for i, v in g.items()))
    sg = smith_normal_form(G, transforms=True)
    # L has basis U^{-1}(d_k e_{r_k}); coordinates of y are (U y)[r_k] / d_k
    slot = {r: (k, d) for k, (r, c, d) in enumerate(sg.pivots)}
    ent = []
    for j, rel in _columns_dict(rels).items():
        for r, v in sg.apply_U(rel).items():
            if r not in slot or v % slot[r][1]:
                raise ValueError("relation lies outside the lattice")
            ent.append((slot[r][0], j, v // slot[r][1]))
    inv = smith_normal_form(SparseIntMatrix(sg.rank, rels.ncols, ent)).invariants
    return HomologyGroup(0, sg.rank - len(inv), tuple(t for t in inv if t > 1))


def _columns_dict(m: SparseIntMatrix) -> dict[int, dict[int, int]]:
    cols: dict[int, dict[int, int]] = {}
    for i, j, v in m.entries():
        cols.setdefault(j, {})[i] = v
    return cols


@dataclass
class BlochReport:
    ring: str
    group: AbelianGroup
    generators_count: int
    relations_count: int

    @property
    def rational_dim(self) -> int:
        return self.group.betti

    def to_dict(self) -> dict:
        s = self.group.structure()
        return {
            "ring": self.ring,
            "group": {"betti": s.betti, "torsion": list(s.torsion)},
            "rational_dim": self.rational_dim,
            "generators_count": self.generators_count,
            "relations_count": self.relations_count,
        }


def bloch_cokernel(ring: FiniteRing) -> BlochReport:
    """coker(d': Cbar_4(2) -> Cbar_3(2)) as an abelian group."""
    _require_field(ring)
    c4, c3 = build_cbar(ring, 2, 4), build_cbar(ring, 2, 3)
    d = del_prime(c4, c3)
    rels = _block(c3.group.relations, d)
    g = AbelianGroup(c3.ngens, rels, c3.gens)
    return BlochReport(ring.descriptor, g, c3.ngens, rels.ncols)


def cross_ratio_label(ring: FiniteRing, t: Sequence[Line]) -> int:
    """For a normalized 4-tuple in P^1 (frame (e1, e2, e1+e2) first) the affine coordinate of the 4th point."""
    x, y = t[3].gen
    if y == 0:
        raise ValueError("fourth point is the first frame point")
    return ring.mul(x, ring.inv(y))
