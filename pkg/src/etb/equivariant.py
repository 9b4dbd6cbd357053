"""Finite matrix groups over a FiniteRing and their actions on the buildings.

Matrices are tuples of row tuples acting on column vectors.  PGL elements are
represented by GL matrices normalized so that the first entry that is a unit
equals 1 (scalars act trivially on every complex here).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import permutations, product
from typing import Callable, Hashable, Iterable, Sequence

from .budget import get_budget
from .complexes import SimplicialComplex, build_fl, inclusion_flag
from .homology import (
    AbelianGroup,
    ChainMap,
    HomologyBasis,
    simplicial_chain_complex,
)
from .modlin import (
    Flag,
    Line,
    PartialFlagSplit,
    Splitting,
    Submodule,
    _perm_sign,
    canonical_line,
    det,
    identity,
    is_invertible,
    mat_mul,
    mat_vec,
    span,
)
from .ring import FiniteRing
from .snf import SparseIntMatrix

Matrix = tuple[tuple[int, ...], ...]

FLAVORS = ("gl", "elementary", "diagonal", "stabilizer", "permutation")


@dataclass(frozen=True)
class MatrixGroupElement:
    ring: FiniteRing
    entries: Matrix

    def __post_init__(self):
        if not is_invertible(self.ring, self.entries):
            raise ValueError("matrix is not invertible")

    @property
    def n(self) -> int:
        return len(self.entries)

    def __mul__(self, other: "MatrixGroupElement") -> "MatrixGroupElement":
        return MatrixGroupElement(self.ring, mat_mul(self.ring, self.entries, other.entries))


@dataclass
class GroupGenerators:
    ring: FiniteRing
    n: int
    flavor: str
    elements: list[Matrix]
    names: list[str] = field(default_factory=list)


def elementary_matrix(ring: FiniteRing, n: int, i: int, j: int, a: int) -> Matrix:
    """e_ij(a): identity plus a in position (i, j), i != j."""
    if i == j:
        raise ValueError("elementary matrices need i != j")
    return tuple(tuple(1 if r == c else (a if (r, c) == (i, j) else 0) for c in range(n)) for r in range(n))


def diagonal_matrix(ring: FiniteRing, diag: Sequence[int]) -> Matrix:
    n = len(diag)
    return tuple(tuple(diag[r] if r == c else 0 for c in range(n)) for r in range(n))


def permutation_matrix(perm: Sequence[int]) -> Matrix:
    """Matrix sending e_j to e_perm[j]."""
    n = len(perm)
    return tuple(tuple(1 if perm[c] == r else 0 for c in range(n)) for r in range(n))


def generators(ring: FiniteRing, n: int, flavor: str = "gl") -> GroupGenerators:
    """Generating sets: elementary, diagonal (torus) and permutation matrices.

    ``gl`` combines elementary and diagonal generators; over a field, and
    over Z/m, these generate GL_n.
    """
    els: list[Matrix] = []
    names: list[str] = []
    nz = [a for a in ring.elements() if a]
    if flavor in ("gl", "elementary"):
        for i in range(n):
            for j in range(n):
                if i != j:
                    for a in nz:
                        els.append(elementary_matrix(ring, n, i, j, a))
                        names.append(f"e{i + 1}{j + 1}({a})")
    if flavor in ("gl", "diagonal", "stabilizer"):
        for i in range(n):
            for u in ring.unit_values:
                if u != 1:
                    d = [1] * n
                    d[i] = u
                    els.append(diagonal_matrix(ring, d))
                    names.append(f"d{i + 1}({u})")
    if flavor in ("permutation", "stabilizer"):
        for i in range(n - 1):
            p = list(range(n))
            p[i], p[i + 1] = p[i + 1], p[i]
            els.append(permutation_matrix(p))
            names.append(f"s{i + 1}")
    if flavor not in FLAVORS:
        raise ValueError(f"unknown flavor {flavor!r}")
    return GroupGenerators(ring, n, flavor, els, names)


def closure(ring: FiniteRing, gens: Iterable[Matrix], n: int) -> list[Matrix]:
    """All products of the generators (finite group), in BFS order from the identity."""
    gens = list(gens)
    e = identity(n)
    seen = {e}
    out = [e]
    queue = deque([e])
    budget = get_budget()
    while queue:
        x = queue.popleft()
        for g in gens:
            y = mat_mul(ring, g, x)
            if y not in seen:
                seen.add(y)
                out.append(y)
                queue.append(y)
                budget.check("group", len(seen))
    return out


def enumerate_group(ring: FiniteRing, n: int, flavor: str = "gl") -> list[Matrix]:
    return sorted(closure(ring, generators(ring, n, flavor).elements, n))


def brute_force_gl(ring: FiniteRing, n: int) -> list[Matrix]:
    """Every n x n matrix with unit determinant (test oracle)."""
    get_budget().check("group", ring.cardinality ** (n * n))
    out = []
    for flat in product(range(ring.cardinality), repeat=n * n):
        m = tuple(tuple(flat[i * n : (i + 1) * n]) for i in range(n))
        if ring.is_unit(det(ring, m)):
            out.append(m)
    return out


def pgl_normalize(ring: FiniteRing, g: Matrix) -> Matrix:
    """Scale g by a unit so that its first unit entry (row-major) is 1."""
    for row in g:
        for x in row:
            if ring.is_unit(x):
                u = ring.inv(x)
                return tuple(tuple(ring.mul(u, y) for y in r) for r in g)
    raise ValueError("matrix has no unit entry")


# ------------------------------------------------------------------------------------
# actions on module-theoretic objects


def act_line(ring: FiniteRing, g: Matrix, L: Line) -> Line:
    return canonical_line(ring, mat_vec(ring, g, L.gen))


def act_submodule(ring: FiniteRing, g: Matrix, W: Submodule) -> Submodule:
    return span(ring, [mat_vec(ring, g, r) for r in W.rows], W.n)


def act_splitting(ring: FiniteRing, g: Matrix, a: Splitting) -> Splitting:
    return Splitting(tuple(sorted(act_line(ring, g, L) for L in a.lines)))


def act_flag(ring: FiniteRing, g: Matrix, F: Flag) -> Flag:
    return Flag(tuple(act_submodule(ring, g, s) for s in F.steps))


def act_pfs(ring: FiniteRing, g: Matrix, p: PartialFlagSplit) -> PartialFlagSplit:
    return PartialFlagSplit(
        tuple(act_submodule(ring, g, s) for s in p.steps),
        tuple(tuple(sorted(act_submodule(ring, g, P) for P in sp)) for sp in p.splittings),
    )


def act(ring: FiniteRing, g: Matrix, x):
    if isinstance(x, Line):
        return act_line(ring, g, x)
    if isinstance(x, Splitting):
        return act_splitting(ring, g, x)
    if isinstance(x, Flag):
        return act_flag(ring, g, x)
    if isinstance(x, PartialFlagSplit):
        return act_pfs(ring, g, x)
    if isinstance(x, Submodule):
        return act_submodule(ring, g, x)
    raise TypeError(f"cannot act on {type(x).__name__}")


def stabilizer_of_splitting(ring: FiniteRing, beta: Splitting, group: Iterable[Matrix] | None = None) -> list[Matrix]:
    n = len(beta.lines[0].gen)
    if group is None:
        group = enumerate_group(ring, n, "gl")
    return [g for g in group if act_splitting(ring, g, beta) == beta]


def standard_splitting(ring: FiniteRing, n: int) -> Splitting:
    return Splitting(tuple(sorted(canonical_line(ring, e) for e in identity(n))))


def act_on_complex(ring: FiniteRing, g: Matrix, k: SimplicialComplex) -> list[int]:
    """Vertex permutation induced by g; checks that simplices go to simplices."""
    perm = []
    for v in k.vertices:
        w = act(ring, g, v)
        if w not in k.index:
            raise ValueError("group element does not preserve the vertex set")
        perm.append(k.index[w])
    for s in k.maximal_simplices():
        if not k.is_simplex([perm[i] for i in s]):
            raise ValueError("group element does not act simplicially")
    return perm


def chain_action(ring: FiniteRing, g: Matrix, k: SimplicialComplex, chains=None) -> ChainMap:
    """Chain automorphism of C_*(k) induced by g, with orientation signs."""
    c = chains or simplicial_chain_complex(k)
    return _chain_map_between(ring, k, k, lambda x: act(ring, g, x), c, c)


# ------------------------------------------------------------------------------------
# Z[G]-modules and coinvariants


@dataclass
class ZGModule:
    """Free Z-module with a labeled basis and one signed action matrix per generator."""

    rank: int
    actions: list[SparseIntMatrix]
    labels: list[Hashable] | None = None

    @classmethod
    def from_signed_permutations(cls, rank: int, perms: Iterable[Sequence[tuple[int, int]]], labels=None):
        """Each action is a list ``[(image index, sign), ...]`` indexed by basis element."""
        acts = []
        for p in perms:
            acts.append(SparseIntMatrix(rank, rank, ((img, j, s) for j, (img, s) in enumerate(p))))
        return cls(rank, acts, labels)


def coinvariants(m: ZGModule) -> AbelianGroup:
    """M / span{g x - x}, generators suffice."""
    rels = []
    for a in m.actions:
        cols: dict[int, dict[int, int]] = {j: {} for j in range(m.rank)}
        for i, j, v in a.entries():
            cols[j][i] = cols[j].get(i, 0) + v
        for j in range(m.rank):
            r = dict(cols[j])
            r[j] = r.get(j, 0) - 1
            rels.append(r)
    return AbelianGroup.from_relation_list(m.rank, rels, m.labels)


def oriented_chain_module(ring: FiniteRing, k: SimplicialComplex, d: int, gens: Sequence[Matrix]) -> ZGModule:
    """C_d(k) with the action of the given matrices (vertices must be GL-stable objects)."""
    simp = k.simplices(d)
    ix = {s: i for i, s in enumerate(simp)}
    perms = []
    for g in gens:
        vp = [k.index[act(ring, g, v)] for v in k.vertices]
        p = []
        for s in simp:
            img = [vp[v] for v in s]
            order = sorted(range(len(img)), key=img.__getitem__)
            p.append((ix[tuple(img[i] for i in order)], _perm_sign(order)))
        perms.append(p)
    return ZGModule.from_signed_permutations(len(simp), perms, labels=simp)


# ------------------------------------------------------------------------------------
# elementary matrices act trivially on the stabilized image


@dataclass
class ElementaryReport:
    ring: str
    n: int
    h_target: str
    image_rank: int
    generators: list[str]
    verdicts: list[bool]
    evidence: list[list[list[int]]]  # per generator: columns [coords(i z), coords(g i z)]

    @property
    def passed(self) -> bool:
        return all(self.verdicts)

    def to_dict(self) -> dict:
        return {
            "check": "elementary_triviality",
            "ring": self.ring,
            "n": self.n,
            "target_homology": self.h_target,
            "image_generators": self.image_rank,
            "generators": self.generators,
            "verdicts": self.verdicts,
            "evidence": self.evidence,
        }


def _chain_map_between(ring, src: SimplicialComplex, tgt: SimplicialComplex, vmap: Callable, csrc, ctgt) -> ChainMap:
    perm = [tgt.index[vmap(v)] for v in src.vertices]
    maps = {}
    for d in range(src.dimension + 1):
        tix = {s: i for i, s in enumerate(tgt.simplices(d))}
        ent = []
        for j, s in enumerate(src.simplices(d)):
            img = [perm[v] for v in s]
            order = sorted(range(len(img)), key=img.__getitem__)
            key = tuple(img[i] for i in order)
            if key not in tix:
                raise ValueError("vertex map is not simplicial")
            ent.append((tix[key], j, _perm_sign(order)))
        maps[d] = SparseIntMatrix(len(tgt.simplices(d)), len(src.simplices(d)), ent)
    return ChainMap(csrc, ctgt, maps)


def elementary_triviality_check(ring: FiniteRing, n: int, degree: int = 1) -> ElementaryReport:
    """Each elementary generator of E_{n+1}(A) fixes the image of H_d(FL(A^n)) in H_d(FL(A^{n+1})).

    Evidence per generator: for every image generator z, the class
    coordinates of i(z) and of g.i(z) in the computed basis of the target.
    """
    small = build_fl(ring, n)
    big = build_fl(ring, n + 1)
    cs = simplicial_chain_complex(small)
    cb = simplicial_chain_complex(big)
    inc = _chain_map_between(ring, small, big, inclusion_flag(ring, n, n + 1), cs, cb)
    sb = HomologyBasis(cs, degree)
    tb = HomologyBasis(cb, degree)
    images = [inc.apply(degree, z) for z in sb.generators()]
    base = [tb.coords(z) for z in images]
    gens = generators(ring, n + 1, "elementary")
    verdicts, evidence = [], []
    for g in gens.elements:
        act_on_complex(ring, g, big)
        gm = _chain_map_between(ring, big, big, lambda F, g=g: act_flag(ring, g, F), cb, cb)
        moved = [tb.coords(gm.apply(degree, z)) for z in images]
        verdicts.append(moved == base)
        evidence.append([list(a) + list(b) for a, b in zip(base, moved)])
    return ElementaryReport(
        ring.descriptor, n, str(tb.group()), len(images), gens.names, verdicts, evidence
    )


# ------------------------------------------------------------------------------------
# stabilization probe (observational)


@dataclass
class StabilizationReport:
    ring: str
    m: int
    d: int
    dim_source: int
    dim_coinvariants: int
    dim_target: int
    rank: int
    factors_through_coinvariants: bool

    def to_dict(self) -> dict:
        out = dict(self.__dict__)
        out["check"] = "stabilization_probe"
        out["observational"] = True
        return out


def stabilization_probe(ring: FiniteRing, m: int, d: int) -> StabilizationReport:
    """H_0(GL_{m+1}, H_m(ET(A^{m+1})) (x) Q) -> H_m(ET(A^d)) (x) Q; dimensions and rank only."""
    from .complexes import build_e_poset
    from .fieldlin import QQ, boundary_columns, cycle_basis, integer_column_rank
    from .spectral import stabilization_poset_map

    if d < m + 1:
        raise ValueError("need d >= m + 1")
    src_pos = build_e_poset(ring, m + 1).poset
    tgt_pos = build_e_poset(ring, d).poset
    src = src_pos.nerve()
    tgt = tgt_pos.nerve()
    csrc = simplicial_chain_complex(src)
    ctgt = simplicial_chain_complex(tgt)
    inc = _chain_map_between(ring, src, tgt, stabilization_poset_map(ring, m + 1, d), csrc, ctgt)

    def cycles_and_boundaries(c, deg):
        B = boundary_columns(c, deg)
        return cycle_basis(QQ, c, deg), B, integer_column_rank(QQ, B, c.rank(deg))

    Zs, Bs, rbs = cycles_and_boundaries(csrc, m)
    _, Bt, rbt = cycles_and_boundaries(ctgt, m)
    dim_src = len(Zs) - rbs
    zt = ctgt.rank(m) - (integer_column_rank(QQ, boundary_columns(ctgt, m - 1), ctgt.rank(m - 1)) if m else 0)
    dim_tgt = zt - rbt
    # coinvariants: H / span (g - 1) H over the generators
    moved = []
    for g in generators(ring, m + 1, "gl").elements:
        gm = _chain_map_between(ring, src, src, lambda x, g=g: act_pfs(ring, g, x), csrc, csrc)
        for z in Zs:
            gz = gm.apply(m, z)
            moved.append({k: gz.get(k, 0) - z.get(k, 0) for k in set(gz) | set(z)})
    dim_coinv = len(Zs) - integer_column_rank(QQ, Bs + moved, csrc.rank(m))
    imgs = [inc.apply(m, z) for z in Zs]
    rank = integer_column_rank(QQ, Bt + imgs, ctgt.rank(m)) - rbt
    killed = [inc.apply(m, v) for v in moved]
    factors = integer_column_rank(QQ, Bt + killed, ctgt.rank(m)) == rbt
    return StabilizationReport(ring.descriptor, m, d, dim_src, dim_coinv, dim_tgt, rank, factors)
