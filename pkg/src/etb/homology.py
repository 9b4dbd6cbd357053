"""Chain complexes over Z and their homology over Z, Q and F_p.

Homology classes get explicit coordinates: for a cycle z in degree d,
:class:`HomologyBasis` returns integer coordinates on the free part and
residues on each cyclic torsion summand, which is what equivariance and
induced-map checks consume.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .snf import SNFResult, SparseIntMatrix, rank_mod_p, smith_normal_form


@dataclass(frozen=True)
class HomologyGroup:
    degree: int
    betti: int
    torsion: tuple[int, ...] = ()

    def __str__(self) -> str:
        parts = []
        if self.betti:
            parts.append("Z" if self.betti == 1 else f"Z^{self.betti}")
        parts += [f"Z/{t}" for t in self.torsion]
        return " + ".join(parts) if parts else "0"

    def to_dict(self) -> dict:
        return {"degree": self.degree, "betti": self.betti, "torsion": list(self.torsion)}


def parse_coeff(coeff) -> int:
    """0 for Z, -1 for Q, p for F_p.  Accepts ``"Z"``, ``"q"``, ``"fp:2"``, ``2``."""
    if isinstance(coeff, int):
        return coeff
    c = str(coeff).strip().lower()
    if c in ("z", "zz", "int"):
        return 0
    if c in ("q", "qq", "rat"):
        return -1
    if c.startswith("fp:"):
        c = c[3:]
    p = int(c)
    from .ring import is_prime

    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    return p


class ChainComplex:
    """Free chain complex C_0 <- C_1 <- ... with sparse integer boundaries.

    ``boundaries[d]`` is the matrix of C_d -> C_{d-1} (shape ranks[d-1] x ranks[d]).
    """

    def __init__(self, ranks: Sequence[int], boundaries: dict[int, SparseIntMatrix], labels=None):
        self.ranks = list(ranks)
        self.boundaries = dict(boundaries)
        self.labels = labels
        for d, m in self.boundaries.items():
            if m.shape != (self.rank(d - 1), self.rank(d)):
                raise ValueError(f"boundary {d} has shape {m.shape}")
        self._snf: dict[tuple[int, bool], SNFResult] = {}

    @property
    def top(self) -> int:
        return len(self.ranks) - 1

    def rank(self, d: int) -> int:
        return self.ranks[d] if 0 <= d < len(self.ranks) else 0

    def boundary(self, d: int) -> SparseIntMatrix:
        m = self.boundaries.get(d)
        if m is None:
            return SparseIntMatrix(self.rank(d - 1), self.rank(d))
        return m

    def snf(self, d: int, transforms: bool = False) -> SNFResult:
        key = (d, transforms)
        if key not in self._snf:
            if not transforms and (d, True) in self._snf:
                return self._snf[(d, True)]
            self._snf[key] = smith_normal_form(self.boundary(d), transforms)
        return self._snf[key]

    def squares_to_zero(self) -> bool:
        for d in range(2, self.top + 1):
            if not self.boundary(d - 1).matmul(self.boundary(d)).is_zero():
                return False
        return True

    @property
    def euler_characteristic(self) -> int:
        return sum((-1) ** d * r for d, r in enumerate(self.ranks))

    def __repr__(self) -> str:
        return f"ChainComplex(ranks={self.ranks})"


def simplicial_chain_complex(k) -> ChainComplex:
    """Oriented simplicial chains of a :class:`etb.complexes.SimplicialComplex`."""
    index = []
    for d in range(k.dimension + 1):
        index.append({s: i for i, s in enumerate(k.simplices(d))})
    bd = {}
    for d in range(1, k.dimension + 1):
        low = index[d - 1]
        ent = []
        for j, s in enumerate(k.simplices(d)):
            for i in range(d + 1):
                ent.append((low[s[:i] + s[i + 1 :]], j, -1 if i % 2 else 1))
        bd[d] = SparseIntMatrix(len(low), len(index[d]), ent)
    return ChainComplex([len(x) for x in index], bd, labels=[k.simplices(d) for d in range(k.dimension + 1)])


def cellular_chain_complex(cs) -> ChainComplex:
    """Cellular chains of a :class:`etb.complexes.CellStructure`."""
    top = cs.dimension
    index = [{c.id: i for i, c in enumerate(cs.cells_of_dim(d))} for d in range(top + 1)]
    bd = {}
    for d in range(1, top + 1):
        ent = []
        for c in cs.cells_of_dim(d):
            for f, v in c.boundary.items():
                ent.append((index[d - 1][f], index[d][c.id], v))
        bd[d] = SparseIntMatrix(len(index[d - 1]), len(index[d]), ent)
    return ChainComplex([len(x) for x in index], bd, labels=[sorted(x, key=x.get) for x in index])


def _rank(c: ChainComplex, d: int, p: int) -> int:
    if d < 1 or d > c.top:
        return 0
    if p > 0:
        return rank_mod_p(c.boundary(d), p)
    return c.snf(d).rank


def homology(c: ChainComplex, coeff=0, degrees: Sequence[int] | None = None) -> list[HomologyGroup]:
    """Homology groups of c.  ``coeff`` as in :func:`parse_coeff`."""
    p = parse_coeff(coeff)
    degs = range(c.top + 1) if degrees is None else degrees
    out = []
    ranks = {}

    def rk(d):
        if d not in ranks:
            ranks[d] = _rank(c, d, p)
        return ranks[d]

    for d in degs:
        betti = c.rank(d) - rk(d) - rk(d + 1)
        tors = ()
        if p == 0 and 1 <= d + 1 <= c.top:
            tors = tuple(x for x in c.snf(d + 1).invariants if x > 1)
        out.append(HomologyGroup(d, betti, tors))
    return out


def reduced_homology(c: ChainComplex, coeff=0) -> list[HomologyGroup]:
    hs = homology(c, coeff)
    if hs and c.rank(0):
        h0 = hs[0]
        hs[0] = HomologyGroup(0, h0.betti - 1, h0.torsion)
    return hs


def betti_numbers(c: ChainComplex, coeff=0) -> tuple[int, ...]:
    return tuple(h.betti for h in homology(c, coeff))


# ------------------------------------------------------------------------------------
# explicit bases


def _transform_rows(rows: dict[int, dict[int, int]], col_ops) -> dict[int, dict[int, int]]:
    """Apply V^{-1} (V = product of the column operations) on the left of a row-dict matrix."""
    rows = {i: dict(r) for i, r in rows.items()}
    for t, s, f in col_ops:
        rt = rows.get(t)
        if not rt:
            continue
        rs = rows.setdefault(s, {})
        for j, v in rt.items():
            nv = rs.get(j, 0) - f * v
            if nv:
                rs[j] = nv
            else:
                del rs[j]
        if not rs:
            del rows[s]
    return rows


@dataclass
class HomologyBasis:
    """Coordinates on H_d(C; Z) = Z^b + sum Z/t_i.

    Generators are ordered free first, then torsion by increasing order.
    """

    complex: ChainComplex
    degree: int
    _A: SNFResult = field(repr=False, default=None)
    _J: list[int] = field(repr=False, default=None)
    _S: SNFResult = field(repr=False, default=None)

    def __post_init__(self):
        c, d = self.complex, self.degree
        n = c.rank(d)
        if d >= 1:
            self._A = c.snf(d, transforms=True)
            piv = self._A.pivot_cols
            self._J = [j for j in range(n) if j not in piv]
            ops = self._A.col_ops
        else:
            self._A = None
            self._J = list(range(n))
            ops = []
        jpos = {j: k for k, j in enumerate(self._J)}
        b = c.boundary(d + 1)
        rows = _transform_rows(b.rows, ops)
        ent = []
        for i, r in rows.items():
            if i not in jpos:
                raise ArithmeticError("boundary of a boundary is not zero")
            for j, v in r.items():
                ent.append((jpos[i], j, v))
        m = SparseIntMatrix(len(self._J), b.ncols, ent)
        self._S = smith_normal_form(m, transforms=True)
        piv = {r: abs(dd) for r, _, dd in self._S.pivots}
        self.free_rows = [r for r in range(len(self._J)) if r not in piv]
        tors = sorted((dd, r) for r, dd in piv.items() if dd > 1)
        self.torsion_rows = [r for _, r in tors]
        self.torsion_orders = [dd for dd, _ in tors]

    @property
    def betti(self) -> int:
        return len(self.free_rows)

    @property
    def ngens(self) -> int:
        return len(self.free_rows) + len(self.torsion_rows)

    @property
    def orders(self) -> list[int]:
        """0 for free generators, t for a Z/t generator."""
        return [0] * len(self.free_rows) + list(self.torsion_orders)

    def group(self) -> HomologyGroup:
        from .snf import invariant_factors_from_diagonal

        return HomologyGroup(self.degree, self.betti, invariant_factors_from_diagonal(self.torsion_orders))

    def _reduced(self, z: dict[int, int]) -> dict[int, int]:
        if self._A is not None:
            w = self._A.apply_Vinv(z)
            if any(w.get(c) for c in self._A.pivot_cols):
                raise ValueError("chain is not a cycle")
        else:
            w = {j: v for j, v in z.items() if v}
        jpos = {j: k for k, j in enumerate(self._J)}
        return self._S.apply_U({jpos[j]: v for j, v in w.items()})

    def coords(self, z: dict[int, int] | Sequence[int]) -> tuple[int, ...]:
        """Class coordinates of a cycle (free integers, then residues)."""
        if not isinstance(z, dict):
            z = {j: v for j, v in enumerate(z) if v}
        y = self._reduced(z)
        free = [y.get(r, 0) for r in self.free_rows]
        tors = [y.get(r, 0) % t for r, t in zip(self.torsion_rows, self.torsion_orders)]
        return tuple(free + tors)

    def is_boundary(self, z) -> bool:
        return not any(self.coords(z))

    def generators(self) -> list[dict[int, int]]:
        """Cycles representing the generators, as sparse chains."""
        out = []
        for r in self.free_rows + self.torsion_rows:
            u = self._S.apply_Uinv({r: 1})
            w = {self._J[k]: v for k, v in u.items()}
            out.append(self._A.apply_V(w) if self._A is not None else w)
        return out


@dataclass
class ChainMap:
    """Degreewise integer matrices ``maps[d]: C_d -> D_d``."""

    source: ChainComplex
    target: ChainComplex
    maps: dict[int, SparseIntMatrix]

    def degree_map(self, d: int) -> SparseIntMatrix:
        m = self.maps.get(d)
        if m is None:
            return SparseIntMatrix(self.target.rank(d), self.source.rank(d))
        return m

    def is_chain_map(self) -> bool:
        top = max(self.source.top, self.target.top)
        for d in range(1, top + 1):
            lhs = self.target.boundary(d).matmul(self.degree_map(d))
            rhs = self.degree_map(d - 1).matmul(self.source.boundary(d))
            if lhs != rhs:
                return False
        return True

    def apply(self, d: int, z: dict[int, int]) -> dict[int, int]:
        return self.degree_map(d).apply(z)


@dataclass
class InducedMap:
    degree: int
    columns: list[tuple[int, ...]]  # images of source generators in target coordinates
    source_orders: list[int]
    target_orders: list[int]

    @property
    def free_matrix(self) -> list[list[int]]:
        """Matrix of the map on free parts (rows = target free gens)."""
        nf_s = self.source_orders.count(0)
        nf_t = self.target_orders.count(0)
        return [[self.columns[j][i] for j in range(nf_s)] for i in range(nf_t)]

    def rational_rank(self) -> int:
        fm = self.free_matrix
        if not fm or not fm[0]:
            return 0
        return smith_normal_form(SparseIntMatrix.from_dense(fm)).rank


def induced_map(f: ChainMap, d: int, source_basis: HomologyBasis | None = None,
                target_basis: HomologyBasis | None = None) -> InducedMap:
    sb = source_basis or HomologyBasis(f.source, d)
    tb = target_basis or HomologyBasis(f.target, d)
    cols = [tb.coords(f.apply(d, g)) for g in sb.generators()]
    return InducedMap(d, cols, sb.orders, tb.orders)


# ------------------------------------------------------------------------------------
# finitely presented abelian groups


class AbelianGroup:
    """Z^ngens modulo the column span of ``relations`` (ngens x nrels).

    Coordinates of an element follow the SNF of the relation matrix: free
    coordinates are integers, torsion coordinates residues mod their order.
    """

    def __init__(self, ngens: int, relations: SparseIntMatrix | None = None, labels=None):
        self.ngens = ngens
        self.relations = relations if relations is not None else SparseIntMatrix(ngens, 0)
        if self.relations.nrows != ngens:
            raise ValueError("relation matrix has the wrong number of rows")
        self.labels = labels
        self._snf = None

    @classmethod
    def from_relation_list(cls, ngens: int, rels, labels=None) -> "AbelianGroup":
        """``rels`` is an iterable of sparse dicts {generator: coefficient}."""
        ent = []
        k = 0
        for r in rels:
            r = {g: v for g, v in r.items() if v}
            if not r:
                continue
            ent.extend((g, k, v) for g, v in r.items())
            k += 1
        return cls(ngens, SparseIntMatrix(ngens, k, ent), labels)

    @property
    def snf(self) -> SNFResult:
        if self._snf is None:
            self._snf = smith_normal_form(self.relations, transforms=True)
        return self._snf

    def _orders(self):
        piv = {r: abs(d) for r, _, d in self.snf.pivots}
        free = [r for r in range(self.ngens) if r not in piv]
        tors = sorted((d, r) for r, d in piv.items() if d > 1)
        return free, tors

    @property
    def betti(self) -> int:
        return self.ngens - self.snf.rank

    @property
    def torsion(self) -> tuple[int, ...]:
        return tuple(x for x in self.snf.invariants if x > 1)

    def structure(self, degree: int = 0) -> HomologyGroup:
        return HomologyGroup(degree, self.betti, self.torsion)

    def is_trivial(self) -> bool:
        return self.betti == 0 and not self.torsion

    def coords(self, x: dict[int, int]) -> tuple[int, ...]:
        y = self.snf.apply_U(x)
        free, tors = self._orders()
        return tuple([y.get(r, 0) for r in free] + [y.get(r, 0) % d for d, r in tors])

    def is_zero(self, x: dict[int, int]) -> bool:
        return self.snf.in_image(x)

    def __repr__(self) -> str:
        return f"AbelianGroup({self.structure()})"


def quotient_by_image(target: AbelianGroup, images) -> AbelianGroup:
    """target / subgroup generated by ``images`` (sparse dicts in target generators)."""
    rels = [dict(r) for _, r in _columns(target.relations)]
    rels.extend(images)
    return AbelianGroup.from_relation_list(target.ngens, rels, target.labels)


def _columns(m: SparseIntMatrix):
    cols: dict[int, dict[int, int]] = {}
    for i, j, v in m.entries():
        cols.setdefault(j, {})[i] = v
    return sorted(cols.items())
