"""Simplicial complexes, finite posets and the buildings FL(V), SPL(V), ET(V).

Vertices carry opaque labels (flags, splittings, poset elements); simplices are
sorted tuples of integer vertex ids.  Orientation of a simplex is the order of
its sorted ids, so for nerves the ids are assigned along a linear extension of
the poset and a chain is oriented bottom to top.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations, permutations, product
from typing import Hashable, Iterable, Sequence

from .budget import get_budget
from .modlin import (
    Flag,
    Line,
    PartialFlagSplit,
    Splitting,
    Submodule,
    add_submodules,
    canonical_line,
    contains,
    enumerate_flags,
    enumerate_splittings,
    flag_from_lines,
    flags_of_splitting,
    lift,
    pfs_from_blocks,
    project,
    span,
    zero_submodule,
)
from .ring import FiniteRing


class StructureError(RuntimeError):
    """A construction produced something that contradicts its defining property."""


class SimplicialComplex:
    """Finite simplicial complex closed under nonempty faces."""

    def __init__(self, vertices: Sequence[Hashable], simplices: Iterable[Sequence[int]] = (), close: bool = True):
        self.vertices = list(vertices)
        self.index = {v: i for i, v in enumerate(self.vertices)}
        if len(self.index) != len(self.vertices):
            raise ValueError("duplicate vertex labels")
        simp = {(i,) for i in range(len(self.vertices))}
        budget = get_budget()
        for s in simplices:
            s = tuple(sorted(set(s)))
            if not s:
                continue
            if close:
                if s in simp:
                    continue
                budget.check("simplices", len(simp) + 2 ** len(s))
                for k in range(1, len(s) + 1):
                    simp.update(combinations(s, k))
            else:
                simp.add(s)
        by_dim: dict[int, list] = {}
        for s in simp:
            by_dim.setdefault(len(s) - 1, []).append(s)
        top = max(by_dim, default=-1)
        self._by_dim = [sorted(by_dim.get(d, [])) for d in range(top + 1)]
        if not close:
            self._check_closed()

    @classmethod
    def from_maximal(cls, vertices, maximal: Iterable[Sequence[int]]) -> "SimplicialComplex":
        maximal = [tuple(sorted(set(m))) for m in maximal]
        maximal.sort(key=len, reverse=True)
        return cls(vertices, maximal, close=True)

    def _check_closed(self):
        present = set(self.all_simplices())
        for s in present:
            if len(s) > 1:
                for i in range(len(s)):
                    if s[:i] + s[i + 1 :] not in present:
                        raise StructureError(f"face of {s} missing")

    @property
    def dimension(self) -> int:
        return len(self._by_dim) - 1

    def simplices(self, d: int) -> list[tuple[int, ...]]:
        if 0 <= d < len(self._by_dim):
            return self._by_dim[d]
        return []

    def all_simplices(self):
        for lst in self._by_dim:
            yield from lst

    @property
    def f_vector(self) -> tuple[int, ...]:
        return tuple(len(x) for x in self._by_dim)

    @property
    def num_simplices(self) -> int:
        return sum(self.f_vector)

    @property
    def euler_characteristic(self) -> int:
        return sum((-1) ** d * c for d, c in enumerate(self.f_vector))

    @cached_property
    def _simplex_set(self):
        return set(self.all_simplices())

    def is_simplex(self, s: Sequence[int]) -> bool:
        return tuple(sorted(s)) in self._simplex_set

    def maximal_simplices(self) -> list[tuple[int, ...]]:
        faces = set()
        for lst in self._by_dim[1:]:
            for s in lst:
                for i in range(len(s)):
                    faces.add(s[:i] + s[i + 1 :])
        return [s for s in self.all_simplices() if s not in faces]

    def simplex_labels(self, s: Sequence[int]):
        return tuple(self.vertices[i] for i in s)

    def __repr__(self) -> str:
        return f"SimplicialComplex(f={self.f_vector})"


def barycentric_subdivision(k: SimplicialComplex) -> SimplicialComplex:
    """Nerve of the face poset of k."""
    faces = list(k.all_simplices())
    faces.sort(key=lambda s: (len(s), s))
    pos = Poset.from_leq(faces, lambda a, b: set(a) <= set(b))
    return pos.nerve()


# ------------------------------------------------------------------------------------
# posets


class Poset:
    """Finite poset; element ids follow the given order, which must be a linear extension."""

    def __init__(self, elements: Sequence[Hashable], less: Iterable[tuple[int, int]]):
        self.elements = list(elements)
        self.index = {e: i for i, e in enumerate(self.elements)}
        n = len(self.elements)
        up = [set() for _ in range(n)]
        for a, b in less:
            if a == b:
                continue
            if a > b:
                raise ValueError("element order is not a linear extension")
            up[a].add(b)
        # transitive closure, processing from the top
        for i in range(n - 1, -1, -1):
            extra = set()
            for j in up[i]:
                extra |= up[j]
            up[i] |= extra
        self._up = up

    @classmethod
    def from_leq(cls, elements, leq) -> "Poset":
        els = list(elements)
        less = [(i, j) for i in range(len(els)) for j in range(i + 1, len(els)) if leq(els[i], els[j])]
        return cls(els, less)

    def __len__(self) -> int:
        return len(self.elements)

    def lt(self, i: int, j: int) -> bool:
        return j in self._up[i]

    def leq(self, i: int, j: int) -> bool:
        return i == j or j in self._up[i]

    def up(self, i: int) -> set[int]:
        return self._up[i]

    @cached_property
    def _down(self):
        down = [set() for _ in self.elements]
        for i, u in enumerate(self._up):
            for j in u:
                down[j].add(i)
        return down

    def down(self, i: int) -> set[int]:
        return self._down[i]

    def minimal(self) -> list[int]:
        return [i for i in range(len(self)) if not self._down[i]]

    def maximal(self) -> list[int]:
        return [i for i in range(len(self)) if not self._up[i]]

    def hasse(self) -> list[tuple[int, int]]:
        covers = []
        for i, u in enumerate(self._up):
            for j in u:
                if not any(j in self._up[k] for k in u if k != j):
                    covers.append((i, j))
        return covers

    def check_axioms(self) -> bool:
        n = len(self)
        for i in range(n):
            if i in self._up[i]:
                return False
            for j in self._up[i]:
                if i in self._up[j]:
                    return False
                if not self._up[j] <= self._up[i]:
                    return False
        return True

    def subposet(self, ids: Iterable[int]) -> "Poset":
        ids = sorted(set(ids))
        loc = {g: k for k, g in enumerate(ids)}
        less = [(loc[i], loc[j]) for i in ids for j in self._up[i] if j in loc]
        sub = Poset([self.elements[i] for i in ids], less)
        sub.parent_ids = ids
        return sub

    def lower_set_ids(self, S: Iterable[int]) -> set[int]:
        S = list(S)
        if not S:
            raise ValueError("empty set")
        out = self._down[S[0]] | {S[0]}
        for s in S[1:]:
            out &= self._down[s] | {s}
        return out

    def lower_set(self, S: Iterable[int]) -> "Poset":
        """The subposet of elements below every member of S."""
        return self.subposet(self.lower_set_ids(S))

    def chains(self) -> list[tuple[int, ...]]:
        out = []

        def extend(chain):
            out.append(chain)
            for j in sorted(self._up[chain[-1]]):
                extend(chain + (j,))

        budget = get_budget()
        for i in range(len(self)):
            extend((i,))
            budget.check("simplices", len(out))
        return out

    def nerve(self) -> SimplicialComplex:
        """Simplicial complex of nonempty chains."""
        return SimplicialComplex(self.elements, self.chains(), close=False)


def nerve(p: Poset) -> SimplicialComplex:
    return p.nerve()


def lower_set(p: Poset, S) -> Poset:
    return p.lower_set(S)


# ------------------------------------------------------------------------------------
# buildings


def build_fl(ring: FiniteRing, n: int) -> SimplicialComplex:
    """Flag complex: vertices are full flags, maximal simplices the sets [alpha]."""
    flags = enumerate_flags(ring, n)
    idx = {f: i for i, f in enumerate(flags)}
    maximal = [tuple(idx[f] for f in flags_of_splitting(ring, a)) for a in enumerate_splittings(ring, n)]
    _precheck(maximal)
    return SimplicialComplex.from_maximal(flags, maximal)


def splittings_through_flag(ring: FiniteRing, n: int) -> dict[Flag, list[Splitting]]:
    out: dict[Flag, list[Splitting]] = {f: [] for f in enumerate_flags(ring, n)}
    for a in enumerate_splittings(ring, n):
        for f in flags_of_splitting(ring, a):
            out[f].append(a)
    return out


def build_spl(ring: FiniteRing, n: int) -> SimplicialComplex:
    """Splitting complex: a set of splittings is a simplex iff they share a flag
    (equivalently, a common lower bound in the enriched poset)."""
    spl = enumerate_splittings(ring, n)
    idx = {a: i for i, a in enumerate(spl)}
    maximal = [tuple(idx[a] for a in group) for group in splittings_through_flag(ring, n).values()]
    _precheck(maximal)
    return SimplicialComplex.from_maximal(spl, maximal)


def _precheck(maximal):
    bound = sum(2 ** len(m) for m in maximal)
    get_budget().check("simplices", min(bound, 2 ** max((len(m) for m in maximal), default=0) * len(maximal)))


def ordered_set_partitions(items: Sequence) -> list[list[list]]:
    items = list(items)
    if not items:
        return [[]]
    out = []
    n = len(items)
    # choose the first block, recurse on the rest
    for k in range(1, n + 1):
        for first in combinations(range(n), k):
            rest = [items[i] for i in range(n) if i not in first]
            for tail in ordered_set_partitions(rest):
                out.append([[items[i] for i in first]] + tail)
    return out


def _blocks_refine(fine: list, coarse: list) -> bool:
    """True iff the ordered partition ``fine`` refines ``coarse`` (coarse blocks are
    unions of consecutive fine blocks)."""
    k = 0
    for cb in coarse:
        acc = set()
        target = set(cb)
        while acc != target:
            if k >= len(fine) or not set(fine[k]) <= target:
                return False
            acc |= set(fine[k])
            k += 1
    return k == len(fine)


@dataclass
class EPoset:
    """The enriched poset together with bookkeeping for each element."""

    ring: FiniteRing
    n: int
    poset: Poset

    @property
    def elements(self) -> list[PartialFlagSplit]:
        return self.poset.elements

    def dim(self, i: int) -> int:
        return self.n - self.poset.elements[i].length

    def t(self, i: int) -> int:
        return self.poset.elements[i].steps[0].rank - 1


def build_e_poset(ring: FiniteRing, n: int) -> EPoset:
    """All pairs (partial flag, splittings of its graded pieces) with the refinement order.

    Every element lies below some splitting alpha and the elements below alpha
    are exactly the ordered set partitions of alpha, ordered by refinement.
    """
    spl = enumerate_splittings(ring, n)
    budget = get_budget()
    parts_cache: dict[int, list] = {}
    elems: dict[PartialFlagSplit, None] = {}
    per_alpha = []
    for a in spl:
        if n not in parts_cache:
            parts_cache[n] = ordered_set_partitions(list(range(n)))
        items = []
        for blocks in parts_cache[n]:
            lb = [[a.lines[i] for i in b] for b in blocks]
            e = pfs_from_blocks(ring, lb, n)
            elems[e] = None
            items.append((blocks, e))
        per_alpha.append(items)
        budget.check("simplices", len(elems))
    order = sorted(elems, key=lambda e: (-e.length, e))
    idx = {e: i for i, e in enumerate(order)}
    less = set()
    for items in per_alpha:
        for b1, e1 in items:
            for b2, e2 in items:
                if e1 != e2 and _blocks_refine(b1, b2):
                    less.add((idx[e1], idx[e2]))
    return EPoset(ring, n, Poset(order, sorted(less)))


def build_et(ring: FiniteRing, n: int) -> SimplicialComplex:
    return build_e_poset(ring, n).poset.nerve()


# ------------------------------------------------------------------------------------
# polyhedral cell structure


@dataclass
class Cell:
    id: int
    element: PartialFlagSplit
    dim: int
    level: int  # t(p) = rank of the first flag step - 1
    boundary: dict[int, int] = field(default_factory=dict)


@dataclass
class CellStructure:
    """One cell e(p) per element p of the enriched poset; cell ids equal element ids."""

    ring: FiniteRing
    n: int
    epos: EPoset
    cells: list[Cell]
    sphere_checks: dict[int, bool]

    def cells_of_dim(self, d: int) -> list[Cell]:
        return [c for c in self.cells if c.dim == d]

    @property
    def dimension(self) -> int:
        return max(c.dim for c in self.cells)

    @property
    def counts(self) -> tuple[int, ...]:
        return tuple(len(self.cells_of_dim(d)) for d in range(self.dimension + 1))

    @property
    def euler_characteristic(self) -> int:
        return sum((-1) ** c.dim for c in self.cells)

    def fundamental_chain(self, i: int) -> dict[tuple[int, ...], int]:
        """Simplicial chain in the nerve representing the oriented cell e(p_i).

        Built as ``(-1)^d * (boundary chain) * p`` so that its simplicial boundary
        equals the sum of the face chains weighted by the cellular coefficients.
        """
        memo = self.__dict__.setdefault("_fund", {})
        if i in memo:
            return memo[i]
        c = self.cells[i]
        if c.dim == 0:
            out = {(i,): 1}
        else:
            sign = -1 if c.dim % 2 else 1
            out = {}
            for f, coeff in c.boundary.items():
                for s, v in self.fundamental_chain(f).items():
                    key = s + (i,)
                    out[key] = out.get(key, 0) + sign * coeff * v
            out = {k: v for k, v in out.items() if v}
        memo[i] = out
        return out


def _sphere_homology_ok(sub: Poset, d: int) -> bool:
    """Integral homology of the nerve equals that of S^d (S^-1 is empty)."""
    from .homology import homology, simplicial_chain_complex

    if d < 0:
        return len(sub) == 0
    if len(sub) == 0:
        return False
    hs = homology(simplicial_chain_complex(sub.nerve()))
    want = {0: 1, d: 1} if d > 0 else {0: 2}
    for h in hs:
        if h.torsion or h.betti != want.get(h.degree, 0):
            return False
    return max((h.degree for h in hs), default=0) >= d


def cells_of_et(ring: FiniteRing, n: int, check_spheres: bool = True) -> CellStructure:
    """Polyhedral cell structure on ET(A^n), one cell per element of the poset.

    Cell dimension is n minus the number of flag steps.  Each cell's boundary
    is the (unique up to sign) fundamental cycle of the cellular chains of
    its boundary sphere; the sign makes the coefficient of the face with the
    smallest id positive.
    """
    from .snf import SparseIntMatrix, smith_normal_form

    epos = build_e_poset(ring, n)
    P = epos.poset
    cells = [Cell(i, e, n - e.length, e.steps[0].rank - 1) for i, e in enumerate(P.elements)]
    checks = {}
    for c in cells:
        faces_all = P.down(c.id)
        if check_spheres:
            checks[c.id] = _sphere_homology_ok(P.subposet(faces_all), c.dim - 1)
            if not checks[c.id]:
                raise StructureError(f"boundary of cell {c.id} is not a homology sphere")
        d = c.dim
        if d == 0:
            continue
        faces = sorted(f for f in faces_all if cells[f].dim == d - 1)
        if d == 1:
            if len(faces) != 2:
                raise StructureError("1-cell without two endpoints")
            c.boundary = {faces[0]: 1, faces[1]: -1}
            continue
        below = sorted({g for f in faces for g in cells[f].boundary})
        rix = {g: k for k, g in enumerate(below)}
        m = SparseIntMatrix(
            len(below),
            len(faces),
            ((rix[g], k, v) for k, f in enumerate(faces) for g, v in cells[f].boundary.items()),
        )
        res = smith_normal_form(m, transforms=True)
        ker = res.kernel_basis()
        if len(ker) != 1:
            raise StructureError(f"cell {c.id}: boundary cycle space has rank {len(ker)}")
        vec = ker[0]
        if set(vec) != set(range(len(faces))) or any(abs(v) != 1 for v in vec.values()):
            raise StructureError(f"cell {c.id}: fundamental cycle is not a signed sum of faces")
        s = vec[0]
        c.boundary = {faces[k]: v * s for k, v in sorted(vec.items())}
    return CellStructure(ring, n, epos, cells, checks)


# ------------------------------------------------------------------------------------
# product embedding


def _image_submodule(ring, rows_fn, gens, n, base: Submodule | None = None) -> Submodule:
    vecs = [rows_fn(g) for g in gens]
    if base is not None:
        vecs = list(base.rows) + vecs
    return span(ring, vecs, n)


def product_embedding(ring: FiniteRing, W: Submodule):
    """The poset map E(W) x E(V/W) -> E(V) for a free summand W of V = A^n.

    W is identified with A^k through its canonical rows, and V/W with A^{n-k}
    through :func:`etb.modlin.project`.  Returns ``(phi, k)`` where
    ``phi(a, b)`` maps an element a of E(A^k) and b of E(A^{n-k}).
    """
    n, k = W.n, W.rank
    if not 0 < k < n:
        raise ValueError("W must be a proper nonzero summand")
    basis = W.rows

    def embed(x):
        out = [0] * n
        for coeff, row in zip(x, basis):
            if coeff:
                for j, y in enumerate(row):
                    out[j] = ring.add(out[j], ring.mul(coeff, y))
        return tuple(out)

    def up(x):
        return lift(ring, W, x)

    def phi(a: PartialFlagSplit, b: PartialFlagSplit) -> PartialFlagSplit:
        steps = []
        splits = []
        for st, sp in zip(a.steps, a.splittings):
            steps.append(_image_submodule(ring, embed, st.rows, n))
            splits.append(tuple(sorted(_image_submodule(ring, embed, P.rows, n) for P in sp)))
        for st, sp in zip(b.steps, b.splittings):
            steps.append(_image_submodule(ring, up, st.rows, n, base=W))
            splits.append(tuple(sorted(_image_submodule(ring, up, P.rows, n, base=W) for P in sp)))
        return PartialFlagSplit(tuple(steps), tuple(splits))

    return phi, k


def inclusion_e(ring: FiniteRing, n: int, m: int):
    """E(A^n) -> E(A^m), m >= n, appending the standard lines e_{n+1}, ..., e_m as steps."""

    def pad(v):
        return tuple(v) + (0,) * (m - n)

    def f(a: PartialFlagSplit) -> PartialFlagSplit:
        steps = [span(ring, [pad(r) for r in s.rows], m) for s in a.steps]
        splits = [tuple(sorted(span(ring, [pad(r) for r in P.rows], m) for P in sp)) for sp in a.splittings]
        top = steps[-1]
        for j in range(n, m):
            e = tuple(1 if i == j else 0 for i in range(m))
            nxt = span(ring, list(top.rows) + [e], m)
            steps.append(nxt)
            splits.append((nxt,))
            top = nxt
        return PartialFlagSplit(tuple(steps), tuple(splits))

    return f


def inclusion_flag(ring: FiniteRing, n: int, m: int):
    """FL(A^n) -> FL(A^m): pad each step and append the standard basis vectors."""

    def pad(v):
        return tuple(v) + (0,) * (m - n)

    def f(F: Flag) -> Flag:
        steps = [span(ring, [pad(r) for r in s.rows], m) for s in F.steps]
        top = steps[-1]
        for j in range(n, m):
            e = tuple(1 if i == j else 0 for i in range(m))
            top = span(ring, list(top.rows) + [e], m)
            steps.append(top)
        return Flag(tuple(steps))

    return f
