"""Linear algebra on free modules A^n over a :class:`~etb.ring.FiniteRing`.

Vectors are tuples of encoded ring elements.  Submodules that are free direct
summands with free quotient are stored in a canonical generator form: over
each local factor of the ring (the ring itself for a field, ``Z/p^e`` for each
prime power of ``zmod:m``) the rows are reduced so that the greedily chosen
pivot columns carry the identity, and the local forms are glued by CRT.  Over
a field this is the reduced row echelon form.  Equality of submodules is
therefore equality of encodings.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, permutations, product
from typing import Iterable, Sequence

from .budget import get_budget
from .ring import FiniteRing, NotInvertible

Vector = tuple[int, ...]


class NotASummand(ValueError):
    """The span is not a free direct summand with free quotient."""


class InvalidCardinality(ValueError):
    pass


@dataclass(frozen=True, order=True)
class Line:
    """A rank-one free summand, stored by its lexicographically least unimodular generator."""

    gen: Vector

    @property
    def rank(self) -> int:
        return len(self.gen)


@dataclass(frozen=True, order=True)
class Submodule:
    n: int
    rows: tuple[Vector, ...]

    @property
    def rank(self) -> int:
        return len(self.rows)


@dataclass(frozen=True, order=True)
class Splitting:
    lines: tuple[Line, ...]

    def __len__(self) -> int:
        return len(self.lines)

    def __iter__(self):
        return iter(self.lines)


@dataclass(frozen=True, order=True)
class Flag:
    """Full flag ``F_1 < ... < F_n = V`` (the zero module is implicit)."""

    steps: tuple[Submodule, ...]


@dataclass(frozen=True, order=True)
class PartialFlagSplit:
    """Element (F, S) of the enriched poset.

    ``steps`` is ``F_1 < ... < F_r = V``.  ``splittings[i]`` lists the lines of
    ``F_{i+1}/F_i`` through their preimages ``F_i + L`` in V, sorted.
    """

    steps: tuple[Submodule, ...]
    splittings: tuple[tuple[Submodule, ...], ...]

    @property
    def length(self) -> int:
        return len(self.steps)

    @property
    def step_ranks(self) -> tuple[int, ...]:
        return tuple(s.rank for s in self.steps)


# ---------------------------------------------------------------------------------------
# local elimination


def _local_echelon(lr: FiniteRing, rows: Sequence[Sequence[int]], ncols: int):
    """Gauss-Jordan over a local ring using unit pivots only.

    Returns ``(pivots, reduced_rows, clean)``; ``clean`` is False when some
    non-pivot row is left nonzero (the span then is not a free summand).
    """
    m = [list(r) for r in rows]
    pivots = []
    rank = 0
    for c in range(ncols):
        sel = None
        for r in range(rank, len(m)):
            if lr.is_unit(m[r][c]):
                sel = r
                break
        if sel is None:
            continue
        m[rank], m[sel] = m[sel], m[rank]
        iv = lr.inv(m[rank][c])
        if iv != 1:
            m[rank] = [lr.mul(iv, x) for x in m[rank]]
        prow = m[rank]
        for r in range(len(m)):
            if r != rank and m[r][c]:
                f = m[r][c]
                m[r] = [lr.sub(x, lr.mul(f, y)) for x, y in zip(m[r], prow)]
        pivots.append(c)
        rank += 1
    clean = all(not any(row) for row in m[rank:])
    return pivots, [tuple(r) for r in m[:rank]], clean


def _local_rows(ring: FiniteRing, rows, i: int):
    if ring.is_field:
        return rows
    q = ring.local_factors[i].p
    return [[x % q for x in r] for r in rows]


def span(ring: FiniteRing, gens: Iterable[Sequence[int]], n: int) -> Submodule:
    """Canonical form of the span of ``gens``; raises :class:`NotASummand`."""
    gens = [tuple(g) for g in gens]
    locals_ = []
    for i, lr in enumerate(ring.local_factors):
        piv, red, clean = _local_echelon(lr, _local_rows(ring, gens, i), n)
        if not clean:
            raise NotASummand("span has a non-free part")
        locals_.append(red)
    k = len(locals_[0])
    if any(len(r) != k for r in locals_):
        raise NotASummand("span is projective of non-constant rank")
    if len(locals_) == 1:
        rows = tuple(locals_[0])
    else:
        rows = tuple(
            tuple(ring.from_locals([loc[j][c] for loc in locals_]) for c in range(n))
            for j in range(k)
        )
    return Submodule(n, rows)


def try_span(ring, gens, n) -> Submodule | None:
    try:
        return span(ring, gens, n)
    except NotASummand:
        return None


def zero_submodule(n: int) -> Submodule:
    return Submodule(n, ())


def full_module(ring: FiniteRing, n: int) -> Submodule:
    return Submodule(n, tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n)))


@lru_cache(maxsize=200_000)
def _summand_data(ring: FiniteRing, W: Submodule):
    out = []
    for i, lr in enumerate(ring.local_factors):
        piv, red, _ = _local_echelon(lr, _local_rows(ring, W.rows, i), W.n)
        nonpiv = [c for c in range(W.n) if c not in piv]
        out.append((lr, piv, red, nonpiv))
    return tuple(out)


def _local_remainder(lr, piv, red, v):
    r = list(v)
    for c, row in zip(piv, red):
        f = r[c]
        if f:
            r = [lr.sub(x, lr.mul(f, y)) for x, y in zip(r, row)]
    return r


def contains(ring: FiniteRing, W: Submodule, v: Sequence[int]) -> bool:
    for i, (lr, piv, red, _) in enumerate(_summand_data(ring, W)):
        vv = v if ring.is_field else [x % lr.p for x in v]
        if any(_local_remainder(lr, piv, red, vv)):
            return False
    return True


def contains_submodule(ring: FiniteRing, W: Submodule, U: Submodule) -> bool:
    return all(contains(ring, W, r) for r in U.rows)


def project(ring: FiniteRing, W: Submodule, v: Sequence[int]) -> Vector:
    """Coordinates of the image of v in V/W (rank n - k).

    The quotient is identified with A^{n-k} through the standard basis vectors
    at the non-pivot columns of each local canonical form.
    """
    parts = []
    for lr, piv, red, nonpiv in _summand_data(ring, W):
        vv = v if ring.is_field else [x % lr.p for x in v]
        r = _local_remainder(lr, piv, red, vv)
        parts.append([r[c] for c in nonpiv])
    if len(parts) == 1:
        return tuple(parts[0])
    return tuple(ring.from_locals([p[j] for p in parts]) for j in range(W.n - W.rank))


def lift(ring: FiniteRing, W: Submodule, x: Sequence[int]) -> Vector:
    """A preimage in V of the quotient coordinates x (inverse of :func:`project` on the complement)."""
    parts = []
    for lr, piv, red, nonpiv in _summand_data(ring, W):
        v = [0] * W.n
        for c, xi in zip(nonpiv, x):
            v[c] = xi if ring.is_field else xi % lr.p
        parts.append(v)
    if len(parts) == 1:
        return tuple(parts[0])
    return tuple(ring.from_locals([p[c] for p in parts]) for c in range(W.n))


def add_submodules(ring: FiniteRing, *subs: Submodule) -> Submodule:
    n = subs[0].n
    return span(ring, [r for s in subs for r in s.rows], n)


# ---------------------------------------------------------------------------------------
# vectors and lines


def scale(ring: FiniteRing, a: int, v: Sequence[int]) -> Vector:
    return tuple(ring.mul(a, x) for x in v)


def vadd(ring: FiniteRing, u, v) -> Vector:
    return tuple(ring.add(x, y) for x, y in zip(u, v))


def is_unimodular(ring: FiniteRing, v: Sequence[int]) -> bool:
    """True iff v spans a free rank-1 summand with free quotient."""
    if ring.is_field:
        return any(v)
    for i, lr in enumerate(ring.local_factors):
        if not any(lr.is_unit(x % lr.p) for x in v):
            return False
    return True


def canonical_line(ring: FiniteRing, v: Sequence[int]) -> Line:
    if not is_unimodular(ring, v):
        raise NotASummand(f"{tuple(v)} is not unimodular")
    v = tuple(v)
    if ring.is_field:
        for x in v:
            if x:
                return Line(scale(ring, ring.inv(x), v))
    return Line(min(scale(ring, u, v) for u in ring.unit_values))


def line_submodule(ring: FiniteRing, L: Line) -> Submodule:
    return span(ring, [L.gen], len(L.gen))


def line_of_submodule(ring: FiniteRing, W: Submodule) -> Line:
    if W.rank != 1:
        raise ValueError("not a rank-one submodule")
    return canonical_line(ring, W.rows[0])


def enumerate_lines(ring: FiniteRing, n: int) -> list[Line]:
    """All lines of A^n in increasing canonical order."""
    if n < 1:
        raise ValueError("rank must be >= 1")
    return list(_lines(ring, n))


@lru_cache(maxsize=64)
def _lines(ring: FiniteRing, n: int) -> tuple[Line, ...]:
    get_budget().check("vectors", ring.cardinality**n)
    seen = set()
    for v in product(range(ring.cardinality), repeat=n):
        if is_unimodular(ring, v):
            seen.add(canonical_line(ring, v))
    return tuple(sorted(seen))


def in_general_position(ring: FiniteRing, q: Sequence[Line], n: int | None = None) -> bool:
    """True iff the lines of q (distinct) span a free summand of rank |q| with free quotient."""
    q = list(q)
    if not q:
        raise InvalidCardinality("empty set of lines")
    n = n if n is not None else q[0].rank
    if len(set(q)) != len(q):
        raise InvalidCardinality("lines are not distinct")
    if len(q) > n:
        raise InvalidCardinality(f"{len(q)} lines in rank {n}")
    W = try_span(ring, [L.gen for L in q], n)
    return W is not None and W.rank == len(q)


def enumerate_splittings(ring: FiniteRing, n: int) -> list[Splitting]:
    return list(_splittings(ring, n))


@lru_cache(maxsize=64)
def _splittings(ring: FiniteRing, n: int) -> tuple[Splitting, ...]:
    lines = _lines(ring, n)
    budget = get_budget()
    out = []

    def extend(chosen, start, gens):
        if len(chosen) == n:
            out.append(Splitting(tuple(chosen)))
            budget.check("simplices", len(out))
            return
        for idx in range(start, len(lines)):
            L = lines[idx]
            W = try_span(ring, gens + [L.gen], n)
            if W is not None and W.rank == len(chosen) + 1:
                extend(chosen + [L], idx + 1, gens + [L.gen])

    extend([], 0, [])
    return tuple(out)


def flag_from_lines(ring: FiniteRing, ordered: Sequence[Line]) -> Flag:
    n = ordered[0].rank
    steps = []
    gens = []
    for L in ordered:
        gens.append(L.gen)
        steps.append(span(ring, gens, n))
    return Flag(tuple(steps))


def enumerate_flags(ring: FiniteRing, n: int) -> list[Flag]:
    return list(_flags(ring, n))


@lru_cache(maxsize=64)
def _flags(ring: FiniteRing, n: int) -> tuple[Flag, ...]:
    lines = _lines(ring, n)
    budget = get_budget()
    level = {(): zero_submodule(n)}
    for _ in range(n):
        nxt = {}
        for steps, top in level.items():
            for L in lines:
                if contains(ring, top, L.gen):
                    continue
                W = try_span(ring, list(top.rows) + [L.gen], n)
                if W is None or W.rank != top.rank + 1:
                    continue
                nxt[steps + (W,)] = W
        budget.check("simplices", len(nxt))
        level = nxt
    return tuple(sorted(Flag(s) for s in level))


def flags_of_splitting(ring: FiniteRing, alpha: Splitting) -> list[Flag]:
    """The flags ``(L_s1, L_s1+L_s2, ...)`` over all orderings of the splitting, deduplicated."""
    return sorted({flag_from_lines(ring, perm) for perm in permutations(alpha.lines)})


def quotient_pushforward(ring: FiniteRing, L: Line, W: Submodule) -> Line:
    """Image of L in V/W as a line of A^{n-k}."""
    if contains(ring, W, L.gen):
        raise NotASummand("line lies in the submodule")
    x = project(ring, W, L.gen)
    if not is_unimodular(ring, x):
        raise NotASummand("image is not a direct summand")
    return canonical_line(ring, x)


# ---------------------------------------------------------------------------------------
# matrices (tuples of row tuples); g acts on column vectors v -> g v


def identity(n: int) -> tuple[Vector, ...]:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def mat_vec(ring: FiniteRing, M, v) -> Vector:
    out = []
    for row in M:
        s = 0
        for a, b in zip(row, v):
            if a and b:
                s = ring.add(s, ring.mul(a, b))
        out.append(s)
    return tuple(out)


def mat_mul(ring: FiniteRing, A, B):
    cols = list(zip(*B))
    return tuple(tuple(_dot(ring, r, c) for c in cols) for r in A)


def _dot(ring, r, c):
    s = 0
    for a, b in zip(r, c):
        if a and b:
            s = ring.add(s, ring.mul(a, b))
    return s


def det(ring: FiniteRing, M) -> int:
    """Leibniz expansion; matrices here are tiny."""
    n = len(M)
    total = 0
    for perm in permutations(range(n)):
        term = 1
        for i, j in enumerate(perm):
            term = ring.mul(term, M[i][j])
            if term == 0:
                break
        if term:
            if _perm_sign(perm) < 0:
                term = ring.neg(term)
            total = ring.add(total, term)
    return total


def _perm_sign(perm) -> int:
    perm = list(perm)
    sign = 1
    for i in range(len(perm)):
        while perm[i] != i:
            j = perm[i]
            perm[i], perm[j] = perm[j], perm[i]
            sign = -sign
    return sign


def is_invertible(ring: FiniteRing, M) -> bool:
    return ring.is_unit(det(ring, M))


def mat_inv(ring: FiniteRing, M):
    n = len(M)
    parts = []
    for i, lr in enumerate(ring.local_factors):
        aug = [list(r) + list(e) for r, e in zip(_local_rows(ring, M, i), identity(n))]
        piv, red, _ = _local_echelon(lr, aug, 2 * n)
        if piv[:n] != list(range(n)) or len(red) < n:
            raise NotInvertible("matrix is singular")
        parts.append([r[n:] for r in red[:n]])
    if len(parts) == 1:
        return tuple(tuple(r) for r in parts[0])
    return tuple(
        tuple(ring.from_locals([p[i][j] for p in parts]) for j in range(n)) for i in range(n)
    )


def transpose(M):
    return tuple(zip(*M))


def complete_to_basis(ring: FiniteRing, rows: Sequence[Vector], n: int) -> tuple[Vector, ...]:
    """Extend the rows of a free summand to an invertible n x n matrix (rows)."""
    W = span(ring, rows, n)
    extra = [lift(ring, W, e) for e in identity(n - W.rank)]
    return tuple(tuple(r) for r in rows) + tuple(extra)


def general_position_sets(ring: FiniteRing, n: int, size: int) -> list[tuple[Line, ...]]:
    """All ``size``-subsets of lines in general position (the set L_{size-1}(A^n))."""
    lines = _lines(ring, n)
    out = []
    budget = get_budget()

    def extend(chosen, start):
        if len(chosen) == size:
            out.append(tuple(chosen))
            budget.check("simplices", len(out))
            return
        for idx in range(start, len(lines)):
            cand = chosen + [lines[idx]]
            W = try_span(ring, [L.gen for L in cand], n)
            if W is not None and W.rank == len(cand):
                extend(cand, idx + 1)

    extend([], 0)
    return out


def pfs_from_blocks(ring: FiniteRing, blocks: Sequence[Sequence[Line]], n: int) -> PartialFlagSplit:
    """The element of the enriched poset given by an ordered partition of a splitting."""
    steps = []
    splits = []
    prev = zero_submodule(n)
    gens = []
    for block in blocks:
        splits.append(
            tuple(sorted(span(ring, list(prev.rows) + [L.gen], n) for L in block))
        )
        gens.extend(L.gen for L in block)
        prev = span(ring, gens, n)
        steps.append(prev)
    return PartialFlagSplit(tuple(steps), tuple(splits))


def e_leq(ring: FiniteRing, a: PartialFlagSplit, b: PartialFlagSplit) -> bool:
    """The order on the enriched poset, checked from its definition.

    ``a <= b`` iff the flag of a refines that of b and, for each step
    ``b_{i-1} = a_{j-1} < a_j < ... < a_l = b_i``, the lines of ``b``'s
    i-th splitting are partitioned by the a-step in which they first appear
    and map onto ``a``'s splittings of those steps.
    """
    a_steps = list(a.steps)
    pos = {s: k for k, s in enumerate(a_steps)}
    if any(s not in pos for s in b.steps):
        return False
    n = a_steps[-1].n
    prev_b = -1
    for i, top in enumerate(b.steps):
        hi = pos[top]
        lo = prev_b + 1
        # a-steps lo..hi refine b-step i
        remaining = list(b.splittings[i])
        for k in range(lo, hi + 1):
            below = a_steps[k - 1] if k > 0 else zero_submodule(n)
            here = a_steps[k]
            images = []
            rest = []
            for P in remaining:
                if contains_submodule(ring, here, P):
                    S = try_span(ring, list(below.rows) + list(P.rows), n)
                    if S is None:
                        return False
                    images.append(S)
                else:
                    rest.append(P)
            if sorted(images) != list(a.splittings[k]):
                return False
            remaining = rest
        if remaining:
            return False
        prev_b = hi
    return True
