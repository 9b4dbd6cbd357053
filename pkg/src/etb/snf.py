"""Smith normal form of sparse integer matrices.

The sparse routine eliminates unit pivots first, choosing among the sparsest
columns the sparsest row (a Markowitz-style rule), and falls back to
Euclidean pivoting on the smallest remaining entry.  When asked, it records
the elementary row and column operations so that ``U M V = D`` can be
replayed on vectors without materializing U or V.

:func:`dense_smith_normal_form` is a separate textbook implementation kept as
an oracle for tests.
"""

from __future__ import annotations

import heapq
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .ring import factorize


class SparseIntMatrix:
    """Integer matrix stored as ``{row: {col: value}}`` without zero entries."""

    __slots__ = ("nrows", "ncols", "rows")

    def __init__(self, nrows: int, ncols: int, entries: Iterable[tuple[int, int, int]] = ()):
        self.nrows = nrows
        self.ncols = ncols
        self.rows: dict[int, dict[int, int]] = {}
        for i, j, v in entries:
            if not (0 <= i < nrows and 0 <= j < ncols):
                raise IndexError((i, j))
            if v:
                r = self.rows.setdefault(i, {})
                s = r.get(j, 0) + v
                if s:
                    r[j] = s
                else:
                    del r[j]
        self.rows = {i: r for i, r in self.rows.items() if r}

    @classmethod
    def from_dense(cls, m: Sequence[Sequence[int]]) -> "SparseIntMatrix":
        nrows = len(m)
        ncols = len(m[0]) if nrows else 0
        return cls(nrows, ncols, ((i, j, v) for i, r in enumerate(m) for j, v in enumerate(r) if v))

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "SparseIntMatrix":
        return cls(nrows, ncols)

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    def entries(self):
        for i, r in self.rows.items():
            for j, v in r.items():
                yield i, j, v

    @property
    def nnz(self) -> int:
        return sum(len(r) for r in self.rows.values())

    def to_dense(self) -> list[list[int]]:
        out = [[0] * self.ncols for _ in range(self.nrows)]
        for i, j, v in self.entries():
            out[i][j] = v
        return out

    def transpose(self) -> "SparseIntMatrix":
        return SparseIntMatrix(self.ncols, self.nrows, ((j, i, v) for i, j, v in self.entries()))

    def copy(self) -> "SparseIntMatrix":
        m = SparseIntMatrix(self.nrows, self.ncols)
        m.rows = {i: dict(r) for i, r in self.rows.items()}
        return m

    def matmul(self, other: "SparseIntMatrix") -> "SparseIntMatrix":
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch")
        out: dict[int, dict[int, int]] = {}
        for i, r in self.rows.items():
            acc: dict[int, int] = defaultdict(int)
            for k, v in r.items():
                orow = other.rows.get(k)
                if orow:
                    for j, w in orow.items():
                        acc[j] += v * w
            acc = {j: v for j, v in acc.items() if v}
            if acc:
                out[i] = acc
        m = SparseIntMatrix(self.nrows, other.ncols)
        m.rows = out
        return m

    def apply(self, vec: dict[int, int] | Sequence[int]) -> dict[int, int]:
        """Matrix times a (sparse or dense) column vector, as a sparse dict."""
        if not isinstance(vec, dict):
            vec = {j: v for j, v in enumerate(vec) if v}
        out = {}
        for i, r in self.rows.items():
            s = 0
            for j, v in r.items():
                x = vec.get(j)
                if x:
                    s += v * x
            if s:
                out[i] = s
        return out

    def is_zero(self) -> bool:
        return not self.rows

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SparseIntMatrix)
            and self.shape == other.shape
            and self.rows == other.rows
        )

    def __repr__(self) -> str:
        return f"SparseIntMatrix({self.nrows}x{self.ncols}, nnz={self.nnz})"

    def to_triplets(self) -> str:
        """Sparse triplet text, one ``row col value`` per line after a shape header."""
        lines = [f"{self.nrows} {self.ncols}"]
        lines += [f"{i} {j} {v}" for i, j, v in sorted(self.entries())]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_triplets(cls, text: str) -> "SparseIntMatrix":
        it = [ln.split() for ln in text.strip().splitlines() if ln.strip()]
        nr, nc = map(int, it[0])
        return cls(nr, nc, ((int(a), int(b), int(c)) for a, b, c in it[1:]))


@dataclass
class SNFResult:
    """Outcome of :func:`smith_normal_form`.

    ``pivots`` lists ``(row, col, d)``: after the recorded operations the matrix
    has the entry d at (row, col) and zeros elsewhere.  The diagonal values
    need not form a divisibility chain; :attr:`invariants` does.
    """

    shape: tuple[int, int]
    pivots: list[tuple[int, int, int]]
    row_ops: list[tuple[int, int, int]] | None = None
    col_ops: list[tuple[int, int, int]] | None = None
    _pivot_rows: set = field(default=None, repr=False)
    _pivot_cols: set = field(default=None, repr=False)

    @property
    def rank(self) -> int:
        return len(self.pivots)

    @property
    def invariants(self) -> tuple[int, ...]:
        return invariant_factors_from_diagonal(abs(d) for _, _, d in self.pivots)

    @property
    def pivot_rows(self) -> set[int]:
        if self._pivot_rows is None:
            self._pivot_rows = {r for r, _, _ in self.pivots}
        return self._pivot_rows

    @property
    def pivot_cols(self) -> set[int]:
        if self._pivot_cols is None:
            self._pivot_cols = {c for _, c, _ in self.pivots}
        return self._pivot_cols

    def _need(self):
        if self.row_ops is None:
            raise ValueError("transforms were not recorded")

    # U acts on the row space (length nrows), V on the column space (length ncols)
    def apply_U(self, y: dict[int, int]) -> dict[int, int]:
        self._need()
        y = {k: v for k, v in y.items() if v}
        for t, s, f in self.row_ops:
            ys = y.get(s)
            if ys:
                v = y.get(t, 0) + f * ys
                if v:
                    y[t] = v
                else:
                    y.pop(t, None)
        return y

    def apply_Uinv(self, y: dict[int, int]) -> dict[int, int]:
        self._need()
        y = {k: v for k, v in y.items() if v}
        for t, s, f in reversed(self.row_ops):
            ys = y.get(s)
            if ys:
                v = y.get(t, 0) - f * ys
                if v:
                    y[t] = v
                else:
                    y.pop(t, None)
        return y

    def apply_V(self, x: dict[int, int]) -> dict[int, int]:
        self._need()
        x = {k: v for k, v in x.items() if v}
        for t, s, f in reversed(self.col_ops):
            xt = x.get(t)
            if xt:
                v = x.get(s, 0) + f * xt
                if v:
                    x[s] = v
                else:
                    x.pop(s, None)
        return x

    def apply_Vinv(self, z: dict[int, int]) -> dict[int, int]:
        self._need()
        z = {k: v for k, v in z.items() if v}
        for t, s, f in self.col_ops:
            zt = z.get(t)
            if zt:
                v = z.get(s, 0) - f * zt
                if v:
                    z[s] = v
                else:
                    z.pop(s, None)
        return z

    def kernel_basis(self) -> list[dict[int, int]]:
        """A Z-basis of the (saturated) kernel: V applied to the non-pivot unit vectors."""
        return [self.apply_V({j: 1}) for j in range(self.shape[1]) if j not in self.pivot_cols]

    def kernel_coords(self, z: dict[int, int]) -> dict[int, int]:
        """Coordinates of a kernel vector z with respect to :meth:`kernel_basis` (keyed by column)."""
        w = self.apply_Vinv(z)
        if any(w.get(c) for c in self.pivot_cols):
            raise ValueError("vector is not in the kernel")
        return w

    def in_image(self, y: dict[int, int]) -> bool:
        """Whether y lies in the integer column span of the matrix."""
        u = self.apply_U(y)
        piv = {r: d for r, _, d in self.pivots}
        for r, v in u.items():
            d = piv.get(r)
            if d is None or v % d:
                return False
        return True


def invariant_factors_from_diagonal(diag: Iterable[int]) -> tuple[int, ...]:
    """Invariant factors d1 | d2 | ... of a diagonal matrix with nonzero entries."""
    diag = [abs(d) for d in diag if d]
    ones = sum(1 for d in diag if d == 1)
    rest = [d for d in diag if d != 1]
    by_prime: dict[int, list[int]] = defaultdict(list)
    for d in rest:
        for p, e in factorize(d):
            by_prime[p].append(p**e)
    width = max((len(v) for v in by_prime.values()), default=0)
    factors = [1] * width
    for p, powers in by_prime.items():
        powers.sort(reverse=True)
        for i, pe in enumerate(powers):
            factors[width - 1 - i] *= pe
    return (1,) * (ones + len(rest) - width) + tuple(factors)


class _Work:
    """Mutable sparse state for elimination."""

    def __init__(self, m: SparseIntMatrix, record: bool):
        self.rows = {i: dict(r) for i, r in m.rows.items()}
        self.cols: dict[int, set[int]] = defaultdict(set)
        for i, r in self.rows.items():
            for j in r:
                self.cols[j].add(i)
        self.row_ops = [] if record else None
        self.col_ops = [] if record else None

    def row_add(self, t: int, s: int, f: int):
        """row_t += f * row_s"""
        if not f:
            return
        rt = self.rows.setdefault(t, {})
        for j, v in self.rows[s].items():
            nv = rt.get(j, 0) + f * v
            if nv:
                if j not in rt:
                    self.cols[j].add(t)
                rt[j] = nv
            else:
                del rt[j]
                self.cols[j].discard(t)
        if not rt:
            del self.rows[t]
        if self.row_ops is not None:
            self.row_ops.append((t, s, f))

    def col_add(self, t: int, s: int, f: int):
        """col_t += f * col_s"""
        if not f:
            return
        ct = self.cols[t]
        for i in list(self.cols[s]):
            r = self.rows[i]
            nv = r.get(t, 0) + f * r[s]
            if nv:
                r[t] = nv
                ct.add(i)
            else:
                del r[t]
                ct.discard(i)
                if not r:
                    del self.rows[i]
        if self.col_ops is not None:
            self.col_ops.append((t, s, f))

    def remove(self, r: int, c: int):
        row = self.rows.pop(r)
        for j in row:
            self.cols[j].discard(r)
        self.cols.pop(c, None)


def _eliminate_unit(w: _Work, r: int, c: int, record: bool):
    p = w.rows[r][c]
    for k in list(w.cols[c]):
        if k != r:
            w.row_add(k, r, -w.rows[k][c] * p)  # p = +-1 so p == 1/p
    if record:
        for j, v in list(w.rows[r].items()):
            if j != c:
                w.col_add(j, c, -v * p)
    w.remove(r, c)
    return p


def _eliminate_general(w: _Work, r: int, c: int):
    """Euclidean reduction until (r, c) is alone in its row and column.

    Column operations are always performed here since they feed back into rows.
    """
    while True:
        p = w.rows[r][c]
        for k in list(w.cols[c]):
            if k == r:
                continue
            q = w.rows[k][c] // p
            if q:
                w.row_add(k, r, -q)
        rem = [k for k in w.cols[c] if k != r]
        if rem:
            r = min(rem, key=lambda k: abs(w.rows[k][c]))
            continue
        for j, v in list(w.rows[r].items()):
            if j == c:
                continue
            q = v // p
            if q:
                w.col_add(j, c, -q)
        rem = [j for j in w.rows[r] if j != c]
        if rem:
            c = min(rem, key=lambda j: abs(w.rows[r][j]))
            continue
        break
    d = w.rows[r][c]
    w.remove(r, c)
    return r, c, d


def smith_normal_form(m: SparseIntMatrix, transforms: bool = False) -> SNFResult:
    """Diagonalize m by unimodular row/column operations.

    With ``transforms=False`` column operations that only clear a finished
    pivot row are skipped; the invariants are unaffected.
    """
    w = _Work(m, transforms)
    pivots: list[tuple[int, int, int]] = []
    heap = [(len(rs), c) for c, rs in w.cols.items() if rs]
    heapq.heapify(heap)
    deferred = set()
    while True:
        while heap:
            cnt, c = heapq.heappop(heap)
            rs = w.cols.get(c)
            if not rs:
                continue
            if len(rs) != cnt:
                heapq.heappush(heap, (len(rs), c))
                continue
            best = None
            for i in rs:
                v = w.rows[i][c]
                if v == 1 or v == -1:
                    ln = len(w.rows[i])
                    if best is None or ln < best[0] or (ln == best[0] and i < best[1]):
                        best = (ln, i)
            if best is None:
                deferred.add(c)
                continue
            r = best[1]
            touched = set()
            for j in w.rows[r]:
                touched.add(j)
            p = _eliminate_unit(w, r, c, transforms)
            pivots.append((r, c, p))
            for j in touched:
                if j != c and w.cols.get(j):
                    heapq.heappush(heap, (len(w.cols[j]), j))
                    deferred.discard(j)
        # retry deferred columns that picked up unit entries through fill-in
        again = [c for c in deferred if w.cols.get(c) and any(abs(w.rows[i][c]) == 1 for i in w.cols[c])]
        if again:
            for c in again:
                deferred.discard(c)
                heapq.heappush(heap, (len(w.cols[c]), c))
            continue
        if not w.rows:
            break
        # general pivot: smallest absolute value, Markowitz tie-break
        best = None
        for i, row in w.rows.items():
            for j, v in row.items():
                key = (abs(v), (len(row) - 1) * (len(w.cols[j]) - 1), i, j)
                if best is None or key < best:
                    best = key
        _, _, r, c = best
        r, c, d = _eliminate_general(w, r, c)
        pivots.append((r, c, d))
        for j in list(w.cols):
            if w.cols[j]:
                heapq.heappush(heap, (len(w.cols[j]), j))
        deferred.clear()
    return SNFResult(m.shape, pivots, w.row_ops, w.col_ops)


def invariant_factors(m) -> tuple[int, ...]:
    if not isinstance(m, SparseIntMatrix):
        m = SparseIntMatrix.from_dense(m)
    return smith_normal_form(m).invariants


def rank_mod_p(m: SparseIntMatrix, p: int) -> int:
    """Rank over F_p by sparse elimination."""
    rows = {}
    for i, r in m.rows.items():
        rr = {j: v % p for j, v in r.items() if v % p}
        if rr:
            rows[i] = rr
    cols: dict[int, set[int]] = defaultdict(set)
    for i, r in rows.items():
        for j in r:
            cols[j].add(i)
    rank = 0
    while rows:
        c = min((c for c in cols if cols[c]), key=lambda c: len(cols[c]))
        r = min(cols[c], key=lambda i: len(rows[i]))
        prow = rows.pop(r)
        for j in prow:
            cols[j].discard(r)
        inv = pow(prow[c], -1, p)
        for k in list(cols[c]):
            row = rows[k]
            f = row[c] * inv % p
            for j, v in prow.items():
                nv = (row.get(j, 0) - f * v) % p
                if nv:
                    if j not in row:
                        cols[j].add(k)
                    row[j] = nv
                else:
                    if j in row:
                        del row[j]
                        cols[j].discard(k)
            if not row:
                del rows[k]
        cols.pop(c, None)
        rank += 1
    return rank


# ------------------------------------------------------------------------------------
# dense oracle


def dense_smith_normal_form(m: Sequence[Sequence[int]]) -> tuple[int, ...]:
    """Textbook SNF on a dense list-of-lists copy; returns the nonzero invariant factors."""
    a = [list(r) for r in m]
    nr = len(a)
    nc = len(a[0]) if nr else 0
    out = []
    t = 0
    while t < min(nr, nc):
        # smallest nonzero entry of the trailing block
        best = None
        for i in range(t, nr):
            for j in range(t, nc):
                if a[i][j] and (best is None or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        i, j = best
        a[t], a[i] = a[i], a[t]
        for row in a:
            row[t], row[j] = row[j], row[t]
        while True:
            done = True
            p = a[t][t]
            for i in range(t + 1, nr):
                q = a[i][t] // p
                if q:
                    a[i] = [x - q * y for x, y in zip(a[i], a[t])]
                if a[i][t]:
                    done = False
            for j in range(t + 1, nc):
                q = a[t][j] // p
                if q:
                    for row in a:
                        row[j] -= q * row[t]
                if a[t][j]:
                    done = False
            if done:
                # divisibility of the trailing block
                bad = None
                for i in range(t + 1, nr):
                    for j in range(t + 1, nc):
                        if a[i][j] % p:
                            bad = i
                            break
                    if bad is not None:
                        break
                if bad is None:
                    break
                a[t] = [x + y for x, y in zip(a[t], a[bad])]
                continue
            # move the smallest entry of row/column t to the pivot
            cand = [(abs(a[i][t]), i, t) for i in range(t, nr) if a[i][t]]
            cand += [(abs(a[t][j]), t, j) for j in range(t, nc) if a[t][j]]
            _, i, j = min(cand)
            a[t], a[i] = a[i], a[t]
            for row in a:
                row[t], row[j] = row[j], row[t]
        out.append(abs(a[t][t]))
        t += 1
    return tuple(out)


def snf_counts(invs: Iterable[int]) -> Counter:
    return Counter(invs)
