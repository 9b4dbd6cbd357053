"""Exact linear algebra over Q and F_p on sparse dict vectors.

Used where only dimensions and ranks matter (spectral pages, rational probes).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable


@dataclass(frozen=True)
class Field:
    """Q when ``p == 0``, otherwise F_p."""

    p: int = 0

    @property
    def name(self) -> str:
        return "Q" if self.p == 0 else f"F{self.p}"

    def coerce(self, x):
        if self.p:
            return int(x) % self.p
        return Fraction(x)

    def inv(self, x):
        if self.p:
            return pow(x, -1, self.p)
        return 1 / x

    def norm(self, x):
        return x % self.p if self.p else x


QQ = Field(0)


def GF(p: int) -> Field:
    return Field(p)


def field_from_coeff(coeff) -> Field:
    from .homology import parse_coeff

    c = parse_coeff(coeff)
    if c == 0:
        raise ValueError("a field is required (Q or F_p)")
    return QQ if c < 0 else GF(c)


def _axpy(F: Field, y: dict, a, x: dict) -> None:
    """y += a * x in place."""
    for k, v in x.items():
        nv = F.norm(y.get(k, 0) + a * v)
        if nv:
            y[k] = nv
        else:
            y.pop(k, None)


class Subspace:
    """Span of sparse vectors, kept in echelon form keyed by pivot index.

    Each stored row remembers which input generators it combines (its tag),
    so membership queries can also return coordinates.
    """

    def __init__(self, F: Field, n: int):
        self.F = F
        self.n = n
        self.rows: dict[int, tuple[dict, dict]] = {}
        self.ngens = 0

    @property
    def dim(self) -> int:
        return len(self.rows)

    def _reduce(self, v: dict, track: bool = False):
        F = self.F
        v = {k: F.coerce(x) for k, x in v.items() if F.norm(x)}
        tag: dict = {}
        while True:
            hit = None
            for k in sorted(v):
                if k in self.rows:
                    hit = k
                    break
            if hit is None:
                return v, tag
            row, rtag = self.rows[hit]
            a = -v[hit]
            _axpy(F, v, a, row)
            if track:
                _axpy(F, tag, a, rtag)

    def add(self, v: dict) -> bool:
        """Insert v; returns True if it enlarged the span."""
        idx = self.ngens
        self.ngens += 1
        r, tag = self._reduce(v, track=True)
        if not r:
            return False
        F = self.F
        # r = v + (combination recorded in tag), so r's generator expansion is e_idx + tag
        tag[idx] = F.coerce(1)
        piv = min(r)
        s = F.inv(r[piv])
        r = {k: F.norm(x * s) for k, x in r.items()}
        tag = {k: F.norm(x * s) for k, x in tag.items() if F.norm(x * s)}
        self.rows[piv] = (r, tag)
        return True

    def contains(self, v: dict) -> bool:
        return not self._reduce(v)[0]

    def coordinates(self, v: dict) -> dict | None:
        """Coefficients of v on the inserted generators, or None if v is outside the span."""
        r, tag = self._reduce(v, track=True)
        if r:
            return None
        return {k: self.F.norm(-x) for k, x in tag.items() if self.F.norm(x)}

    def copy(self) -> "Subspace":
        s = Subspace(self.F, self.n)
        s.rows = {k: (dict(a), dict(b)) for k, (a, b) in self.rows.items()}
        s.ngens = self.ngens
        return s

    def extended(self, vecs: Iterable[dict]) -> "Subspace":
        s = self.copy()
        for v in vecs:
            s.add(v)
        return s

    def basis_dicts(self) -> list[dict]:
        return [dict(r) for _, (r, _) in sorted(self.rows.items())]

    @classmethod
    def spanned(cls, F: Field, n: int, vecs: Iterable[dict]) -> "Subspace":
        s = cls(F, n)
        for v in vecs:
            s.add(v)
        return s

    @classmethod
    def kernel(cls, F: Field, m, ncols: int, cols: Iterable[int] | None = None,
               rows: set[int] | None = None) -> "Subspace":
        """Kernel of m (SparseIntMatrix or ``{col: {row: v}}``) restricted to the given
        columns and projected to the given rows."""
        colmap = _columns_of(m)
        cols = list(range(ncols) if cols is None else cols)
        work = Subspace(F, 0)
        ker = cls(F, ncols)
        for j in cols:
            col = colmap.get(j, {})
            if rows is not None:
                col = {i: v for i, v in col.items() if i in rows}
            if not work.add(col):
                # the new column is a combination of earlier ones
                coeffs = work.coordinates(col)
                vec = {cols[k]: F.norm(-x) for k, x in coeffs.items()}
                vec[j] = F.coerce(1)
                ker.add(vec)
        return ker

    @classmethod
    def image(cls, F: Field, m, nrows: int, cols: Iterable[int] | None = None) -> "Subspace":
        colmap = _columns_of(m)
        cols = sorted(colmap) if cols is None else cols
        return cls.spanned(F, nrows, (colmap.get(j, {}) for j in cols))


def _columns_of(m) -> dict[int, dict[int, int]]:
    if isinstance(m, dict):
        return m
    cols: dict[int, dict[int, int]] = {}
    for i, j, v in m.entries():
        cols.setdefault(j, {})[i] = v
    return cols


def apply_columns(cols: dict[int, dict[int, int]], x: dict, F: Field) -> dict:
    """Matrix (given by columns) times a sparse vector over F."""
    out: dict = {}
    for j, a in x.items():
        c = cols.get(j)
        if c:
            _axpy(F, out, a, c)
    return out


def rank(F: Field, m) -> int:
    return Subspace.image(F, m, 0).dim


def integer_column_rank(F: Field, cols: Iterable[dict], nrows: int) -> int:
    """Rank over F of integer columns; Q goes through the integral SNF (same rank), F_p through sparse elimination."""
    from .snf import SparseIntMatrix, rank_mod_p, smith_normal_form

    cols = list(cols)
    m = SparseIntMatrix(nrows, len(cols), ((i, j, int(v)) for j, c in enumerate(cols) for i, v in c.items() if v))
    return smith_normal_form(m).rank if F.p == 0 else rank_mod_p(m, F.p)


def cycle_basis(F: Field, chains, deg: int) -> list[dict]:
    """Integer vectors spanning Z_deg over F for a ChainComplex."""
    if F.p == 0:
        return chains.snf(deg, transforms=True).kernel_basis()
    return Subspace.kernel(F, chains.boundary(deg), chains.rank(deg)).basis_dicts()


def boundary_columns(chains, deg: int) -> list[dict]:
    """Columns of the boundary C_{deg+1} -> C_deg."""
    return list(_columns_of(chains.boundary(deg + 1)).values())
