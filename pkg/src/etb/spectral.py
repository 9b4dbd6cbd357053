"""The t-filtration of the enriched building and its spectral sequence over a field.

Pages come from the usual subquotient recipe on the filtered cellular chains:
with ``Z^r_p = {x in F_p : dx in F_{p-r}}``,

    E^r_p = Z^r_p / (Z^{r-1}_{p-1} + d Z^{r-1}_{p+r-1}),

and d^r is induced by d.  Each page carries explicit matrices for d^r on
chosen representatives, so ``d^r d^r = 0`` and ``E^{r+1} = H(E^r, d^r)``
can be checked directly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .complexes import CellStructure, build_e_poset, cells_of_et, product_embedding
from .fieldlin import (
    QQ,
    Field,
    Subspace,
    apply_columns,
    boundary_columns,
    cycle_basis,
    field_from_coeff,
    integer_column_rank,
)
from .homology import ChainComplex, cellular_chain_complex, homology, simplicial_chain_complex
from .modlin import general_position_sets, span
from .ring import FiniteRing


class FiltrationError(RuntimeError):
    pass


@dataclass
class FilteredComplex:
    chains: ChainComplex
    levels: list[list[int]]  # levels[k][i] = filtration level of the i-th k-cell

    def __post_init__(self):
        self._cols = {}
        self.check_monotone()

    @property
    def nlevels(self) -> int:
        return 1 + max((x for lv in self.levels for x in lv), default=0)

    def columns(self, k: int) -> dict[int, dict[int, int]]:
        if k not in self._cols:
            cols: dict[int, dict[int, int]] = {}
            for i, j, v in self.chains.boundary(k).entries():
                cols.setdefault(j, {})[i] = v
            self._cols[k] = cols
        return self._cols[k]

    def check_monotone(self) -> None:
        for k in range(1, self.chains.top + 1):
            for i, j, _ in self.chains.boundary(k).entries():
                if self.levels[k - 1][i] > self.levels[k][j]:
                    raise FiltrationError(f"boundary raises filtration in degree {k}")

    def level_counts(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for lv in self.levels:
            for x in lv:
                out[x] = out.get(x, 0) + 1
        return dict(sorted(out.items()))


def filter_et(cs: CellStructure) -> FilteredComplex:
    """Cellular chains of ET with each cell e(p) at level t(p) = rank W_1 - 1."""
    cc = cellular_chain_complex(cs)
    levels = [[cs.cells[cid].level for cid in cc.labels[k]] for k in range(cc.top + 1)]
    return FilteredComplex(cc, levels)


@dataclass
class SpectralPage:
    r: int
    dims: dict[tuple[int, int], int]
    ranks: dict[tuple[int, int], int]  # rank of d^r leaving (p, q)
    differentials: dict[tuple[int, int], list[list]] = field(default_factory=dict, repr=False)

    def dim(self, p: int, q: int) -> int:
        return self.dims.get((p, q), 0)

    def table(self) -> list[tuple[int, int, int, int]]:
        return [(self.r, p, q, d) for (p, q), d in sorted(self.dims.items())]


@dataclass
class SpectralResult:
    field: str
    pages: list[SpectralPage]
    einf: dict[tuple[int, int], int]
    homology_dims: list[int]
    checks: dict[str, bool]

    def page(self, r: int) -> SpectralPage:
        return self.pages[r - 1]

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def csv_rows(self) -> list[tuple]:
        rows = []
        for pg in self.pages:
            rows += pg.table()
        rows += [("inf", p, q, d) for (p, q), d in sorted(self.einf.items())]
        return rows


class _Engine:
    def __init__(self, fc: FilteredComplex, F: Field):
        self.fc = fc
        self.F = F
        self._Z: dict = {}
        self._D: dict = {}
        self._reps: dict = {}

    def F_ids(self, p: int, k: int) -> list[int]:
        return [i for i, lv in enumerate(self.fc.levels[k]) if lv <= p] if 0 <= k <= self.fc.chains.top else []

    def Z(self, r: int, p: int, k: int) -> Subspace:
        key = (r, p, k)
        if key not in self._Z:
            n = self.fc.chains.rank(k)
            if p < 0 or k < 0 or k > self.fc.chains.top:
                self._Z[key] = Subspace(self.F, n)
            else:
                cols = self.F_ids(p, k)
                if k == 0:
                    self._Z[key] = Subspace.spanned(self.F, n, ({i: 1} for i in cols))
                else:
                    rows = {i for i, lv in enumerate(self.fc.levels[k - 1]) if lv > p - r}
                    self._Z[key] = Subspace.kernel(self.F, self.fc.columns(k), n, cols, rows)
        return self._Z[key]

    def bd(self, k: int, x: dict) -> dict:
        if k <= 0:
            return {}
        return apply_columns(self.fc.columns(k), x, self.F)

    def D(self, r: int, p: int, k: int) -> Subspace:
        key = (r, p, k)
        if key not in self._D:
            base = self.Z(r - 1, p - 1, k)
            imgs = [self.bd(k + 1, z) for z in self.Z(r - 1, p + r - 1, k + 1).basis_dicts()]
            self._D[key] = base.extended(imgs)
        return self._D[key]

    def reps(self, r: int, p: int, k: int):
        """(representatives of a basis of E^r_{p,k-p}, space D + reps, generator index -> rep position)."""
        key = (r, p, k)
        if key not in self._reps:
            D = self.D(r, p, k)
            S = D.copy()
            reps, pos = [], {}
            for z in self.Z(r, p, k).basis_dicts():
                idx = S.ngens
                if S.add(z):
                    pos[idx] = len(reps)
                    reps.append(z)
            self._reps[key] = (reps, S, pos)
        return self._reps[key]

    def coords(self, r: int, p: int, k: int, v: dict) -> list:
        reps, S, pos = self.reps(r, p, k)
        c = S.coordinates(v)
        if c is None:
            raise FiltrationError("vector does not lie in Z^r")
        out = [self.F.coerce(0)] * len(reps)
        for g, a in c.items():
            if g in pos:
                out[pos[g]] = a
        return out


def _mat_rank(F: Field, m: list[list]) -> int:
    if not m or not m[0]:
        return 0
    cols = {j: {i: m[i][j] for i in range(len(m)) if F.norm(m[i][j])} for j in range(len(m[0]))}
    return Subspace.image(F, cols, len(m)).dim


def _mat_mul(F: Field, a: list[list], b: list[list], inner: int) -> list[list]:
    return [[F.norm(sum(a[i][t] * b[t][j] for t in range(inner))) for j in range(len(b[0]) if b else 0)] for i in range(len(a))]


def run_spectral(fc: FilteredComplex, coeff="q", max_page: int | None = None) -> SpectralResult:
    F = coeff if isinstance(coeff, Field) else field_from_coeff(coeff)
    eng = _Engine(fc, F)
    top = fc.chains.top
    L = fc.nlevels
    last = max_page or max(L, 1)
    pages = []
    for r in range(1, last + 1):
        dims, ranks, diffs = {}, {}, {}
        for k in range(top + 1):
            for p in range(L):
                reps, _, _ = eng.reps(r, p, k)
                if reps:
                    dims[(p, k - p)] = len(reps)
        for k in range(top + 1):
            for p in range(L):
                reps, _, _ = eng.reps(r, p, k)
                if not reps:
                    continue
                tgt, _, _ = eng.reps(r, p - r, k - 1)
                if not tgt:
                    continue
                cols = [eng.coords(r, p - r, k - 1, eng.bd(k, z)) for z in reps]
                mat = [[cols[j][i] for j in range(len(reps))] for i in range(len(tgt))]
                diffs[(p, k - p)] = mat
                rk = _mat_rank(F, mat)
                if rk:
                    ranks[(p, k - p)] = rk
        pages.append(SpectralPage(r, dims, ranks, diffs))
    einf = {}
    r_inf = L + 1
    for k in range(top + 1):
        for p in range(L):
            d = eng.Z(r_inf, p, k).dim - eng.D(r_inf, p, k).dim
            if d:
                einf[(p, k - p)] = d
    hd = [h.betti for h in homology(fc.chains, -1 if F.p == 0 else F.p)]
    checks = _page_checks(F, pages, einf, hd)
    return SpectralResult(F.name, pages, einf, hd, checks)


def _page_checks(F: Field, pages: list[SpectralPage], einf, hd) -> dict[str, bool]:
    ok_sq = True
    ok_next = True
    for i, pg in enumerate(pages):
        r = pg.r
        for (p, q), m in pg.differentials.items():
            nxt = pg.differentials.get((p - r, q + r - 1))
            if nxt and m and m[0]:
                prod = _mat_mul(F, nxt, m, len(m))
                if any(F.norm(x) for row in prod for x in row):
                    ok_sq = False
        if i + 1 < len(pages):
            nxt_page = pages[i + 1]
            keys = set(pg.dims) | set(nxt_page.dims)
            for p, q in keys:
                out_rk = pg.ranks.get((p, q), 0)
                in_rk = pg.ranks.get((p + r, q - r + 1), 0)
                if nxt_page.dim(p, q) != pg.dim(p, q) - out_rk - in_rk:
                    ok_next = False
    last = pages[-1]
    stable = last.dims == einf and not last.ranks
    conv = True
    for m, h in enumerate(hd):
        if sum(d for (p, q), d in einf.items() if p + q == m) != h:
            conv = False
    return {"d_squared_zero": ok_sq, "next_page_is_homology": ok_next, "stabilizes": stable, "converges": conv}


def spectral_for(ring: FiniteRing, n: int, coeff="q") -> tuple[FilteredComplex, SpectralResult]:
    fc = filter_et(cells_of_et(ring, n, check_spheres=False))
    return fc, run_spectral(fc, coeff)


# ------------------------------------------------------------------------------------
# structural E^1 and the bottom row


def _et_betti(ring: FiniteRing, m: int, F: Field) -> list[int]:
    """Betti numbers of ET(A^m) over F from the simplicial nerve; ET(A^0) is a point."""
    if m == 0:
        return [1]
    c = simplicial_chain_complex(build_e_poset(ring, m).poset.nerve())
    return [h.betti for h in homology(c, -1 if F.p == 0 else F.p)]


def e1_structural(ring: FiniteRing, n: int, coeff="q") -> dict[tuple[int, int], int]:
    """E^1_{r,s} = |L_r(V)| * dim H_s(ET(A^{n-r-1})) for all (r, s).

    Every V/W(q) with q in L_r(V) is free of rank n-r-1, so one quotient per r suffices.
    """
    F = coeff if isinstance(coeff, Field) else field_from_coeff(coeff)
    out = {}
    for r in range(n):
        count = len(general_position_sets(ring, n, r + 1))
        for s, b in enumerate(_et_betti(ring, n - r - 1, F)):
            if b * count:
                out[(r, s)] = b * count
    return out


@dataclass
class BottomRowReport:
    ring: str
    n: int
    field: str
    e1_dims: list[int]
    k_dims: list[int]
    e1_ranks: list[int]
    k_ranks: list[int]
    e2_dims: list[int]
    checks: dict[str, bool]

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        d["check"] = "bottom_row"
        return d


def bottom_row_check(ring: FiniteRing, n: int, coeff="q", result: SpectralResult | None = None) -> BottomRowReport:
    """Compare (E^1_{m,0}, d^1) with the oriented chains (C_m(V), d) of K(V) for m < n."""
    from .grassmann import build_k_complex

    F = coeff if isinstance(coeff, Field) else field_from_coeff(coeff)
    if n < 2:
        raise ValueError("n >= 2 required")
    if result is None:
        _, result = spectral_for(ring, n, F)
    e1 = result.page(1)
    K = build_k_complex(ring, n, n - 1)
    ck = simplicial_chain_complex(K.complex)
    e1_dims = [e1.dim(m, 0) for m in range(n)]
    k_dims = [ck.rank(m) for m in range(n)]
    e1_ranks = [e1.ranks.get((m, 0), 0) for m in range(1, n)]
    k_ranks = [Subspace.image(F, ck.boundary(m), ck.rank(m - 1)).dim for m in range(1, n)]
    checks = {"dims": e1_dims == k_dims, "ranks": e1_ranks == k_ranks}
    e2_dims = []
    if len(result.pages) >= 2:
        e2 = result.page(2)
        e2_dims = [e2.dim(m, 0) for m in range(n)]
    else:
        # a single filtration level: E^2 = E^1
        e2_dims = list(e1_dims)
    if F.p == 0:
        checks["e2_00_is_1"] = e2_dims[0] == 1
        checks["e2_m0_vanish"] = all(e2_dims[m] == 0 for m in range(1, n - 1))
    return BottomRowReport(ring.descriptor, n, F.name, e1_dims, k_dims, e1_ranks, k_ranks, e2_dims, checks)


def d1_connecting_ranks(fc: FilteredComplex, coeff="q") -> dict[tuple[int, int], int]:
    """Rank of d^1 computed as the connecting map H(F_p/F_{p-1}) -> H(F_{p-1}/F_{p-2}).

    Works on the associated graded pieces separately: pick cycle representatives
    in gr_p, apply the full boundary, keep the level p-1 part and measure its
    image in the homology of gr_{p-1}.
    """
    F = coeff if isinstance(coeff, Field) else field_from_coeff(coeff)
    top = fc.chains.top
    out = {}

    def ids(k, p):
        return [i for i, lv in enumerate(fc.levels[k]) if lv == p] if 0 <= k <= top else []

    def gr_cycles(k, p):
        cols = ids(k, p)
        n = fc.chains.rank(k)
        if k == 0:
            return Subspace.spanned(F, n, ({i: 1} for i in cols))
        return Subspace.kernel(F, fc.columns(k), n, cols, set(ids(k - 1, p)))

    def gr_boundaries(k, p):
        keep = set(ids(k, p))
        n = fc.chains.rank(k)
        imgs = []
        if k + 1 <= top:
            cols = fc.columns(k + 1)
            for j in ids(k + 1, p):
                imgs.append({i: v for i, v in cols.get(j, {}).items() if i in keep})
        return Subspace.spanned(F, n, imgs)

    for k in range(1, top + 1):
        for p in range(1, fc.nlevels):
            Z = gr_cycles(k, p)
            B = gr_boundaries(k, p)
            reps = []
            S = B.copy()
            for z in Z.basis_dicts():
                if S.add(z):
                    reps.append(z)
            if not reps:
                continue
            below = set(ids(k - 1, p - 1))
            Bt = gr_boundaries(k - 1, p - 1)
            imgs = []
            for z in reps:
                dz = apply_columns(fc.columns(k), z, F)
                imgs.append({i: v for i, v in dz.items() if i in below})
            rk = Bt.extended(imgs).dim - Bt.dim
            if rk:
                out[(p, k - p)] = rk
    return out


# ------------------------------------------------------------------------------------
# KH probe (observational)


def stabilization_poset_map(ring: FiniteRing, n: int, d: int):
    """E(A^n) -> E(A^d): prepend W = span(e_1..e_{d-n}) with its standard splitting as one step."""
    from .modlin import canonical_line, identity, pfs_from_blocks

    k = d - n
    if k < 1:
        raise ValueError("need d > n")
    W = span(ring, identity(d)[:k], d)
    phi, _ = product_embedding(ring, W)
    top = pfs_from_blocks(ring, [[canonical_line(ring, e) for e in identity(k)]], k)
    return lambda b: phi(top, b)


@dataclass
class KHReport:
    ring: str
    n: int
    degree: int
    field: str
    dim_h: int
    dim_h_next: int
    rank: int

    @property
    def dim_kh(self) -> int:
        return self.dim_h - self.rank

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        d.update(check="kh_probe", dim_kh=self.dim_kh, observational=True)
        return d


def kh_probe(ring: FiniteRing, n: int, m: int, coeff="q") -> KHReport:
    """KH_m(A^n): kernel of H_m(ET(A^n)) -> H_m(ET(A^{n+1})) under a rank-one extension."""
    from .equivariant import _chain_map_between

    F = coeff if isinstance(coeff, Field) else field_from_coeff(coeff)
    src = build_e_poset(ring, n).poset.nerve()
    tgt = build_e_poset(ring, n + 1).poset.nerve()
    cs, ct = simplicial_chain_complex(src), simplicial_chain_complex(tgt)
    f = _chain_map_between(ring, src, tgt, stabilization_poset_map(ring, n, n + 1), cs, ct)
    Zs = cycle_basis(F, cs, m)
    Bs = boundary_columns(cs, m)
    Bt = boundary_columns(ct, m)
    rb_s = integer_column_rank(F, Bs, cs.rank(m))
    rb_t = integer_column_rank(F, Bt, ct.rank(m))
    rz_t = ct.rank(m) - (integer_column_rank(F, boundary_columns(ct, m - 1), ct.rank(m - 1)) if m else 0)
    imgs = [f.apply(m, z) for z in Zs]
    rank = integer_column_rank(F, Bt + imgs, ct.rank(m)) - rb_t
    return KHReport(ring.descriptor, n, m, F.name, len(Zs) - rb_s, rz_t - rb_t, rank)
