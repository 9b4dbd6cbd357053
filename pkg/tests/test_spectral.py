import random

import pytest

from etb.complexes import SimplicialComplex, cells_of_et
from etb.fieldlin import QQ, GF, Subspace
from etb.homology import simplicial_chain_complex
from etb.ring import ring_make
from etb.spectral import (
    FilteredComplex,
    FiltrationError,
    bottom_row_check,
    d1_connecting_ranks,
    e1_structural,
    filter_et,
    kh_probe,
    run_spectral,
    spectral_for,
)


def einf_oracle(fc, F):
    """E^inf_{p,q} = dim im(H(F_p) -> H) - dim im(H(F_{p-1}) -> H)."""
    c = fc.chains
    out = {}
    for k in range(c.top + 1):
        n = c.rank(k)
        B = Subspace.image(F, c.boundary(k + 1), n) if k < c.top else Subspace(F, n)
        prev = B.dim
        for p in range(fc.nlevels):
            cols = [i for i, lv in enumerate(fc.levels[k]) if lv <= p]
            if k == 0:
                Z = Subspace.spanned(F, n, ({i: 1} for i in cols))
            else:
                Z = Subspace.kernel(F, c.boundary(k), n, cols)
            cur = B.extended(Z.basis_dicts()).dim
            if cur - prev:
                out[(p, k - p)] = cur - prev
            prev = cur
    return out


def _vertex_filtered(k, vlevel):
    """Simplicial chains filtered by the max level of a simplex's vertices."""
    c = simplicial_chain_complex(k)
    levels = [[max(vlevel[v] for v in s) for s in k.simplices(d)] for d in range(k.dimension + 1)]
    return FilteredComplex(c, levels)


def test_et_f2_2_pages():
    fc, res = spectral_for(ring_make("fq:2"), 2, "q")
    e1 = res.page(1)
    assert (e1.dim(0, 0), e1.dim(1, 0)) == (3, 3)
    e2 = res.page(2)
    assert (e2.dim(0, 0), e2.dim(1, 0)) == (1, 1)
    assert res.einf == {(0, 0): 1, (1, 0): 1} and res.homology_dims == [1, 1]


def test_level_partition_f2_3():
    fc = filter_et(cells_of_et(ring_make("fq:2"), 3, check_spheres=False))
    assert fc.level_counts() == {0: 42, 1: 21, 2: 28}
    assert set(fc.levels[0]) == {0} and set(fc.levels[2]) == {2}


def test_pages_f2_3_fp2_regression():
    fc, res = spectral_for(ring_make("fq:2"), 3, "fp:2")
    assert [sorted(p.dims.items()) for p in res.pages] == [
        [((0, 0), 7), ((0, 1), 7), ((1, 0), 21), ((2, 0), 28)],
        [((0, 0), 1), ((0, 1), 7), ((2, 0), 13)],
        [((0, 0), 1), ((0, 1), 1), ((2, 0), 7)],
    ]
    assert [sorted(p.ranks.items()) for p in res.pages] == [[((1, 0), 6), ((2, 0), 15)], [((2, 0), 6)], []]
    assert res.homology_dims == [1, 1, 7] and res.passed


def test_pages_f2_3_rational():
    fc, res = spectral_for(ring_make("fq:2"), 3, "q")
    assert res.einf == {(0, 0): 1, (2, 0): 6}
    assert res.page(2).ranks == {(2, 0): 7}


@pytest.mark.parametrize("desc,n", [("fq:2", 3), ("fq:3", 2), ("fq:2", 2)])
@pytest.mark.parametrize("coeff", ["q", "fp:2", "fp:3"])
def test_et_matches_oracles(desc, n, coeff):
    R = ring_make(desc)
    fc, res = spectral_for(R, n, coeff)
    assert res.passed
    F = QQ if coeff == "q" else GF(int(coeff[3:]))
    assert res.einf == einf_oracle(fc, F)
    assert res.page(1).dims == e1_structural(R, n, coeff)
    assert {k: v for k, v in res.page(1).ranks.items() if v} == d1_connecting_ranks(fc, coeff)
    assert len(res.pages) <= n


def test_e1_examples():
    assert e1_structural(ring_make("fq:2"), 2) == {(0, 0): 3, (1, 0): 3}
    assert e1_structural(ring_make("fq:3"), 2) == {(0, 0): 4, (1, 0): 6}


@pytest.mark.parametrize("desc,n", [("fq:2", 3), ("fq:3", 2)])
def test_e1_vanishing_pattern(desc, n):
    e1 = e1_structural(ring_make(desc), n)
    for (r, s), d in e1.items():
        assert r + s < n - 1 or (r, s) == (n - 1, 0)


def test_single_level_filtration():
    k = SimplicialComplex.from_maximal(range(4), [(0, 1), (1, 2), (2, 0), (2, 3)])
    fc = _vertex_filtered(k, [0] * 4)
    res = run_spectral(fc, "q")
    assert res.page(1).dims == {(0, 0): 1, (0, 1): 1}
    assert res.einf == res.page(1).dims


def test_random_filtrations_against_oracle():
    rng = random.Random(7)
    for trial in range(15):
        nv = rng.randint(4, 7)
        tris = [tuple(sorted(rng.sample(range(nv), 3))) for _ in range(rng.randint(2, 6))]
        k = SimplicialComplex.from_maximal(range(nv), tris)
        fc = _vertex_filtered(k, [rng.randint(0, 3) for _ in range(nv)])
        for F, coeff in ((QQ, "q"), (GF(2), "fp:2")):
            res = run_spectral(fc, coeff)
            assert res.passed
            assert res.einf == einf_oracle(fc, F)


def test_filtration_must_be_monotone():
    k = SimplicialComplex.from_maximal(range(2), [(0, 1)])
    c = simplicial_chain_complex(k)
    with pytest.raises(FiltrationError):
        FilteredComplex(c, [[0, 1], [0]])


@pytest.mark.parametrize("desc,n", [("fq:2", 2), ("fq:3", 2), ("fq:2", 3)])
def test_bottom_row(desc, n):
    rep = bottom_row_check(ring_make(desc), n, "q")
    assert rep.passed
    assert "e2_00_is_1" in rep.checks
    assert bottom_row_check(ring_make(desc), n, "fp:2").passed


def test_bottom_row_needs_rank_two():
    with pytest.raises(ValueError):
        bottom_row_check(ring_make("fq:2"), 1)


def test_kh_probe_regression():
    rep = kh_probe(ring_make("fq:2"), 2, 1)
    assert rep.to_dict()["observational"]
    assert rep.dim_h == 1 and rep.dim_kh == 1
