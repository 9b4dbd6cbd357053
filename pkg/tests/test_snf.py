import random
from itertools import combinations
from math import gcd

import pytest
from hypothesis import given
from hypothesis import strategies as st

from etb.snf import (
    SparseIntMatrix,
    dense_smith_normal_form,
    invariant_factors,
    rank_mod_p,
    smith_normal_form,
)


def _det(m):
    n = len(m)
    if n == 0:
        return 1
    if n == 1:
        return m[0][0]
    return sum((-1) ** j * m[0][j] * _det([r[:j] + r[j + 1:] for r in m[1:]]) for j in range(n))


def determinantal_invariants(m):
    """Invariant factors as D_k / D_{k-1}, D_k the gcd of all k x k minors."""
    nr, nc = len(m), len(m[0]) if m else 0
    D = [1]
    for k in range(1, min(nr, nc) + 1):
        g = 0
        for rows in combinations(range(nr), k):
            for cols in combinations(range(nc), k):
                g = gcd(g, _det([[m[i][j] for j in cols] for i in rows]))
        if g == 0:
            break
        D.append(g)
    return tuple(D[k] // D[k - 1] for k in range(1, len(D)))


small = st.integers(1, 4).flatmap(
    lambda r: st.integers(1, 4).flatmap(
        lambda c: st.lists(st.lists(st.integers(-6, 6), min_size=c, max_size=c), min_size=r, max_size=r)
    )
)


@given(small)
def test_invariants_match_minors(m):
    assert invariant_factors(m) == determinantal_invariants(m)


@given(small)
def test_dense_oracle_matches_minors(m):
    assert dense_smith_normal_form(m) == determinantal_invariants(m)


def test_known_examples():
    assert invariant_factors([[2, 4, 4], [-6, 6, 12], [10, -4, -16]]) == (2, 6, 12)
    assert invariant_factors([[0, 0], [0, 0]]) == ()
    assert invariant_factors([[2, 0], [0, 3]]) == (1, 6)
    assert invariant_factors([[4]]) == (4,)


def _random_matrix(rng, nr, nc, density=0.4):
    return [[rng.randint(-9, 9) if rng.random() < density else 0 for _ in range(nc)] for _ in range(nr)]


@pytest.mark.parametrize("seed", range(40))
def test_sparse_matches_dense_random(seed):
    rng = random.Random(seed)
    m = _random_matrix(rng, rng.randint(1, 30), rng.randint(1, 30), rng.random())
    assert invariant_factors(m) == dense_smith_normal_form(m)


@pytest.mark.parametrize("seed", range(30))
def test_transforms(seed):
    rng = random.Random(100 + seed)
    nr, nc = rng.randint(1, 12), rng.randint(1, 12)
    dense = _random_matrix(rng, nr, nc, 0.5)
    M = SparseIntMatrix.from_dense(dense)
    res = smith_normal_form(M, transforms=True)
    # U M V is the pivot pattern
    for j in range(nc):
        col = M.apply(res.apply_V({j: 1}))
        got = res.apply_U(col)
        want = {r: d for r, c, d in res.pivots if c == j}
        assert got == want
    # kernel vectors
    ker = res.kernel_basis()
    assert len(ker) == nc - res.rank
    for v in ker:
        assert not M.apply(v)
    # inverses round-trip
    x = {j: rng.randint(-5, 5) for j in range(nc)}
    x = {k: v for k, v in x.items() if v}
    assert res.apply_Vinv(res.apply_V(x)) == x
    y = {i: rng.randint(-5, 5) for i in range(nr)}
    y = {k: v for k, v in y.items() if v}
    assert res.apply_Uinv(res.apply_U(y)) == y


@pytest.mark.parametrize("seed", range(20))
def test_in_image(seed):
    rng = random.Random(500 + seed)
    dense = _random_matrix(rng, 8, 6, 0.5)
    M = SparseIntMatrix.from_dense(dense)
    res = smith_normal_form(M, transforms=True)
    x = {j: rng.randint(-3, 3) for j in range(6)}
    assert res.in_image(M.apply(x))
    if res.rank < 8:
        # a vector outside the rational span
        for i in range(8):
            e = {i: 1}
            aug = SparseIntMatrix.from_dense([r + [1 if k == i else 0] for k, r in enumerate(dense)])
            if smith_normal_form(aug).rank > res.rank:
                assert not res.in_image(e)
                break
    # 2 * (M x) + M y scaled test of saturation: d * v in image does not imply v in image
    invs = res.invariants
    if invs and invs[-1] > 1:
        r, c, d = max(res.pivots, key=lambda t: abs(t[2]))
        v = res.apply_Uinv({r: 1})
        assert not res.in_image(v)
        assert res.in_image({k: d * a for k, a in v.items()})


@given(small, st.sampled_from([2, 3, 5]))
def test_rank_mod_p(m, p):
    M = SparseIntMatrix.from_dense(m)
    # rank over F_p equals number of invariant factors not divisible by p
    assert rank_mod_p(M, p) == sum(1 for d in invariant_factors(m) if d % p)


def test_triplet_round_trip():
    M = SparseIntMatrix.from_dense([[0, 2, 0], [1, 0, -3]])
    assert SparseIntMatrix.from_triplets(M.to_triplets()) == M
    assert M.transpose().transpose() == M
    assert M.nnz == 3
