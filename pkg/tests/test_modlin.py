from itertools import combinations, permutations, product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from etb.modlin import (
    InvalidCardinality,
    NotASummand,
    Line,
    canonical_line,
    contains,
    det,
    enumerate_flags,
    enumerate_lines,
    enumerate_splittings,
    flags_of_splitting,
    identity,
    in_general_position,
    is_unimodular,
    line_submodule,
    quotient_pushforward,
    span,
)
from etb.ring import ring_make


def completes_to_invertible(R, rows, n):
    """Brute force: can the rows be extended to an invertible n x n matrix over R?"""
    k = len(rows)
    for extra in product(product(range(R.cardinality), repeat=n), repeat=n - k):
        if R.is_unit(det(R, tuple(rows) + tuple(extra))):
            return True
    return False


def test_unimodular_examples(F2, Z6):
    assert is_unimodular(F2, (1, 0))
    assert not is_unimodular(ring_make("zmod:4"), (2,))
    assert is_unimodular(Z6, (2, 3))
    assert completes_to_invertible(Z6, [(2, 3)], 2)


@pytest.mark.parametrize("desc,n", [("zmod:4", 2), ("zmod:6", 2), ("fq:3", 2), ("zmod:4", 1)])
def test_unimodular_matches_completion_oracle(desc, n):
    R = ring_make(desc)
    for v in product(range(R.cardinality), repeat=n):
        assert is_unimodular(R, v) == completes_to_invertible(R, [v], n)


@pytest.mark.parametrize("q,n", [(2, 2), (3, 2), (2, 3), (5, 2), (4, 2), (3, 3)])
def test_line_count_fields(q, n):
    R = ring_make(f"fq:{q}")
    assert len(enumerate_lines(R, n)) == (q**n - 1) // (q - 1)


def test_line_count_zmod6_crt(Z6):
    # P^1(F_2) x P^1(F_3)
    assert len(enumerate_lines(Z6, 2)) == 3 * 4


@pytest.mark.parametrize("desc,n", [("zmod:6", 2), ("zmod:4", 2), ("fq:4", 2)])
def test_lines_are_unit_orbits(desc, n):
    R = ring_make(desc)
    uni = [v for v in product(range(R.cardinality), repeat=n) if is_unimodular(R, v)]
    # units act freely on unimodular vectors
    assert len(enumerate_lines(R, n)) * R.unit_count == len(uni)
    for v in uni:
        L = canonical_line(R, v)
        assert L.gen == min(tuple(R.mul(u, x) for x in v) for u in R.unit_values)


def test_general_position(F2):
    e1, e2 = canonical_line(F2, (1, 0)), canonical_line(F2, (0, 1))
    assert in_general_position(F2, [e1, e2])
    with pytest.raises(InvalidCardinality):
        in_general_position(F2, [e1, e1])
    with pytest.raises(InvalidCardinality):
        in_general_position(F2, [e1, e2, canonical_line(F2, (1, 1))])


def test_general_position_zmod4():
    R = ring_make("zmod:4")
    a, b = canonical_line(R, (1, 0)), canonical_line(R, (1, 2))
    assert not in_general_position(R, [a, b])


@pytest.mark.parametrize("desc,n", [("zmod:4", 2), ("zmod:6", 2), ("fq:2", 3)])
def test_general_position_matches_oracle(desc, n):
    R = ring_make(desc)
    lines = enumerate_lines(R, n)
    pairs = list(combinations(lines, 2))[:60]
    for q in pairs:
        assert in_general_position(R, q) == completes_to_invertible(R, [L.gen for L in q], n)


@pytest.mark.parametrize("desc,n,count", [("fq:2", 2, 3), ("fq:3", 2, 6), ("fq:2", 3, 28)])
def test_splitting_counts(desc, n, count):
    R = ring_make(desc)
    spl = enumerate_splittings(R, n)
    assert len(spl) == count
    brute = [q for q in combinations(enumerate_lines(R, n), n) if R.is_unit(det(R, [L.gen for L in q]))]
    assert sorted(s.lines for s in spl) == sorted(brute)


def test_splitting_count_zmod6(Z6):
    # CRT: a splitting over F_2, one over F_3, and one of the 2 ways to pair their lines
    spl = enumerate_splittings(Z6, 2)
    assert len(spl) == 3 * 6 * 2
    brute = [q for q in combinations(enumerate_lines(Z6, 2), 2) if Z6.is_unit(det(Z6, [L.gen for L in q]))]
    assert sorted(s.lines for s in spl) == sorted(brute)


def test_splitting_subsets_in_general_position(F3):
    for s in enumerate_splittings(F3, 2):
        for k in (1, 2):
            for sub in combinations(s.lines, k):
                assert in_general_position(F3, sub)


@pytest.mark.parametrize("desc,n,count", [("fq:2", 2, 3), ("fq:3", 2, 4), ("fq:2", 3, 21), ("zmod:6", 2, 12)])
def test_flag_counts(desc, n, count):
    assert len(enumerate_flags(ring_make(desc), n)) == count


def test_flags_of_splitting(F2):
    std2 = enumerate_splittings(F2, 2)[0]
    assert len(flags_of_splitting(F2, std2)) == 2
    s3 = [s for s in enumerate_splittings(F2, 3) if s.lines == tuple(canonical_line(F2, e) for e in sorted(identity(3)))]
    assert len(s3) == 1
    fl = flags_of_splitting(F2, s3[0])
    assert len(fl) == 6
    allf = set(enumerate_flags(F2, 3))
    assert set(fl) <= allf
    # every step is spanned by lines of the splitting
    for f in fl:
        for step in f.steps:
            assert sum(contains(F2, step, L.gen) for L in s3[0].lines) == step.rank


def test_flags_of_splitting_rank_one(F3):
    (s,) = enumerate_splittings(F3, 1)
    assert len(flags_of_splitting(F3, s)) == 1


def test_quotient_pushforward_examples(F2, F3, Z6):
    W = span(F2, [(0, 1)], 2)
    assert quotient_pushforward(F2, canonical_line(F2, (1, 0)), W) == Line((1,))
    W3 = span(F3, [(0, 1)], 2)
    assert quotient_pushforward(F3, canonical_line(F3, (1, 1)), W3) == quotient_pushforward(
        F3, canonical_line(F3, (1, 0)), W3
    )
    with pytest.raises(NotASummand):
        quotient_pushforward(F2, canonical_line(F2, (0, 1)), W)
    # over Z/6: (2,3) modulo the line of (3,2)
    L, M = canonical_line(Z6, (2, 3)), canonical_line(Z6, (3, 2))
    ok = completes_to_invertible(Z6, [L.gen, M.gen], 2)
    if ok:
        assert quotient_pushforward(Z6, L, line_submodule(Z6, M)).rank == 1
    else:
        with pytest.raises(NotASummand):
            quotient_pushforward(Z6, L, line_submodule(Z6, M))


def test_pushforward_keeps_general_position(F3):
    n = 3
    lines = enumerate_lines(F3, n)
    checked = 0
    for q in combinations(lines, 3):
        if not in_general_position(F3, q):
            continue
        for i, L in enumerate(q):
            W = line_submodule(F3, L)
            rest = [quotient_pushforward(F3, M, W) for j, M in enumerate(q) if j != i]
            assert in_general_position(F3, rest)
        checked += 1
        if checked > 40:
            break


def test_pushforward_composition(F3):
    """(V/L1)/(image of L2) agrees with V/(L1+L2) on a third line."""
    e = identity(3)
    L1, L2, L3 = (canonical_line(F3, v) for v in (e[0], (1, 1, 0), (1, 2, 1)))
    a = quotient_pushforward(F3, L2, line_submodule(F3, L1))
    b = quotient_pushforward(F3, L3, line_submodule(F3, L1))
    two_step = quotient_pushforward(F3, b, line_submodule(F3, a))
    one_step = quotient_pushforward(F3, L3, span(F3, [L1.gen, L2.gen], 3))
    assert two_step == one_step


@given(st.lists(st.integers(0, 4), min_size=3, max_size=3).filter(any), st.integers(1, 4))
def test_canonical_line_scale_invariant(v, u):
    R = ring_make("fq:5")
    assert canonical_line(R, v) == canonical_line(R, [u * x % 5 for x in v])


@given(st.lists(st.integers(0, 5), min_size=2, max_size=2))
def test_canonical_line_zmod6(v):
    R = ring_make("zmod:6")
    if not is_unimodular(R, v):
        with pytest.raises(NotASummand):
            canonical_line(R, v)
        return
    L = canonical_line(R, v)
    assert L.gen in {tuple(R.mul(u, x) for x in v) for u in R.unit_values}
    assert canonical_line(R, L.gen) == L
