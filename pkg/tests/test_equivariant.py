import random
from math import factorial

import pytest

from etb.complexes import build_e_poset, build_fl, build_spl
from etb.equivariant import (
    act,
    act_on_complex,
    brute_force_gl,
    chain_action,
    coinvariants,
    elementary_matrix,
    elementary_triviality_check,
    enumerate_group,
    generators,
    oriented_chain_module,
    pgl_normalize,
    stabilization_probe,
    stabilizer_of_splitting,
    standard_splitting,
)
from etb.homology import simplicial_chain_complex
from etb.modlin import enumerate_flags, enumerate_lines, enumerate_splittings, mat_mul
from etb.ring import ring_make


def _scalar(R, u, n):
    return tuple(tuple(u if i == j else 0 for j in range(n)) for i in range(n))


@pytest.mark.parametrize("desc,n,order", [("fq:2", 2, 6), ("fq:3", 2, 48), ("fq:2", 3, 168), ("zmod:4", 2, 96)])
def test_gl_orders(desc, n, order):
    R = ring_make(desc)
    G = enumerate_group(R, n)
    assert len(G) == order
    if R.cardinality ** (n * n) <= 512:
        assert sorted(G) == sorted(brute_force_gl(R, n))


def test_elementary_generate_sl(F3):
    assert len(enumerate_group(F3, 2, "elementary")) == 24


def test_elementary_matrix_rejects_diagonal(F2):
    with pytest.raises(ValueError):
        elementary_matrix(F2, 2, 0, 0, 1)


def test_unknown_flavor(F2):
    with pytest.raises(ValueError):
        generators(F2, 2, "nope")


@pytest.mark.parametrize("desc,n", [("fq:3", 2), ("fq:2", 3), ("zmod:6", 2)])
def test_action_is_a_left_action(desc, n):
    R = ring_make(desc)
    rng = random.Random(1)
    gens = generators(R, n).elements
    objs = enumerate_lines(R, n)[:6] + enumerate_flags(R, n)[:6] + enumerate_splittings(R, n)[:6]
    objs += build_e_poset(R, n).elements[:8]
    for _ in range(10):
        g, h = rng.choice(gens), rng.choice(gens)
        gh = mat_mul(R, g, h)
        for x in objs:
            assert act(R, gh, x) == act(R, g, act(R, h, x))
            assert act(R, _scalar(R, 1, n), x) == x


@pytest.mark.parametrize("desc,n", [("fq:3", 2), ("fq:5", 2), ("fq:3", 3)])
def test_scalars_act_trivially(desc, n):
    R = ring_make(desc)
    objs = enumerate_lines(R, n)[:10] + build_e_poset(R, n).elements[:20] if n == 2 else enumerate_lines(R, n)[:10]
    for u in R.unit_values:
        s = _scalar(R, u, n)
        assert all(act(R, s, x) == x for x in objs)


def test_pgl_normalize(F5):
    g = ((2, 1), (3, 4))
    h = pgl_normalize(F5, g)
    assert h[0][0] == 1
    assert pgl_normalize(F5, tuple(tuple(F5.mul(3, x) for x in r) for r in g)) == h


@pytest.mark.parametrize("desc,n", [("fq:3", 2), ("fq:2", 3)])
def test_stabilizer_order(desc, n):
    R = ring_make(desc)
    beta = standard_splitting(R, n)
    brute = brute_force_gl(R, n)
    st = stabilizer_of_splitting(R, beta, brute)
    assert len(st) == (R.cardinality - 1) ** n * factorial(n)
    # the stabilizer is generated by torus and permutation matrices
    assert sorted(st) == enumerate_group(R, n, "stabilizer")


@pytest.mark.parametrize("build", [build_fl, build_spl])
def test_action_is_simplicial_and_chain(F3, build):
    k = build(F3, 2)
    c = simplicial_chain_complex(k)
    for g in generators(F3, 2).elements:
        perm = act_on_complex(F3, g, k)
        assert sorted(perm) == list(range(len(k.vertices)))
        assert chain_action(F3, g, k, c).is_chain_map()


def _orbit_coinvariants(R, k, d, group):
    """Oracle: Z per orbit of d-simplices, Z/2 when some group element reverses an orientation."""
    from etb.equivariant import _perm_sign

    simp = k.simplices(d)
    seen, free, two = set(), 0, 0
    for s in simp:
        if s in seen:
            continue
        flips = False
        for g in group:
            img = [k.index[act(R, g, k.vertices[v])] for v in s]
            order = sorted(range(len(img)), key=img.__getitem__)
            key = tuple(img[i] for i in order)
            seen.add(key)
            if key == s and _perm_sign(order) == -1:
                flips = True
        two += flips
        free += not flips
    return free, two


@pytest.mark.parametrize("desc,build,d", [("fq:2", build_fl, 1), ("fq:3", build_fl, 1), ("fq:3", build_spl, 1),
                                          ("fq:3", build_spl, 2), ("fq:2", build_spl, 1)])
def test_coinvariants_match_orbit_oracle(desc, build, d):
    R = ring_make(desc)
    k = build(R, 2)
    G = enumerate_group(R, 2)
    free, two = _orbit_coinvariants(R, k, d, G)
    for flavor_gens in (generators(R, 2).elements, G):
        h = coinvariants(oriented_chain_module(R, k, d, flavor_gens))
        assert h.betti == free
        assert sorted(h.torsion) == [2] * two


@pytest.mark.parametrize("q", [2, 3])
def test_elementary_triviality(q):
    rep = elementary_triviality_check(ring_make(f"fq:{q}"), 2)
    assert rep.passed and rep.image_rank >= 1
    assert len(rep.verdicts) == len(rep.generators) == 6 * (q - 1)


def test_stabilization_probe_regression(F2):
    rep = stabilization_probe(F2, 1, 3)
    d = rep.to_dict()
    assert d["observational"] and (rep.dim_source, rep.dim_coinvariants, rep.dim_target) == (1, 0, 0)
    with pytest.raises(ValueError):
        stabilization_probe(F2, 2, 2)
