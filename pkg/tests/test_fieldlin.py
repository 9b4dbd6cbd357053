from fractions import Fraction

from hypothesis import given
from hypothesis import strategies as st

from etb.fieldlin import GF, QQ, Subspace, apply_columns, field_from_coeff, integer_column_rank, rank
from etb.snf import SparseIntMatrix, rank_mod_p, smith_normal_form

mats = st.integers(1, 7).flatmap(
    lambda r: st.integers(1, 7).flatmap(
        lambda c: st.lists(st.lists(st.integers(-4, 4), min_size=c, max_size=c), min_size=r, max_size=r)
    )
)


def _cols(rows):
    return {j: {i: rows[i][j] for i in range(len(rows)) if rows[i][j]} for j in range(len(rows[0]))}


def _sparse(rows):
    return SparseIntMatrix(len(rows), len(rows[0]), ((i, j, v) for i, r in enumerate(rows) for j, v in enumerate(r) if v))


def test_field_parsing():
    assert field_from_coeff("q") == QQ
    assert field_from_coeff("fp:3") == GF(3)
    assert GF(5).inv(2) == 3 and QQ.inv(Fraction(2)) == Fraction(1, 2)


@given(mats)
def test_rank_agrees_with_snf(rows):
    m = _sparse(rows)
    assert rank(QQ, m) == smith_normal_form(m).rank
    assert rank(GF(3), m) == rank_mod_p(m, 3)
    cols = list(_cols(rows).values())
    assert integer_column_rank(QQ, cols, len(rows)) == smith_normal_form(m).rank
    assert integer_column_rank(GF(2), cols, len(rows)) == rank_mod_p(m, 2)


@given(mats, st.sampled_from([0, 2, 5]))
def test_kernel(rows, p):
    F = GF(p) if p else QQ
    ncols = len(rows[0])
    cols = _cols(rows)
    ker = Subspace.kernel(F, cols, ncols)
    assert ker.dim + rank(F, _sparse(rows)) == ncols
    for v in ker.basis_dicts():
        assert apply_columns(cols, v, F) == {}


@given(mats)
def test_coordinates_reconstruct(rows):
    F = GF(7)
    vecs = list(_cols(rows).values())
    S = Subspace.spanned(F, len(rows), vecs)
    target = {}
    for k, v in enumerate(vecs):
        for i, x in v.items():
            target[i] = (target.get(i, 0) + (k + 1) * x) % 7
    target = {i: x for i, x in target.items() if x}
    co = S.coordinates(target)
    assert co is not None
    back = {}
    for k, a in co.items():
        for i, x in vecs[k].items():
            back[i] = (back.get(i, 0) + a * x) % 7
    assert {i: x for i, x in back.items() if x} == target


def test_membership():
    S = Subspace.spanned(QQ, 3, [{0: 1, 1: 1}, {1: 1, 2: 1}])
    assert S.contains({0: 1, 2: -1})
    assert not S.contains({0: 1})
    assert S.coordinates({0: 1}) is None
