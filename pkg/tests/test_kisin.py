import pytest
from helpers import random_general_module, random_triangular, rng_for, with_extra_prec
from hypothesis import given
from hypothesis import strategies as st

from kisinram.algebra import standard_field
from kisinram.algebra.series import USeries
from kisinram.errors import KisinRamError
from kisinram.kisin import (
    base_change,
    change_basis,
    dual,
    e_height,
    make_module,
    mat_mul,
    rank_one,
    smith_normal_form,
    transpose,
    unit_inverse,
)

F3 = standard_field(3, 1)


def const(c, field=F3):
    return USeries.constant(field(c))


def test_snf_of_the_rank2_example():
    M = make_module(F3, 2, 1, [[{1: 1}, {0: 1}], [{}, {1: 1}]])
    snf = M.snf
    assert snf.exps == (0, 2)
    assert M.height() == 2


def test_snf_exponents_are_elementary_divisors():
    # diag(u, u^2) scrambled by unimodular matrices
    U = [[const(1), USeries(F3, {1: 1})], [const(0), const(1)]]
    V = [[const(1), const(0)], [USeries(F3, {0: 2, 2: 1}), const(1)]]
    D = [[USeries(F3, {1: 1}), const(0)], [const(0), USeries(F3, {2: 1})]]
    A = [[x.with_precision(10) for x in row] for row in mat_mul(mat_mul(U, D), V)]
    snf = smith_normal_form(A)
    assert snf.exps == (1, 2)
    assert snf.prec == 10
    assert e_height(A) == 2


def test_height_exceeded_is_rejected():
    with pytest.raises(KisinRamError) as exc:
        make_module(F3, 2, 1, [[{3: 1}]])
    assert exc.value.code == "height-exceeded"
    assert exc.value.context == {"height": 3, "er": 2}


def test_singular_matrix_is_rejected():
    with pytest.raises(KisinRamError) as exc:
        make_module(F3, 2, 1, [[{1: 1}, {1: 1}], [{1: 1}, {1: 1}]])
    assert exc.value.code == "singular-matrix"


def test_rank_one_validation():
    with pytest.raises(KisinRamError):
        rank_one(3, F3(1), 1, 2)
    with pytest.raises(KisinRamError):
        rank_one(1, F3(0), 1, 2)
    M = rank_one(2, F3(2), 2, 1)
    assert M.A[0][0].to_json() == [[2, 2]]


@given(st.integers(0, 10 ** 6))
def test_dual_pairs_to_scalar(seed):
    """A^t A^dual = u^(er) c0bar^(-r) I below the dual precision."""
    M = random_general_module(rng_for(seed))
    D = dual(M)
    prod = mat_mul(transpose(M.A), D.A)
    scale = USeries.constant(M.c0bar ** (-M.r)).shift(M.er)
    for i in range(M.d):
        for j in range(M.d):
            want = scale if i == j else USeries.zero(M.field)
            assert prod[i][j].agrees_with(want)
            assert prod[i][j].prec >= D.prec


@given(st.integers(0, 10 ** 6))
def test_dual_is_an_involution(seed):
    M = random_general_module(rng_for(seed))
    M = with_extra_prec(M, 2 * M.er)
    assert dual(dual(M)).same_matrix(M)


def test_dual_precision_exhausted():
    M = make_module(F3, 2, 1, [[{2: 1}]], prec=3)
    with pytest.raises(KisinRamError) as exc:
        dual(M)
    assert exc.value.code == "precision-exhausted"


def test_dual_of_rank_one():
    M = rank_one(1, F3(1), 2, 1)
    assert dual(M).A[0][0].truncate(5).to_json() == [[1, 2]]  # u^(er - s) / c0bar with c0bar = -1


@given(st.integers(0, 10 ** 6))
def test_change_basis_roundtrip(seed):
    rng = rng_for(seed)
    M = random_triangular(rng)
    M = with_extra_prec(M, 6)
    C = ((const(1), USeries(F3, {1: 1})), (const(0), const(2)))[: M.d]
    if M.d == 1:
        C = ((const(2),),)
    Cinv = unit_inverse([[x.with_precision(M.prec) for x in row] for row in C])
    back = change_basis(change_basis(M, C), Cinv)
    assert back.same_matrix(M)
    assert change_basis(M, C).snf.exps == M.snf.exps


def test_base_change_scales_e_and_substitutes():
    M = make_module(F3, 2, 1, [[{1: 1}, {0: 1}], [{}, {1: 2}]])
    B = base_change(M, 3)
    assert (B.e, B.r, B.prec) == (6, 1, 3 * M.prec)
    assert B.A[0][0].to_json() == [[3, 1]]
    assert B.A[1][1].to_json() == [[3, 2]]
    with pytest.raises(KisinRamError):
        base_change(M, 0)


def test_extension_field_module():
    F9 = standard_field(3, 2)
    M = make_module(F9, 1, 1, [[{1: [0, 1]}]])
    assert M.c0bar == F9(-1)
    D = dual(M)
    prod = (M.A[0][0] * D.A[0][0]).truncate(D.prec)
    assert prod.agrees_with(USeries.constant(F9(-1)).shift(1))
