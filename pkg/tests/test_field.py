import itertools

import pytest
from helpers import naive_mul, naive_pow
from hypothesis import given
from hypothesis import strategies as st

from kisinram.algebra import (
    FieldDesc,
    compositum,
    embed,
    ff_pth_root,
    ff_solve_artin_schreier,
    ff_solve_kummer,
    standard_field,
)
from kisinram.algebra import field as field_mod
from kisinram.algebra import fp
from kisinram.errors import KisinRamError

FIELDS = [(3, 1), (3, 2), (3, 3), (5, 1), (5, 2), (7, 2)]


def elements(p, m):
    return st.lists(st.integers(0, p - 1), min_size=m, max_size=m)


# -- F_p linear algebra ------------------------------------------------------


@given(st.lists(st.lists(st.integers(0, 4), min_size=3, max_size=3), min_size=1, max_size=4))
def test_kernel_vectors_are_killed(rows):
    p = 5
    ker = fp.kernel(rows, p)
    for v in ker:
        assert all(sum(a * b for a, b in zip(row, v)) % p == 0 for row in rows)
    assert len(ker) + fp.rank(rows, p) == 3


@given(st.lists(st.lists(st.integers(0, 2), min_size=3, max_size=3), min_size=3, max_size=3))
def test_inverse_or_singular(rows):
    p = 3
    if fp.rank(rows, p) < 3:
        return
    inv = fp.inverse(rows, p)
    prod = [[sum(rows[i][k] * inv[k][j] for k in range(3)) % p for j in range(3)] for i in range(3)]
    assert prod == [[int(i == j) for j in range(3)] for i in range(3)]


def test_solve_inconsistent_system():
    assert fp.solve([[1, 1], [1, 1]], [0, 1], 3) is None
    x = fp.solve([[1, 1], [0, 1]], [2, 1], 3)
    assert [(x[0] + x[1]) % 3, x[1] % 3] == [2, 1]


def test_span_basis_is_canonical():
    a = fp.span_basis([[1, 2, 0], [2, 1, 0]], 3, 3)
    b = fp.span_basis([[1, 2, 0]], 3, 3)
    assert a == b


@pytest.mark.parametrize("p,m", [(3, 2), (3, 3), (5, 2)])
def test_irreducibility_against_root_count(p, m):
    # degree <= 3: irreducible iff no root in F_p
    for low in itertools.product(range(p), repeat=m):
        f = list(low) + [1]
        has_root = any(sum(c * x ** i for i, c in enumerate(f)) % p == 0 for x in range(p))
        assert fp.is_irreducible(f, p) == (not has_root)


# -- fields ----------------------------------------------------------------


@pytest.mark.parametrize("p,m", FIELDS)
def test_standard_modulus_is_lexicographically_smallest(p, m):
    F = standard_field(p, m)
    if m == 1:
        assert F.modulus == (0, 1)
        return
    for low in itertools.product(range(p), repeat=m):
        if low[0] == 0:
            continue
        cand = tuple(low) + (1,)
        if fp.is_irreducible(list(cand), p):
            assert cand == F.modulus
            break


def test_reducible_modulus_rejected():
    with pytest.raises(KisinRamError) as exc:
        FieldDesc(3, 2, (1, 0, 1 + 1))  # x^2 + 2x + 1 = (x + 1)^2
    assert exc.value.code == "bad-field"
    with pytest.raises(KisinRamError):
        FieldDesc(4, 1, (0, 1))


@pytest.mark.parametrize("p,m", FIELDS)
def test_multiplication_matches_naive_oracle(p, m):
    F = standard_field(p, m)

    @given(elements(p, m), elements(p, m))
    def check(a, b):
        assert list((F(a) * F(b)).coeffs) == naive_mul(a, b, F.modulus, p)

    check()


@pytest.mark.parametrize("p,m", FIELDS)
def test_field_axioms_and_frobenius(p, m):
    F = standard_field(p, m)

    @given(elements(p, m), elements(p, m), st.integers(0, 40))
    def check(a, b, n):
        x, y = F(a), F(b)
        assert (x + y).frobenius() == x.frobenius() + y.frobenius()
        assert list((x ** n).coeffs) == naive_pow(a, n, F.modulus, p)
        if x:
            assert x * x.inverse() == F.one
            assert x ** (F.order - 1) == F.one

    check()


def test_elements_enumeration_and_int_roundtrip():
    F = standard_field(3, 2)
    elems = list(F.elements())
    assert len(set(elems)) == 9
    assert [int(x) for x in elems] == list(range(9))


@pytest.mark.parametrize("p,m", [(3, 1), (3, 2), (5, 1), (5, 2)])
def test_kummer_roots(p, m):
    F = standard_field(p, m)
    for a in list(F.elements())[1:]:
        g, K = ff_solve_kummer(a)
        assert g ** (p - 1) == embed(a, K)
        # minimal: no smaller extension in the tower holds a root
        if K != F:
            assert all(x ** (p - 1) != a for x in list(F.elements())[1:])


def test_kummer_of_zero_rejected():
    with pytest.raises(KisinRamError):
        ff_solve_kummer(standard_field(3, 1).zero)


@pytest.mark.parametrize("p,m", [(3, 1), (3, 2), (5, 1)])
def test_artin_schreier_roots(p, m):
    F = standard_field(p, m)
    for a in F.elements():
        for b in F.elements():
            c, K = ff_solve_artin_schreier(a, b)
            aa, bb = embed(a, K), embed(b, K)
            assert c ** p - aa * c == bb
            brute = [x for x in F.elements() if x ** p - a * x == b]
            if brute:
                assert K == F and int(c) == min(int(x) for x in brute)


def test_pth_root_is_inverse_of_frobenius():
    F = standard_field(5, 2)
    for x in F.elements():
        assert ff_pth_root(x).frobenius() == x


def test_embedding_is_a_ring_homomorphism():
    F, K = standard_field(3, 2), standard_field(3, 4)
    for x in F.elements():
        for y in F.elements():
            assert embed(x * y, K) == embed(x, K) * embed(y, K)
            assert embed(x + y, K) == embed(x, K) + embed(y, K)


def test_compositum_degree():
    assert compositum(standard_field(3, 2), standard_field(3, 3)).m == 6
    assert compositum(standard_field(3, 2), standard_field(3, 1)) == standard_field(3, 2)


def test_extension_degree_cap():
    F = standard_field(3, field_mod.MAX_FIELD_DEGREE // 2 + 1)
    gens = [x for x in itertools.islice(F.elements(), 1, 200)]
    with pytest.raises(KisinRamError) as exc:
        for a in gens:
            ff_solve_kummer(a)
    assert exc.value.code == "field-degree-exceeded"
