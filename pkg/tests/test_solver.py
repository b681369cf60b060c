from collections import Counter
from fractions import Fraction

import pytest
from helpers import plug_back_valuation, random_triangular, rng_for
from hypothesis import given
from hypothesis import strategies as st

from kisinram.algebra import fp, standard_field
from kisinram.algebra.series import PuiseuxSeries, USeries
from kisinram.errors import KisinRamError
from kisinram.kisin import dual, make_module
from kisinram.ramification import point_break, tbar
from kisinram.solver import (
    QuotientAlgebra,
    in_quotient_kernel,
    kernel_over_quotient,
    residual_valuation,
    solve_additive_scalar,
    solve_triangular,
    triangular_order,
)

F3 = standard_field(3, 1)
U = USeries(F3, {1: 1})


def mono(g, c=1, field=F3):
    return PuiseuxSeries(field, {Fraction(g): c})


def rank2_example():
    return make_module(F3, 2, 1, [[{1: 1}, {0: 1}], [{}, {1: 1}]])


def test_homogeneous_rank_one():
    part, homog = solve_additive_scalar(U, PuiseuxSeries.zero(F3), 3)
    assert part.is_zero()
    assert homog.agrees_with(mono(Fraction(1, 2)))
    assert homog.prec >= 3


def test_wild_particular_solution():
    h = mono(Fraction(1, 2))
    with pytest.raises(KisinRamError) as exc:
        solve_additive_scalar(U, h, 3)
    assert exc.value.code == "denominator-overflow"
    part, _ = solve_additive_scalar(U, h, 3, on_overflow="truncate")
    assert part.exponents()[:4] == [Fraction(1, 6), Fraction(7, 18), Fraction(25, 54), Fraction(79, 162)]
    assert part.prec == Fraction(241, 486)
    # exponents accumulate below 1/2 and the precision never reaches it
    assert part.prec < Fraction(1, 2)
    assert residual_ok(part, U, h)


def residual_ok(x, g, h):
    r = x ** 3 - g * x - h
    return r.truncate(x.prec).is_zero()


def test_tame_particular_solution():
    # h = u^4 lies above p * v(g)/(p-1) = 3/2: leading term -u^3
    part, _ = solve_additive_scalar(U, USeries(F3, {4: 1}), 6)
    assert part.leading() == (Fraction(3), F3(-1))
    assert residual_ok(part, U, USeries(F3, {4: 1}))


def test_boundary_case_uses_artin_schreier():
    # h = u^(3/2): c^3 - c = 1 has no root in F_3, so the solution lives in F_27
    part, homog = solve_additive_scalar(U, mono(Fraction(3, 2)), 4)
    assert part.field.m == 3
    c = part.leading()[1]
    assert part.leading()[0] == Fraction(1, 2)
    assert c ** 3 - c == part.field.one


def test_tbar_over_f9():
    t = tbar(2, 1, F3(-1))
    assert t.field.m == 2
    assert t.valuation() == 1
    c = t.leading()[1]
    assert c * c == t.field(-1)
    g = USeries.constant(t.field(-1)).shift(2)
    assert (t ** 3 - g * t).truncate(t.prec).is_zero()


def test_rank_one_solutions():
    M = make_module(F3, 2, 1, [[{1: 1}]])
    sols = solve_triangular(M)
    assert len(sols) == 3
    vals = sorted(point_break(x) for c, x in sols.points() if any(c))
    assert vals == [Fraction(1, 2)] * 2


def test_rank2_profile():
    sols = solve_triangular(rank2_example())
    profile = Counter(point_break(x) for _, x in sols.points())
    assert profile == {Fraction(1, 6): 6, Fraction(1, 2): 2, None: 1}


def test_etale_points_are_units():
    M = make_module(F3, 2, 1, [[{0: 1}, {}], [{}, {0: 2}]])
    sols = solve_triangular(M)
    assert all(point_break(x) == 0 for c, x in sols.points() if any(c))


def test_solver_is_deterministic():
    a = solve_triangular(rank2_example())
    b = solve_triangular(rank2_example())
    assert a.basis == b.basis and a.field == b.field


def test_dual_is_solved_after_reordering():
    D = dual(rank2_example())
    assert triangular_order(D) == (1, 0)
    sols = solve_triangular(D)
    for vec in sols.basis:
        assert plug_back_valuation(D.A, vec, sols.prec) is None


def test_not_triangular_is_rejected():
    M = make_module(F3, 2, 1, [[{1: 1}, {0: 1}], [{0: 1}, {1: 1}]])
    with pytest.raises(KisinRamError) as exc:
        solve_triangular(M)
    assert exc.value.code == "not-triangular"


@given(st.integers(0, 10 ** 6))
def test_random_solutions_plug_back(seed):
    M = random_triangular(rng_for(seed), dmax=3)
    sols = solve_triangular(M)
    for _, x in sols.points():
        assert plug_back_valuation(M.A, x, sols.prec) is None
        assert all(c.valuation_lower_bound() >= 0 for c in x)
        v = point_break(x)
        assert v is None or v <= Fraction(M.er, M.p - 1)


def test_residual_valuation_examples():
    M = make_module(F3, 2, 1, [[{1: 1}]])
    zero = (PuiseuxSeries.zero(F3),)
    assert residual_valuation(M, zero) is None
    assert residual_valuation(M, (mono(Fraction(1, 2)),)) is None
    # (u^(1/2) + u)^3 - u (u^(1/2) + u) = u^3 - u^2
    x = (mono(Fraction(1, 2)) + mono(1),)
    assert residual_valuation(M, x) == 2
    assert plug_back_valuation(M.A, x, 10) == 2


def test_quotient_kernel_rank_one():
    M = make_module(F3, 2, 1, [[{1: 1}]])
    alg = QuotientAlgebra(F3, 2, Fraction(3))
    ker = kernel_over_quotient(M, alg)
    assert in_quotient_kernel(M, alg, (mono(Fraction(1, 2)),))
    assert in_quotient_kernel(M, alg, (mono(Fraction(5, 2)),))  # truncation artifact
    assert not in_quotient_kernel(M, alg, (mono(1),))
    rows = [alg.vector(v[0]) for v in ker]
    assert fp.rank(rows + [alg.vector(mono(Fraction(1, 2)))], 3) == fp.rank(rows, 3)
    assert fp.rank(rows + [alg.vector(mono(1))], 3) == fp.rank(rows, 3) + 1


def test_quotient_kernel_etale():
    M = make_module(F3, 2, 1, [[{0: 1}]])
    alg = QuotientAlgebra(F3, 1, Fraction(2))
    ker = kernel_over_quotient(M, alg)
    consts = [v for v in ker if v[0].exponents() == [0]]
    assert consts and all(in_quotient_kernel(M, alg, (PuiseuxSeries(F3, {0: c}),)) for c in range(3))


def test_rank2_truncations_in_kernel_up_to_their_precision():
    sols = solve_triangular(rank2_example())
    T = Fraction(int(sols.prec * 18), 18)
    alg = QuotientAlgebra(sols.field, 18, T)
    assert all(in_quotient_kernel(sols.module, alg, x) for _, x in sols.points())


def test_unrepresentable_exponent():
    alg = QuotientAlgebra(F3, 2, Fraction(2))
    with pytest.raises(KisinRamError) as exc:
        alg.vector(mono(Fraction(1, 3)))
    assert exc.value.code == "exponent-not-representable"


def test_wild_points_do_not_fit_a_fixed_denominator():
    # the x_1 != 0 points have exponents 1/6, 7/18, 25/54, ...: no D works up to T = 2
    sols = solve_triangular(rank2_example())
    alg = QuotientAlgebra(sols.field, 18, Fraction(2))
    with pytest.raises(KisinRamError) as exc:
        in_quotient_kernel(sols.module, alg, sols.combination((1, 0)))
    assert exc.value.code == "exponent-not-representable"
    assert in_quotient_kernel(sols.module, alg, sols.combination((0, 1)))
