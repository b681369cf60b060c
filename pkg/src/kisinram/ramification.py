"""Lower breaks, the mod p pairing, and the upper filtration by duality.

The lower filtration is read off solution valuations: a point x lies in
H_i exactly when min_j v(x_j) >= i. The upper filtration is defined as
H^j = (H(M^dual)_{l(j)+})^perp with l(j) = er/(p-1) - j/p, using the pairing
h(x, y) = sum_i x_i y_i, which always lands in F_p * tbar.
"""

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .algebra import fp
from .algebra.field import compositum
from .algebra.series import INF, USeries
from .errors import KisinRamError
from .kisin import dual
from .solver import homogeneous_solution, solve_triangular, triangular_order

MAX_COMPLETIONS = 20_000

PASS, FAIL, UNRESOLVED = "pass", "fail", "unresolved"


def tau(M):
    """er/(p-1): the valuation of tbar and the bound for lower breaks."""
    return Fraction(M.er, M.p - 1)


def point_break(x):
    """min_j v(x_j); None for the zero point. Raises when unresolved."""
    best = None
    floor = INF
    for xj in x:
        v = xj.valuation()
        if v is None:
            floor = min(floor, xj.prec)
        elif best is None or v < best:
            best = v
    if best is None:
        if floor == INF:
            return None
        raise KisinRamError("precision-exhausted", f"point indistinguishable from 0 below u^{floor}")
    if best > floor:
        raise KisinRamError("precision-exhausted", f"break {best} not separated from precision {floor}")
    return best


@dataclass(frozen=True)
class BreakData:
    """Lower jumps with point multiplicities, plus the dimension function."""

    jumps: tuple  # ((i, multiplicity), ...) increasing
    d: int
    p: int

    def dim(self, i, strict=False):
        """dim H_i (or H_{i+} when strict)."""
        if i <= 0 and not strict:
            return self.d
        count = 1 + sum(m for j, m in self.jumps if (j > i if strict else j >= i))
        k = 0
        while self.p ** k < count:
            k += 1
        return k

    def dim_function(self):
        """[(i, dim H_i)] at 0 and just after each jump: the step function."""
        out = [(Fraction(0), self.d)]
        for j, _ in self.jumps:
            out.append((j, self.dim(j, strict=True)))
        return out

    def values(self):
        return [j for j, _ in self.jumps]

    def scaled(self, n):
        return BreakData(tuple((j * n, m) for j, m in self.jumps), self.d, self.p)

    def to_json(self):
        return {
            "jumps": [[j.numerator, j.denominator, m] for j, m in self.jumps],
            "dims": [[i.numerator, i.denominator, k] for i, k in self.dim_function()],
        }


def _point_breaks(sols):
    out = []
    for coeffs, x in sols.points():
        if any(coeffs):
            out.append((coeffs, point_break(x)))
    return out


def lower_breaks(sols):
    counts = {}
    for coeffs, mu in _point_breaks(sols):
        if mu is None:
            raise KisinRamError("precision-exhausted", f"nonzero point {coeffs} evaluates to 0")
        counts[mu] = counts.get(mu, 0) + 1
    return BreakData(tuple(sorted(counts.items())), sols.dim, sols.field.p)


def lower_subgroup(sols, i, strict=False):
    """Basis (coefficient vectors w.r.t. sols.basis) of H_i, or H_{i+} if strict."""
    i = Fraction(i)
    members = [c for c, mu in _point_breaks(sols) if (mu > i if strict else mu >= i)]
    return fp.span_basis(members, sols.field.p, sols.dim)


def tbar(e, r, c0bar, prec=None):
    """The fixed nonzero solution of h^p = (u^(er) / c0bar^r) h."""
    p = c0bar.field.p
    g = USeries.constant(c0bar ** (-r)).shift(e * r)
    prec = Fraction(e * r, p - 1) + e if prec is None else prec
    return homogeneous_solution(g, prec)


# -- pairing ----------------------------------------------------------------


def pair_points(x, y, t, level):
    """h(x, y) / tbar in F_p, or None when h is not resolved at ``level``."""
    field = compositum(x[0].field, y[0].field, t.field)
    h = None
    for a, b in zip(x, y):
        term = a.embed(field) * b.embed(field)
        h = term if h is None else h + term
    v = h.valuation()
    if v is not None and v < level:
        raise KisinRamError("pairing-inconsistent", f"pairing value has valuation {v} < {level}")
    if v == level:
        c = h.coefficient(level) / t.embed(field).coefficient(level)
        if not c.in_prime_field():
            raise KisinRamError("pairing-inconsistent", "pairing value is not an F_p-multiple of tbar")
        return int(c)
    if h.prec > level:
        return 0
    return None


@dataclass(frozen=True)
class GramMatrix:
    """Gram matrix of the pairing on solution bases; None marks unresolved entries."""

    entries: tuple
    tbar_used: object
    p: int

    @property
    def unknown(self):
        return [(i, j) for i, row in enumerate(self.entries) for j, x in enumerate(row) if x is None]

    @property
    def resolved(self):
        return not self.unknown

    def transpose(self):
        return GramMatrix(tuple(zip(*self.entries)), self.tbar_used, self.p)

    def completions(self, invertible=True):
        """All fillings of unresolved entries (optionally only invertible ones); None if too many."""
        holes = self.unknown
        if self.p ** len(holes) > MAX_COMPLETIONS:
            return None
        out = []
        for vals in itertools.product(range(self.p), repeat=len(holes)):
            G = [list(row) for row in self.entries]
            for (i, j), v in zip(holes, vals):
                G[i][j] = v
            if not invertible or fp.rank(G, self.p) == len(G):
                out.append(G)
        return out

    def invertibility(self):
        comps = self.completions(invertible=False)
        if comps is None:
            return UNRESOLVED
        ranks = {fp.rank(G, self.p) == len(G) for G in comps}
        if ranks == {True}:
            return PASS
        if ranks == {False}:
            return FAIL
        return UNRESOLVED

    def to_json(self):
        return [list(row) for row in self.entries]


def pairing_gram(M, sols, dsols, t=None):
    t = tbar(M.e, M.r, M.c0bar) if t is None else t
    level = tau(M)
    entries = tuple(
        tuple(pair_points(x, y, t, level) for y in dsols.basis) for x in sols.basis
    )
    return GramMatrix(entries, t, M.p)


def orthogonal(G, S, p):
    """{a : a^t G s = 0 for all s in S} as a row-reduced basis."""
    d = len(G)
    if not S:
        return [[int(i == j) for j in range(d)] for i in range(d)]
    W = (np.array(G, dtype=np.int64) @ np.array(S, dtype=np.int64).T) % p
    return fp.span_basis(fp.kernel(W.T, p), p, d)


def robust_orthogonal(gram, S):
    """The orthogonal complement if it is the same for every admissible completion."""
    if not S:
        return orthogonal(gram.entries, S, gram.p)
    comps = gram.completions()
    if not comps:
        return None
    results = {tuple(map(tuple, orthogonal(G, S, gram.p))) for G in comps}
    if len(results) != 1:
        return None
    return [list(v) for v in results.pop()]


# -- upper filtration ---------------------------------------------------------


@dataclass(frozen=True)
class UpperFiltration:
    """Upper jumps; steps[k] = (J, dim, basis) describes H^j for j in (J_{k-1}, J_k]."""

    jumps: tuple  # ((j, multiplicity), ...)
    steps: tuple
    d: int
    p: int
    level: Fraction  # er/(p-1)

    def dim(self, j):
        for J, k, _ in self.steps:
            if j <= J:
                return k
        return 0

    def subspace(self, j):
        for J, _, basis in self.steps:
            if j <= J:
                return basis
        return []

    def values(self):
        return [j for j, _ in self.jumps]

    def to_json(self):
        return {
            "jumps": [[j.numerator, j.denominator, m] for j, m in self.jumps],
            "dims": [[J.numerator, J.denominator, k] for J, k, _ in self.steps],
            "subspaces": [b for _, _, b in self.steps],
        }


def l_of_j(level, p, j):
    return level - Fraction(j) / p


def upper_filtration_from(dual_breaks, dsols, gram, level):
    """H^j := (H(dual)_{l(j)+})^perp, with gram indexed (point, dual point)."""
    p, d = gram.p, dual_breaks.d
    js = sorted({p * (level - ell) for ell in dual_breaks.values()})
    steps = []
    jumps = []
    for J in js:
        ell = l_of_j(level, p, J)
        S = lower_subgroup(dsols, ell, strict=True)
        dim = d - len(S)
        steps.append((J, dim, robust_orthogonal(gram, S)))
        # just above J the dual subgroup also contains the points of break ell
        after = d - dual_breaks.dim(ell)
        jumps.append((J, p ** dim - p ** after))
    return UpperFiltration(tuple(jumps), tuple(steps), d, p, level)


def upper_filtration(M, sols=None, dsols=None, gram=None, cap=None):
    sols = solve_triangular(M, cap=cap) if sols is None else sols
    D = dual(M)
    dsols = solve_triangular(D, cap=cap) if dsols is None else dsols
    gram = pairing_gram(M, sols, dsols) if gram is None else gram
    return upper_filtration_from(lower_breaks(dsols), dsols, gram, tau(M))


# -- report -----------------------------------------------------------------


def _j_grid(level, p, n=50):
    top = p * level
    return [top * Fraction(k, n - 10) - Fraction(top, 8) for k in range(n)]


def _combine(results):
    results = list(results)
    if FAIL in results:
        return FAIL
    if UNRESOLVED in results:
        return UNRESOLVED
    return PASS


def _orthogonality_check(upper, dsols, level, p, d, grid):
    out = []
    for j in grid:
        S = lower_subgroup(dsols, l_of_j(level, p, j), strict=True)
        basis = upper.subspace(j)
        if basis is None:
            out.append(UNRESOLVED)
        else:
            out.append(PASS if len(basis) + len(S) == d else FAIL)
    return _combine(out)


def _double_orthogonal(gram, dsols, lower_dual, p):
    out = []
    levels = [Fraction(0)] + lower_dual.values()
    for ell in levels:
        for strict in (False, True):
            S = lower_subgroup(dsols, ell, strict=strict)
            perp = robust_orthogonal(gram, S)
            if perp is None:
                out.append(UNRESOLVED)
                continue
            back = robust_orthogonal(gram.transpose(), perp)
            if back is None:
                out.append(UNRESOLVED)
                continue
            same = fp.span_basis(back, p, len(gram.entries)) == fp.span_basis(S, p, len(gram.entries))
            out.append(PASS if same else FAIL)
    return _combine(out)


def _layer_check(M, sols):
    """A point whose first nonzero coordinate (in solving order) is j has v(x_j) = v(A[j][j])/(p-1)."""
    order = triangular_order(M)
    out = []
    for coeffs, x in sols.points():
        if not any(coeffs):
            continue
        j = next(k for k in order if not x[k].is_zero())
        out.append(PASS if x[j].valuation() == M.A[j][j].valuation() / (M.p - 1) else FAIL)
    return _combine(out)


def duality_report(M, cap=None):
    """Lower and upper filtrations of M and its dual, with consistency checks."""
    p, d = M.p, M.d
    level = tau(M)
    D = dual(M)
    sols = solve_triangular(M, cap=cap)
    dsols = solve_triangular(D, cap=cap)
    lower = lower_breaks(sols)
    dlower = lower_breaks(dsols)
    gram = pairing_gram(M, sols, dsols)
    upper = upper_filtration_from(dlower, dsols, gram, level)
    dupper = upper_filtration_from(lower, sols, gram.transpose(), level)
    grid = _j_grid(level, p)
    checks = {}
    checks["lower_bound"] = PASS if all(i <= level for i in lower.values() + dlower.values()) else FAIL
    checks["upper_bound"] = PASS if all(j <= p * level for j in upper.values() + dupper.values()) else FAIL
    checks["upper_zero_beyond_bound"] = (
        PASS if upper.dim(p * level + Fraction(1, 10 ** 6)) == 0 and dupper.dim(p * level + Fraction(1, 10 ** 6)) == 0
        else FAIL
    )
    checks["gram_invertible"] = gram.invertibility()
    checks["orthogonality_dims"] = _combine(
        [
            _orthogonality_check(upper, dsols, level, p, d, grid),
            _orthogonality_check(dupper, sols, level, p, d, grid),
        ]
    )
    checks["double_orthogonal"] = _combine(
        [
            _double_orthogonal(gram, dsols, dlower, p),
            _double_orthogonal(gram.transpose(), sols, lower, p),
        ]
    )
    checks["layer_closed_form"] = _combine([_layer_check(M, sols), _layer_check(D, dsols)])
    if d == 1:
        s = M.A[0][0].valuation()
        ok = (
            lower.jumps == ((s / (p - 1), p - 1),)
            and dupper.values() == [p * (M.er - s) / (p - 1)]
            and upper.values() == [p * s / (p - 1)]
        )
        checks["rank_one_closed_form"] = PASS if ok else FAIL
    return {
        "lower": lower,
        "dual_lower": dlower,
        "upper": upper,
        "dual_upper": dupper,
        "gram": gram,
        "checks": checks,
        "solutions_prec": min(sols.prec, dsols.prec),
    }
