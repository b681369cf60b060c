"""Points of the group scheme attached to a Kisin module.

A point is a vector x of Puiseux series with x_j^p = sum_i A[i][j] x_i. For
upper triangular A the coordinates are found one at a time: each layer is an
additive equation y^p - g y = h, solved by peeling leading terms off the
residual (Newton polygon of y^p - g y - h). The finite quotient algebras give
an independent F_p-linear check of the same equations.
"""

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .algebra import fp
from .algebra.field import compositum, embed, ff_pth_root, ff_solve_artin_schreier, ff_solve_kummer
from .algebra.series import INF, PuiseuxSeries, default_denominator_cap
from .errors import KisinRamError

MAX_PEEL_STEPS = 20_000


def default_target_prec(M):
    return Fraction(M.er, M.p - 1) + M.e


def _residual_target(target, lam_star, vg, p):
    """Residual valuation needed for the particular solution to be known mod u^target."""
    return p * target if target <= lam_star else target + vg


def _precision_from_residual(P, lam_star, vg, p):
    """Precision of the particular solution when the residual is O(u^P)."""
    if P == INF:
        return INF
    return P / p if P < p * lam_star else P - vg


def homogeneous_solution(g, target_prec):
    """A nonzero solution of y^p = g y (possibly over an extension field).

    y = u^(v(g)/(p-1)) z with z^(p-1) = g u^(-v(g)); the leading coefficient
    comes from the Kummer equation and the rest by Hensel lifting, since the
    derivative (p-1) z^(p-2) is a unit.
    """
    if g.is_zero():
        raise KisinRamError("singular-matrix", "diagonal entry indistinguishable from 0")
    p = g.field.p
    vg = g.valuation()
    lam_star = vg / (p - 1)
    w = g.shift(-vg)
    c, field = ff_solve_kummer(w.leading()[1])
    w = w.embed(field)
    zprec = min(Fraction(target_prec) - lam_star, w.prec) if target_prec != INF else w.prec
    if zprec == INF:
        if len(w.terms) == 1:
            return PuiseuxSeries.monomial(c, lam_star)
        raise KisinRamError("precision-exhausted", "homogeneous solution of an exact non-monomial needs a target")
    z = PuiseuxSeries.monomial(c, 0)
    scale = -(c ** (p - 2)).inverse()  # 1 / ((p-1) z0^(p-2))
    for _ in range(MAX_PEEL_STEPS):
        r = (w - z ** (p - 1)).truncate(zprec)
        if r.is_zero():
            break
        gamma, b = r.leading()
        z = z + PuiseuxSeries.monomial(b * scale, gamma)
    else:
        raise KisinRamError("precision-exhausted", "Hensel lifting did not converge")
    return z.with_precision(zprec).shift(lam_star)


def solve_additive_scalar(g, h, target_prec, cap=None, on_overflow="raise"):
    """(particular, homogeneous) for y^p - g y = h.

    The full solution set is particular + F_p * homogeneous. Both series may
    live in an extension of the input field (deterministic choice).

    When h has terms below p v(g)/(p-1) the expansion of the particular
    solution can have exponents accumulating below v(g)/(p-1) (a wild
    Artin-Schreier root), so no denominator cap suffices. With
    ``on_overflow="truncate"`` peeling then stops and the particular solution
    is returned with the precision actually reached.
    """
    if g.is_zero():
        raise KisinRamError("singular-matrix", "g indistinguishable from 0")
    p = g.field.p
    cap = default_denominator_cap(p) if cap is None else cap
    target = Fraction(target_prec)
    homog = homogeneous_solution(g, target)
    field = compositum(g.field, h.field, homog.field)
    g, h = g.embed(field), h.embed(field)
    vg = g.valuation()
    lam_star = vg / (p - 1)
    lcg = g.leading()[1]
    stop = _residual_target(target, lam_star, vg, p)

    x = PuiseuxSeries.zero(field)
    rho = h
    P = None
    for _ in range(MAX_PEEL_STEPS):
        visible = rho.truncate(stop)
        if visible.is_zero():
            break
        mu, lc = visible.leading()
        if mu < p * lam_star:
            lam, c = mu / p, ff_pth_root(lc)
        elif mu > p * lam_star:
            lam, c = mu - vg, -lc / lcg
        else:
            lam = lam_star
            c, new_field = ff_solve_artin_schreier(lcg, lc)
            if new_field != field:
                field = new_field
                g, h, rho, x = (s.embed(field) for s in (g, h, rho, x))
                homog = homog.embed(field)
                lcg = embed(lcg, field)
        if math.lcm(x.den, lam.denominator) > cap:
            if on_overflow == "truncate":
                P = mu
                break
            raise KisinRamError(
                "denominator-overflow", f"exponent {lam} exceeds denominator cap {cap}", cap=cap
            )
        x = x + PuiseuxSeries.monomial(c, lam)
        rho = rho - PuiseuxSeries.monomial(c ** p, p * lam) + g.shift(lam).scale(c)
    else:
        raise KisinRamError("precision-exhausted", "peeling did not terminate")
    if P is None:
        P = min(rho.valuation_lower_bound(), rho.prec)
    xprec = _precision_from_residual(P, lam_star, vg, p)
    return x.with_precision(xprec), homog.embed(field)


@dataclass(frozen=True, eq=False)
class SolutionSet:
    """F_p-basis of the points of H(M) over R, as Puiseux vectors."""

    module: object
    basis: tuple
    prec: object
    field: object

    @property
    def dim(self):
        return len(self.basis)

    def combination(self, coeffs):
        d = len(self.basis[0])
        out = [PuiseuxSeries.zero(self.field) for _ in range(d)]
        for c, vec in zip(coeffs, self.basis):
            c %= self.field.p
            if c:
                out = [a + b.scale(self.field(c)) for a, b in zip(out, vec)]
        return tuple(out)

    def coefficient_tuples(self):
        """All F_p coefficient tuples, lexicographic."""
        return itertools.product(range(self.field.p), repeat=self.dim)

    def points(self):
        """(coefficients, vector) for all p^d points, in lexicographic order."""
        for coeffs in self.coefficient_tuples():
            yield coeffs, self.combination(coeffs)

    def embed(self, field):
        if field == self.field:
            return self
        basis = tuple(tuple(x.embed(field) for x in vec) for vec in self.basis)
        return SolutionSet(self.module, basis, self.prec, field)

    def __len__(self):
        return self.field.p ** self.dim


def _layer_targets(A, target, p):
    d = len(A)
    req = [Fraction(target)] * d
    for j in range(d - 1, 0, -1):
        vg = A[j][j].valuation()
        if vg is None:
            raise KisinRamError("singular-matrix", "diagonal entry indistinguishable from 0")
        need = _residual_target(req[j], vg / (p - 1), vg, p)
        for i in range(j):
            req[i] = max(req[i], need)
    return req


def triangular_order(M):
    """A permutation making A upper triangular, or None.

    Relabelling the basis by a permutation sigma turns A into
    (A[sigma[i]][sigma[j]]); it is a basis change by a constant matrix.
    Among valid orders the lexicographically smallest is returned.
    """
    d = M.d
    zero = [[M.A[i][j].is_zero() for j in range(d)] for i in range(d)]
    for perm in itertools.permutations(range(d)):
        if all(zero[perm[i]][perm[j]] for i in range(d) for j in range(i)):
            return perm
    return None


def _solve_upper(A, field, target, p, cap):
    d = len(A)
    req = _layer_targets(A, target, p)
    while True:
        Af = [[x.embed(field) for x in row] for row in A]
        basis = []
        grown = None
        for j in range(d):
            g = Af[j][j]
            # entries below the diagonal are zero only up to their precision
            below = min((Af[i][j].prec for i in range(j + 1, d)), default=INF)
            new_basis = []
            for b in basis:
                h = PuiseuxSeries.zero(field, below)
                for i in range(j):
                    if not Af[i][j].is_zero() or Af[i][j].prec != INF:
                        h = h + Af[i][j] * b[i]
                part, _ = solve_additive_scalar(g, h, req[j], cap, on_overflow="truncate")
                if part.field != field:
                    grown = part.field
                    break
                new_basis.append(tuple(b) + (part,))
            if grown is None:
                _, eta = solve_additive_scalar(g, PuiseuxSeries.zero(field, below), req[j], cap)
                if eta.field != field:
                    grown = eta.field
            if grown is not None:
                break
            zero = PuiseuxSeries.zero(field)
            new_basis.append(tuple(zero for _ in range(j)) + (eta,))
            basis = new_basis
        if grown is None:
            return basis, field
        field = compositum(field, grown)


def solve_triangular(M, target_prec=None, cap=None):
    """All p^d points of H(M) for triangular A, as an F_p-basis.

    Layer j: for each basis vector b of the first j coordinates, extend it by
    a particular solution of x_j^p - A[j][j] x_j = sum_{i<j} A[i][j] b_i; add
    the homogeneous solution (0, ..., 0, eta_j). The coefficient field grows
    deterministically; any extension restarts the computation over the
    compositum so that all points share one field.

    A matrix that becomes upper triangular after relabelling the basis (for
    instance the dual of an upper triangular module) is solved in that order
    and the coordinates are put back in the original order.
    """
    perm = triangular_order(M)
    if perm is None:
        raise KisinRamError(
            "not-triangular", "A must be triangular up to reordering; use change_basis to triangularize"
        )
    target = default_target_prec(M) if target_prec is None else Fraction(target_prec)
    d = M.d
    A = [[M.A[perm[i]][perm[j]] for j in range(d)] for i in range(d)]
    basis, field = _solve_upper(A, M.field, target, M.p, cap)
    inv = [perm.index(k) for k in range(d)]
    basis = tuple(tuple(vec[inv[k]] for k in range(d)) for vec in basis)
    prec = min(x.prec for vec in basis for x in vec)
    return SolutionSet(M, basis, prec, field)


def residual_valuation(M, x):
    """min_j v(x_j^p - sum_i A[i][j] x_i); None means above precision."""
    field = x[0].field
    A = [[a.embed(field) for a in row] for row in M.A]
    best = None
    for j in range(M.d):
        r = x[j] ** M.p
        for i in range(M.d):
            r = r - A[i][j] * x[i]
        v = r.valuation()
        if v is not None and (best is None or v < best):
            best = v
    return best


def residual_precision(M, x):
    """Precision to which the residual is known."""
    field = x[0].field
    A = [[a.embed(field) for a in row] for row in M.A]
    prec = INF
    for j in range(M.d):
        r = x[j] ** M.p
        for i in range(M.d):
            r = r - A[i][j] * x[i]
        prec = min(prec, r.prec)
    return prec


# -- finite quotient algebras ------------------------------------------------


@dataclass(frozen=True)
class QuotientAlgebra:
    """F_{p^M}[u^(1/D)] / (u^T): exponents in (1/D)Z cap [0, T)."""

    field: object
    D: int
    T: Fraction

    @property
    def size(self):
        return math.ceil(Fraction(self.T) * self.D)

    @property
    def dim(self):
        return self.field.m * self.size

    def vector(self, x):
        """F_p coordinates of a truncated series."""
        x = x.embed(self.field)
        out = [0] * self.dim
        m = self.field.m
        for g, c in x.items():
            if g >= self.T:
                continue
            k = g * self.D
            if k.denominator != 1:
                raise KisinRamError("exponent-not-representable", f"exponent {g} not in (1/{self.D})Z")
            for i, ci in enumerate(c.coeffs):
                out[int(k) * m + i] = ci
        return out

    def element(self, vec):
        m = self.field.m
        terms = {}
        for k in range(self.size):
            c = self.field(list(vec[k * m:(k + 1) * m]))
            if c:
                terms[Fraction(k, self.D)] = c
        return PuiseuxSeries(self.field, terms, prec=self.T)


def _quotient_matrix(M, alg):
    d = M.d
    p = M.p
    n = alg.dim
    T = Fraction(alg.T)
    A = [[a.embed(alg.field) for a in row] for row in M.A]
    for row in A:
        for a in row:
            if a.den != 1 and alg.D % a.den:
                raise KisinRamError("exponent-not-representable", "entry exponents do not embed")
    mat = np.zeros((d * n, d * n), dtype=np.int64)
    m = alg.field.m
    for c in range(d):
        for k in range(alg.size):
            for i in range(m):
                col = c * n + k * m + i
                basis = PuiseuxSeries.monomial(alg.field.from_int(p ** i), Fraction(k, alg.D))
                images = [PuiseuxSeries.zero(alg.field) for _ in range(d)]
                images[c] = images[c] + basis ** p
                for j in range(d):
                    if not A[c][j].is_zero():
                        images[j] = images[j] - (A[c][j].with_precision(INF) * basis)
                for j in range(d):
                    mat[j * n:(j + 1) * n, col] = alg.vector(images[j].truncate(T))
    return mat % p


def kernel_over_quotient(M, alg):
    """F_p-basis of the kernel of x -> (x_j^p - sum_i A[i][j] x_i) on alg^d."""
    mat = _quotient_matrix(M, alg)
    n = alg.dim
    out = []
    for v in fp.kernel(mat, M.p):
        out.append(tuple(alg.element(v[j * n:(j + 1) * n]) for j in range(M.d)))
    return out


def in_quotient_kernel(M, alg, x):
    """Whether the truncation of the vector x lies in the kernel."""
    mat = _quotient_matrix(M, alg)
    vec = []
    for xj in x:
        vec.extend(alg.vector(xj.truncate(alg.T)))
    return not np.any(mat.dot(np.array(vec, dtype=np.int64)) % M.p)
