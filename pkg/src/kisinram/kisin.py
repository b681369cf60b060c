"""Kisin modules over k[[u]] killed by p.

A module of rank d is given by its Frobenius matrix A, with
``phi(m_1, ..., m_d) = (m_1, ..., m_d) A``. Matrices are tuples of rows of
:class:`USeries`.
"""

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from itertools import permutations

from .algebra.field import FFElem, FieldDesc
from .algebra.series import INF, USeries, series_invert
from .errors import KisinRamError


def default_prec(d, e, r, p):
    """Working precision guaranteeing that duals and pairings resolve."""
    return 2 * d * e * r + math.ceil(Fraction(e * r, p - 1)) + e


def default_prec_min(e, r, p):
    return math.ceil(Fraction(e * r, p - 1)) + e + 1


# -- matrices of series ------------------------------------------------------


def identity(field, d):
    return tuple(
        tuple(USeries.constant(field.one if i == j else field.zero) for j in range(d)) for i in range(d)
    )


def mat_mul(a, b):
    n, k, m = len(a), len(b), len(b[0])
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            s = a[i][0] * b[0][j]
            for t in range(1, k):
                s = s + a[i][t] * b[t][j]
            row.append(s)
        out.append(tuple(row))
    return tuple(out)


def transpose(a):
    return tuple(zip(*a))


def mat_map(a, f):
    return tuple(tuple(f(x) for x in row) for row in a)


def mat_frobenius(a):
    return mat_map(a, lambda x: x.frobenius())


def det(a):
    d = len(a)
    if d == 1:
        return a[0][0]
    total = None
    for perm in permutations(range(d)):
        inversions = sum(1 for i in range(d) for j in range(i + 1, d) if perm[i] > perm[j])
        term = a[0][perm[0]]
        for i in range(1, d):
            term = term * a[i][perm[i]]
        if inversions % 2:
            term = -term
        total = term if total is None else total + term
    return total


def _minor(a, i, j):
    return tuple(tuple(x for c, x in enumerate(row) if c != j) for r, row in enumerate(a) if r != i)


def unit_inverse(a):
    """Inverse of a matrix whose determinant is a unit of k[[u]]."""
    d = len(a)
    dt = det(a)
    if dt.is_zero() or dt.valuation() != 0:
        raise KisinRamError("non-unit-basis-change", "determinant is not a unit")
    dinv = series_invert(dt) if dt.prec != INF or len(dt.terms) == 1 else None
    if dinv is None:
        raise KisinRamError("precision-exhausted", "cannot invert an exact non-constant determinant")
    if d == 1:
        return ((dinv,),)
    rows = []
    for i in range(d):
        row = []
        for j in range(d):
            cof = det(_minor(a, j, i))
            if (i + j) % 2:
                cof = -cof
            row.append(cof * dinv)
        rows.append(tuple(row))
    return tuple(rows)


def mat_prec(a):
    return min(x.prec for row in a for x in row)


def _exact(a):
    return mat_map(a, lambda x: x.with_precision(INF))


# -- Smith normal form -------------------------------------------------------


@dataclass(frozen=True)
class SmithData:
    P: tuple
    Q: tuple
    exps: tuple
    stride: int
    prec: object  # P A Q = diag(u^s_i) modulo u^prec


def smith_normal_form(A, stride=1):
    """P, Q with P A Q = diag(u^s_1, ..., u^s_d), s_1 <= ... <= s_d.

    Pivot: entry of least valuation, ties broken row-major. With ``stride``
    w > 1 the input must lie in k[[u^w]]; the elimination then never leaves
    that subring, so P and Q have entries in k[[u^w]].
    """
    d = len(A)
    fld = A[0][0].field
    if stride > 1:
        for row in A:
            for x in row:
                if any(k % stride for k in x.terms) or x.den != 1:
                    raise KisinRamError("entries-not-in-u^p", f"entry {x} not in k[[u^{stride}]]")
    M = [list(row) for row in A]
    P = [list(row) for row in identity(fld, d)]
    Q = [list(row) for row in identity(fld, d)]
    exps = []
    for k in range(d):
        best = None
        for i in range(k, d):
            for j in range(k, d):
                v = M[i][j].valuation()
                if v is not None and (best is None or v < best[0]):
                    best = (v, i, j)
        if best is None:
            raise KisinRamError("singular-matrix", "determinant indistinguishable from 0")
        v, i, j = best
        v = int(v)
        M[k], M[i] = M[i], M[k]
        P[k], P[i] = P[i], P[k]
        for row in M:
            row[k], row[j] = row[j], row[k]
        for row in Q:
            row[k], row[j] = row[j], row[k]
        uinv = series_invert(M[k][k].shift(-v))
        M[k] = [x * uinv for x in M[k]]
        P[k] = [x * uinv for x in P[k]]
        for i in range(k + 1, d):
            if not M[i][k].is_zero():
                f = M[i][k].shift(-v)
                M[i] = [a - f * b for a, b in zip(M[i], M[k])]
                P[i] = [a - f * b for a, b in zip(P[i], P[k])]
        for j in range(k + 1, d):
            if not M[k][j].is_zero():
                f = M[k][j].shift(-v)
                for row in M:
                    row[j] = row[j] - f * row[k]
                for row in Q:
                    row[j] = row[j] - f * row[k]
        exps.append(v)
    Pt = tuple(tuple(x.truncate(x.prec).with_precision(INF) for x in row) for row in P)
    Qt = tuple(tuple(x.truncate(x.prec).with_precision(INF) for x in row) for row in Q)
    # precision of the relation, measured on the truncated (exact) P, Q
    prod = mat_mul(mat_mul(Pt, A), Qt)
    prec = INF
    for i in range(d):
        for j in range(d):
            diff = prod[i][j] - (USeries.constant(fld.one).shift(exps[i]) if i == j else 0)
            prec = min(prec, diff.valuation_lower_bound())
    prec = min(prec, mat_prec(A))
    if stride > 1:
        for mat in (Pt, Qt):
            for row in mat:
                for x in row:
                    if any(k % stride for k in x.terms):
                        raise AssertionError("stride violated in elimination")
    return SmithData(Pt, Qt, tuple(exps), stride, prec)


def e_height(A):
    """Largest elementary-divisor exponent of A."""
    return smith_normal_form(A).exps[-1]


# -- Kisin modules -----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class KisinModule:
    field: FieldDesc
    e: int
    r: int
    c0bar: FFElem
    A: tuple
    prec: int
    snf: SmithData = dc_field(default=None, repr=False)

    def __post_init__(self):
        A = tuple(tuple(x for x in row) for row in self.A)
        d = len(A)
        if d == 0 or any(len(row) != d for row in A):
            raise KisinRamError("bad-matrix", "A must be a nonempty square matrix")
        if self.e < 1 or self.r < 1:
            raise KisinRamError("bad-parameters", "e and r must be positive")
        if not self.c0bar:
            raise KisinRamError("bad-parameters", "c0bar must be a unit")
        A = mat_map(A, lambda x: (x if isinstance(x, USeries) else USeries.from_puiseux(x)).with_precision(
            min(x.prec, self.prec)))
        object.__setattr__(self, "A", A)
        snf = smith_normal_form(A)
        if snf.exps[-1] > self.e * self.r:
            raise KisinRamError(
                "height-exceeded",
                f"E-height {snf.exps[-1]} exceeds er = {self.e * self.r}",
                height=snf.exps[-1],
                er=self.e * self.r,
            )
        object.__setattr__(self, "snf", snf)

    @property
    def p(self):
        return self.field.p

    @property
    def d(self):
        return len(self.A)

    @property
    def er(self):
        return self.e * self.r

    def height(self):
        return self.snf.exps[-1]

    def entry(self, i, j):
        return self.A[i][j]

    def is_upper_triangular(self):
        return all(self.A[i][j].is_zero() for i in range(self.d) for j in range(i))

    def with_matrix(self, A, prec=None, **changes):
        kw = dict(field=self.field, e=self.e, r=self.r, c0bar=self.c0bar, A=A, prec=self.prec if prec is None else prec)
        kw.update(changes)
        return KisinModule(**kw)

    def same_matrix(self, other):
        """Termwise equality of the Frobenius matrices below the common precision."""
        if self.d != other.d:
            return False
        return all(a.agrees_with(b) for ra, rb in zip(self.A, other.A) for a, b in zip(ra, rb))

    def __repr__(self):
        return f"KisinModule(p={self.p}, e={self.e}, r={self.r}, d={self.d}, prec={self.prec}, A={self.A})"


def make_module(field, e, r, A, c0bar=None, prec=None):
    """Constructor applying the default c0bar = -1 and the default precision."""
    c0bar = field(-1) if c0bar is None else field(c0bar)
    d = len(A)
    prec = default_prec(d, e, r, field.p) if prec is None else prec
    rows = []
    for row in A:
        rows.append(tuple(x if isinstance(x, USeries) else USeries(field, x) for x in row))
    return KisinModule(field=field, e=e, r=r, c0bar=c0bar, A=tuple(rows), prec=prec)


def rank_one(s, a, e, r, c0bar=None, prec=None):
    """The rank-one module with phi(n) = u^s a n."""
    if not 0 <= s <= e * r:
        raise KisinRamError("bad-parameters", f"s = {s} outside [0, er = {e * r}]")
    if isinstance(a, FFElem):
        if not a:
            raise KisinRamError("bad-parameters", "a must be a unit")
        entry = USeries.constant(a).shift(s)
        fld = a.field
    else:
        if a.is_zero() or a.valuation() != 0:
            raise KisinRamError("bad-parameters", "a must be a unit")
        entry = a.shift(s)
        fld = a.field
    return make_module(fld, e, r, [[entry]], c0bar=c0bar, prec=prec)


def dual(M, prec_min=None):
    """The dual module: A^dual = (u^e / c0bar)^r (A^t)^(-1).

    With P A Q = D this is P^t (u^(er) D^(-1) / c0bar^r) Q^t, which needs no
    division in k[[u]].
    """
    snf = M.snf
    er = M.er
    scale = M.c0bar ** (-M.r)
    d = M.d
    mid = tuple(
        tuple(
            USeries.constant(scale).shift(er - snf.exps[i]) if i == j else USeries.zero(M.field)
            for j in range(d)
        )
        for i in range(d)
    )
    Ad = mat_mul(mat_mul(transpose(snf.P), mid), transpose(snf.Q))
    prec = snf.prec - 2 * snf.exps[-1] + er
    prec = int(min(prec, M.prec))
    prec_min = default_prec_min(M.e, M.r, M.p) if prec_min is None else prec_min
    if prec < prec_min:
        raise KisinRamError("precision-exhausted", f"dual known only modulo u^{prec}", prec=prec)
    return M.with_matrix(mat_map(Ad, lambda x: x.with_precision(prec)), prec=prec)


def base_change(M, n):
    """Pull back along u -> v^n: e becomes n e, A(u) becomes A(v^n)."""
    if n < 1:
        raise KisinRamError("bad-parameters", "base change degree must be positive")
    A = mat_map(M.A, lambda x: x.substitute(n))
    return M.with_matrix(A, prec=M.prec * n, e=M.e * n)


def change_basis(M, C):
    """Basis m' = m C; the new matrix is C^(-1) A phi(C)."""
    C = tuple(tuple(x if isinstance(x, USeries) else USeries.constant(M.field(x)) for x in row) for row in C)
    C = mat_map(C, lambda x: x.with_precision(min(x.prec, M.prec)))
    Cinv = unit_inverse(C)
    A2 = mat_mul(mat_mul(Cinv, M.A), mat_frobenius(C))
    prec = int(min(M.prec, mat_prec(A2)))
    return M.with_matrix(mat_map(A2, lambda x: x.with_precision(min(x.prec, prec))), prec=prec)
