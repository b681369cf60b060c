"""The mixed characteristic side (k = F_p, r = 1).

O_K is modelled as (Z/p^N)[pi]/(E(pi)). The affine algebra of the group
scheme attached to a Kisin module has equations

    X_i^p + (pi^(e - r_i) / F(pi)) * sum_j a_{j,i}(pi) X_j,

where a = -F(u) phi^{-1}(Q^)^{-1} P^^{-1} is built from integer lifts of the
stride-p Smith normal form P A Q = diag(u^(e - r_i)). Reducing these
coefficients mod p must reproduce the equal-characteristic equations mod u^e;
breaks on the mixed side are computed from valuations only.
"""

import itertools
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations

from .algebra.series import USeries
from .errors import KisinRamError
from .kisin import base_change, change_basis, mat_frobenius, mat_mul, smith_normal_form, unit_inverse
from .ramification import BreakData

INCONCLUSIVE = "inconclusive"
DEFAULT_N = 2


def _vp(n, p):
    """p-adic valuation of a nonzero integer."""
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


@dataclass(frozen=True)
class EisensteinPoly:
    p: int
    coeffs: tuple  # c_0, ..., c_e with c_e = 1

    def __post_init__(self):
        c = tuple(int(x) for x in self.coeffs)
        object.__setattr__(self, "coeffs", c)
        p = self.p
        if len(c) < 2 or c[-1] != 1:
            raise KisinRamError("bad-eisenstein", "E must be monic of degree >= 1")
        if any(x % p for x in c[:-1]) or c[0] % (p * p) == 0:
            raise KisinRamError("bad-eisenstein", f"{list(c)} is not Eisenstein at {p}")

    @property
    def e(self):
        return len(self.coeffs) - 1

    def F(self):
        """Coefficients of F(u) = (u^e - E(u)) / p (degree < e)."""
        return [-c // self.p for c in self.coeffs[:-1]]

    def c0bar(self):
        """E(0)/p mod p."""
        return (self.coeffs[0] // self.p) % self.p

    def substitute(self, n):
        """E(u^n), again Eisenstein."""
        out = [0] * (self.e * n + 1)
        for i, c in enumerate(self.coeffs):
            out[i * n] = c
        return EisensteinPoly(self.p, tuple(out))

    @classmethod
    def default(cls, p, e, c0bar=-1):
        """u^e + p c with c the representative of c0bar closest to 0."""
        c = int(c0bar) % p
        if c > p // 2:
            c -= p
        return cls(p, tuple([p * c] + [0] * (e - 1) + [1]))

    def to_json(self):
        return list(self.coeffs)


# -- O_K = (Z/p^N)[pi]/(E) ---------------------------------------------------


@dataclass(frozen=True)
class OKElem:
    E: EisensteinPoly
    N: int
    coeffs: tuple  # e residues mod p^N, low first

    @property
    def modulus(self):
        return self.E.p ** self.N

    @classmethod
    def from_poly(cls, E, N, poly):
        """Reduce sum poly[k] pi^k using pi^e = -(c_0 + ... + c_{e-1} pi^(e-1))."""
        e, q = E.e, E.p ** N
        c = [x % q for x in poly]
        for k in range(len(c) - 1, e - 1, -1):
            top = c[k]
            if top:
                for i in range(e):
                    c[k - e + i] = (c[k - e + i] - top * E.coeffs[i]) % q
            c[k] = 0
        c = (c + [0] * e)[:e]
        return cls(E, N, tuple(c))

    @classmethod
    def const(cls, E, N, n):
        return cls.from_poly(E, N, [n])

    @classmethod
    def pi(cls, E, N, k=1):
        return cls.from_poly(E, N, [0] * k + [1])

    def _check(self, other):
        if isinstance(other, int):
            return OKElem.const(self.E, self.N, other)
        if other.E != self.E or other.N != self.N:
            raise KisinRamError("ok-mismatch", "elements of different rings")
        return other

    def __add__(self, other):
        other = self._check(other)
        q = self.modulus
        return OKElem(self.E, self.N, tuple((a + b) % q for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        q = self.modulus
        return OKElem(self.E, self.N, tuple(-a % q for a in self.coeffs))

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        other = self._check(other)
        prod = [0] * (2 * self.E.e - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    prod[i + j] += a * b
        return OKElem.from_poly(self.E, self.N, prod)

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, int):
            other = OKElem.const(self.E, self.N, other)
        if not isinstance(other, OKElem):
            return NotImplemented
        return self.E == other.E and self.N == other.N and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.E, self.N, self.coeffs))

    def is_zero(self):
        return not any(self.coeffs)

    def is_unit(self):
        return self.coeffs[0] % self.E.p != 0

    def inverse(self):
        """Newton iteration x <- x (2 - a x) from the inverse of the constant term."""
        if not self.is_unit():
            raise KisinRamError("non-unit", "element reduces to 0 in the residue field")
        q = self.modulus
        x = OKElem.const(self.E, self.N, pow(self.coeffs[0], -1, q))
        # a x = 1 + n with n in (pi); n^(eN) = 0, so log2(eN) + 1 rounds suffice
        for _ in range((self.E.e * self.N).bit_length() + 1):
            x = x * (2 - self * x)
        if self * x != 1:
            raise AssertionError("inverse did not converge")
        return x

    def valuation(self):
        """pi-adic valuation (v(pi) = 1, v(p) = e); None if 0 mod p^N."""
        best = None
        for k, c in enumerate(self.coeffs):
            if c:
                v = self.E.e * _vp(c, self.E.p) + k
                best = v if best is None else min(best, v)
        return best

    def reduce_mod_p(self):
        """Image in F_p[u]/(u^e) under pi -> u."""
        return tuple(c % self.E.p for c in self.coeffs)

    def to_json(self):
        return list(self.coeffs)


def ok_arith(a, b, op):
    if op == "+":
        return a + b
    if op == "*":
        return a * b
    if op == "-":
        return a - b
    if op == "inv":
        return a.inverse()
    raise ValueError(f"unknown operation {op!r}")


# -- integer power series (Z/p^N)[[u]] mod u^L --------------------------------


def _zs_mul(a, b, q, L):
    out = [0] * L
    for i, x in enumerate(a[:L]):
        if x:
            for j, y in enumerate(b[: L - i]):
                out[i + j] += x * y
    return [c % q for c in out]


def _zs_add(a, b, q):
    n = max(len(a), len(b))
    return [((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)) % q for i in range(n)]


def _zs_neg(a, q):
    return [-c % q for c in a]


def _zs_inv(a, p, q, L):
    if not a or a[0] % p == 0:
        raise KisinRamError("non-unit", "series is not a unit")
    inv0 = pow(a[0], -1, q)
    out = [0] * L
    out[0] = inv0
    for k in range(1, L):
        s = sum(a[j] * out[k - j] for j in range(1, min(k, len(a) - 1) + 1))
        out[k] = -s * inv0 % q
    return out


def _zs_det(m, q, L):
    d = len(m)
    total = [0]
    for perm in permutations(range(d)):
        sign = sum(1 for i in range(d) for j in range(i + 1, d) if perm[i] > perm[j]) % 2
        term = [1]
        for i in range(d):
            term = _zs_mul(term, m[i][perm[i]], q, L)
        total = _zs_add(total, _zs_neg(term, q) if sign else term, q)
    return total


def _zs_mat_inv(m, p, q, L):
    d = len(m)
    dinv = _zs_inv(_zs_det(m, q, L), p, q, L)
    if d == 1:
        return [[dinv]]
    out = [[None] * d for _ in range(d)]
    for i in range(d):
        for j in range(d):
            minor = [[m[r][c] for c in range(d) if c != i] for r in range(d) if r != j]
            cof = _zs_det(minor, q, L)
            if (i + j) % 2:
                cof = _zs_neg(cof, q)
            out[i][j] = _zs_mul(cof, dinv, q, L)
    return out


def _zs_mat_mul(a, b, q, L):
    n, k, m = len(a), len(b), len(b[0])
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            s = [0]
            for t in range(k):
                s = _zs_add(s, _zs_mul(a[i][t], b[t][j], q, L), q)
            row.append(s)
        out.append(row)
    return out


def _lift(x, L):
    """Integer lift with representatives 0..p-1 of a series over F_p, as a list of length L."""
    out = [0] * L
    for k, c in x.terms.items():
        if k < L:
            out[k] = int(c)
    return out


def _lift_unfrob(x, p, L):
    """Lift of phi^{-1}(x) for x in F_p[[u^p]]: u^(pk) -> u^k."""
    out = [0] * L
    for k, c in x.terms.items():
        if k % p:
            raise KisinRamError("entries-not-in-u^p", "basis change is not in k[[u^p]]")
        if k // p < L:
            out[k // p] = int(c)
    return out


def _evaluate(poly, E, N):
    """poly(pi) in O_K."""
    return OKElem.from_poly(E, N, poly)


# -- Breuil data and presentations --------------------------------------------


def _check_mixed(M, E, need_stride=True):
    if M.field.m != 1:
        raise KisinRamError("requires-prime-field", "mixed side needs k = F_p")
    if M.r != 1:
        raise KisinRamError("requires-r-1", "mixed side needs r = 1")
    if E.p != M.p or E.e != M.e:
        raise KisinRamError("eisenstein-mismatch", f"E has degree {E.e}, module has e = {M.e}")
    if E.c0bar() != int(M.c0bar):
        raise KisinRamError(
            "c0bar-mismatch", f"E(0)/p = {E.c0bar()} mod p, module has c0bar = {int(M.c0bar)}"
        )
    if need_stride and M.e % M.p:
        raise KisinRamError("requires-p-divides-e", f"p = {M.p} does not divide e = {M.e}")


def stride_snf(M):
    """Stride-p Smith form when A has entries in k[[u^p]], else the plain one."""
    try:
        return smith_normal_form(M.A, stride=M.p)
    except KisinRamError as exc:
        if exc.code != "entries-not-in-u^p":
            raise
        return smith_normal_form(M.A)


def _fbar(E, field):
    return USeries(field, {k: c % E.p for k, c in enumerate(E.F())})


def breuil_data(M, E=None):
    """(r_i) with r_i = e - s_i, and G = -F(u^p) Q^{-1} phi(P)^{-1} mod u^(ep)."""
    E = EisensteinPoly.default(M.p, M.e, int(M.c0bar)) if E is None else E
    _check_mixed(M, E, need_stride=False)
    snf = stride_snf(M)
    p, e = M.p, M.e
    cap = e * p
    Q = tuple(tuple(x.with_precision(cap) for x in row) for row in snf.Q)
    P = tuple(tuple(x.with_precision(cap) for x in row) for row in snf.P)
    c = -(_fbar(E, M.field).substitute(p).with_precision(cap))
    G = mat_mul(unit_inverse(Q), unit_inverse(mat_frobenius(P)))
    G = tuple(tuple((c * x).truncate(cap) for x in row) for row in G)
    r = tuple(e - s for s in snf.exps)
    return r, G, snf


@dataclass(frozen=True)
class MixedPresentation:
    """Equations X_i^p + sum_j coeff[i][j] X_j over O_K.

    ``coeff[i][j] = pi^(exps[i]) a[j][i](pi) / F(pi)``, with exps[i] = e - r_i.
    """

    E: EisensteinPoly
    N: int
    exps: tuple
    a: tuple  # a[j][i] in O_K
    Fpi: OKElem

    @property
    def d(self):
        return len(self.exps)

    def coefficient(self, i, j):
        """Coefficient of X_j in the i-th equation."""
        return OKElem.pi(self.E, self.N, self.exps[i]) * self.a[j][i] * self.Fpi.inverse()

    def coefficients(self):
        finv = self.Fpi.inverse()
        return tuple(
            tuple(OKElem.pi(self.E, self.N, self.exps[i]) * self.a[j][i] * finv for j in range(self.d))
            for i in range(self.d)
        )

    def to_json(self):
        return {
            "E": self.E.to_json(),
            "N": self.N,
            "exponents": list(self.exps),
            "coefficients": [[c.to_json() for c in row] for row in self.coefficients()],
        }


def mixed_presentation(M, E=None, N=DEFAULT_N):
    E = EisensteinPoly.default(M.p, M.e, int(M.c0bar)) if E is None else E
    _check_mixed(M, E)
    p = M.p
    snf = smith_normal_form(M.A, stride=p)
    q = p ** N
    L = M.e * N  # pi^(eN) = p^N F(pi)^N = 0
    Pl = [[_lift(x, L) for x in row] for row in snf.P]
    Ql = [[_lift_unfrob(x, p, L) for x in row] for row in snf.Q]
    F = [c % q for c in E.F()]
    B = _zs_mat_mul(_zs_mat_inv(Ql, p, q, L), _zs_mat_inv(Pl, p, q, L), q, L)
    a = tuple(tuple(_evaluate(_zs_neg(_zs_mul(F, x, q, L), q), E, N) for x in row) for row in B)
    return MixedPresentation(E, N, tuple(snf.exps), a, _evaluate(F, E, N))


def equal_char_equations(M):
    """Coefficient of X_j in the i-th equation for the basis phi^{-1}(Q), mod u^e.

    With C = phi^{-1}(Q) the matrix C^{-1} A phi(C) is phi^{-1}(Q)^{-1} P^{-1} D,
    and the i-th equation reads X_i^p - sum_j A'[j][i] X_j.
    """
    p = M.p
    snf = smith_normal_form(M.A, stride=p)
    C = tuple(
        tuple(USeries(M.field, {k // p: c for k, c in x.terms.items()}) for x in row) for row in snf.Q
    )
    A2 = change_basis(M, C).A
    e = M.e
    out = []
    for i in range(M.d):
        row = []
        for j in range(M.d):
            x = (-A2[j][i]).truncate(e)
            if x.prec < e:
                raise KisinRamError("precision-exhausted", "equal-characteristic coefficient below u^e")
            row.append(tuple(int(x.coeff_at(k)) for k in range(e)))
        out.append(tuple(row))
    return tuple(out)


def compare_mod_p(M, E=None, N=DEFAULT_N):
    """Entrywise comparison of the mixed equations mod p with the equal-characteristic ones mod u^e."""
    Mp = mixed_presentation(M, E, N)
    mixed = tuple(tuple(c.reduce_mod_p() for c in row) for row in Mp.coefficients())
    equal = equal_char_equations(M)
    entries = [
        [{"mixed": list(mixed[i][j]), "equal": list(equal[i][j]), "match": mixed[i][j] == equal[i][j]}
         for j in range(M.d)]
        for i in range(M.d)
    ]
    return {
        "presentation": Mp,
        "entries": entries,
        "all_equal": all(x["match"] for row in entries for x in row),
    }


# -- valuation-only breaks ------------------------------------------------------


def _solving_order(present):
    """An order in which each equation only involves earlier variables, or None."""
    d = len(present)
    for perm in itertools.permutations(range(d)):
        pos = {v: k for k, v in enumerate(perm)}
        if all(pos[j] <= pos[i] for i in range(d) for j in range(d) if present[i][j]):
            return perm
    return None


def mixed_lower_breaks_explained(Mp):
    """(BreakData or "inconclusive", reason)."""
    p, d = Mp.E.p, Mp.d
    coeffs = Mp.coefficients()
    vals = [[coeffs[i][j].valuation() for j in range(d)] for i in range(d)]
    bound = Mp.E.e * Mp.N  # everything at or beyond this is invisible mod p^N
    present = [[v is not None for v in row] for row in vals]
    order = _solving_order(present)
    if order is None:
        return INCONCLUSIVE, "presentation is not triangular"
    # branches: (valuations of the variables so far, number of points)
    branches = [({}, 1)]
    for i in order:
        vc = vals[i][i]
        if vc is None:
            return INCONCLUSIVE, f"diagonal coefficient of equation {i} vanishes mod p^N"
        lam = Fraction(vc, p - 1)
        new = []
        for known, count in branches:
            terms = [vals[i][j] + known[j] for j in known if j != i and present[i][j] and known[j] is not None]
            if not terms:
                mu = None
            else:
                mu = min(terms)
                if terms.count(mu) > 1:
                    return INCONCLUSIVE, f"leading terms may cancel in equation {i}"
                if mu >= bound:
                    return INCONCLUSIVE, f"inhomogeneous term of equation {i} below the p-adic precision"
            if mu is None:
                roots = [(None, 1), (lam, p - 1)]
            elif mu < p * lam:
                roots = [(mu / p, p)]
            elif mu > p * lam:
                roots = [(mu - vc, 1), (lam, p - 1)]
            else:
                # leading equation y^p + c y = h with h != 0 has no root 0
                roots = [(lam, p)]
            for v, n in roots:
                k2 = dict(known)
                k2[i] = v
                new.append((k2, count * n))
        branches = new
    counts = {}
    for known, n in branches:
        present_vals = [v for v in known.values() if v is not None]
        if not present_vals:
            continue
        mu = min(present_vals)
        counts[mu] = counts.get(mu, 0) + n
    return BreakData(tuple(sorted(counts.items())), d, p), "conclusive"


def mixed_lower_breaks(Mp):
    return mixed_lower_breaks_explained(Mp)[0]


def prepare_for_mixed(M, E=None):
    """Base change by p when p does not divide e or A is not in k[[u^p]].

    Returns (module, Eisenstein polynomial, scale): breaks of the returned
    module are ``scale`` times those of M.
    """
    E = EisensteinPoly.default(M.p, M.e, int(M.c0bar)) if E is None else E
    stride_ok = all(k % M.p == 0 for row in M.A for x in row for k in x.terms)
    if M.e % M.p == 0 and stride_ok:
        return M, E, 1
    return base_change(M, M.p), E.substitute(M.p), M.p
