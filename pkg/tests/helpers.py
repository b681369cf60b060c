"""Independent oracles and random instance generators for the tests.

The oracles deliberately avoid the package's own arithmetic: field elements
are multiplied as raw polynomials, series as dicts of Fractions, so a bug in
the library cannot hide behind the same bug in its check.
"""

import random
from fractions import Fraction

from kisinram.algebra import standard_field
from kisinram.algebra.series import INF, USeries
from kisinram.errors import KisinRamError
from kisinram.kisin import make_module, mat_mul

# -- finite fields ------------------------------------------------------------


def naive_mul(a, b, modulus, p):
    """Product of low-first coefficient lists modulo a monic modulus."""
    m = len(modulus) - 1
    prod = [0] * (2 * m)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            prod[i + j] += x * y
    for k in range(len(prod) - 1, m - 1, -1):
        c = prod[k] % p
        if c:
            for i in range(m + 1):
                prod[k - m + i] -= c * modulus[i]
    return [c % p for c in prod[:m]]


def naive_pow(a, n, modulus, p):
    out = [1] + [0] * (len(modulus) - 2)
    for _ in range(n):
        out = naive_mul(out, a, modulus, p)
    return out


# -- series --------------------------------------------------------------------
# series as {Fraction exponent: coefficient list}; arithmetic through naive_mul


class NaiveRing:
    def __init__(self, field):
        self.p = field.p
        self.modulus = list(field.modulus)
        self.m = field.m

    def clean(self, s):
        return {g: c for g, c in s.items() if any(c)}

    def series(self, s, field):
        return {g: list(field(c).coeffs) for g, c in s.embed(field).items()}

    def mul(self, a, b, prec):
        out = {}
        for ga, ca in a.items():
            for gb, cb in b.items():
                g = ga + gb
                if g < prec:
                    prod = naive_mul(ca, cb, self.modulus, self.p)
                    acc = out.get(g, [0] * self.m)
                    out[g] = [(x + y) % self.p for x, y in zip(acc, prod)]
        return self.clean(out)

    def pow(self, a, n, prec):
        out = {Fraction(0): [1] + [0] * (self.m - 1)}
        for _ in range(n):
            out = self.mul(out, a, prec)
        return out

    def add(self, a, b):
        out = dict(a)
        for g, c in b.items():
            acc = out.get(g, [0] * self.m)
            out[g] = [(x + y) % self.p for x, y in zip(acc, c)]
        return self.clean(out)

    def sub(self, a, b):
        out = dict(a)
        for g, c in b.items():
            acc = out.get(g, [0] * self.m)
            out[g] = [(x - y) % self.p for x, y in zip(acc, c)]
        return self.clean(out)


def plug_back_valuation(A, x, prec):
    """min_j v(x_j^p - sum_i A[i][j] x_i) below prec, or None if nothing is visible.

    Uses raw polynomial arithmetic for the coefficients, not the field class.
    """
    field = x[0].field
    ring = NaiveRing(field)
    p = field.p
    d = len(A)
    xs = [ring.series(v, field) for v in x]
    best = None
    for j in range(d):
        r = ring.pow(xs[j], p, prec)
        for i in range(d):
            r = ring.sub(r, ring.mul(ring.series(A[i][j], field), xs[i], prec))
        if r:
            v = min(r)
            best = v if best is None else min(best, v)
    return best


# -- random modules --------------------------------------------------------------


def random_poly(rng, field, max_deg, stride=1, density=0.5):
    terms = {}
    for k in range(0, max_deg + 1, stride):
        if rng.random() < density:
            terms[k] = field(rng.randrange(field.p))
    return USeries(field, terms)


def random_triangular(rng, p=3, es=(1, 2, 3), dmax=2, r=1):
    """An admissible upper triangular module (retries until the height fits)."""
    field = standard_field(p, 1)
    while True:
        e = rng.choice(es)
        d = rng.randint(1, dmax)
        er = e * r
        A = []
        for i in range(d):
            row = []
            for j in range(d):
                if i == j:
                    s = rng.randint(0, er)
                    unit = USeries(field, {0: rng.randrange(1, p)}) + random_poly(rng, field, 2).shift(1)
                    row.append(unit.shift(s))
                elif j > i:
                    row.append(random_poly(rng, field, er + 1, density=0.4))
                else:
                    row.append(USeries.zero(field))
            A.append(row)
        try:
            return make_module(field, e, r, A)
        except KisinRamError as exc:
            if exc.code != "height-exceeded":
                raise


def random_unit_matrix(rng, field, d, stride=1, max_deg=2):
    """Product of a unipotent upper and a lower triangular unit matrix."""
    p = field.p

    def poly():
        return random_poly(rng, field, max_deg * stride, stride=stride)

    one = USeries(field, {0: 1})
    zero = USeries.zero(field)
    U = [[one if i == j else (poly() if j > i else zero) for j in range(d)] for i in range(d)]
    L = [
        [USeries(field, {0: rng.randrange(1, p)}) if i == j else (poly() if j < i else zero) for j in range(d)]
        for i in range(d)
    ]
    return mat_mul(U, L)


def random_stride_module(rng, p=3, es=(3, 6), dmax=3):
    """U diag(u^s_i) V with U, V units over k[[u^p]] and p | s_i <= e (r = 1)."""
    field = standard_field(p, 1)
    e = rng.choice(es)
    d = rng.randint(1, dmax)
    s = [rng.choice(range(0, e + 1, p)) for _ in range(d)]
    zero = USeries.zero(field)
    D = [[USeries(field, {s[i]: 1}) if i == j else zero for j in range(d)] for i in range(d)]
    A = mat_mul(mat_mul(random_unit_matrix(rng, field, d, stride=p), D), random_unit_matrix(rng, field, d, stride=p))
    return make_module(field, e, 1, A)


def random_general_module(rng, ps=(3, 5), es=(1, 2, 3), dmax=3, rs=(1, 2)):
    """U diag(u^s_i) V with unit U, V over k[[u]]: generally not triangular."""
    p = rng.choice(ps)
    field = standard_field(p, 1)
    e, r, d = rng.choice(es), rng.choice(rs), rng.randint(1, dmax)
    zero = USeries.zero(field)
    s = [rng.randint(0, e * r) for _ in range(d)]
    D = [[USeries(field, {s[i]: rng.randrange(1, p)}) if i == j else zero for j in range(d)] for i in range(d)]
    A = mat_mul(mat_mul(random_unit_matrix(rng, field, d), D), random_unit_matrix(rng, field, d))
    return make_module(field, e, r, A, c0bar=rng.randrange(1, p))


def rng_for(seed):
    return random.Random(seed)


def with_extra_prec(M, extra):
    """The same (polynomial) matrix, known to a higher u-adic precision."""
    A = [[x.with_precision(INF) for x in row] for row in M.A]
    return make_module(M.field, M.e, M.r, A, c0bar=M.c0bar, prec=M.prec + extra)
