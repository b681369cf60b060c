"""Finite fields F_{p^m} for odd p.

A field is ``F_p[x]/(modulus)``; elements are tuples of m residues in the
power basis ``1, x, ..., x^(m-1)``. For a given (p, m) the default modulus is
the lexicographically smallest monic irreducible polynomial, comparing the
low-first coefficient tuples ``(c_0, ..., c_{m-1}, 1)``.
"""

from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from math import gcd

from . import fp
from ..errors import KisinRamError

# fields up to this size get discrete-log tables for multiplication
TABLE_LIMIT = 200_000


def _is_prime(n):
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def _prime_factors(n):
    out, i = [], 2
    while i * i <= n:
        if n % i == 0:
            out.append(i)
            while n % i == 0:
                n //= i
        i += 1
    if n > 1:
        out.append(n)
    return out


@lru_cache(maxsize=None)
def _check_modulus(p, modulus):
    if not _is_prime(p) or p == 2:
        raise KisinRamError("bad-field", f"p = {p} must be an odd prime")
    if modulus[-1] != 1 or any(not 0 <= c < p for c in modulus):
        raise KisinRamError("bad-field", "modulus must be monic with residues in [0, p)")
    if not fp.is_irreducible(list(modulus), p):
        raise KisinRamError("bad-field", f"modulus {list(modulus)} is reducible mod {p}")


@dataclass(frozen=True)
class FieldDesc:
    p: int
    m: int
    modulus: tuple

    def __post_init__(self):
        modulus = tuple(int(c) for c in self.modulus)
        if self.m == 1:
            # every degree-1 modulus gives the same prime field; normalize
            modulus = (0, 1)
        object.__setattr__(self, "modulus", modulus)
        if len(self.modulus) != self.m + 1:
            raise KisinRamError("bad-field", "modulus degree does not match m")
        _check_modulus(self.p, self.modulus)

    @property
    def order(self):
        return self.p ** self.m

    def __repr__(self):
        return f"GF({self.p}^{self.m})" if self.m > 1 else f"GF({self.p})"

    def __call__(self, value):
        """Element from an int (prime-field residue), a coordinate list, or an FFElem."""
        if isinstance(value, FFElem):
            if value.field == self:
                return value
            return embed(value, self)
        if isinstance(value, int):
            return FFElem(self, (value % self.p,) + (0,) * (self.m - 1))
        coeffs = [int(c) % self.p for c in value]
        if len(coeffs) > self.m:
            raise KisinRamError("bad-element", f"{len(coeffs)} coordinates for degree {self.m}")
        return FFElem(self, tuple(coeffs) + (0,) * (self.m - len(coeffs)))

    @property
    def zero(self):
        return self(0)

    @property
    def one(self):
        return self(1)

    @property
    def gen(self):
        return self([0, 1]) if self.m > 1 else FFElem(self, (-self.modulus[0] % self.p,))

    def from_int(self, n):
        coeffs = []
        for _ in range(self.m):
            n, c = divmod(n, self.p)
            coeffs.append(c)
        return FFElem(self, tuple(coeffs))

    def elements(self):
        """All elements in increasing encoding order."""
        for n in range(self.order):
            yield self.from_int(n)

    # raw tuple arithmetic --------------------------------------------------

    def _mul(self, a, b):
        p = self.p
        if self.m == 1:
            return (a[0] * b[0] % p,)
        tables = _tables(p, self.modulus)
        if tables is not None:
            exp, log = tables
            la = log.get(a)
            lb = log.get(b)
            if la is None or lb is None:
                return (0,) * self.m
            return exp[(la + lb) % (len(exp))]
        return _polymul_mod(a, b, self.modulus, p)

    def _inv(self, a):
        p = self.p
        if self.m == 1:
            if a[0] == 0:
                raise ZeroDivisionError("inverse of zero")
            return (pow(a[0], p - 2, p),)
        tables = _tables(p, self.modulus)
        if tables is not None:
            exp, log = tables
            la = log.get(a)
            if la is None:
                raise ZeroDivisionError("inverse of zero")
            return exp[-la % len(exp)]
        if not any(a):
            raise ZeroDivisionError("inverse of zero")
        return _raw_pow(self, a, self.order - 2)


def _polymul_mod(a, b, modulus, p):
    m = len(modulus) - 1
    out = [0] * (2 * m - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    for k in range(2 * m - 2, m - 1, -1):
        c = out[k] % p
        if c:
            for i in range(m):
                out[k - m + i] -= c * modulus[i]
    return tuple(c % p for c in out[:m])


def _raw_pow(field, a, n):
    result = (1,) + (0,) * (field.m - 1)
    base = a
    while n:
        if n & 1:
            result = _polymul_mod(result, base, field.modulus, field.p)
        base = _polymul_mod(base, base, field.modulus, field.p)
        n >>= 1
    return result


@lru_cache(maxsize=None)
def _tables(p, modulus):
    m = len(modulus) - 1
    q = p ** m
    if q > TABLE_LIMIT:
        return None
    one = (1,) + (0,) * (m - 1)
    factors = _prime_factors(q - 1)
    field = FieldDesc(p, m, modulus)
    for n in range(1, q):
        g = field.from_int(n).coeffs
        if all(_raw_pow(field, g, (q - 1) // f) != one for f in factors):
            break
    exp = [one]
    for _ in range(q - 2):
        exp.append(_polymul_mod(exp[-1], g, modulus, p))
    log = {v: i for i, v in enumerate(exp)}
    return exp, log


class FFElem:
    """Immutable element of a finite field."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field, coeffs):
        self.field = field
        self.coeffs = coeffs

    def _coerce(self, other):
        if isinstance(other, FFElem):
            if other.field is not self.field and other.field != self.field:
                raise KisinRamError("field-mismatch", f"{other.field} vs {self.field}")
            return other.coeffs
        if isinstance(other, int):
            return self.field(other).coeffs
        return None

    def __add__(self, other):
        b = self._coerce(other)
        if b is None:
            return NotImplemented
        p = self.field.p
        return FFElem(self.field, tuple((x + y) % p for x, y in zip(self.coeffs, b)))

    __radd__ = __add__

    def __neg__(self):
        p = self.field.p
        return FFElem(self.field, tuple(-x % p for x in self.coeffs))

    def __sub__(self, other):
        b = self._coerce(other)
        if b is None:
            return NotImplemented
        p = self.field.p
        return FFElem(self.field, tuple((x - y) % p for x, y in zip(self.coeffs, b)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        b = self._coerce(other)
        if b is None:
            return NotImplemented
        return FFElem(self.field, self.field._mul(self.coeffs, b))

    __rmul__ = __mul__

    def inverse(self):
        return FFElem(self.field, self.field._inv(self.coeffs))

    def __truediv__(self, other):
        b = self._coerce(other)
        if b is None:
            return NotImplemented
        return FFElem(self.field, self.field._mul(self.coeffs, self.field._inv(b)))

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        if self.field.m == 1:
            return FFElem(self.field, (pow(self.coeffs[0], n, self.field.p),))
        if not any(self.coeffs):
            return self if n else self.field.one
        tables = _tables(self.field.p, self.field.modulus)
        if tables is not None:
            exp, log = tables
            return FFElem(self.field, exp[log[self.coeffs] * n % len(exp)])
        return FFElem(self.field, _raw_pow(self.field, self.coeffs, n))

    def is_zero(self):
        return not any(self.coeffs)

    def __bool__(self):
        return any(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, FFElem):
            return self.field == other.field and self.coeffs == other.coeffs
        if isinstance(other, int):
            return self.coeffs == self.field(other).coeffs
        return NotImplemented

    def __hash__(self):
        return hash((self.field.p, self.field.modulus, self.coeffs))

    def __int__(self):
        n = 0
        for c in reversed(self.coeffs):
            n = n * self.field.p + c
        return n

    def in_prime_field(self):
        return not any(self.coeffs[1:])

    def frobenius(self):
        return self ** self.field.p

    def __repr__(self):
        if self.field.m == 1:
            return str(self.coeffs[0])
        terms = []
        for i, c in enumerate(self.coeffs):
            if c:
                mono = "" if i == 0 else ("t" if i == 1 else f"t^{i}")
                terms.append(str(c) if not mono else (mono if c == 1 else f"{c}*{mono}"))
        return " + ".join(terms) or "0"

    def to_json(self):
        return self.coeffs[0] if self.field.m == 1 else list(self.coeffs)


# -- field construction and embeddings ---------------------------------------


@lru_cache(maxsize=None)
def standard_field(p, m):
    """F_{p^m} with the lexicographically smallest monic irreducible modulus."""
    if m == 1:
        return FieldDesc(p, 1, (0, 1))
    for low in product(range(p), repeat=m):
        if low[0] == 0:
            continue
        if fp.is_irreducible(list(low) + [1], p):
            return FieldDesc(p, m, tuple(low) + (1,))
    raise AssertionError("no irreducible polynomial found")


def prime_field(p):
    return standard_field(p, 1)


@lru_cache(maxsize=None)
def _embedding_image(src, dst):
    if src == dst:
        return dst.gen.coeffs
    if src.p != dst.p or dst.m % src.m:
        raise KisinRamError("field-mismatch", f"cannot embed {src} into {dst}")
    if src.m == 1:
        return FFElem(dst, (-src.modulus[0] % src.p,) + (0,) * (dst.m - 1)).coeffs
    roots = poly_roots([dst(c) for c in src.modulus], dst)
    return roots[0].coeffs


def embed(x, dst):
    """Image of ``x`` under the deterministic embedding of its field into ``dst``."""
    src = x.field
    if src == dst:
        return x
    if x.in_prime_field():
        return dst(x.coeffs[0])
    img = FFElem(dst, _embedding_image(src, dst))
    out = dst.zero
    for c in reversed(x.coeffs):
        out = out * img + c
    return out


def compositum(*fields):
    """Smallest standard field containing all the given fields."""
    p = fields[0].p
    m = 1
    for f in fields:
        if f.p != p:
            raise KisinRamError("field-mismatch", "different characteristics")
        m = m * f.m // gcd(m, f.m)
    if len(set(fields)) == 1:
        return fields[0]
    for f in fields:
        if f.m == m:
            return f
    return standard_field(p, m)


# -- polynomials over F_q (root finding for embeddings) ----------------------


def _q_trim(a):
    while a and a[-1].is_zero():
        a.pop()
    return a


def _q_mul(a, b, field):
    if not a or not b:
        return []
    out = [field.zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = out[i + j] + x * y
    return _q_trim(out)


def _q_divmod(a, b, field):
    a, b = _q_trim(list(a)), _q_trim(list(b))
    inv = b[-1].inverse()
    q = [field.zero] * max(len(a) - len(b) + 1, 0)
    r = list(a)
    while len(r) >= len(b):
        c = r[-1] * inv
        shift = len(r) - len(b)
        q[shift] = c
        for i, y in enumerate(b):
            r[shift + i] = r[shift + i] - c * y
        _q_trim(r)
    return _q_trim(q), r


def _q_gcd(a, b, field):
    a, b = _q_trim(list(a)), _q_trim(list(b))
    while b:
        a, b = b, _q_divmod(a, b, field)[1]
    if a:
        inv = a[-1].inverse()
        a = [c * inv for c in a]
    return a


def _q_powmod(a, n, mod, field):
    result = [field.one]
    base = _q_divmod(a, mod, field)[1]
    while n:
        if n & 1:
            result = _q_divmod(_q_mul(result, base, field), mod, field)[1]
        base = _q_divmod(_q_mul(base, base, field), mod, field)[1]
        n >>= 1
    return result


def _q_sub(a, b, field):
    n = max(len(a), len(b))
    out = [(a[i] if i < len(a) else field.zero) - (b[i] if i < len(b) else field.zero) for i in range(n)]
    return _q_trim(out)


def poly_roots(coeffs, field):
    """Roots in ``field`` of a polynomial (low-first FFElem list), sorted by encoding."""
    f = _q_trim(list(coeffs))
    if len(f) < 2:
        return []
    q = field.order
    x = [field.zero, field.one]
    g = _q_gcd(f, _q_sub(_q_powmod(x, q, f, field), x, field), field)
    roots = []

    def split(h):
        if len(h) <= 1:
            return
        if len(h) == 2:
            roots.append(-h[0] / h[1])
            return
        for delta in field.elements():
            w = _q_sub(_q_powmod([delta, field.one], (q - 1) // 2, h, field), [field.one], field)
            d = _q_gcd(h, w, field)
            if 1 < len(d) < len(h):
                split(d)
                split(_q_divmod(h, d, field)[0])
                return
        raise AssertionError("root splitting failed")

    split(g)
    return sorted(roots, key=int)


# -- root extraction -----------------------------------------------------------


def ff_pth_root(x):
    """Unique y with y^p = x."""
    return x ** (x.field.p ** (x.field.m - 1))


def _additive_matrix(a):
    """Matrix over F_p of y -> y^p - a*y in the power basis."""
    field = a.field
    cols = []
    for k in range(field.m):
        basis = field.from_int(field.p ** k)
        cols.append(list((basis ** field.p - a * basis).coeffs))
    return [list(row) for row in zip(*cols)]


def _smallest(field, vectors):
    return min((FFElem(field, tuple(v)) for v in vectors), key=int)


def _span(p, basis):
    out = []
    for cs in product(range(p), repeat=len(basis)):
        out.append([sum(c * b[i] for c, b in zip(cs, basis)) % p for i in range(len(basis[0]))])
    return out


# Resource limit: towers of Kummer and Artin-Schreier extensions can compound
# quickly (degree up to p - 1 and p per step), and finding the standard
# modulus gets slow well before arithmetic does.
MAX_FIELD_DEGREE = 12


def _extensions(field, max_degree):
    yield field
    for n in range(2, max_degree + 1):
        if field.m * n > MAX_FIELD_DEGREE:
            raise KisinRamError(
                "field-degree-exceeded",
                f"a root needs an extension of F_{field.p}^{field.m} beyond degree {MAX_FIELD_DEGREE} over F_{field.p}",
                degree=field.m * n,
                limit=MAX_FIELD_DEGREE,
            )
        yield standard_field(field.p, field.m * n)


def ff_solve_kummer(a):
    """A generator of the solutions of x^(p-1) = a, and the field holding them.

    The solutions are the nonzero roots of the F_p-linear map y -> y^p - a*y,
    so they form c*generator for c in F_p^x. The field is the input field or
    its smallest standard extension containing a root.
    """
    if a.is_zero():
        raise KisinRamError("kummer-zero", "x^(p-1) = 0 has no nonzero solution")
    p = a.field.p
    for field in _extensions(a.field, p - 1):
        aa = embed(a, field)
        ker = fp.kernel(_additive_matrix(aa), p)
        if ker:
            nonzero = [v for v in _span(p, ker) if any(v)]
            return _smallest(field, nonzero), field
    raise AssertionError("Kummer equation unsolvable in degree p-1 extension")


def ff_solve_artin_schreier(a, b):
    """Smallest-encoding c with c^p - a*c = b, and the field holding it."""
    p = a.field.p
    if a.is_zero():
        return ff_pth_root(b), b.field
    for field in _extensions(a.field, p):
        aa, bb = embed(a, field), embed(b, field)
        mat = _additive_matrix(aa)
        sol = fp.solve(mat, list(bb.coeffs), p)
        if sol is not None:
            ker = fp.kernel(mat, p)
            cands = [[(s + k) % p for s, k in zip(sol, kv)] for kv in _span(p, ker)] if ker else [sol]
            return _smallest(field, cands), field
    raise AssertionError("Artin-Schreier equation unsolvable in degree p extension")
