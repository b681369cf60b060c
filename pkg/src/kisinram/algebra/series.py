"""Truncated power series and Puiseux series over finite fields.

A series stores its nonzero terms below a precision ``prec``; it means
``sum(c * u**g) + O(u**prec)``. Exponents are kept as integers ``k`` over a
common denominator ``den`` (the term is ``c * u**(k/den)``), and ``prec`` is a
``Fraction`` or ``math.inf`` for series known exactly.
"""

import math
from fractions import Fraction

from ..errors import KisinRamError
from .field import FFElem, embed, ff_pth_root

INF = math.inf


def _frac(x):
    if x == INF:
        return INF
    return Fraction(x)


def default_denominator_cap(p):
    return (p - 1) * p ** 4


class PuiseuxSeries:
    """Truncated series with non-negative rational exponents."""

    __slots__ = ("field", "den", "terms", "prec")

    def __init__(self, field, terms=None, prec=INF):
        """``terms`` maps exponents (int, Fraction or "a/b") to coefficients."""
        terms = terms or {}
        exps = {Fraction(g): c for g, c in terms.items()}
        den = 1
        for g in exps:
            den = math.lcm(den, g.denominator)
        raw = {}
        for g, c in exps.items():
            if g < 0:
                raise KisinRamError("negative-exponent", f"exponent {g} < 0")
            c = field(c)
            if c:
                raw[int(g * den)] = c
        self._init(field, den, raw, _frac(prec))

    def _init(self, field, den, raw, prec):
        self.field = field
        if prec != INF:
            # k / den < prec, in integers
            num, pd = prec.numerator * den, prec.denominator
            raw = {k: c for k, c in raw.items() if k * pd < num}
        g = den
        for k in raw:
            g = math.gcd(g, k)
            if g == 1:
                break
        if g > 1:
            raw = {k // g: c for k, c in raw.items()}
            den //= g
        self.den = den
        self.terms = raw
        self.prec = prec

    @classmethod
    def _make(cls, field, den, raw, prec):
        obj = cls.__new__(cls)
        obj._init(field, den, raw, prec)
        return obj

    @classmethod
    def zero(cls, field, prec=INF):
        return cls._make(field, 1, {}, _frac(prec))

    @classmethod
    def monomial(cls, coeff, exponent, prec=INF):
        g = Fraction(exponent)
        return PuiseuxSeries._make(coeff.field, g.denominator, {g.numerator: coeff} if coeff else {}, _frac(prec))

    # -- inspection ---------------------------------------------------------

    def is_zero(self):
        """True when no term is visible below the precision."""
        return not self.terms

    def valuation(self):
        """Exact valuation, or None when indistinguishable from zero."""
        if not self.terms:
            return None
        return Fraction(min(self.terms), self.den)

    def valuation_lower_bound(self):
        v = self.valuation()
        return self.prec if v is None else v

    def leading(self):
        k = min(self.terms)
        return Fraction(k, self.den), self.terms[k]

    def coefficient(self, exponent):
        g = Fraction(exponent) * self.den
        if g.denominator != 1:
            return self.field.zero
        return self.terms.get(int(g), self.field.zero)

    def items(self):
        """(exponent, coefficient) pairs in increasing exponent order."""
        return [(Fraction(k, self.den), self.terms[k]) for k in sorted(self.terms)]

    def exponents(self):
        return [Fraction(k, self.den) for k in sorted(self.terms)]

    def __eq__(self, other):
        if not isinstance(other, PuiseuxSeries):
            return NotImplemented
        return (
            self.field == other.field
            and self.prec == other.prec
            and self.den == other.den
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.den, tuple(sorted(self.terms)), self.prec))

    def agrees_with(self, other):
        """Termwise equality below the smaller of the two precisions."""
        prec = min(self.prec, other.prec)
        return (self - other).truncate(prec).is_zero()

    def __repr__(self):
        parts = []
        for g, c in self.items():
            mono = "" if g == 0 else ("u" if g == 1 else f"u^({g})")
            parts.append(f"({c})*{mono}" if mono else f"({c})")
        body = " + ".join(parts) or "0"
        return f"{body} + O(u^({self.prec}))" if self.prec != INF else body

    # -- arithmetic ---------------------------------------------------------

    def _align(self, other):
        if isinstance(other, (FFElem, int)):
            c = self.field(other)
            return type(self)._make(self.field, 1, {0: c} if c else {}, INF)
        if not isinstance(other, PuiseuxSeries):
            return None
        if other.field != self.field:
            raise KisinRamError("field-mismatch", f"{self.field} vs {other.field}")
        return other

    @staticmethod
    def _cls(a, b):
        return USeries if isinstance(a, USeries) and isinstance(b, USeries) else PuiseuxSeries

    def _scaled(self, den):
        f = den // self.den
        return {k * f: c for k, c in self.terms.items()}

    def __add__(self, other):
        other = self._align(other)
        if other is None:
            return NotImplemented
        den = math.lcm(self.den, other.den)
        raw = self._scaled(den)
        for k, c in other._scaled(den).items():
            s = raw.get(k)
            if s is None:
                raw[k] = c
            else:
                s = s + c
                if s:
                    raw[k] = s
                else:
                    del raw[k]
        return self._cls(self, other)._make(self.field, den, raw, min(self.prec, other.prec))

    __radd__ = __add__

    def __neg__(self):
        return type(self)._make(self.field, self.den, {k: -c for k, c in self.terms.items()}, self.prec)

    def __sub__(self, other):
        other = self._align(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c):
        """Multiply by a field constant."""
        if not c:
            return type(self)._make(self.field, 1, {}, self.prec)
        return type(self)._make(self.field, self.den, {k: v * c for k, v in self.terms.items()}, self.prec)

    def __mul__(self, other):
        if isinstance(other, (FFElem, int)):
            return self.scale(self.field(other))
        other = self._align(other)
        if other is None:
            return NotImplemented
        va = self.valuation_lower_bound()
        vb = other.valuation_lower_bound()
        prec = min(self.prec + vb, other.prec + va)
        den = math.lcm(self.den, other.den)
        a = self._scaled(den)
        b = other._scaled(den)
        # integer cutoff: k >= prec * den  iff  k >= ceil(prec * den)
        cutoff = INF if prec == INF else -((-prec.numerator * den) // prec.denominator)
        out = {}
        bitems = sorted(b.items())
        if self.field.m == 1:
            # prime field: multiply residues directly
            p = self.field.p
            bi = [(kb, int(cb)) for kb, cb in bitems]
            acc = {}
            for ka, ca in a.items():
                ca = int(ca)
                for kb, cb in bi:
                    k = ka + kb
                    if k >= cutoff:
                        break
                    acc[k] = acc.get(k, 0) + ca * cb
            fld = self.field
            out = {k: fld(c) for k, c in acc.items() if c % p}
            return self._cls(self, other)._make(fld, den, out, prec)
        for ka, ca in a.items():
            for kb, cb in bitems:
                k = ka + kb
                if k >= cutoff:
                    break
                s = out.get(k)
                out[k] = ca * cb if s is None else s + ca * cb
        out = {k: c for k, c in out.items() if c}
        return self._cls(self, other)._make(self.field, den, out, prec)

    __rmul__ = __mul__

    def __pow__(self, n):
        if n < 0:
            raise ValueError("negative powers of series are not supported")
        result = type(self)._make(self.field, 1, {0: self.field.one}, INF)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def shift(self, exponent):
        """Multiply by u^exponent (exponent may be negative if the result stays integral)."""
        g = Fraction(exponent)
        den = math.lcm(self.den, g.denominator)
        off = int(g * den)
        raw = {k + off: c for k, c in self._scaled(den).items()}
        if raw and min(raw) < 0:
            raise KisinRamError("negative-exponent", "shift would create negative exponents")
        prec = self.prec + g
        if prec < 0:
            prec = Fraction(0)
        cls = USeries if (den == 1 and isinstance(self, USeries)) else PuiseuxSeries
        return cls._make(self.field, den, raw, prec)

    def truncate(self, prec):
        prec = min(self.prec, _frac(prec))
        return type(self)._make(self.field, self.den, dict(self.terms), prec)

    def with_precision(self, prec):
        """Same terms, declared precision ``prec`` (used for exact inputs)."""
        return type(self)._make(self.field, self.den, dict(self.terms), _frac(prec))

    def embed(self, field):
        if field == self.field:
            return self
        return type(self)._make(field, self.den, {k: embed(c, field) for k, c in self.terms.items()}, self.prec)

    def frobenius(self):
        """f -> f^p: c u^g -> c^p u^(pg), precision multiplied by p."""
        p = self.field.p
        return type(self)._make(
            self.field, self.den, {k * p: c ** p for k, c in self.terms.items()}, self.prec * p
        )

    def pth_root(self, cap=None):
        """Inverse of :meth:`frobenius`; exponent denominators gain a factor p."""
        p = self.field.p
        cap = default_denominator_cap(p) if cap is None else cap
        out = PuiseuxSeries._make(
            self.field, self.den * p, {k: ff_pth_root(c) for k, c in self.terms.items()}, self.prec / p
        )
        if out.den > cap:
            raise KisinRamError("denominator-overflow", f"denominator {out.den} exceeds cap {cap}")
        return out

    def substitute(self, n):
        """u -> u^n."""
        return type(self)._make(self.field, self.den, {k * n: c for k, c in self.terms.items()}, self.prec * n)

    def to_json(self):
        out = []
        for g, c in self.items():
            exp = g.numerator if g.denominator == 1 else f"{g.numerator}/{g.denominator}"
            out.append([exp, c.to_json()])
        return out


class USeries(PuiseuxSeries):
    """Truncated power series in k[[u]] (integer exponents)."""

    __slots__ = ()

    def __init__(self, field, terms=None, prec=INF):
        super().__init__(field, terms, prec)
        if self.den != 1:
            raise KisinRamError("non-integral-exponent", "USeries exponents must be integers")

    @classmethod
    def zero(cls, field, prec=INF):
        return cls._make(field, 1, {}, _frac(prec))

    @classmethod
    def constant(cls, c, prec=INF):
        return cls._make(c.field, 1, {0: c} if c else {}, _frac(prec))

    @classmethod
    def from_puiseux(cls, f):
        if f.den != 1:
            raise KisinRamError("non-integral-exponent", "series has fractional exponents")
        return cls._make(f.field, 1, dict(f.terms), f.prec)

    def coeff_at(self, k):
        return self.terms.get(k, self.field.zero)


def series_invert(f):
    """Inverse of a unit of k[[u]] modulo u^prec."""
    if f.is_zero() or f.valuation() != 0:
        raise KisinRamError("non-unit", "series has positive valuation")
    if f.den != 1:
        raise KisinRamError("non-integral-exponent", "series_invert expects k[[u]]")
    prec = f.prec
    c0inv = f.terms[0].inverse()
    if prec == INF:
        if len(f.terms) == 1:
            return USeries.constant(c0inv)
        raise KisinRamError("precision-exhausted", "inverse of a non-constant exact series needs a precision")
    n = math.ceil(prec)
    inv = [None] * n
    inv[0] = c0inv
    zero = f.field.zero
    fterms = sorted((k, c) for k, c in f.terms.items() if k > 0)
    for k in range(1, n):
        s = zero
        for j, c in fterms:
            if j > k:
                break
            if inv[k - j]:
                s = s + c * inv[k - j]
        inv[k] = -s * c0inv
    return USeries._make(f.field, 1, {k: c for k, c in enumerate(inv) if c}, prec)


def series_frobenius(f):
    return f.frobenius()


def puiseux_pth_root(f, cap=None):
    return f.pth_root(cap)
