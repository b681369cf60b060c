"""JSON schema for modules, series and reports.

Field elements are ints (prime field) or low-first coefficient lists; series
are lists of [exponent, coefficient] with exponents ints or "a/b" strings;
rationals in reports are [numerator, denominator] pairs.
"""

import json
import math
from fractions import Fraction

from .algebra.field import FieldDesc, standard_field
from .algebra.series import PuiseuxSeries, USeries
from .errors import KisinRamError
from .kisin import make_module

MODULE_KEYS = {"name", "p", "m", "modulus", "e", "r", "c0bar", "prec", "A"}
MIXED_KEYS = {"E", "N"}


class SchemaError(Exception):
    """Broken input (exit code 1), as opposed to a mathematical rejection."""

    def __init__(self, message, code="schema-error"):
        super().__init__(message)
        self.code = code
        self.message = message

    def as_dict(self):
        return {"code": self.code, "message": self.message, "context": {}}


def _require_int(obj, key, minimum=None):
    v = obj.get(key)
    if not isinstance(v, int) or isinstance(v, bool):
        raise SchemaError(f"{key!r} must be an integer")
    if minimum is not None and v < minimum:
        raise SchemaError(f"{key!r} must be >= {minimum}")
    return v


def parse_field(obj, modulus_override=None):
    p = _require_int(obj, "p", 3)
    m = obj.get("m", 1)
    if not isinstance(m, int) or m < 1:
        raise SchemaError("'m' must be a positive integer")
    modulus = modulus_override if modulus_override is not None else obj.get("modulus")
    if modulus is None:
        return standard_field(p, m)
    if not isinstance(modulus, list) or not all(isinstance(c, int) for c in modulus):
        raise SchemaError("'modulus' must be a list of integers (low first, monic)")
    if len(modulus) != m + 1:
        raise SchemaError(f"modulus must have degree m = {m}")
    return FieldDesc(p, m, tuple(c % p for c in modulus))


def parse_coeff(c, field):
    if isinstance(c, bool) or not isinstance(c, (int, list)):
        raise SchemaError(f"bad field element {c!r}")
    if isinstance(c, list) and (len(c) > field.m or not all(isinstance(x, int) for x in c)):
        raise SchemaError(f"bad field element {c!r}")
    return field(c)


def parse_exponent(x):
    if isinstance(x, bool):
        raise SchemaError(f"bad exponent {x!r}")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x)
        except (ValueError, ZeroDivisionError):
            raise SchemaError(f"bad exponent {x!r}") from None
    if isinstance(x, list) and len(x) == 2 and all(isinstance(v, int) for v in x) and x[1] > 0:
        return Fraction(x[0], x[1])
    raise SchemaError(f"bad exponent {x!r}")


def parse_series(obj, field, integral=True):
    if not isinstance(obj, list):
        raise SchemaError(f"series must be a list of [exponent, coefficient], got {obj!r}")
    terms = {}
    for term in obj:
        if not isinstance(term, list) or len(term) != 2:
            raise SchemaError(f"bad series term {term!r}")
        g = parse_exponent(term[0])
        if g < 0:
            raise SchemaError(f"negative exponent {g}")
        c = parse_coeff(term[1], field)
        terms[g] = terms.get(g, field.zero) + c
    if integral:
        if any(g.denominator != 1 for g in terms):
            raise SchemaError("matrix entries must have integer exponents")
        return USeries(field, terms)
    return PuiseuxSeries(field, terms)


def parse_module(obj, prec=None, modulus=None, extra_keys=()):
    if not isinstance(obj, dict):
        raise SchemaError("module must be a JSON object")
    unknown = set(obj) - MODULE_KEYS - set(extra_keys)
    if unknown:
        raise SchemaError(f"unknown keys: {sorted(unknown)}")
    for key in ("p", "e", "r", "A"):
        if key not in obj:
            raise SchemaError(f"missing key {key!r}")
    field = parse_field(obj, modulus)
    e = _require_int(obj, "e", 1)
    r = _require_int(obj, "r", 1)
    A = obj["A"]
    if not isinstance(A, list) or not A or not all(isinstance(row, list) and len(row) == len(A) for row in A):
        raise SchemaError("'A' must be a nonempty square matrix of series")
    rows = [[parse_series(x, field) for x in row] for row in A]
    c0bar = obj.get("c0bar")
    c0bar = None if c0bar is None else parse_coeff(c0bar, field)
    if prec is None and "prec" in obj:
        prec = _require_int(obj, "prec", 1)
    return make_module(field, e, r, rows, c0bar=c0bar, prec=prec)


def parse_mixed(obj):
    from .mixedchar import DEFAULT_N, EisensteinPoly

    E = obj.get("E")
    N = obj.get("N", DEFAULT_N)
    if E is not None and (not isinstance(E, list) or not all(isinstance(c, int) for c in E)):
        raise SchemaError("'E' must be a list of integers c_0..c_e")
    if not isinstance(N, int) or N < 1:
        raise SchemaError("'N' must be a positive integer")
    return (None if E is None else EisensteinPoly(obj["p"], tuple(E))), N


# -- output ------------------------------------------------------------------


def rational(x):
    if x == math.inf:
        return "inf"
    x = Fraction(x)
    return [x.numerator, x.denominator]


def field_json(field):
    return {"p": field.p, "m": field.m, "modulus": list(field.modulus)}


def series_json(s):
    return {"terms": s.to_json(), "prec": rational(s.prec)}


def module_json(M):
    out = {
        "p": M.p,
        "m": M.field.m,
        "e": M.e,
        "r": M.r,
        "c0bar": M.c0bar.to_json(),
        "prec": M.prec,
        "A": [[x.to_json() for x in row] for row in M.A],
    }
    if M.field.m > 1:
        out["modulus"] = list(M.field.modulus)
    return out


def _default(x):
    if isinstance(x, Fraction):
        return rational(x)
    if isinstance(x, float) and x == math.inf:
        return "inf"
    return str(x)


def dumps(doc, pretty=False):
    if pretty:
        return json.dumps(doc, sort_keys=True, indent=2, default=_default) + "\n"
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), default=_default) + "\n"


__all__ = [
    "KisinRamError",
    "SchemaError",
    "dumps",
    "field_json",
    "module_json",
    "parse_field",
    "parse_mixed",
    "parse_module",
    "parse_series",
    "rational",
    "series_json",
]
