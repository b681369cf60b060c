"""Shipped instances for verify-main and the acceptance suite.

Instances are plain dicts in the module JSON schema, so the same data can be
written to disk and fed back through the CLI.
"""

RANK_ONE_PRIMES = (3, 5)
RANK_ONE_MAX_E = 6


def rank_one_grid(primes=RANK_ONE_PRIMES, max_e=RANK_ONE_MAX_E, rs=(1, 2)):
    """All rank-one modules phi(n) = u^s n with 0 <= s <= er."""
    out = []
    for p in primes:
        for e in range(1, max_e + 1):
            for r in rs:
                for s in range(e * r + 1):
                    out.append({"name": f"rank1-p{p}-e{e}-r{r}-s{s}", "p": p, "e": e, "r": r, "A": [[[[s, 1]]]]})
    return out


def _m(name, p, e, r, A):
    return {"name": name, "p": p, "e": e, "r": r, "A": A}


def _mono(k, c=1):
    return [[k, c]]


Z = []

# upper triangular rank 2 and 3 modules; entries are series literals
CURATED = [
    _m("ext-u-1", 3, 2, 1, [[_mono(1), _mono(0)], [Z, _mono(1)]]),
    _m("etale+mult", 3, 2, 1, [[_mono(0), Z], [Z, _mono(2)]]),
    _m("mult+etale", 3, 2, 1, [[_mono(2), Z], [Z, _mono(0)]]),
    _m("ext-u2-u", 3, 2, 1, [[_mono(2), _mono(1)], [Z, _mono(1)]]),
    _m("ext-u-u2", 3, 2, 1, [[_mono(1), _mono(1)], [Z, _mono(2)]]),
    _m("ext-u-u-u", 3, 2, 1, [[_mono(1), _mono(1)], [Z, _mono(1)]]),
    _m("ext-e3-cube", 3, 3, 1, [[_mono(3), _mono(3)], [Z, _mono(3)]]),
    _m("diag-e3", 3, 3, 1, [[_mono(3), Z], [Z, _mono(0)]]),
    _m("ext-e3-mixed", 3, 3, 1, [[_mono(1), _mono(2)], [Z, _mono(2)]]),
    _m("ext-e3-r2", 3, 3, 2, [[_mono(4), _mono(2)], [Z, _mono(2, 2)]]),
    _m("ext-p5", 5, 2, 1, [[_mono(1), _mono(1)], [Z, _mono(1)]]),
    _m("ext-p5-e4", 5, 4, 1, [[_mono(2), _mono(3)], [Z, _mono(4)]]),
    _m("rank3-diag", 3, 2, 1, [[_mono(0), Z, Z], [Z, _mono(1), Z], [Z, Z, _mono(2)]]),
    _m("rank3-chain", 3, 2, 1, [[_mono(1), _mono(1), Z], [Z, _mono(1), _mono(1)], [Z, Z, _mono(1)]]),
    _m("rank3-e3", 3, 3, 1, [[_mono(3), _mono(3), _mono(3)], [Z, _mono(3), _mono(3)], [Z, Z, _mono(3)]]),
    _m("rank3-steps", 3, 3, 1, [[_mono(0), _mono(1), Z], [Z, _mono(1), _mono(2)], [Z, Z, _mono(2)]]),
]


def shipped_corpus():
    return rank_one_grid() + CURATED
