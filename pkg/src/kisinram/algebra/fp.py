"""Polynomials and linear algebra over the prime field F_p.

Polynomials are coefficient lists ``[a_0, a_1, ..., a_n]`` of residues in
``{0, ..., p-1}`` with a nonzero leading coefficient (``[]`` is zero).
Matrices are numpy integer arrays reduced mod p.
"""

import numpy as np


def poly_trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def poly_sub(a, b, p):
    n = max(len(a), len(b))
    out = [((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p for i in range(n)]
    return poly_trim(out)


def poly_mul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return poly_trim([c % p for c in out])


def poly_divmod(a, b, p):
    a = poly_trim(a)
    b = poly_trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    inv = pow(b[-1], p - 2, p)
    q = [0] * max(len(a) - len(b) + 1, 0)
    r = list(a)
    while len(r) >= len(b):
        c = r[-1] * inv % p
        shift = len(r) - len(b)
        q[shift] = c
        for i, y in enumerate(b):
            r[shift + i] = (r[shift + i] - c * y) % p
        r = poly_trim(r)
    return poly_trim(q), r


def poly_mod(a, b, p):
    return poly_divmod(a, b, p)[1]


def poly_gcd(a, b, p):
    a, b = poly_trim(a), poly_trim(b)
    while b:
        a, b = b, poly_mod(a, b, p)
    if a:
        inv = pow(a[-1], p - 2, p)
        a = [c * inv % p for c in a]
    return a


def poly_powmod(a, n, mod, p):
    result = [1]
    base = poly_mod(a, mod, p)
    while n:
        if n & 1:
            result = poly_mod(poly_mul(result, base, p), mod, p)
        base = poly_mod(poly_mul(base, base, p), mod, p)
        n >>= 1
    return result


def is_irreducible(f, p):
    """Irreducibility of a monic polynomial over F_p.

    ``f`` of degree m is irreducible iff gcd(f, x^(p^j) - x) = 1 for every
    j <= m/2.
    """
    f = poly_trim(f)
    m = len(f) - 1
    if m < 1:
        return False
    if m == 1:
        return True
    xpow = [0, 1]
    for _ in range(m // 2):
        xpow = poly_powmod(xpow, p, f, p)
        if len(poly_gcd(f, poly_sub(xpow, [0, 1], p), p)) > 1:
            return False
    return True


# -- linear algebra -------------------------------------------------------


def rref(mat, p):
    """Reduced row echelon form mod p; returns (matrix, pivot columns)."""
    a = np.array(mat, dtype=np.int64) % p
    if a.ndim != 2:
        raise ValueError("expected a 2-d matrix")
    rows, cols = a.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        k = r + nz[0]
        if k != r:
            a[[r, k]] = a[[k, r]]
        a[r] = a[r] * pow(int(a[r, c]), p - 2, p) % p
        col = a[:, c].copy()
        col[r] = 0
        nzr = np.nonzero(col)[0]
        if nzr.size:
            a[nzr] = (a[nzr] - np.outer(col[nzr], a[r])) % p
        pivots.append(c)
        r += 1
    return a, pivots


def rank(mat, p):
    return len(rref(mat, p)[1])


def kernel(mat, p):
    """Basis (list of int lists) of the right kernel {x : mat @ x = 0}."""
    a, pivots = rref(mat, p)
    cols = a.shape[1]
    free = [c for c in range(cols) if c not in set(pivots)]
    basis = []
    for f in free:
        v = [0] * cols
        v[f] = 1
        for i, pc in enumerate(pivots):
            v[pc] = int(-a[i, f] % p)
        basis.append(v)
    return basis


def solve(mat, rhs, p):
    """One solution x of mat @ x = rhs, or None when the system is inconsistent."""
    a = np.array(mat, dtype=np.int64) % p
    b = np.array(rhs, dtype=np.int64).reshape(-1, 1) % p
    aug, pivots = rref(np.hstack([a, b]), p)
    cols = a.shape[1]
    if pivots and pivots[-1] == cols:
        return None
    x = [0] * cols
    for i, pc in enumerate(pivots):
        x[pc] = int(aug[i, cols])
    return x


def inverse(mat, p):
    a = np.array(mat, dtype=np.int64) % p
    n = a.shape[0]
    aug, pivots = rref(np.hstack([a, np.eye(n, dtype=np.int64)]), p)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("matrix is singular mod p")
    return aug[:, n:]


def span_basis(vectors, p, dim):
    """Row-reduced basis of the F_p-span of ``vectors`` (each of length dim)."""
    if not vectors:
        return []
    a, pivots = rref(vectors, p)
    return [[int(x) for x in a[i]] for i in range(len(pivots))]
