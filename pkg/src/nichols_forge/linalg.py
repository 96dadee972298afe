"""Exact linear algebra kernels.

Mod-p arithmetic (p < 2^31) runs on int64 numpy arrays; products are formed by
16-bit limb splitting over float64 BLAS so every partial sum stays below 2^52
and the result is exact. Exact-field arithmetic (Fraction / CycElem) runs on
object arrays with the same interfaces.
"""
from __future__ import annotations

import numpy as np

_W16 = 1 << 16


def mat_mod(a, b, p):
    """Exact (a @ b) % p for int64 matrices with entries in [0, p), p < 2^31.

    Inner dimension must stay below 2^20 (partial limb sums < 2^52).
    """
    m, k = a.shape
    k2, n = b.shape
    assert k == k2
    if m == 0 or n == 0 or k == 0:
        return np.zeros((m, n), dtype=np.int64)
    if k >= (1 << 20):
        raise ValueError("inner dimension too large for exact float64 accumulation")
    a1 = (a >> 16).astype(np.float64)
    a0 = (a & 0xFFFF).astype(np.float64)
    b1 = (b >> 16).astype(np.float64)
    b0 = (b & 0xFFFF).astype(np.float64)
    hh = np.mod(a1 @ b1, p).astype(np.int64)
    hl = np.mod(a1 @ b0 + a0 @ b1, p).astype(np.int64)
    ll = (a0 @ b0).astype(np.int64)
    return (hh * ((1 << 32) % p) % p + hl * (_W16 % p) + ll) % p


def _rref_unblocked(a, p):
    """In-place RREF; returns (pivot columns, original row index of each pivot)."""
    rows, cols = a.shape
    perm = list(range(rows))
    piv = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        col = a[r:, c]
        nz = np.nonzero(col)[0]
        if len(nz) == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            a[[r, i]] = a[[i, r]]
            perm[r], perm[i] = perm[i], perm[r]
        a[r] = a[r] * pow(int(a[r, c]), -1, p) % p
        f = a[:, c].copy()
        f[r] = 0
        nzr = np.nonzero(f)[0]
        if len(nzr):
            a[nzr] = (a[nzr] - np.outer(f[nzr], a[r])) % p
        piv.append(c)
        r += 1
    return piv, perm[:r]


def rref_modp(a, p, block=96):
    """Reduced row echelon form mod p with BLAS-blocked trailing updates.

    Returns (rank, pivot columns, R) where R holds the nonzero RREF rows.
    Deterministic: pivots are the lexicographically earliest usable columns.
    """
    a = np.ascontiguousarray(a) % p
    rows, cols = a.shape
    pivots = []
    r = 0
    c0 = 0
    while r < rows and c0 < cols:
        c1 = min(c0 + block, cols)
        s = a[r:, c0:c1].copy()
        lpiv, lrows = _rref_unblocked(s, p)
        if not lpiv:
            c0 = c1
            continue
        k = len(lpiv)
        for t, lr in enumerate(sorted(lrows)):
            src, dst = r + lr, r + t
            if src != dst:
                a[[src, dst]] = a[[dst, src]]
        sub = a[r:r + k, c0:].copy()
        piv2, _ = _rref_unblocked(sub, p)
        a[r:r + k, c0:] = sub
        pivcols = [c0 + c for c in piv2]
        # one BLAS update clears the panel columns from every other row
        for lo, hi in ((0, r), (r + k, rows)):
            if hi > lo:
                f = a[lo:hi][:, pivcols]
                if f.any():
                    a[lo:hi, c0:] = (a[lo:hi, c0:] - mat_mod(f, a[r:r + k, c0:], p)) % p
        pivots.extend(pivcols)
        r += k
        c0 = pivcols[-1] + 1
    return r, pivots, np.ascontiguousarray(a[:r])


def reduce_rows_modp(rref, piv, v, p, rng=None, probes=3):
    """Write rows of v as coeffs @ rref + residual.

    If rng is given, residual correctness (residual == v - coeffs @ rref) is
    verified against `probes` random projections instead of being materialized;
    the returned residual is then the projected one and `exact=False`.
    Returns (coeffs, residual, exact).
    """
    if rref.shape[0] == 0:
        return np.zeros((v.shape[0], 0), dtype=np.int64), v % p, True
    coeffs = v[:, piv] % p
    if rng is None:
        resid = (v - mat_mod(coeffs, rref, p)) % p
        return coeffs, resid, True
    w = rng.integers(1, p, size=(v.shape[1], probes), dtype=np.int64)
    lhs = mat_mod(v % p, w, p)
    rhs = mat_mod(coeffs, mat_mod(rref, w, p), p)
    return coeffs, (lhs - rhs) % p, False


def nullspace_from_rref(rank, piv, rref, p, cols):
    """Canonical echelon kernel basis from an RREF of the matrix."""
    free = [c for c in range(cols) if c not in set(piv)]
    out = np.zeros((len(free), cols), dtype=np.int64)
    for t, fcol in enumerate(free):
        out[t, fcol] = 1
        for k, pc in enumerate(piv):
            out[t, pc] = (-int(rref[k, fcol])) % p
    return out


def balanced_lift(a, p):
    """Symmetric representative in (-p/2, p/2] for each entry."""
    a = a % p
    return np.where(a > p // 2, a - p, a).astype(np.int64)


# ---------------------------------------------------------------- exact fields

def zeros_object(shape, fld):
    out = np.empty(shape, dtype=object)
    out[...] = fld.zero
    return out


def eye_object(n, fld):
    out = zeros_object((n, n), fld)
    for i in range(n):
        out[i, i] = fld.one
    return out


def matmul_object(a, b):
    """Object-dtype matmul; numpy dispatches the arithmetic to the elements."""
    if a.shape[1] == 0 or a.shape[0] == 0 or b.shape[1] == 0:
        zero = a.flat[0] * 0 if a.size else (b.flat[0] * 0 if b.size else 0)
        out = np.empty((a.shape[0], b.shape[1]), dtype=object)
        out[...] = zero
        return out
    return a @ b


def rref_object(a, fld):
    """Unblocked exact RREF; returns (rank, pivots, R). `a` is consumed."""
    rows, cols = a.shape
    nonzero = np.frompyfunc(bool, 1, 1)
    piv = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        colmask = nonzero(a[r:, c]).astype(bool)
        nz = np.nonzero(colmask)[0]
        if len(nz) == 0:
            continue
        pr = r + int(nz[0])
        if pr != r:
            a[[r, pr]] = a[[pr, r]]
        inv = fld.one / a[r, c]
        if inv != fld.one:
            a[r] = a[r] * inv
        f = a[:, c].copy()
        f[r] = fld.zero
        nzr = np.nonzero(nonzero(f).astype(bool))[0]
        if len(nzr):
            a[nzr] = a[nzr] - np.outer(f[nzr], a[r])
        piv.append(c)
        r += 1
    return r, piv, a[:r]


def rank_object(a, fld):
    rank, _, _ = rref_object(np.array(a, dtype=object), fld)
    return rank


def reduce_rows_object(rref, piv, v, fld):
    """Exact reduction of rows of v against an exact RREF. Returns (coeffs, resid)."""
    if rref.shape[0] == 0:
        return zeros_object((v.shape[0], 0), fld), v
    coeffs = v[:, piv].copy()
    resid = v - matmul_object(coeffs, rref)
    return coeffs, resid


def nullspace_from_rref_object(rank, piv, rref, fld, cols):
    free = [c for c in range(cols) if c not in set(piv)]
    out = zeros_object((len(free), cols), fld)
    for t, fcol in enumerate(free):
        out[t, fcol] = fld.one
        for k, pc in enumerate(piv):
            out[t, pc] = -rref[k, fcol]
    return out


def is_zero_object(a):
    return not any(bool(x) for x in a.ravel())
