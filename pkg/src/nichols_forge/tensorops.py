"""Word indexing on V^(ox m) and lazy application of braid-group operators.

Basis words of length m over n letters are integers in mixed radix base n with
the first tensor factor most significant. Operators are never materialized as
n^m x n^m matrices: a braid generator acts on a dense vector by a permutation
gather over one digit pair (monomial braidings) or a short term loop.

Vector backends: dense numpy int64 (mod p), dense numpy object (exact scalars),
and sparse dicts word-index -> scalar for supports far below n^m.
"""
from __future__ import annotations

import weakref
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch
from .fields import PrimeField, reduce_scalar

_modular_cache = weakref.WeakKeyDictionary()


def word_to_index(word, n):
    idx = 0
    for d in word:
        idx = idx * n + d
    return idx


def index_to_word(idx, n, m):
    out = [0] * m
    for t in range(m - 1, -1, -1):
        out[t] = idx % n
        idx //= n
    return tuple(out)


@dataclass(frozen=True)
class ModularBraiding:
    """Braiding coefficients reduced into GF(p), with gather tables."""

    n: int
    p: int
    monomial: bool
    perm: np.ndarray | None    # n^2 int64, (a,b) -> index of (k,l); monomial only
    scal: np.ndarray | None    # n^2 int64 scalars; monomial only
    terms: tuple | None        # general: tuple over a*n+b of ((kl, s), ...)


def modular_braiding(B, prime: PrimeField) -> ModularBraiding:
    cache = _modular_cache.setdefault(B, {})
    got = cache.get(prime.p)
    if got is not None:
        return got
    n = B.n
    if B.is_monomial:
        perm = np.zeros(n * n, dtype=np.int64)
        scal = np.zeros(n * n, dtype=np.int64)
        for (i, j), terms in B.entries.items():
            k, l, s = terms[0]
            perm[i * n + j] = k * n + l
            scal[i * n + j] = reduce_scalar(s, prime)
        out = ModularBraiding(n, prime.p, True, perm, scal, None)
    else:
        terms = []
        for a in range(n):
            for b in range(n):
                terms.append(tuple((k * n + l, reduce_scalar(s, prime))
                                   for (k, l, s) in B.entries[(a, b)]))
        out = ModularBraiding(n, prime.p, False, None, None, tuple(terms))
    cache[prime.p] = out
    return out


def _as_batch(v, size):
    v = np.asarray(v)
    if v.ndim == 1:
        if v.shape[0] != size:
            raise DimensionMismatch(f"vector length {v.shape[0]}, expected {size}")
        return v[None, :], True
    if v.shape[1] != size:
        raise DimensionMismatch(f"vector length {v.shape[1]}, expected {size}")
    return v, False


def apply_generator(B, m, i, v, prime=None):
    """Apply c_i = id^(i-1) ox c ox id^(m-i-1), 1 <= i <= m-1, to dense vectors.

    v is a length-n^m vector or a (batch, n^m) matrix; int64 when `prime` is
    given, object dtype (exact scalars) otherwise.
    """
    n = B.n
    if not 1 <= i <= m - 1:
        raise DimensionMismatch(f"generator position {i} outside 1..{m-1}")
    size = n ** m
    v, single = _as_batch(v, size)
    batch = v.shape[0]
    pre, post = n ** (i - 1), n ** (m - i - 1)
    v4 = v.reshape(batch, pre, n * n, post)
    if prime is not None:
        mb = modular_braiding(B, prime)
        out = np.zeros_like(v4)
        if mb.monomial:
            out[:, :, mb.perm, :] = mb.scal[None, None, :, None] * v4 % mb.p
        else:
            for ab in range(n * n):
                for (kl, s) in mb.terms[ab]:
                    out[:, :, kl, :] = (out[:, :, kl, :] + s * v4[:, :, ab, :]) % mb.p
        res = out.reshape(batch, size)
    else:
        out = np.empty_like(v4)
        out[...] = B.field_ctx.zero
        for (a, b), terms in B.entries.items():
            ab = a * n + b
            for (k, l, s) in terms:
                kl = k * n + l
                out[:, :, kl, :] = out[:, :, kl, :] + s * v4[:, :, ab, :]
        res = out.reshape(batch, size)
    return res[0] if single else res


def apply_generator_sparse(B, m, i, vec: dict, prime=None):
    """Generator action on a sparse dict word-index -> scalar."""
    n = B.n
    if not 1 <= i <= m - 1:
        raise DimensionMismatch(f"generator position {i} outside 1..{m-1}")
    post = n ** (m - i - 1)
    mod = n ** (m - i + 1)
    out = {}
    mb = modular_braiding(B, prime) if prime is not None else None
    for idx, s in vec.items():
        hi, rest = divmod(idx, mod)
        ab, lo = divmod(rest, post)
        if mb is not None:
            for (kl, c) in ((int(mb.perm[ab]), int(mb.scal[ab])),) if mb.monomial \
                    else mb.terms[ab]:
                j = (hi * (n * n) + kl) * post + lo
                out[j] = (out.get(j, 0) + s * c) % mb.p
        else:
            a, b = divmod(ab, n)
            for (k, l, c) in B.entries[(a, b)]:
                j = (hi * (n * n) + k * n + l) * post + lo
                cur = out.get(j)
                out[j] = s * c if cur is None else cur + s * c
    if mb is not None:
        return {j: x for j, x in out.items() if x % mb.p}
    return {j: x for j, x in out.items() if x}


def reduced_word(sigma):
    """A fixed reduced word for sigma: bubble the largest misplaced entry home.

    Generators are 1-based; the word (i1, ..., ik) denotes s_{i1} ... s_{ik}
    with length equal to the inversion count of sigma.
    """
    sig = list(sigma)
    m = len(sig)
    word = []
    for target in range(m - 1, -1, -1):
        pos = sig.index(target)
        while pos < target:
            word.append(pos + 1)
            sig[pos], sig[pos + 1] = sig[pos + 1], sig[pos]
            pos += 1
    word.reverse()
    return tuple(word)


def all_reduced_words(sigma):
    """Every reduced word of sigma (for well-definedness tests; m <= 4 sized)."""
    sig = tuple(sigma)
    m = len(sig)
    if all(sig[t] == t for t in range(m)):
        return [()]
    out = []
    for i in range(m - 1):
        if sig[i] > sig[i + 1]:  # s_i shortens sigma on the right
            nxt = list(sig)
            nxt[i], nxt[i + 1] = nxt[i + 1], nxt[i]
            for w in all_reduced_words(tuple(nxt)):
                out.append(w + (i + 1,))
    return out


@dataclass(frozen=True)
class TensorOperator:
    """A sum of products of braid generators acting on V^(ox m).

    `factors` is a tuple of factors, applied right to left; each factor is a
    tuple of chains, each chain a tuple of generator positions composing
    c_{i1} o ... o c_{ik} (rightmost applied first). A factor with several
    chains is their sum; the empty chain is the identity.
    """

    braiding: object
    m: int
    factors: tuple

    def apply(self, v, prime=None):
        for factor in reversed(self.factors):
            if len(factor) == 1:
                v = self._chain(factor[0], v, prime)
            else:
                acc = None
                for chain in factor:
                    term = self._chain(chain, v, prime)
                    if acc is None:
                        acc = term
                    elif isinstance(term, dict):
                        for j, x in term.items():
                            cur = acc.get(j)
                            acc[j] = x if cur is None else cur + x
                    else:
                        acc = (acc + term) % prime.p if prime is not None else acc + term
                if isinstance(acc, dict):
                    if prime is not None:
                        acc = {j: x % prime.p for j, x in acc.items() if x % prime.p}
                    else:
                        acc = {j: x for j, x in acc.items() if x}
                v = acc
        return v

    def _chain(self, chain, v, prime):
        sparse = isinstance(v, dict)
        if sparse:
            v = dict(v)
        else:
            v = np.array(v, copy=True)
        for i in reversed(chain):
            if sparse:
                v = apply_generator_sparse(self.braiding, self.m, i, v, prime)
            else:
                v = apply_generator(self.braiding, self.m, i, v, prime)
        return v


def identity_operator(B, m):
    return TensorOperator(B, m, ((( ),),))


def matsumoto_lift(B, m, sigma):
    """The well-defined lift c_{i1} ... c_{ik} of a permutation via a fixed
    reduced word; Matsumoto's property makes the choice immaterial."""
    if sorted(sigma) != list(range(m)):
        raise ValueError("sigma must be a permutation of 0..m-1")
    return TensorOperator(B, m, ((reduced_word(sigma),),))


def shuffle_factor(B, m, k):
    """The operator c_1 c_2 ... c_k (identity when k = 0)."""
    if not 0 <= k <= m - 1:
        raise ValueError(f"k must lie in 0..{m-1}")
    return TensorOperator(B, m, ((tuple(range(1, k + 1)),),))
