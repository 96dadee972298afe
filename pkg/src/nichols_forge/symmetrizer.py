"""Quantum symmetrizers: the permutation-sum oracle, the fast factorized form,
and dense image / kernel / row-space bases with the restricted-rank contract.

The oracle Omega^(m) = sum over S_m of Matsumoto lifts is normative; the
factorized form applies the recursion Omega^(m) = (id ox Omega^(m-1)) U_m with
U_k = 1 + c_1(1 + c_2(1 + ... c_{k-1})) and is tested against the oracle.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import DegreeTooLarge, ResourceCap
from .tensorops import apply_generator, apply_generator_sparse, matsumoto_lift

ORACLE_CAP = 7
DENSE_VECTOR_CAP = 1 << 24
MATRIX_BUDGET_BYTES = 2 << 30


def symmetrizer_oracle(B, m, v, prime=None, cap=ORACLE_CAP):
    """Sum of all m! Matsumoto lifts applied to v. Exact but factorial cost."""
    if m > cap:
        raise DegreeTooLarge(f"oracle capped at degree {cap}, got {m}")
    if m <= 1:
        return dict(v) if isinstance(v, dict) else np.array(v, copy=True)
    acc = None
    for sigma in itertools.permutations(range(m)):
        term = matsumoto_lift(B, m, sigma).apply(v, prime)
        if acc is None:
            acc = term
        elif isinstance(acc, dict):
            for j, x in term.items():
                cur = acc.get(j)
                acc[j] = x if cur is None else cur + x
        else:
            acc = acc + term
    if prime is not None:
        if isinstance(acc, dict):
            return {j: x % prime.p for j, x in acc.items() if x % prime.p}
        return acc % prime.p
    if isinstance(acc, dict):
        return {j: x for j, x in acc.items() if x}
    return acc


def symmetrizer_apply(B, m, v, prime=None):
    """Factorized symmetrizer: for k = m..2 apply U_k on the last k factors,
    with U_k evaluated by the Horner form w := v + c_i(w), i = k-1..1."""
    if m <= 1:
        return dict(v) if isinstance(v, dict) else np.array(v, copy=True)
    sparse = isinstance(v, dict)
    if not sparse:
        v = np.array(v, copy=True)
    for k in range(m, 1, -1):
        off = m - k
        w = dict(v) if sparse else v
        for i in range(k - 1, 0, -1):
            if sparse:
                w = apply_generator_sparse(B, m, off + i, w, prime)
                merged = dict(v)
                for j, x in w.items():
                    cur = merged.get(j)
                    merged[j] = x if cur is None else cur + x
                if prime is not None:
                    merged = {j: x % prime.p for j, x in merged.items() if x % prime.p}
                else:
                    merged = {j: x for j, x in merged.items() if x}
                w = merged
            else:
                w = apply_generator(B, m, off + i, w, prime)
                w = (v + w) % prime.p if prime is not None else v + w
        v = w
    return v


@dataclass(frozen=True)
class SubspaceBasis:
    """Reduced row echelon basis of a subspace of V^(ox m)."""

    m: int
    matrix: np.ndarray        # rank x n^m, RREF rows
    pivots: tuple             # strictly increasing word indices
    prime: object = None      # PrimeField for modular bases, None for exact

    @property
    def dim(self):
        return len(self.pivots)


def _guard(rows, cols, itemsize=8, budget=MATRIX_BUDGET_BYTES):
    if rows * cols * itemsize > budget:
        raise ResourceCap(
            f"dense matrix {rows} x {cols} exceeds the {budget >> 30} GiB budget")


def _basis_matrix(B, words, m, prime):
    n = B.n
    size = n ** m
    _guard(len(words), size)
    if prime is not None:
        v = np.zeros((len(words), size), dtype=np.int64)
        for t, w in enumerate(words):
            v[t, w] = 1
    else:
        v = linalg.zeros_object((len(words), size), B.field_ctx)
        for t, w in enumerate(words):
            v[t, w] = B.field_ctx.one
    return v


def omega_on_words(B, m, words, prime=None):
    """Rows Omega^(m)(e_w) for the given word indices, via the factorized form."""
    return symmetrizer_apply(B, m, _basis_matrix(B, words, m, prime), prime)


def image_basis(B, m, generators=None, prime=None):
    """Echelon basis of Omega^(m)(S); S = span(generators), default all of V^(ox m)."""
    n = B.n
    size = n ** m
    if size > DENSE_VECTOR_CAP:
        raise ResourceCap(f"ambient dimension n^m = {size} beyond the dense cap")
    if generators is None:
        img = omega_on_words(B, m, range(size), prime)
    elif isinstance(generators, SubspaceBasis):
        img = symmetrizer_apply(B, m, generators.matrix, prime)
    else:
        img = symmetrizer_apply(B, m, generators, prime)
    if prime is not None:
        rank, piv, rref = linalg.rref_modp(img, prime.p)
    else:
        rank, piv, rref = linalg.rref_object(np.array(img, dtype=object), B.field_ctx)
    return SubspaceBasis(m, rref, tuple(piv), prime)


def pivot_words(B, m, prime=None):
    """Word indices whose symmetrizer images are independent: the canonical
    complement of ker Omega^(m), chosen by echelon pivots (smallest first)."""
    n = B.n
    size = n ** m
    img = omega_on_words(B, m, range(size), prime)
    if prime is not None:
        rank, piv, _ = linalg.rref_modp(np.ascontiguousarray(img.T), prime.p)
    else:
        rank, piv, _ = linalg.rref_object(np.array(img.T, dtype=object), B.field_ctx)
    return tuple(piv)


def pivot_lift(B, m, prime=None):
    """The canonical lift as a SubspaceBasis of standard basis words."""
    words = pivot_words(B, m, prime)
    return SubspaceBasis(m, _basis_matrix(B, words, m, prime), words, prime)


def restricted_rank(B, m, lift: SubspaceBasis, prime=None):
    """rank of Omega^(m) on span(lift ox V); equals the full rank when lift is a
    complement basis of ker Omega^(m-1) (the correctness contract)."""
    n = B.n
    if lift.m != m - 1:
        raise ValueError("lift must live in degree m-1")
    words = [w * n + j for w in lift.pivots for j in range(n)]
    img = omega_on_words(B, m, words, prime)
    if prime is not None:
        rank, _, _ = linalg.rref_modp(img, prime.p)
    else:
        rank, _, _ = linalg.rref_object(np.array(img, dtype=object), B.field_ctx)
    return rank


def kernel_basis(B, m, prime=None):
    """Canonical echelon basis of ker Omega^(m) (dense degrees only)."""
    n = B.n
    size = n ** m
    if size > DENSE_VECTOR_CAP:
        raise ResourceCap(f"ambient dimension n^m = {size} beyond the dense cap")
    _guard(size, size)
    img = omega_on_words(B, m, range(size), prime)
    if prime is not None:
        rank, piv, rref = linalg.rref_modp(np.ascontiguousarray(img.T), prime.p)
        null = linalg.nullspace_from_rref(rank, piv, rref, prime.p, size)
        nrank, npiv, nrref = linalg.rref_modp(null, prime.p)
    else:
        rank, piv, rref = linalg.rref_object(np.array(img.T, dtype=object), B.field_ctx)
        null = linalg.nullspace_from_rref_object(rank, piv, rref, B.field_ctx, size)
        nrank, npiv, nrref = linalg.rref_object(null, B.field_ctx)
    return SubspaceBasis(m, nrref, tuple(npiv), prime)


def row_space_basis(B, m, lift=None, prime=None):
    """Echelon basis of the row space of Omega^(m): the image pipeline run on
    the transpose braiding."""
    Bt = B.transpose()
    if lift is None:
        return image_basis(Bt, m, None, prime)
    return image_basis(Bt, m, lift, prime)
