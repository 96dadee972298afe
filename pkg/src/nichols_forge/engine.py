"""The graded engine: per-degree dimensions, minimal relation counts, relation
dumps and membership, truncated algebras, Hilbert reciprocity, finiteness data.

Large rank computations run over at least two independent prime fields and the
ranks must agree; a third prime arbitrates a mismatch and an unresolved one
raises PrimeDisagreement. Exact (cyclotomic) arithmetic is used outright in
exact mode and as a cross-check on every degree whose ambient dimension n^m
stays within caps.exact_threshold.
"""
from __future__ import annotations

import json
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np

from . import linalg
from .braiding import BraidedSpace, diagonal_braiding, dual_braiding, hecke_label
from .compact import CompactChain, ExactOps, ModularOps, truncated_chain_dims
from .errors import (BadPrime, NotHecke, NotHomogeneous, PrimeDisagreement,
                     ResourceCap)
from .fields import PrimeField, find_primes, reduce_scalar
from .symmetrizer import kernel_basis, symmetrizer_apply
from .tensorops import word_to_index

AMBIENT_UNBOUNDED = 1 << 62


@dataclass(frozen=True)
class Caps:
    """Resource and strategy knobs; defaults match the engineering contract."""

    dense_cap: int = 1 << 24
    exact_threshold: int = 4096
    exact_ops_budget: int = 4_000_000   # caps the inline exact cross-check depth
    matrix_budget: int = 2 << 30
    primes: int = 2
    prime_min_bits: int = 30
    oracle_cap: int = 7
    seed: int = 0
    threads: int = 1
    strict: bool = False


@dataclass
class GradedReport:
    dims: list                  # d_0, d_1, ..., d_M
    new_relations: dict         # degree -> count, degrees >= 2
    status: str                 # terminated | cutoff | resource_capped
    top_degree: int | None
    total_dim: int | None
    mode: str
    primes: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def hilbert_prefix(self):
        return list(self.dims)

    def to_dict(self):
        return {"dims": list(self.dims),
                "new_relations": {str(k): v for k, v in sorted(self.new_relations.items())},
                "status": self.status,
                "top_degree": self.top_degree,
                "total_dim": self.total_dim,
                "hilbert_prefix": self.hilbert_prefix,
                "mode": self.mode,
                "primes": list(self.primes),
                "notes": list(self.notes)}

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))


@dataclass
class RelationDump:
    degree: int
    vectors: list               # list of relations; each is [(word tuple, coeff), ...]

    @property
    def count(self):
        return len(self.vectors)

    def to_dict(self):
        return {"degree": self.degree,
                "count": self.count,
                "vectors": [[[list(w), str(c)] for (w, c) in vec]
                            for vec in self.vectors]}

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))


def _prime_pool(B, caps: Caps, extra=8):
    order = getattr(B.field_ctx, "order", 1)
    pool = find_primes(order, caps.primes + extra, caps.prime_min_bits,
                       seed=caps.seed)
    usable = []
    for pf in pool:
        try:
            for terms in B.entries.values():
                for (_, _, s) in terms:
                    reduce_scalar(s, pf)
            usable.append(pf)
        except BadPrime:
            continue
    if len(usable) < caps.primes + 1:
        raise PrimeDisagreement("not enough usable primes for consensus")
    return usable


def _chain_run(B, ops, max_degree, want_newrels, matrix_budget):
    chain = CompactChain(B, ops, matrix_budget)
    newrels = {}
    capped = False
    while chain.m < max_degree:
        try:
            res = chain.step(want_newrels)
        except ResourceCap:
            capped = True
            break
        if want_newrels:
            newrels[res.m] = res.new_relations
        if res.dim == 0:
            break
    return list(chain.dims), newrels, capped


def _consensus_run(B, caps: Caps, max_degree, want_newrels=True, progress=None):
    """Run the compact chain over consensus primes (+ exact cross-check)."""
    pool = _prime_pool(B, caps)
    notes = []

    def run_prime(pf):
        ops = ModularOps(pf, seed=caps.seed)
        return _chain_run(B, ops, max_degree, want_newrels, caps.matrix_budget)

    results = {}
    active = []
    cursor = 0
    while len(active) < caps.primes:
        pf = pool[cursor]
        cursor += 1
        active.append(pf)
    attempts = 0
    while True:
        pending = [pf for pf in active if pf.p not in results]
        if not pending:
            break
        if caps.threads > 1 and len(pending) > 1:
            with ThreadPoolExecutor(max_workers=caps.threads) as ex:
                outs = list(ex.map(lambda pf: _try_prime(run_prime, pf), pending))
        else:
            outs = [_try_prime(run_prime, pf) for pf in pending]
        for pf, out in zip(pending, outs):
            if out is None:
                attempts += 1
                if cursor >= len(pool) or attempts > 6:
                    raise PrimeDisagreement("ran out of replacement primes")
                notes.append(f"prime {pf.p} rejected by consistency probe; replaced")
                active[active.index(pf)] = pool[cursor]
                cursor += 1
            else:
                results[pf.p] = out
            if progress:
                progress(f"prime {pf.p}: done")
    keyed = [results[pf.p] for pf in active]
    if any(k != keyed[0] for k in keyed[1:]):
        # arbitration by a third prime
        if cursor >= len(pool):
            raise PrimeDisagreement("prime ranks disagree and no arbiter available")
        arbiter = pool[cursor]
        out = _try_prime(run_prime, arbiter)
        notes.append(f"rank disagreement arbitrated by prime {arbiter.p}")
        matches = [pf for pf, k in zip(active, keyed) if out == k]
        if out is None or not matches:
            raise PrimeDisagreement(
                f"ranks disagree across primes {[pf.p for pf in active]} "
                f"and arbiter {arbiter.p}")
        dims, newrels, capped = out
        primes = [matches[0].p, arbiter.p]
    else:
        dims, newrels, capped = keyed[0]
        primes = [pf.p for pf in active]

    # exact cross-check of the dims prefix: within the ambient threshold, and
    # depth-capped by an exact-arithmetic cost estimate from the modular dims
    n = B.n
    m_exact = 0
    cost = 0
    while (n ** (m_exact + 1) <= caps.exact_threshold
           and m_exact + 1 <= min(max_degree, len(dims) - 1)):
        width = n * dims[m_exact]  # candidate matrix order at the next degree
        cost += width * width * max(1, dims[min(m_exact + 1, len(dims) - 1)])
        if cost > caps.exact_ops_budget and m_exact >= 2:
            break
        m_exact += 1
    if m_exact >= 2:
        e_dims, _, _ = _chain_run(B, ExactOps(B.field_ctx), m_exact,
                                  False, caps.matrix_budget)
        if e_dims[:m_exact + 1] != dims[:m_exact + 1]:
            raise PrimeDisagreement(
                f"exact cross-check (degrees <= {m_exact}) contradicts the "
                f"modular ranks: exact {e_dims}, modular {dims[:m_exact + 1]}")
        notes.append(f"exact cyclotomic cross-check passed through degree {m_exact}")
    return dims, newrels, capped, primes, notes


def _try_prime(run, pf):
    try:
        return run(pf)
    except BadPrime:
        return None


def _finish_report(dims, newrels, mode, primes, notes, capped=False):
    if capped:
        return GradedReport(dims, newrels, "resource_capped", None, None, mode,
                            primes, notes)
    if dims and dims[-1] == 0:
        top = len(dims) - 2
        while top > 0 and dims[top] == 0:
            top -= 1
        return GradedReport(dims, newrels, "terminated", top, sum(dims),
                            mode, primes, notes)
    return GradedReport(dims, newrels, "cutoff", None, None, mode, primes, notes)


def graded_dims(B, max_degree, caps: Caps = Caps(), mode="modular",
                want_newrels=True, progress=None):
    """Per-degree dimensions d_m = rank Omega^(m) with new-relation counts.

    The chain runs on the transpose braiding, making it literally the row-space
    chain C_m; ranks are unchanged (rank M = rank M^T) and the cotensor
    intersection then counts minimal relations directly.
    """
    Bt = B.transpose()
    if mode == "exact":
        dims, newrels, capped = _chain_run(Bt, ExactOps(B.field_ctx), max_degree,
                                           want_newrels, caps.matrix_budget)
        if capped and caps.strict:
            raise ResourceCap("compact matrices exceeded the matrix budget")
        return _finish_report(dims, newrels, mode, [], [], capped)
    dims, newrels, capped, primes, notes = _consensus_run(
        Bt, caps, max_degree, want_newrels, progress)
    if capped and caps.strict:
        raise ResourceCap("compact matrices exceeded the matrix budget")
    return _finish_report(dims, newrels, mode, primes, notes, capped)


def new_relation_count(B, m, caps: Caps = Caps(), mode="modular"):
    """Minimal relations in degree m not generated below m."""
    if m < 2:
        raise ValueError("relations start at degree 2")
    rep = graded_dims(B, m, caps, mode)
    if m in rep.new_relations:
        return rep.new_relations[m]
    return 0  # chain terminated before m: d vanished, no new relations


def truncated_dims(B, r, max_degree, caps: Caps = Caps(), mode="modular"):
    """Graded dims of the truncated algebra T(V)/(kernels of degree <= r)."""
    if r < 2:
        raise ValueError("truncation degree must be >= 2")
    Bt = B.transpose()
    if mode == "exact":
        dims = truncated_chain_dims(Bt, ExactOps(B.field_ctx), r, max_degree,
                                    caps.matrix_budget)
        return _finish_report(dims, {}, mode, [], [])
    pool = _prime_pool(B, caps)
    outs = []
    used = []
    cursor = 0
    while len(outs) < caps.primes:
        if cursor >= len(pool):
            raise PrimeDisagreement("ran out of usable primes")
        pf = pool[cursor]
        cursor += 1
        try:
            outs.append(truncated_chain_dims(Bt, ModularOps(pf, seed=caps.seed),
                                             r, max_degree, caps.matrix_budget))
            used.append(pf.p)
        except BadPrime:
            continue
        except ResourceCap:
            if caps.strict:
                raise
            return GradedReport([1, B.n], {}, "resource_capped", None, None,
                                mode, used, ["truncated chain hit the budget"])
    if any(o != outs[0] for o in outs[1:]):
        raise PrimeDisagreement(f"truncated dims disagree across primes {used}")
    return _finish_report(outs[0], {}, mode, used, [])


def _element_to_sparse(element, n):
    """Normalize a formal word combination to {word index: Fraction coeff}."""
    items = element.items() if isinstance(element, dict) else element
    vec = {}
    length = None
    for word, coeff in items:
        word = tuple(int(x) for x in word)
        if length is None:
            length = len(word)
        elif len(word) != length:
            raise NotHomogeneous("element mixes tensor degrees")
        if any(not 0 <= x < n for x in word):
            raise ValueError("letter outside 0..n-1")
        idx = word_to_index(word, n)
        vec[idx] = vec.get(idx, Fraction(0)) + Fraction(coeff)
    if length is None:
        raise NotHomogeneous("empty element has no degree")
    return {i: c for i, c in vec.items() if c}, length


def contains_relation(B, element, caps: Caps = Caps()):
    """True iff Omega^(m)(element) = 0; exact within the ambient threshold,
    otherwise over every consensus prime."""
    vec, m = _element_to_sparse(element, B.n)
    if not vec:
        return True
    if B.n ** m <= caps.exact_threshold:
        fld = B.field_ctx
        exact_vec = {i: fld.coerce(c) for i, c in vec.items()}
        out = symmetrizer_apply(B, m, exact_vec)
        return not out
    pool = _prime_pool(B, caps)
    checked = 0
    for pf in pool:
        try:
            mod_vec = {i: reduce_scalar(c, pf) for i, c in vec.items()}
            mod_vec = {i: c for i, c in mod_vec.items() if c}
            out = symmetrizer_apply(B, m, mod_vec, pf)
        except BadPrime:
            continue
        if out:
            return False
        checked += 1
        if checked == caps.primes:
            return True
    raise PrimeDisagreement("not enough usable primes for the membership check")


def _kron_identity_rows(K, n, left):
    """Rows spanning V ox K (left=True) or K ox V (left=False), K given by rows."""
    k, width = K.shape
    if left:
        return np.kron(np.eye(n, dtype=K.dtype), K)
    return np.kron(K, np.eye(n, dtype=K.dtype))


def relation_dump(B, m, caps: Caps = Caps()):
    """Canonical new relations in degree m: kernel vectors extending an echelon
    basis of the ideal part J_m = V ox K_{m-1} + K_{m-1} ox V.

    The linear algebra runs mod two consensus primes; the canonical vectors are
    lifted to balanced integers, must agree across the primes, and are then
    verified exactly to lie in ker Omega^(m)."""
    n = B.n
    if n ** m > caps.dense_cap:
        raise ResourceCap(f"relation dump needs dense degree; n^m = {n ** m}")
    pool = _prime_pool(B, caps)
    dumps = []
    used = []
    for pf in pool:
        if len(dumps) == caps.primes:
            break
        try:
            Km = kernel_basis(B, m, pf)
            Kprev = kernel_basis(B, m - 1, pf)
            if Kprev.dim:
                J = np.concatenate([_kron_identity_rows(Kprev.matrix, n, True),
                                    _kron_identity_rows(Kprev.matrix, n, False)])
                jrank, jpiv, jr = linalg.rref_modp(J, pf.p)
                co, resid, _ = linalg.reduce_rows_modp(jr, jpiv, Km.matrix, pf.p)
            else:
                resid = Km.matrix
            rank, piv, rr = linalg.rref_modp(resid, pf.p)
            dumps.append(linalg.balanced_lift(rr, pf.p))
            used.append(pf.p)
        except BadPrime:
            continue
    if len(dumps) < caps.primes:
        raise PrimeDisagreement("not enough usable primes for the relation dump")
    if any(not np.array_equal(d, dumps[0]) for d in dumps[1:]):
        raise PrimeDisagreement(
            f"balanced lifts of the relation dump disagree across primes {used}")
    vectors = []
    from .tensorops import index_to_word
    for row in dumps[0]:
        items = [(index_to_word(int(i), n, m), Fraction(int(row[i])))
                 for i in np.nonzero(row)[0]]
        if not contains_relation(B, items, caps):
            raise PrimeDisagreement(
                "lifted relation fails the exact kernel membership check")
        vectors.append(items)
    return RelationDump(m, vectors)


def hilbert_reciprocity_check(B, max_degree, q=None, caps: Caps = Caps(),
                              mode="modular"):
    """Verify H_B(t) * H_{B!}(-t) = 1 coefficient-wise through max_degree."""
    label = hecke_label(B, degenerate_default=q)
    if label is None:
        raise NotHecke("braiding is not of Hecke type")
    if label.q is None:
        raise NotHecke("c = -id is Hecke for every q; supply one")
    Bd = dual_braiding(B, label.q)
    rep = graded_dims(B, max_degree, caps, mode, want_newrels=False)
    repd = graded_dims(Bd, max_degree, caps, mode, want_newrels=False)
    a = rep.dims + [0] * (max_degree + 1 - len(rep.dims))
    b = repd.dims + [0] * (max_degree + 1 - len(repd.dims))
    table = []
    ok = True
    for m in range(max_degree + 1):
        conv = sum(a[k] * b[m - k] * (-1) ** (m - k) for k in range(m + 1))
        want = 1 if m == 0 else 0
        table.append({"degree": m, "dim": a[m], "dual_dim": b[m],
                      "convolution": conv})
        ok = ok and conv == want
    return ok, table


def generic_smoke(n=2, max_degree=4, seed=20240501, caps: Caps = Caps()):
    """Random diagonal braiding with large rational parameters: generically the
    tensor algebra, so no relations up to max_degree."""
    rng = random.Random(seed)

    def big_rational():
        a = rng.randrange(1 << 20, 1 << 22)
        b = rng.randrange(1 << 20, 1 << 22)
        return Fraction(a, b)

    q = [[big_rational() for _ in range(n)] for _ in range(n)]
    B = diagonal_braiding(q)
    rep = graded_dims(B, max_degree, caps, "modular")
    first = next((m for m in sorted(rep.new_relations)
                  if rep.new_relations[m]), None)
    return {"first_relation_degree": first, "report": rep,
            "parameters": [[str(x) for x in row] for row in q]}
