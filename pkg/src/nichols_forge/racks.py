"""Finite racks, their standard constructors, 2-cocycles and isomorphism testing.

Element ordering conventions are frozen so relation dumps are reproducible:
transpositions are ordered lexicographically by their two moved points, affine
rack elements by mixed-radix index over the moduli (first factor most
significant), and the cube faces as +x, -x, +y, -y, +z, -z.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import NotARack, NotAutomorphism


@dataclass(frozen=True)
class Rack:
    """A finite rack given by its full operation table: table[i][j] = i |> j."""

    table: tuple
    label: str = "rack"

    @property
    def size(self):
        return len(self.table)

    def op(self, i, j):
        return self.table[i][j]

    def profile(self):
        """Cheap isomorphism invariants: sorted translation cycle types and i|>i map."""
        n = self.size
        cycle_types = []
        for i in range(n):
            seen = [False] * n
            ct = []
            for j in range(n):
                if not seen[j]:
                    ln, k = 0, j
                    while not seen[k]:
                        seen[k] = True
                        k = self.table[i][k]
                        ln += 1
                    ct.append(ln)
            cycle_types.append(tuple(sorted(ct)))
        diag = tuple(sorted(1 if self.table[i][i] == i else 0 for i in range(n)))
        return (n, tuple(sorted(cycle_types)), diag)

    def to_json(self):
        return json.dumps({"label": self.label, "table": [list(r) for r in self.table]},
                          sort_keys=True)

    @staticmethod
    def from_json(text):
        data = json.loads(text)
        return rack_from_table(data["table"], data.get("label", "rack"))

    def __repr__(self):
        return f"Rack({self.label}, size={self.size})"


def check_rack(table):
    """Validate the rack axioms; returns (ok, witness).

    witness is ("bijectivity", i) or ("self_distributivity", (i, j, k)) on failure.
    """
    n = len(table)
    for i, row in enumerate(table):
        if len(row) != n or any(not (0 <= x < n) for x in row):
            return False, ("bijectivity", i)
        if len(set(row)) != n:
            return False, ("bijectivity", i)
    for i in range(n):
        for j in range(n):
            tij = table[i][j]
            for k in range(n):
                if table[i][table[j][k]] != table[tij][table[i][k]]:
                    return False, ("self_distributivity", (i, j, k))
    return True, None


def rack_from_table(table, label="table"):
    ok, witness = check_rack(table)
    if not ok:
        raise NotARack(f"rack axioms fail: {witness[0]} at {witness[1]}", witness)
    return Rack(tuple(tuple(int(x) for x in row) for row in table), label)


def affine_rack(moduli, g):
    """Affine rack on A = prod Z/m_i with a |> b = g(b) + (id - g)(a).

    g is an integer matrix (or a single integer for one factor) acting on A;
    it must define a bijective endomorphism, else NotAutomorphism.
    """
    moduli = [int(m) for m in moduli]
    if any(m < 1 for m in moduli):
        raise ValueError("moduli must be positive")
    k = len(moduli)
    if isinstance(g, int):
        g = [[g]]
    g = [[int(x) for x in row] for row in g]
    if len(g) != k or any(len(row) != k for row in g):
        raise NotAutomorphism(f"g must be a {k}x{k} integer matrix")
    # well-definedness: the (i,j) entry maps Z/m_j -> Z/m_i
    for i in range(k):
        for j in range(k):
            if (g[i][j] * moduli[j]) % moduli[i] != 0:
                raise NotAutomorphism(
                    f"entry g[{i}][{j}] does not map Z/{moduli[j]} into Z/{moduli[i]}")

    elements = list(itertools.product(*[range(m) for m in moduli]))
    index = {e: t for t, e in enumerate(elements)}

    def apply_g(a):
        return tuple(sum(g[i][j] * a[j] for j in range(k)) % moduli[i] for i in range(k))

    if len({apply_g(a) for a in elements}) != len(elements):
        raise NotAutomorphism("g is not invertible modulo the moduli")

    table = []
    for a in elements:
        ga = apply_g(a)
        row = []
        for b in elements:
            gb = apply_g(b)
            w = tuple((gb[i] + a[i] - ga[i]) % moduli[i] for i in range(k))
            row.append(index[w])
        table.append(tuple(row))
    mods = "x".join(f"Z/{m}" for m in moduli)
    return Rack(tuple(table), f"affine({mods}, g={g})")


def conjugation_rack(n, cls="transpositions"):
    """The rack of transpositions in S_n under conjugation, i |> j = i j i^-1."""
    if cls != "transpositions":
        raise ValueError(f"unsupported conjugation class {cls!r}")
    if n < 2:
        raise ValueError("n must be >= 2")
    els = [(a, b) for a in range(1, n + 1) for b in range(a + 1, n + 1)]
    index = {e: t for t, e in enumerate(els)}

    def conj(a, b):
        def ap(x):
            if x == a[0]:
                return a[1]
            if x == a[1]:
                return a[0]
            return x
        u, v = ap(b[0]), ap(b[1])
        return (min(u, v), max(u, v))

    table = tuple(tuple(index[conj(a, b)] for b in els) for a in els)
    return Rack(table, f"transpositions(S{n})")


_FACES = ((1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1))


def cube_faces_rack(direction=+1):
    """Faces of the cube; i |> j rotates face j by 90 degrees about the outward
    axis of face i (right-hand rule when direction=+1, the frozen convention)."""
    if direction not in (+1, -1):
        raise ValueError("direction must be +1 or -1")
    index = {f: t for t, f in enumerate(_FACES)}

    def rot(axis, v):
        ax, ay, az = axis
        x, y, z = v
        cx, cy, cz = ay * z - az * y, az * x - ax * z, ax * y - ay * x
        if direction < 0:
            cx, cy, cz = -cx, -cy, -cz
        d = ax * x + ay * y + az * z
        return (cx + ax * d, cy + ay * d, cz + az * d)

    table = tuple(tuple(index[rot(a, b)] for b in _FACES) for a in _FACES)
    return Rack(table, "cube_faces" + ("" if direction > 0 else "(-90)"))


@dataclass(frozen=True)
class Cocycle:
    """Scalar matrix q_{ij} on pairs of rack elements; validity means the induced
    braiding satisfies the braid equation (checked in the braiding module)."""

    values: tuple          # size x size tuple of exact scalars
    field: object = field(default=None, compare=False)

    @property
    def size(self):
        return len(self.values)

    def __getitem__(self, ij):
        return self.values[ij[0]][ij[1]]


def constant_cocycle(rack, value, fld=None):
    if fld is not None:
        value = fld.coerce(value)
    elif isinstance(value, int):
        value = Fraction(value)
    if not value:
        raise ValueError("cocycle values must be nonzero")
    n = rack.size
    return Cocycle(tuple(tuple(value for _ in range(n)) for _ in range(n)), fld)


def cocycle_from_matrix(rack, values, fld=None):
    n = rack.size
    if len(values) != n or any(len(r) != n for r in values):
        raise ValueError("cocycle matrix shape must match the rack size")
    if fld is not None:
        values = [[fld.coerce(v) for v in row] for row in values]
    else:
        values = [[Fraction(v) if isinstance(v, int) else v for v in row] for row in values]
    if any(not v for row in values for v in row):
        raise ValueError("cocycle values must be nonzero")
    return Cocycle(tuple(tuple(row) for row in values), fld)


def rack_isomorphic(r1: Rack, r2: Rack) -> bool:
    """Exhaustive search for a rack isomorphism, pruned by profile invariants."""
    if r1.size != r2.size:
        return False
    if r1.profile() != r2.profile():
        return False
    n = r1.size
    t1, t2 = r1.table, r2.table

    # order the search by most-constrained-first: plain 0..n-1 is fine at this size
    phi = [-1] * n
    used = [False] * n

    def consistent(i):
        # check all products whose arguments are already assigned and involve i
        for a in range(n):
            if phi[a] < 0:
                continue
            for b in range(n):
                if phi[b] < 0:
                    continue
                c = t1[a][b]
                if phi[c] >= 0 and t2[phi[a]][phi[b]] != phi[c]:
                    return False
        return True

    def extend(i):
        if i == n:
            return True
        for y in range(n):
            if used[y]:
                continue
            phi[i] = y
            used[y] = True
            if consistent(i) and extend(i + 1):
                return True
            used[y] = False
            phi[i] = -1
        return False

    return extend(0)
