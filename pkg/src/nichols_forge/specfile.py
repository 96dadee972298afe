"""Braiding spec files: JSON documents describing a braided vector space,
scalars, and resource caps. Unknown keys are rejected.

Scalar literals are exact: an integer, a rational string "a/b", a root of
unity [e, N] meaning zeta_N^e, or [e, N, "a/b"] meaning zeta_N^e * a/b.
With scalars "auto" the cyclotomic order is the lcm of the N's that appear.
"""
from __future__ import annotations

import json
import math
from dataclasses import replace
from fractions import Fraction

from .braiding import (cartan_braiding, custom_braiding, diagonal_braiding,
                       jordanian_braiding, rack_braiding)
from .engine import Caps
from .fields import cyclotomic_context
from .racks import (affine_rack, cocycle_from_matrix, conjugation_rack,
                    constant_cocycle, cube_faces_rack, rack_from_table)


class SpecError(ValueError):
    pass


def _check_keys(obj, allowed, where):
    extra = set(obj) - set(allowed)
    if extra:
        raise SpecError(f"unknown keys {sorted(extra)} in {where}")


def _literal_order(lit):
    if isinstance(lit, (int, str)):
        return 1
    if isinstance(lit, list) and len(lit) in (2, 3):
        return int(lit[1])
    raise SpecError(f"bad scalar literal {lit!r}")


def _parse_literal(lit, fld):
    if isinstance(lit, bool):
        raise SpecError(f"bad scalar literal {lit!r}")
    if isinstance(lit, int):
        return fld.coerce(Fraction(lit))
    if isinstance(lit, str):
        return fld.coerce(Fraction(lit))
    if isinstance(lit, list) and len(lit) in (2, 3):
        e, n = int(lit[0]), int(lit[1])
        rat = Fraction(lit[2]) if len(lit) == 3 else Fraction(1)
        if n < 1:
            raise SpecError("root order must be positive")
        if fld.order % n != 0:
            raise SpecError(f"field of order {fld.order} has no zeta_{n}")
        root = fld.zeta_power(e * (fld.order // n))
        return fld.coerce(root * rat)
    raise SpecError(f"bad scalar literal {lit!r}")


def _iter_literals(braiding_block):
    fam = braiding_block.get("family")
    if fam == "diagonal":
        for row in braiding_block.get("q", []):
            yield from row
    elif fam in ("cartan", "jordanian"):
        yield braiding_block.get("q", 1)
    elif fam == "custom":
        for item in braiding_block.get("entries", []):
            yield item[4]
    if "cocycle" in braiding_block:
        co = braiding_block["cocycle"]
        if "constant" in co:
            yield co["constant"]
        else:
            for row in co.get("matrix", []):
                yield from row


def parse_spec(data):
    """Parse a spec dict (or JSON string) into (name, BraidedSpace, Caps, max_degree)."""
    if isinstance(data, str):
        data = json.loads(data)
    _check_keys(data, {"name", "scalars", "braiding", "caps"}, "spec")
    name = data.get("name", "unnamed")
    if "braiding" not in data:
        raise SpecError("spec needs a braiding block")
    bb = dict(data["braiding"])

    scalars = data.get("scalars", "auto")
    if scalars == "auto":
        order = 1
        for lit in _iter_literals(bb):
            order = math.lcm(order, _literal_order(lit))
    else:
        _check_keys(scalars, {"cyclotomic"}, "scalars")
        order = int(scalars["cyclotomic"])
    fld = cyclotomic_context(order)

    B = _parse_braiding(bb, fld)

    caps = Caps()
    max_degree = 8
    if "caps" in data:
        cb = dict(data["caps"])
        _check_keys(cb, {"max_degree", "dense_cap", "memory_budget", "primes",
                         "exact_threshold", "prime_min_bits", "seed", "threads"},
                    "caps")
        max_degree = int(cb.pop("max_degree", max_degree))
        mapping = {"dense_cap": "dense_cap", "memory_budget": "matrix_budget",
                   "primes": "primes", "exact_threshold": "exact_threshold",
                   "prime_min_bits": "prime_min_bits", "seed": "seed",
                   "threads": "threads"}
        kw = {mapping[k]: int(v) for k, v in cb.items()}
        caps = replace(caps, **kw)
    return name, B, caps, max_degree


def _parse_braiding(bb, fld):
    fam = bb.pop("family", None)
    if fam == "diagonal":
        _check_keys(bb, {"q"}, "diagonal braiding")
        q = [[_parse_literal(x, fld) for x in row] for row in bb["q"]]
        return diagonal_braiding(q, fld)
    if fam == "cartan":
        _check_keys(bb, {"matrix", "q"}, "cartan braiding")
        return cartan_braiding(bb["matrix"], _parse_literal(bb["q"], fld), fld)
    if fam == "jordanian":
        _check_keys(bb, {"theta", "q"}, "jordanian braiding")
        return jordanian_braiding(int(bb["theta"]), _parse_literal(bb["q"], fld), fld)
    if fam == "custom":
        _check_keys(bb, {"n", "entries"}, "custom braiding")
        ent = {}
        for item in bb["entries"]:
            i, j, k, l, lit = item
            ent.setdefault((int(i), int(j)), []).append(
                (int(k), int(l), _parse_literal(lit, fld)))
        return custom_braiding(ent, fld, int(bb["n"]))
    if fam in ("rack_affine", "rack_conjugation", "rack_cube", "rack_table"):
        co = bb.pop("cocycle", {"constant": -1})
        rack = _parse_rack(fam, bb)
        _check_keys(co, {"constant", "matrix"}, "cocycle")
        if "constant" in co:
            cocycle = constant_cocycle(rack, _parse_literal(co["constant"], fld), fld)
        else:
            vals = [[_parse_literal(x, fld) for x in row] for row in co["matrix"]]
            cocycle = cocycle_from_matrix(rack, vals, fld)
        return rack_braiding(rack, cocycle, fld)
    raise SpecError(f"unknown braiding family {fam!r}")


def _parse_rack(fam, bb):
    if fam == "rack_affine":
        _check_keys(bb, {"moduli", "g"}, "affine rack")
        return affine_rack(bb["moduli"], bb["g"])
    if fam == "rack_conjugation":
        _check_keys(bb, {"n", "class"}, "conjugation rack")
        return conjugation_rack(int(bb["n"]), bb.get("class", "transpositions"))
    if fam == "rack_cube":
        _check_keys(bb, {"direction"}, "cube rack")
        return cube_faces_rack(int(bb.get("direction", 1)))
    if fam == "rack_table":
        _check_keys(bb, {"table"}, "table rack")
        return rack_from_table(bb["table"])
    raise SpecError(f"unknown rack family {fam!r}")
