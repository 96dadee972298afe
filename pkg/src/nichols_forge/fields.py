"""Exact scalar arithmetic: rationals, cyclotomic fields Q(zeta_N), prime fields GF(p).

Exact contexts hand out elements with ordinary operator arithmetic (Fraction, or
CycElem for cyclotomic orders >= 3). Prime contexts hand out plain ints reduced
mod p; vectorized code keeps them in numpy int64 arrays and never boxes them.
No floating point is used anywhere for scalar values.
"""
from __future__ import annotations

import math
from fractions import Fraction

from .errors import BadPrime, InvalidPrime, NoSuchRoot, SearchExhausted

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid for all n < 3.3 * 10^24."""
    if n < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _factorize(n: int) -> dict[int, int]:
    fac = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            fac[d] = fac.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        fac[n] = fac.get(n, 0) + 1
    return fac


def euler_phi(n: int) -> int:
    out = n
    for q in _factorize(n):
        out = out // q * (q - 1)
    return out


def cyclotomic_polynomial(n: int) -> list[int]:
    """Integer coefficients of Phi_n, low degree first, via exact division of x^n - 1."""
    if n == 1:
        return [-1, 1]
    num = [-1] + [0] * (n - 1) + [1]  # x^n - 1
    for d in range(1, n):
        if n % d == 0:
            num = _polydiv_exact(num, cyclotomic_polynomial(d))
    return num


def _polydiv_exact(num: list[int], den: list[int]) -> list[int]:
    num = list(num)
    q = [0] * (len(num) - len(den) + 1)
    for i in range(len(q) - 1, -1, -1):
        c = num[i + len(den) - 1]
        if c % den[-1] != 0:
            raise ArithmeticError("inexact polynomial division")
        q[i] = c // den[-1]
        for j, dj in enumerate(den):
            num[i + j] -= q[i] * dj
    if any(num):
        raise ArithmeticError("nonzero remainder in cyclotomic division")
    return q


class CycElem:
    """Element of Q(zeta_N), stored as a length-phi(N) coefficient tuple mod Phi_N."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: CyclotomicField, coeffs):
        self.field = field
        self.coeffs = tuple(coeffs)

    def _lift(self, other):
        if isinstance(other, CycElem):
            if other.field.order != self.field.order:
                raise ValueError("mixed cyclotomic orders")
            return other
        if isinstance(other, (int, Fraction)):
            return self.field.from_fraction(Fraction(other))
        return NotImplemented

    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        return CycElem(self.field, [a + b for a, b in zip(self.coeffs, o.coeffs)])

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        return CycElem(self.field, [a - b for a, b in zip(self.coeffs, o.coeffs)])

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __neg__(self):
        return CycElem(self.field, [-a for a in self.coeffs])

    def __mul__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        if isinstance(other, (int, Fraction)):
            return CycElem(self.field, [a * other for a in self.coeffs])
        deg = self.field.degree
        prod = [Fraction(0)] * (2 * deg - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(o.coeffs):
                    if b:
                        prod[i + j] += a * b
        return CycElem(self.field, self.field._reduce(prod))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = self.field.one
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        return self.coeffs == o.coeffs

    def __hash__(self):
        return hash((self.field.order, self.coeffs))

    def __bool__(self):
        return any(self.coeffs)

    def inverse(self):
        """Extended Euclid against Phi_N over Q[x]."""
        if not self:
            raise ZeroDivisionError("inverse of zero cyclotomic element")
        # r0 = Phi_N, r1 = self; keep t-coefficients so t1 * self = r1 (mod Phi)
        r0 = [Fraction(c) for c in self.field.poly]
        r1 = list(self.coeffs)
        t0, t1 = [Fraction(0)], [Fraction(1)]
        while True:
            while r1 and not r1[-1]:
                r1.pop()
            if len(r1) == 1:
                inv = 1 / r1[0]
                co = [c * inv for c in t1]
                co += [Fraction(0)] * (self.field.degree - len(co))
                return CycElem(self.field, self.field._reduce(co))
            q, r = _polydivmod(r0, r1)
            t0, t1 = t1, _polysub(t0, _polymul(q, t1))
            r0, r1 = r1, r

    def rational_part(self):
        """The element as a Fraction if it is rational, else None."""
        if any(self.coeffs[1:]):
            return None
        return self.coeffs[0]

    def __repr__(self):
        parts = []
        for i, c in enumerate(self.coeffs):
            if c:
                parts.append(f"{c}" if i == 0 else f"{c}*z^{i}")
        return " + ".join(parts) if parts else "0"


def _polymul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _polysub(a, b):
    out = [Fraction(0)] * max(len(a), len(b))
    for i, x in enumerate(a):
        out[i] += x
    for i, y in enumerate(b):
        out[i] -= y
    return out


def _polydivmod(a, b):
    a = list(a)
    while b and not b[-1]:
        b = b[:-1]
    q = [Fraction(0)] * max(1, len(a) - len(b) + 1)
    for i in range(len(a) - len(b), -1, -1):
        c = a[i + len(b) - 1] / b[-1]
        q[i] = c
        if c:
            for j, bj in enumerate(b):
                a[i + j] -= c * bj
    while len(a) > 1 and not a[-1]:
        a.pop()
    return q, a


class Rationals:
    """The exact ground field Q; also serves cyclotomic orders 1 and 2."""

    kind = "rational"
    zero = Fraction(0)
    one = Fraction(1)

    def __init__(self, zeta_order: int = 1):
        if zeta_order not in (1, 2):
            raise ValueError("Q only contains roots of unity of order 1 and 2")
        self.order = zeta_order
        self.zeta = Fraction(1) if zeta_order == 1 else Fraction(-1)

    def zeta_power(self, k: int):
        return self.zeta ** (k % self.order)

    def from_fraction(self, x):
        return Fraction(x)

    def is_zero(self, x):
        return x == 0

    def coerce(self, x):
        if isinstance(x, (int, Fraction)):
            return Fraction(x)
        if isinstance(x, CycElem):
            r = x.rational_part()
            if r is None:
                raise ValueError("non-rational scalar in rational context")
            return r
        raise TypeError(f"cannot coerce {type(x).__name__} into Q")

    def describe(self):
        return {"kind": "rational", "zeta_order": self.order}

    def __repr__(self):
        return "Q"

    def __eq__(self, other):
        return isinstance(other, Rationals) and other.order == self.order

    def __hash__(self):
        return hash(("Q", self.order))


class CyclotomicField:
    """Q(zeta_N) for N >= 3, elements reduced modulo the N-th cyclotomic polynomial."""

    kind = "cyclotomic"

    def __init__(self, order: int):
        if order < 3:
            raise ValueError("use Rationals for cyclotomic orders 1 and 2")
        self.order = order
        self.poly = cyclotomic_polynomial(order)
        self.degree = len(self.poly) - 1
        self.zero = CycElem(self, [Fraction(0)] * self.degree)
        self.one = self.from_fraction(Fraction(1))
        self.zeta = self.zeta_power(1)

    def _reduce(self, coeffs):
        coeffs = [Fraction(c) for c in coeffs]
        lead = self.poly[-1]  # = 1 for cyclotomic polynomials
        for i in range(len(coeffs) - 1, self.degree - 1, -1):
            c = coeffs[i] / lead
            if c:
                for j in range(len(self.poly)):
                    coeffs[i - self.degree + j] -= c * self.poly[j]
        out = coeffs[: self.degree]
        out += [Fraction(0)] * (self.degree - len(out))
        return out

    def from_fraction(self, x):
        co = [Fraction(0)] * self.degree
        co[0] = Fraction(x)
        return CycElem(self, co)

    def zeta_power(self, k: int):
        k %= self.order
        co = [Fraction(0)] * (k + 1)
        co[k] = Fraction(1)
        return CycElem(self, self._reduce(co))

    def is_zero(self, x):
        return not self.coerce(x)

    def coerce(self, x):
        if isinstance(x, CycElem):
            if x.field.order == self.order:
                return x
            if x.field.order % self.order == 0 or self.order % x.field.order == 0:
                return self.embed(x)
            raise ValueError("incompatible cyclotomic orders")
        if isinstance(x, (int, Fraction)):
            return self.from_fraction(Fraction(x))
        raise TypeError(f"cannot coerce {type(x).__name__} into Q(zeta_{self.order})")

    def embed(self, x: CycElem):
        """Embed from Q(zeta_M) with M | N via zeta_M -> zeta_N^(N/M)."""
        m = x.field.order
        if self.order % m != 0:
            raise ValueError(f"no embedding Q(zeta_{m}) -> Q(zeta_{self.order})")
        step = self.order // m
        out = self.zero
        for i, c in enumerate(x.coeffs):
            if c:
                out = out + self.zeta_power(i * step) * c
        return out

    def describe(self):
        return {"kind": "cyclotomic", "order": self.order}

    def __repr__(self):
        return f"Q(zeta_{self.order})"

    def __eq__(self, other):
        return isinstance(other, CyclotomicField) and other.order == self.order

    def __hash__(self):
        return hash(("cyc", self.order))


class PrimeField:
    """GF(p) with a designated root of unity zeta of multiplicative order N."""

    kind = "prime"

    def __init__(self, p: int, zeta_order: int = 1, zeta: int | None = None):
        if not is_prime(p):
            raise InvalidPrime(f"{p} is not prime")
        if (p - 1) % zeta_order != 0:
            raise NoSuchRoot(f"no element of order {zeta_order} in GF({p})")
        self.p = p
        self.order = zeta_order
        self.zeta = self._find_root(zeta_order) if zeta is None else zeta % p
        if zeta is not None and not self._has_order(self.zeta, zeta_order):
            raise NoSuchRoot(f"{zeta} does not have order {zeta_order} mod {p}")
        self.zero = 0
        self.one = 1 % p

    def _has_order(self, z: int, n: int) -> bool:
        if pow(z, n, self.p) != 1:
            return False
        return all(pow(z, n // q, self.p) != 1 for q in _factorize(n))

    def _find_root(self, n: int) -> int:
        if n == 1:
            return 1
        e = (self.p - 1) // n
        for a in range(2, self.p):
            z = pow(a, e, self.p)
            if self._has_order(z, n):
                return z
        raise NoSuchRoot(f"no order-{n} root found mod {self.p}")  # unreachable

    def add(self, a, b):
        return (a + b) % self.p

    def mul(self, a, b):
        return a * b % self.p

    def neg(self, a):
        return -a % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError("inverse of 0 mod p")
        return pow(a, -1, self.p)

    def is_zero(self, a):
        return a % self.p == 0

    def from_fraction(self, x):
        x = Fraction(x)
        if x.denominator % self.p == 0:
            raise BadPrime(f"denominator {x.denominator} vanishes mod {self.p}")
        return x.numerator * pow(x.denominator, -1, self.p) % self.p

    def describe(self):
        return {"kind": "prime", "p": self.p, "zeta": self.zeta, "zeta_order": self.order}

    def __repr__(self):
        return f"GF({self.p}; zeta_{self.order}={self.zeta})"

    def __eq__(self, other):
        return (isinstance(other, PrimeField) and other.p == self.p
                and other.order == self.order and other.zeta == self.zeta)

    def __hash__(self):
        return hash(("gf", self.p, self.order, self.zeta))


def make_field(spec):
    """Build a field context from a descriptor.

    Accepts {"kind": "rational"}, {"kind": "cyclotomic", "order": N} (orders 1 and 2
    collapse to Q), or {"kind": "prime", "p": p, "zeta_order": N[, "zeta": z]}.
    """
    kind = spec.get("kind")
    if kind == "rational":
        return Rationals()
    if kind == "cyclotomic":
        n = int(spec["order"])
        if n < 1:
            raise ValueError("cyclotomic order must be >= 1")
        return Rationals(n) if n <= 2 else CyclotomicField(n)
    if kind == "prime":
        return PrimeField(int(spec["p"]), int(spec.get("zeta_order", 1)),
                          spec.get("zeta"))
    raise ValueError(f"unknown field kind {kind!r}")


def cyclotomic_context(order: int):
    return Rationals(order) if order <= 2 else CyclotomicField(order)


_prime_search_cache: dict = {}


def find_primes(zeta_order: int, count: int, min_bits: int = 30,
                seed: int = 0, max_iter: int = 2_000_000) -> list[PrimeField]:
    """Distinct primes p = 1 (mod N), p >= 2^min_bits, each with an order-N root.

    Deterministic for fixed (zeta_order, count, min_bits, seed); seed offsets the
    starting point so independent runs can draw disjoint prime sets.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    key = (zeta_order, count, min_bits, seed)
    if key in _prime_search_cache:
        return list(_prime_search_cache[key])
    n = max(1, zeta_order)
    start = (1 << min_bits) + seed * n * 1000
    k = (start - 1 + n - 1) // n  # smallest k with n*k+1 >= start
    out = []
    for _ in range(max_iter):
        p = n * k + 1
        k += 1
        if p < (1 << min_bits) or not is_prime(p):
            continue
        out.append(PrimeField(p, n))
        if len(out) == count:
            _prime_search_cache[key] = list(out)
            return out
    raise SearchExhausted(f"no {count} primes = 1 mod {n} above 2^{min_bits} found")


def reduce_scalar(s, target: PrimeField) -> int:
    """Ring homomorphism image of an exact scalar in GF(p), zeta_N -> target.zeta."""
    if isinstance(s, int):
        return s % target.p
    if isinstance(s, Fraction):
        return target.from_fraction(s)
    if isinstance(s, CycElem):
        n = s.field.order
        if target.order % n != 0:
            raise NoSuchRoot(
                f"target zeta order {target.order} does not contain order {n}")
        z = pow(target.zeta, target.order // n, target.p)
        out = 0
        zp = 1
        for c in s.coeffs:
            if c:
                out = (out + target.from_fraction(c) * zp) % target.p
            zp = zp * z % target.p
        return out
    raise TypeError(f"cannot reduce {type(s).__name__} mod p")


def scalar_order(s, field) -> int | None:
    """Multiplicative order of s if it is a root of unity, else None."""
    if isinstance(field, PrimeField):
        s = s % field.p
        if s == 0:
            return None
        # order divides p-1; peel prime factors
        n = field.p - 1
        for q, e in _factorize(n).items():
            for _ in range(e):
                if pow(s, n // q, field.p) == 1:
                    n //= q
                else:
                    break
        return n
    if isinstance(s, int):
        s = Fraction(s)
    if isinstance(s, Fraction):
        if s == 1:
            return 1
        if s == -1:
            return 2
        return None
    if isinstance(s, CycElem):
        bound = math.lcm(2, s.field.order)
        acc = s.field.one
        for k in range(1, bound + 1):
            acc = acc * s
            if acc == s.field.one:
                return k
        return None
    raise TypeError(f"cannot compute order of {type(s).__name__}")


def as_exact(x, field):
    """Coerce a python int / Fraction / CycElem into the exact context `field`."""
    return field.coerce(x) if not isinstance(field, PrimeField) else field.from_fraction(Fraction(x))
