"""Finite fields GF(p^k) for k <= 4.

Elements are the integers ``0 .. q-1``; the base-p digits of an element are
the coefficients (lowest degree first) of its polynomial representative
modulo a fixed monic irreducible polynomial.  For q <= 256 full addition,
multiplication, negation and inverse tables are precomputed as numpy arrays,
which also powers the vectorised helpers (``vadd``, ``vmul``, ``dot``...)
used by the geometry constructions.
"""

from __future__ import annotations

import functools
import itertools

import numpy as np

from .errors import DegreeOutOfRange, DivisionByZero, NonPrimeCharacteristic, OddExtensionDegree

MAX_DEGREE = 4
MAX_ORDER = 1 << 16
TABLE_LIMIT = 256


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def prime_power(q: int) -> tuple[int, int] | None:
    """Return ``(p, k)`` with ``q == p**k``, or None if q is not a prime power."""
    if q < 2:
        return None
    for p in range(2, q + 1):
        if q % p == 0:
            if not is_prime(p):
                return None
            k, r = 0, q
            while r % p == 0:
                r //= p
                k += 1
            return (p, k) if r == 1 else None
    return None


# -- polynomials over GF(p), coefficient lists lowest degree first ----------


def _trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_rem(a, m, p):
    """Remainder of a modulo the monic polynomial m."""
    a = _trim(a)
    dm = len(m) - 1
    while len(a) - 1 >= dm:
        lead = a[-1]
        shift = len(a) - 1 - dm
        for i, c in enumerate(m):
            a[shift + i] = (a[shift + i] - lead * c) % p
        a = _trim(a)
    return a


def _is_irreducible(m, p):
    k = len(m) - 1
    if k == 1:
        return True
    for d in range(1, k // 2 + 1):
        for low in itertools.product(range(p), repeat=d):
            if not _poly_rem(m, list(low) + [1], p):
                return False
    return True


def smallest_irreducible(p: int, k: int) -> tuple[int, ...]:
    """Monic irreducible of degree k, smallest with a_0 compared first."""
    for low in itertools.product(range(p), repeat=k):
        m = list(low) + [1]
        if _is_irreducible(m, p):
            return tuple(m)
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


class Field:
    """The finite field GF(p^k) with a fixed modulus.

    Construct through :func:`make_field`; instances are immutable and shared.
    """

    def __init__(self, p: int, k: int, modulus: tuple[int, ...]):
        self.p = p
        self.k = k
        self.q = p**k
        self.modulus = tuple(modulus)
        self._digits = np.array(
            [[(a // p**i) % p for i in range(k)] for a in range(self.q)], dtype=np.int64
        ) if self.q <= TABLE_LIMIT else None
        self.has_tables = self.q <= TABLE_LIMIT
        if self.has_tables:
            self._build_tables()

    # -- construction helpers ------------------------------------------------

    def _to_poly(self, a):
        return [(a // self.p**i) % self.p for i in range(self.k)]

    def _from_poly(self, c):
        return sum(int(ci) * self.p**i for i, ci in enumerate(c))

    def _mul_slow(self, a, b):
        if self.k == 1:
            return (a * b) % self.p
        x, y = self._to_poly(a), self._to_poly(b)
        prod = [0] * (2 * self.k - 1)
        for i, xi in enumerate(x):
            if xi:
                for j, yj in enumerate(y):
                    prod[i + j] = (prod[i + j] + xi * yj) % self.p
        return self._from_poly(_poly_rem(prod, self.modulus, self.p))

    def _add_slow(self, a, b):
        if self.k == 1:
            return (a + b) % self.p
        x, y = self._to_poly(a), self._to_poly(b)
        return self._from_poly([(u + v) % self.p for u, v in zip(x, y)])

    def _neg_slow(self, a):
        return self._from_poly([(-u) % self.p for u in self._to_poly(a)])

    def _pow_slow(self, a, e):
        result, base = 1, a
        while e:
            if e & 1:
                result = self._mul_slow(result, base)
            base = self._mul_slow(base, base)
            e >>= 1
        return result

    def _build_tables(self):
        q, p = self.q, self.p
        idx = np.arange(q)
        if self.k == 1:
            self.add_table = (idx[:, None] + idx[None, :]) % p
            self.mul_table = (idx[:, None] * idx[None, :]) % p
            self.neg_table = (-idx) % p
            inv = np.zeros(q, dtype=np.int64)
            for a in range(1, q):
                inv[a] = pow(a, p - 2, p)
            self.inv_table = inv
        else:
            weights = p ** np.arange(self.k)
            d = self._digits
            self.add_table = (((d[:, None, :] + d[None, :, :]) % p) * weights).sum(axis=2)
            self.neg_table = (((-d) % p) * weights).sum(axis=1)
            # exp/log tables from a generator of the multiplicative group
            gen = next(g for g in range(2, q) if self._order_slow(g) == q - 1)
            exp = np.zeros(2 * (q - 1), dtype=np.int64)
            exp[0] = 1
            for i in range(1, 2 * (q - 1)):
                exp[i] = self._mul_slow(int(exp[i - 1]), gen)
            log = np.zeros(q, dtype=np.int64)
            log[exp[: q - 1]] = np.arange(q - 1)
            mul = np.zeros((q, q), dtype=np.int64)
            mul[1:, 1:] = exp[log[1:, None] + log[None, 1:]]
            self.mul_table = mul
            inv = np.zeros(q, dtype=np.int64)
            inv[1:] = exp[(q - 1 - log[1:]) % (q - 1)]
            self.inv_table = inv
        for name in ("add_table", "mul_table", "neg_table", "inv_table"):
            arr = getattr(self, name).astype(np.int64)
            arr.setflags(write=False)
            setattr(self, name, arr)
        if self.k % 2 == 0:
            frob = np.array([self._pow_slow(a, self.p ** (self.k // 2)) for a in range(q)])
            frob.setflags(write=False)
            self.frob_table = frob

    def _order_slow(self, g):
        x, n = g, 1
        while x != 1:
            x = self._mul_slow(x, g)
            n += 1
        return n

    # -- scalar arithmetic ---------------------------------------------------

    def add(self, a: int, b: int) -> int:
        if self.has_tables:
            return int(self.add_table[a, b])
        return self._add_slow(a, b)

    def neg(self, a: int) -> int:
        if self.has_tables:
            return int(self.neg_table[a])
        return self._neg_slow(a)

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.has_tables:
            return int(self.mul_table[a, b])
        return self._mul_slow(a, b)

    def inv(self, a: int) -> int:
        if a == 0:
            raise DivisionByZero("inverse of 0 in GF(%d)" % self.q)
        if self.has_tables:
            return int(self.inv_table[a])
        return self._pow_slow(a, self.q - 2)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            a, e = self.inv(a), -e
        if self.has_tables:
            result, base = 1, a
            while e:
                if e & 1:
                    result = int(self.mul_table[result, base])
                base = int(self.mul_table[base, base])
                e >>= 1
            return result
        return self._pow_slow(a, e)

    def frobenius(self, a: int) -> int:
        """Conjugation a -> a**sqrt(q) of GF(q) over its index-2 subfield."""
        if self.k % 2:
            raise OddExtensionDegree(f"GF({self.q}) is not a quadratic extension")
        if self.has_tables:
            return int(self.frob_table[a])
        return self._pow_slow(a, self.p ** (self.k // 2))

    def elements(self) -> range:
        return range(self.q)

    # -- vectorised helpers (table-backed fields only) -----------------------

    def vadd(self, a, b):
        return self.add_table[a, b]

    def vmul(self, a, b):
        return self.mul_table[a, b]

    def vneg(self, a):
        return self.neg_table[a]

    def vinv(self, a):
        return self.inv_table[a]

    def vfrob(self, a):
        if self.k % 2:
            raise OddExtensionDegree(f"GF({self.q}) is not a quadratic extension")
        return self.frob_table[a]

    def dot(self, u, w):
        """Field dot products between the rows of ``u`` (m x d) and ``w`` (n x d)."""
        u = np.asarray(u)
        w = np.asarray(w)
        if self.k == 1:
            return (u @ w.T) % self.p
        acc = np.zeros((u.shape[0], w.shape[0]), dtype=np.int64)
        for j in range(u.shape[1]):
            acc = self.add_table[acc, self.mul_table[u[:, j, None], w[None, :, j]]]
        return acc

    # -- presentation --------------------------------------------------------

    def modulus_str(self) -> str:
        terms = []
        for deg in range(self.k, -1, -1):
            c = self.modulus[deg]
            if c == 0:
                continue
            if deg == 0:
                terms.append(str(c))
            else:
                mono = "x" if deg == 1 else f"x^{deg}"
                terms.append(mono if c == 1 else f"{c}{mono}")
        return "+".join(terms) + f" over GF({self.p})"

    def __repr__(self):
        return f"Field(GF({self.q}), modulus={self.modulus_str()!r})"

    def __eq__(self, other):
        return isinstance(other, Field) and (self.p, self.k, self.modulus) == (
            other.p,
            other.k,
            other.modulus,
        )

    def __hash__(self):
        return hash((self.p, self.k, self.modulus))


@functools.lru_cache(maxsize=None)
def make_field(p: int, k: int = 1) -> Field:
    """Build GF(p^k) using the smallest monic irreducible modulus."""
    if not is_prime(p):
        raise NonPrimeCharacteristic(f"{p} is not prime")
    if not 1 <= k <= MAX_DEGREE or p**k > MAX_ORDER:
        raise DegreeOutOfRange(f"GF({p}^{k}) outside 1 <= k <= {MAX_DEGREE}, q <= {MAX_ORDER}")
    return Field(p, k, smallest_irreducible(p, k))


def field_of_order(q: int) -> Field:
    pk = prime_power(q)
    if pk is None:
        raise NonPrimeCharacteristic(f"{q} is not a prime power")
    return make_field(*pk)
