"""Arithmetic in finite fields F_q, q = p^m.

Elements are the integers 0..q-1.  For extension fields an element packs the
coefficients of its residue polynomial as base-p digits, constant term in the
least significant digit, so with x^2+x+1 over F_2 the element x is 2 and x+1
is 3.

Every operation accepts Python ints or integer numpy arrays and returns the
same kind it was given.
"""

from __future__ import annotations

import functools
import numbers
from dataclasses import dataclass, field

import numpy as np

from .errors import NoPrimitivePoly, NotPrime, UnsupportedSize

MAX_ORDER = 2**16

# First primitive polynomial per (p, m) in ascending base-p order, coefficients
# listed constant term first.
PRIMITIVE_POLYS: dict[tuple[int, int], tuple[int, ...]] = {
    (2, 2): (1, 1, 1),
    (2, 3): (1, 1, 0, 1),
    (2, 4): (1, 1, 0, 0, 1),
    (2, 5): (1, 0, 1, 0, 0, 1),
    (2, 6): (1, 1, 0, 0, 0, 0, 1),
    (2, 7): (1, 1, 0, 0, 0, 0, 0, 1),
    (2, 8): (1, 0, 1, 1, 1, 0, 0, 0, 1),
    (2, 9): (1, 0, 0, 0, 1, 0, 0, 0, 0, 1),
    (2, 10): (1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 1),
    (2, 11): (1, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 1),
    (2, 12): (1, 1, 0, 0, 1, 0, 1, 0, 0, 0, 0, 0, 1),
    (2, 13): (1, 1, 0, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 1),
    (2, 14): (1, 1, 0, 1, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 1),
    (2, 15): (1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1),
    (2, 16): (1, 0, 1, 1, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1),
    (3, 2): (2, 1, 1),
    (3, 3): (1, 2, 0, 1),
    (3, 4): (2, 1, 0, 0, 1),
    (3, 5): (1, 2, 0, 0, 0, 1),
    (3, 6): (2, 1, 0, 0, 0, 0, 1),
    (3, 7): (1, 2, 1, 0, 0, 0, 0, 1),
    (3, 8): (2, 0, 0, 1, 0, 0, 0, 0, 1),
    (3, 9): (1, 0, 1, 2, 0, 0, 0, 0, 0, 1),
    (3, 10): (2, 1, 0, 1, 0, 0, 0, 0, 0, 0, 1),
    (5, 2): (2, 1, 1),
    (5, 3): (2, 3, 0, 1),
    (5, 4): (2, 2, 1, 0, 1),
    (5, 5): (2, 4, 0, 0, 0, 1),
    (5, 6): (2, 1, 0, 0, 0, 0, 1),
    (7, 2): (3, 1, 1),
    (7, 3): (2, 3, 0, 1),
    (7, 4): (5, 3, 1, 0, 1),
    (7, 5): (4, 1, 0, 0, 0, 1),
    (11, 2): (7, 1, 1),
    (11, 3): (4, 1, 0, 1),
    (11, 4): (2, 1, 0, 0, 1),
    (13, 2): (2, 1, 1),
    (13, 3): (6, 1, 0, 1),
    (13, 4): (2, 1, 1, 0, 1),
    (17, 2): (3, 1, 1),
    (17, 3): (3, 1, 0, 1),
    (19, 2): (2, 1, 1),
    (19, 3): (4, 1, 0, 1),
    (23, 2): (7, 1, 1),
    (23, 3): (3, 1, 0, 1),
    (29, 2): (3, 1, 1),
    (29, 3): (11, 1, 0, 1),
    (31, 2): (12, 1, 1),
    (31, 3): (14, 1, 0, 1),
    (37, 2): (5, 1, 1),
    (37, 3): (13, 1, 0, 1),
    (41, 2): (12, 1, 1),
    (43, 2): (3, 1, 1),
    (47, 2): (13, 1, 1),
    (53, 2): (5, 1, 1),
    (59, 2): (2, 1, 1),
    (61, 2): (2, 1, 1),
    (67, 2): (12, 1, 1),
    (71, 2): (11, 1, 1),
    (73, 2): (11, 1, 1),
    (79, 2): (3, 1, 1),
    (83, 2): (2, 1, 1),
    (89, 2): (6, 1, 1),
    (97, 2): (5, 1, 1),
    (101, 2): (3, 1, 1),
    (103, 2): (5, 1, 1),
    (107, 2): (5, 1, 1),
    (109, 2): (6, 1, 1),
    (113, 2): (10, 1, 1),
    (127, 2): (3, 1, 1),
    (131, 2): (14, 1, 1),
    (137, 2): (6, 1, 1),
    (139, 2): (2, 1, 1),
    (149, 2): (3, 1, 1),
    (151, 2): (12, 1, 1),
    (157, 2): (6, 1, 1),
    (163, 2): (11, 1, 1),
    (167, 2): (5, 1, 1),
    (173, 2): (5, 1, 1),
    (179, 2): (7, 1, 1),
    (181, 2): (18, 1, 1),
    (191, 2): (19, 1, 1),
    (193, 2): (5, 1, 1),
    (197, 2): (3, 1, 1),
    (199, 2): (6, 1, 1),
    (211, 2): (3, 1, 1),
    (223, 2): (5, 1, 1),
    (227, 2): (5, 1, 1),
    (229, 2): (6, 1, 1),
    (233, 2): (3, 1, 1),
    (239, 2): (13, 1, 1),
    (241, 2): (13, 1, 1),
    (251, 2): (19, 1, 1),
}


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def prime_power(q: int) -> tuple[int, int] | None:
    """Return (p, m) with q = p^m, or None if q is not a prime power."""
    if q < 2:
        return None
    p = 2
    while p * p <= q and q % p:
        p += 1
    if q % p:
        p = q
    m, r = 0, q
    while r % p == 0:
        r //= p
        m += 1
    return (p, m) if r == 1 else None


def _pmod(a: list[int], f: list[int], p: int) -> list[int]:
    """Remainder of a modulo the monic polynomial f over F_p."""
    a = list(a)
    d = len(f) - 1
    for i in range(len(a) - 1, d - 1, -1):
        c = a[i]
        if c:
            for k in range(d + 1):
                a[i - d + k] = (a[i - d + k] - c * f[k]) % p
    return a[:d]


def _is_irreducible(f: tuple[int, ...], p: int) -> bool:
    """Trial division of f by every monic polynomial of degree 1..deg(f)//2."""
    m = len(f) - 1
    for d in range(1, m // 2 + 1):
        for code in range(p**d):
            g = [(code // p**i) % p for i in range(d)] + [1]
            if not any(_pmod(list(f), g, p)):
                return False
    return True


@dataclass(frozen=True)
class FieldSpec:
    p: int
    m: int
    primitive_poly: tuple[int, ...] = ()
    exp_table: np.ndarray | None = field(default=None, repr=False, compare=False)
    log_table: np.ndarray | None = field(default=None, repr=False, compare=False)
    inv_table: np.ndarray = field(default=None, repr=False, compare=False)

    @property
    def q(self) -> int:
        return self.p**self.m

    @property
    def is_prime(self) -> bool:
        return self.m == 1

    def __str__(self):
        return f"GF({self.q})"

    def elements(self) -> range:
        return range(self.q)

    def check(self, a):
        arr = np.asarray(a)
        if arr.size and (arr.min() < 0 or arr.max() >= self.q):
            raise ValueError(f"value out of range for {self}: {a!r}")
        return a

    # -- arithmetic -----------------------------------------------------

    def add(self, a, b):
        if _scalar(a) and _scalar(b):
            a, b = int(a), int(b)
            if self.m == 1:
                return (a + b) % self.p
            if self.p == 2:
                return a ^ b
            return int(self._digit_add(np.asarray(a), np.asarray(b), 1))
        a, b = np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)
        if self.m == 1:
            return (a + b) % self.p
        if self.p == 2:
            return a ^ b
        return self._digit_add(a, b, 1)

    def neg(self, a):
        if self.p == 2:
            return a
        if _scalar(a):
            a = int(a)
            if self.m == 1:
                return -a % self.p
            return int(self._digit_add(np.asarray(0), np.asarray(a), -1))
        a = np.asarray(a, dtype=np.int64)
        if self.m == 1:
            return -a % self.p
        return self._digit_add(np.zeros_like(a), a, -1)

    def sub(self, a, b):
        if self.m == 1:
            if _scalar(a) and _scalar(b):
                return (int(a) - int(b)) % self.p
            return (np.asarray(a, dtype=np.int64) - np.asarray(b, dtype=np.int64)) % self.p
        if self.p == 2:
            return self.add(a, b)
        if _scalar(a) and _scalar(b):
            return int(self._digit_add(np.asarray(int(a)), np.asarray(int(b)), -1))
        return self._digit_add(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64), -1)

    def mul(self, a, b):
        if self.m == 1:
            if _scalar(a) and _scalar(b):
                return int(a) * int(b) % self.p
            return np.asarray(a, dtype=np.int64) * np.asarray(b, dtype=np.int64) % self.p
        if _scalar(a) and _scalar(b):
            a, b = int(a), int(b)
            if a == 0 or b == 0:
                return 0
            return int(self.exp_table[(self.log_table[a] + self.log_table[b]) % (self.q - 1)])
        a, b = np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)
        r = self.exp_table[(self.log_table[a] + self.log_table[b]) % (self.q - 1)]
        return np.where((a == 0) | (b == 0), 0, r)

    def inv(self, a):
        if _scalar(a):
            a = int(a)
            if a == 0:
                raise ZeroDivisionError("0 has no inverse")
            return int(self.inv_table[a])
        a = np.asarray(a, dtype=np.int64)
        if np.any(a == 0):
            raise ZeroDivisionError("0 has no inverse")
        return self.inv_table[a]

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def power(self, a: int, e: int) -> int:
        r = 1
        a = int(a)
        while e:
            if e & 1:
                r = self.mul(r, a)
            a = self.mul(a, a)
            e >>= 1
        return r

    def sum(self, a, axis=None):
        """Field sum of an array along ``axis``."""
        a = np.asarray(a, dtype=np.int64)
        if self.m == 1:
            return a.sum(axis=axis) % self.p
        if self.p == 2:
            if axis is None:
                return np.bitwise_xor.reduce(a, axis=None)
            return np.bitwise_xor.reduce(a, axis=axis)
        out = 0
        for i in range(self.m):
            digit = (a // self.p**i) % self.p
            out = out + (digit.sum(axis=axis) % self.p) * self.p**i
        return out

    def matmul(self, a, b) -> np.ndarray:
        """Matrix product of integer arrays over the field."""
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.m == 1:
            return (a @ b) % self.p
        prod = self.mul(a[..., :, :, None], b[..., None, :, :])
        return self.sum(prod, axis=-2)

    def _digit_add(self, a, b, sign):
        p = self.p
        out = np.zeros(np.broadcast(a, b).shape, dtype=np.int64)
        for i in range(self.m):
            w = p**i
            out = out + ((a // w) % p + sign * ((b // w) % p)) % p * w
        return out

    def order(self, a: int) -> int:
        """Multiplicative order of a nonzero element."""
        if a == 0:
            raise ZeroDivisionError("0 has no multiplicative order")
        k, x = 1, a
        while x != 1:
            x = self.mul(x, a)
            k += 1
        return k


def _scalar(a) -> bool:
    return isinstance(a, numbers.Integral) or (isinstance(a, np.ndarray) and a.ndim == 0)


@functools.lru_cache(maxsize=None)
def make_field(p: int, m: int = 1, primitive_poly: tuple[int, ...] | None = None) -> FieldSpec:
    """Build F_{p^m}.

    ``primitive_poly`` overrides the built-in table; it is given constant
    term first and must be monic of degree m.
    """
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    if m < 1:
        raise ValueError("extension degree must be >= 1")
    q = p**m
    if q > MAX_ORDER:
        raise UnsupportedSize(f"field order {q} exceeds {MAX_ORDER}")

    if m == 1:
        inv = np.zeros(p, dtype=np.int64)
        for a in range(1, p):
            inv[a] = pow(a, p - 2, p)
        inv.setflags(write=False)
        return FieldSpec(p, 1, (), None, None, inv)

    if primitive_poly is None:
        try:
            poly = PRIMITIVE_POLYS[(p, m)]
        except KeyError:
            raise NoPrimitivePoly(f"no built-in primitive polynomial for p={p}, m={m}") from None
    else:
        poly = tuple(int(c) % p for c in primitive_poly)
        if len(poly) != m + 1 or poly[-1] != 1:
            raise ValueError(f"primitive_poly must be monic of degree {m}")
        if not _is_irreducible(poly, p):
            raise ValueError(f"polynomial {poly} is reducible over F_{p}")

    exp = np.zeros(2 * (q - 1), dtype=np.int64)
    log = np.zeros(q, dtype=np.int64)
    coeffs = [1] + [0] * (m - 1)
    for i in range(q - 1):
        value = sum(c * p**k for k, c in enumerate(coeffs))
        if i and value == 1:
            raise NoPrimitivePoly(f"polynomial {poly} is irreducible but not primitive")
        exp[i] = value
        log[value] = i
        # multiply by x and reduce
        top = coeffs[-1]
        coeffs = [0] + coeffs[:-1]
        if top:
            coeffs = [(c - top * poly[k]) % p for k, c in enumerate(coeffs)]
    exp[q - 1:] = exp[: q - 1]
    inv = np.zeros(q, dtype=np.int64)
    inv[exp[: q - 1]] = exp[(q - 1 - np.arange(q - 1)) % (q - 1)]
    for t in (exp, log, inv):
        t.setflags(write=False)
    return FieldSpec(p, m, poly, exp, log, inv)


def field_of_order(q: int) -> FieldSpec:
    pm = prime_power(q)
    if pm is None:
        raise NotPrime(f"{q} is not a prime power")
    return make_field(*pm)
