"""Polynomials in the delay variable z over F_q, and matrices over F_q and F_q[z]."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionMismatch, FieldMismatch, ParseError, Singular
from .galois import FieldSpec

NEG_INF = float("-inf")


def _same_field(a: FieldSpec, b: FieldSpec):
    if a != b:
        raise FieldMismatch(f"{a} vs {b}")


@dataclass(frozen=True)
class Poly:
    """Polynomial over F_q; ``coeffs[i]`` is the coefficient of z^i.

    Construct through :meth:`make` to get canonical form (no trailing zeros).
    """

    field: FieldSpec
    coeffs: tuple[int, ...]

    @classmethod
    def make(cls, field: FieldSpec, coeffs: Iterable[int]) -> "Poly":
        c = [int(x) for x in coeffs]
        field.check(c)
        while c and c[-1] == 0:
            c.pop()
        return cls(field, tuple(c))

    @classmethod
    def zero(cls, field: FieldSpec) -> "Poly":
        return cls(field, ())

    @classmethod
    def constant(cls, field: FieldSpec, c: int) -> "Poly":
        return cls.make(field, [c])

    @property
    def degree(self):
        """Degree, or ``-inf`` for the zero polynomial."""
        return len(self.coeffs) - 1 if self.coeffs else NEG_INF

    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, i: int) -> int:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def __add__(self, other: "Poly") -> "Poly":
        return poly_arith(self, other, "add")

    def __sub__(self, other: "Poly") -> "Poly":
        return poly_arith(self, other, "sub")

    def __mul__(self, other: "Poly") -> "Poly":
        return poly_arith(self, other, "mul")

    def __neg__(self) -> "Poly":
        return Poly.make(self.field, [self.field.neg(c) for c in self.coeffs])

    def scale(self, c: int) -> "Poly":
        return Poly.make(self.field, [self.field.mul(c, x) for x in self.coeffs])

    def __call__(self, x: int) -> int:
        f = self.field
        acc = 0
        for c in reversed(self.coeffs):
            acc = f.add(f.mul(acc, x), c)
        return acc

    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f"Poly({format_poly(self)!r}, {self.field})"


def poly_arith(a: Poly, b: Poly, op: str) -> Poly:
    """Ring operation ``op`` in {"add", "sub", "mul"} on two polynomials."""
    _same_field(a.field, b.field)
    f = a.field
    if op in ("add", "sub"):
        n = max(len(a.coeffs), len(b.coeffs))
        fn = f.add if op == "add" else f.sub
        return Poly.make(f, [fn(a.coeff(i), b.coeff(i)) for i in range(n)])
    if op == "mul":
        if a.is_zero() or b.is_zero():
            return Poly.zero(f)
        out = [0] * (len(a.coeffs) + len(b.coeffs) - 1)
        for i, x in enumerate(a.coeffs):
            if x:
                for j, y in enumerate(b.coeffs):
                    out[i + j] = f.add(out[i + j], f.mul(x, y))
        return Poly.make(f, out)
    raise ValueError(f"unknown polynomial operation {op!r}")


def _poly_divmod(a: Poly, b: Poly) -> tuple[Poly, Poly]:
    f = a.field
    if b.is_zero():
        raise ZeroDivisionError("polynomial division by zero")
    r = list(a.coeffs)
    db = len(b.coeffs) - 1
    lead_inv = f.inv(b.coeffs[-1])
    quot = [0] * max(len(r) - db, 0)
    for i in range(len(r) - 1, db - 1, -1):
        c = f.mul(r[i], lead_inv)
        if c:
            quot[i - db] = c
            for k, y in enumerate(b.coeffs):
                r[i - db + k] = f.sub(r[i - db + k], f.mul(c, y))
    return Poly.make(f, quot), Poly.make(f, r[:db] if db else [])


def poly_gcd(polys: Iterable[Poly]) -> Poly:
    """Monic gcd of the given polynomials (zero if all are zero)."""
    g = None
    for p in polys:
        if g is None:
            g = p
            continue
        a, b = g, p
        while not b.is_zero():
            a, b = b, _poly_divmod(a, b)[1]
        g = a
    if g is None:
        raise ValueError("gcd of no polynomials")
    if g.is_zero():
        return g
    return g.scale(g.field.inv(g.coeffs[-1]))


def format_poly(p: Poly) -> str:
    """Render ascending, e.g. ``1+z^2``, ``2z``, ``2+z+2z^2``; zero renders ``0``."""
    terms = []
    for i, c in enumerate(p.coeffs):
        if c == 0:
            continue
        if i == 0:
            terms.append(str(c))
            continue
        zpart = "z" if i == 1 else f"z^{i}"
        terms.append(zpart if c == 1 else f"{c}{zpart}")
    return "+".join(terms) if terms else "0"


_TERM = re.compile(r"^(\d*)(z(?:\^(\d+))?)?$")


def parse_poly(text: str, field: FieldSpec) -> Poly:
    """Parse the ``c``, ``z``, ``cz``, ``z^k``, ``cz^k`` sum grammar."""
    s = re.sub(r"\s+", "", text).replace("*", "")
    if not s:
        raise ParseError(f"empty polynomial in {text!r}")
    coeffs: dict[int, int] = {}
    for term in s.split("+"):
        mt = _TERM.match(term)
        if not term or mt is None or (not mt.group(1) and not mt.group(2)):
            raise ParseError(f"bad polynomial term {term!r} in {text!r}")
        c = int(mt.group(1)) if mt.group(1) else 1
        if c >= field.q:
            raise ParseError(f"coefficient {c} is not an element of {field}")
        power = 0 if not mt.group(2) else int(mt.group(3) or 1)
        coeffs[power] = field.add(coeffs.get(power, 0), c)
    top = max(coeffs)
    return Poly.make(field, [coeffs.get(i, 0) for i in range(top + 1)])


class ScalarMatrix:
    """Dense r x c matrix over F_q backed by a read-only int64 array."""

    __slots__ = ("field", "entries")

    def __init__(self, field: FieldSpec, entries):
        arr = np.array(entries, dtype=np.int64)
        if arr.ndim != 2:
            if arr.size == 0:
                arr = arr.reshape(0, 0)
            else:
                raise DimensionMismatch(f"matrix entries must be 2-D, got shape {arr.shape}")
        field.check(arr)
        arr.setflags(write=False)
        self.field = field
        self.entries = arr

    @classmethod
    def identity(cls, field: FieldSpec, n: int) -> "ScalarMatrix":
        return cls(field, np.eye(n, dtype=np.int64))

    @classmethod
    def zeros(cls, field: FieldSpec, r: int, c: int) -> "ScalarMatrix":
        return cls(field, np.zeros((r, c), dtype=np.int64))

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    def __getitem__(self, idx):
        return self.entries[idx]

    def tolist(self) -> list[list[int]]:
        return self.entries.tolist()

    def __eq__(self, other):
        if not isinstance(other, ScalarMatrix):
            return NotImplemented
        return self.field == other.field and np.array_equal(self.entries, other.entries)

    def __hash__(self):
        return hash((self.field, self.entries.tobytes(), self.shape))

    def __matmul__(self, other: "ScalarMatrix") -> "ScalarMatrix":
        return scalar_matmul(self, other)

    def __add__(self, other: "ScalarMatrix") -> "ScalarMatrix":
        _same_field(self.field, other.field)
        if self.shape != other.shape:
            raise DimensionMismatch(f"{self.shape} + {other.shape}")
        return ScalarMatrix(self.field, self.field.add(self.entries, other.entries))

    def __sub__(self, other: "ScalarMatrix") -> "ScalarMatrix":
        _same_field(self.field, other.field)
        if self.shape != other.shape:
            raise DimensionMismatch(f"{self.shape} - {other.shape}")
        return ScalarMatrix(self.field, self.field.sub(self.entries, other.entries))

    def inverse(self) -> "ScalarMatrix":
        return scalar_inverse(self)

    def rank(self) -> int:
        return _row_reduce(self.field, self.entries.copy())[1]

    def __repr__(self):
        return f"ScalarMatrix({self.tolist()}, {self.field})"

    def __str__(self):
        return format_matrix(self)


def format_matrix(m: ScalarMatrix) -> str:
    return "[" + ", ".join("[" + ", ".join(str(x) for x in row) + "]" for row in m.tolist()) + "]"


def scalar_matmul(a: ScalarMatrix, b: ScalarMatrix) -> ScalarMatrix:
    _same_field(a.field, b.field)
    if a.cols != b.rows:
        raise DimensionMismatch(f"cannot multiply {a.shape} by {b.shape}")
    return ScalarMatrix(a.field, a.field.matmul(a.entries, b.entries))


def _row_reduce(f: FieldSpec, m: np.ndarray) -> tuple[np.ndarray, int]:
    """Reduced row echelon form in place; returns (matrix, rank)."""
    rows, cols = m.shape
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(m[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            m[[r, piv]] = m[[piv, r]]
        m[r] = f.mul(m[r], f.inv(int(m[r, c])))
        for i in range(rows):
            if i != r and m[i, c]:
                m[i] = f.sub(m[i], f.mul(int(m[i, c]), m[r]))
        r += 1
    return m, r


def scalar_inverse(m: ScalarMatrix) -> ScalarMatrix:
    """Gauss-Jordan inverse over F_q."""
    if m.rows != m.cols:
        raise DimensionMismatch(f"cannot invert non-square {m.shape} matrix")
    n = m.rows
    aug = np.concatenate([m.entries, np.eye(n, dtype=np.int64)], axis=1)
    aug, rank = _row_reduce(m.field, aug)
    if rank < n or not np.array_equal(aug[:, :n], np.eye(n, dtype=np.int64)):
        raise Singular("matrix is singular")
    return ScalarMatrix(m.field, aug[:, n:])


class PolyMatrix:
    """b x c matrix over F_q[z], e.g. a polynomial generator matrix."""

    __slots__ = ("field", "entries")

    def __init__(self, field: FieldSpec, entries: Sequence[Sequence[Poly]]):
        rows = tuple(tuple(e) for e in entries)
        if not rows or any(len(r) != len(rows[0]) for r in rows):
            raise DimensionMismatch("polynomial matrix rows must be nonempty and of equal length")
        for r in rows:
            for e in r:
                _same_field(field, e.field)
        self.field = field
        self.entries = rows

    @classmethod
    def from_coeffs(cls, field: FieldSpec, rows: Sequence[Sequence[Sequence[int]]]) -> "PolyMatrix":
        """Build from nested coefficient lists, ascending powers."""
        return cls(field, [[Poly.make(field, c) for c in row] for row in rows])

    @classmethod
    def parse(cls, text: str, field: FieldSpec) -> "PolyMatrix":
        """Parse ``[1+z^2, 1+z+z^2]``; rows separated by ``;`` or newlines."""
        body = text.strip()
        if body.startswith("[") and body.endswith("]"):
            body = body[1:-1]
        rows = [r for r in re.split(r"[;\n]", body) if r.strip()]
        if not rows:
            raise ParseError(f"empty generator matrix {text!r}")
        entries = [[parse_poly(e, field) for e in r.split(",")] for r in rows]
        if any(len(r) != len(entries[0]) for r in entries):
            raise ParseError(f"rows of unequal length in {text!r}")
        return cls(field, entries)

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0])

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    @property
    def row_degrees(self) -> tuple[int, ...]:
        """nu_i = max_j deg g_ij; a zero row gets 0."""
        out = []
        for r in self.entries:
            d = max(e.degree for e in r)
            out.append(0 if d == NEG_INF else int(d))
        return tuple(out)

    @property
    def degree(self) -> int:
        return sum(self.row_degrees)

    def is_zero(self) -> bool:
        return all(e.is_zero() for r in self.entries for e in r)

    def coefficient_array(self) -> np.ndarray:
        """Array g[i, j, d] = coefficient of z^d in entry (i, j)."""
        depth = max(self.row_degrees, default=0) + 1
        g = np.zeros((self.rows, self.cols, depth), dtype=np.int64)
        for i, r in enumerate(self.entries):
            for j, e in enumerate(r):
                g[i, j, : len(e.coeffs)] = e.coeffs
        return g

    def __matmul__(self, other: ScalarMatrix) -> "PolyMatrix":
        return polymat_times_scalar(self, other)

    def __eq__(self, other):
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        return self.field == other.field and self.entries == other.entries

    def __hash__(self):
        return hash((self.field, self.entries))

    def __str__(self):
        return format_polymatrix(self)

    def __repr__(self):
        return f"PolyMatrix({format_polymatrix(self)!r}, {self.field})"


def format_polymatrix(g: PolyMatrix) -> str:
    return "[" + "; ".join(", ".join(format_poly(e) for e in r) for r in g.entries) + "]"


def polymat_times_scalar(g: PolyMatrix, m: ScalarMatrix) -> PolyMatrix:
    """G(z) M with M's entries lifted to constant polynomials."""
    _same_field(g.field, m.field)
    if g.cols != m.rows:
        raise DimensionMismatch(f"cannot multiply {g.shape} polynomial matrix by {m.shape}")
    f = g.field
    coeffs = g.coefficient_array()  # (b, c, D)
    # out[i, j, d] = sum_k coeffs[i, k, d] * m[k, j]
    prod = f.mul(coeffs[:, :, None, :], m.entries[None, :, :, None])
    out = f.sum(prod, axis=1)
    return PolyMatrix.from_coeffs(f, out.tolist())
