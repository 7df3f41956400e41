"""Exact arithmetic in Z_p, Z_p[x] and GF(p^k).

Polynomials over Z_p are tuples of integers in ``[0, p)``, little-endian in
the exponent: ``(b0, b1, ..., bd)`` is ``b0 + b1 x + ... + bd x^d``.  They are
kept normalized (no trailing zero coefficient; the zero polynomial is ``()``).

Field elements of GF(p^k) carry a fixed-length-k coefficient vector.  The
canonical enumeration of a field sorts elements by ``sum(b_i * p**i)``, so
``alpha_0 = 0`` and ``alpha_1 = 1``.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field

Poly = tuple[int, ...]


class FieldError(ValueError):
    """Invalid field parameters or mixed-context arithmetic."""


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


# -- polynomials over Z_p ---------------------------------------------------

def poly_normalize(coeffs, p: int) -> Poly:
    c = [int(x) % p for x in coeffs]
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def poly_degree(a: Poly) -> int:
    """Degree of a normalized polynomial; -1 for the zero polynomial."""
    return len(a) - 1


def poly_add(a: Poly, b: Poly, p: int) -> Poly:
    n = max(len(a), len(b))
    return poly_normalize(
        [(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)], p)


def poly_mul(a: Poly, b: Poly, p: int) -> Poly:
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return poly_normalize(out, p)


def poly_divmod(a: Poly, b: Poly, p: int) -> tuple[Poly, Poly]:
    """Long division of ``a`` by nonzero ``b`` over Z_p."""
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    inv_lead = pow(b[-1], -1, p)
    rem = list(a)
    db = len(b) - 1
    quot = [0] * max(len(a) - db, 0)
    for shift in range(len(a) - 1 - db, -1, -1):
        c = rem[shift + db] * inv_lead % p
        if c:
            quot[shift] = c
            for i, y in enumerate(b):
                rem[shift + i] = (rem[shift + i] - c * y) % p
    return poly_normalize(quot, p), poly_normalize(rem[:db] if db else [], p)


def _monic_polys(p: int, degree: int):
    """Monic polynomials of the given degree, in base-p order of (b0..b_{d-1})."""
    for low in itertools.product(range(p), repeat=degree):
        yield tuple(reversed(low)) + (1,)


def is_irreducible(f: Poly, p: int) -> bool:
    """Exhaustive trial division by every monic polynomial of degree 1..deg(f)//2."""
    d = poly_degree(f)
    if d < 1:
        return False
    for e in range(1, d // 2 + 1):
        for g in _monic_polys(p, e):
            if not poly_divmod(f, g, p)[1]:
                return False
    return True


def find_irreducible(p: int, k: int) -> Poly:
    """Smallest monic irreducible polynomial of degree ``k`` over Z_p.

    Candidates are ordered by the base-p integer ``sum(b_i * p**i)`` of their
    non-leading coefficients, so for ``(2, 3)`` the result is ``x^3 + x + 1``.
    """
    if not is_prime(p):
        raise FieldError(f"p={p} is not prime")
    if k < 1:
        raise FieldError(f"degree k={k} must be >= 1")
    for f in _monic_polys(p, k):
        if is_irreducible(f, p):
            return f
    raise AssertionError("unreachable: an irreducible polynomial of every degree exists")


def format_poly(f: Poly) -> str:
    if not f:
        return "0"
    terms = []
    for i in range(len(f) - 1, -1, -1):
        c = f[i]
        if not c:
            continue
        mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
        if not mono:
            terms.append(str(c))
        else:
            terms.append(mono if c == 1 else f"{c}{mono}")
    return " + ".join(terms)


# -- GF(p^k) ----------------------------------------------------------------

@dataclass(frozen=True)
class FieldContext:
    """GF(p^k) realized as Z_p[x] / (modulus)."""

    p: int
    k: int
    modulus: Poly

    def __post_init__(self):
        if not is_prime(self.p):
            raise FieldError(f"p={self.p} is not prime")
        if self.k < 1:
            raise FieldError(f"degree k={self.k} must be >= 1")
        mod = poly_normalize(self.modulus, self.p)
        if poly_degree(mod) != self.k or mod[-1] != 1:
            raise FieldError(f"modulus {format_poly(mod)} is not monic of degree {self.k}")
        if not is_irreducible(mod, self.p):
            raise FieldError(f"modulus {format_poly(mod)} is reducible over Z_{self.p}")
        object.__setattr__(self, "modulus", mod)

    @classmethod
    def create(cls, p: int, k: int, modulus=None) -> "FieldContext":
        if modulus is None:
            modulus = find_irreducible(p, k)
        return cls(p, k, tuple(modulus))

    @property
    def order(self) -> int:
        return self.p ** self.k

    def encode(self, coeffs) -> int:
        return sum(c * self.p ** i for i, c in enumerate(coeffs))

    def decode(self, index: int) -> tuple[int, ...]:
        if not 0 <= index < self.order:
            raise FieldError(f"element index {index} out of range for GF({self.order})")
        out = []
        for _ in range(self.k):
            index, r = divmod(index, self.p)
            out.append(r)
        return tuple(out)

    def element(self, coeffs) -> "FieldElement":
        c = tuple(int(x) % self.p for x in coeffs)
        if len(c) > self.k:
            c = poly_divmod(poly_normalize(c, self.p), self.modulus, self.p)[1]
        c = tuple(c) + (0,) * (self.k - len(c))
        return FieldElement(c, self)

    @property
    def element_order(self) -> list["FieldElement"]:
        return [FieldElement(self.decode(i), self) for i in range(self.order)]

    def zero(self) -> "FieldElement":
        return FieldElement((0,) * self.k, self)

    def one(self) -> "FieldElement":
        return FieldElement((1,) + (0,) * (self.k - 1), self)


@dataclass(frozen=True)
class FieldElement:
    coeffs: tuple[int, ...]
    context: FieldContext = field(repr=False)

    def __post_init__(self):
        if len(self.coeffs) != self.context.k:
            raise FieldError(f"expected {self.context.k} coefficients, got {len(self.coeffs)}")

    def _check(self, other: "FieldElement"):
        if self.context != other.context:
            raise FieldError("elements belong to different fields")

    def __add__(self, other):
        self._check(other)
        p = self.context.p
        return FieldElement(tuple((a + b) % p for a, b in zip(self.coeffs, other.coeffs)), self.context)

    def __sub__(self, other):
        self._check(other)
        p = self.context.p
        return FieldElement(tuple((a - b) % p for a, b in zip(self.coeffs, other.coeffs)), self.context)

    def __neg__(self):
        p = self.context.p
        return FieldElement(tuple(-a % p for a in self.coeffs), self.context)

    def __mul__(self, other):
        return ff_mul(self, other, self.context)

    @property
    def index(self) -> int:
        """Position in the canonical enumeration."""
        return self.context.encode(self.coeffs)

    def __str__(self):
        return format_poly(poly_normalize(self.coeffs, self.context.p))


def ff_mul(a: FieldElement, b: FieldElement, ctx: FieldContext) -> FieldElement:
    if a.context != ctx or b.context != ctx:
        raise FieldError("elements belong to a different field context")
    prod = poly_mul(poly_normalize(a.coeffs, ctx.p), poly_normalize(b.coeffs, ctx.p), ctx.p)
    rem = poly_divmod(prod, ctx.modulus, ctx.p)[1]
    return FieldElement(tuple(rem) + (0,) * (ctx.k - len(rem)), ctx)


@functools.lru_cache(maxsize=64)
def _table_indices(ctx: FieldContext) -> tuple[tuple[int, ...], ...]:
    elems = ctx.element_order
    return tuple(tuple(ff_mul(a, b, ctx).index for b in elems) for a in elems)


def multiplication_table(ctx: FieldContext) -> list[list[FieldElement]]:
    """``table[i][j] = alpha_i * alpha_j`` in the canonical enumeration."""
    return [[FieldElement(ctx.decode(v), ctx) for v in row] for row in _table_indices(ctx)]


def project_phi(e: FieldElement, n: int) -> tuple[int, ...]:
    """Truncate ``b0 + ... + b_{k-1} x^{k-1}`` to its first ``n`` coefficients."""
    if not 1 <= n <= e.context.k:
        raise FieldError(f"truncation length n={n} outside 1..{e.context.k}")
    return e.coeffs[:n]
