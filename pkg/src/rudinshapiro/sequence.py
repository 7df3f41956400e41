"""Generalized Rudin-Shapiro sequences attached to difference matrices.

A :class:`FactorGenerator` wraps a difference matrix ``M`` over Z_p^k with
``q = p^k`` rows and columns and a starting value ``a(0)``; the sequence obeys
``a(q*n + j) = a(n) + M[n mod q][j]`` for ``(j, n) != (0, 0)``.  Symbols are
the big-endian recoding of ``a(n)`` onto ``{0, ..., q-1}``.

A :class:`CompositeGenerator` runs factors with pairwise distinct primes in
lockstep and combines their symbols in mixed radix, first factor most
significant.

Three evaluation paths are provided and cross-checked by the tests: the
recursion itself (:func:`value_recursive`), the closed digit form
(:func:`value_digits`), and :func:`stream`, an odometer that updates only the
digit positions touched by each carry.  ``symbols(start, count)`` on the
generators is a vectorized block evaluator used for large ranges.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Protocol, Sequence

import numpy as np

from .diffmat import (
    DifferenceMatrix,
    VerificationError,
    add_elements,
    decode_element,
    encode_element,
    verify,
)

MAX_INDEX = 2 ** 63
# low-digit block length targets about this many entries
_BLOCK_TARGET = 1 << 18


class SymbolSource(Protocol):
    alphabet_size: int

    def symbols(self, start: int, count: int) -> np.ndarray: ...


def _check_range(start: int, count: int) -> None:
    if start < 0 or count < 0:
        raise ValueError(f"start={start} and count={count} must be non-negative")
    if start + count > MAX_INDEX:
        raise OverflowError(f"index range end {start + count} exceeds 2^63")


def base_digits(n: int, base: int) -> list[int]:
    """Digits of ``n`` least significant first; ``[]`` for ``n = 0``."""
    out = []
    while n:
        n, d = divmod(n, base)
        out.append(d)
    return out


def recode(g, p: int) -> int:
    """Big-endian mixed radix: ``(0, 1) -> 1``, ``(1, 0) -> 2`` for p = 2."""
    return encode_element(g, p)


def classical_rs(n: int) -> int:
    """Parity of the number of (overlapping) ``11`` blocks in binary ``n``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    return bin(n & (n >> 1)).count("1") & 1


@dataclass(frozen=True, eq=False)
class FactorGenerator:
    matrix: DifferenceMatrix
    a0: tuple[int, ...] | None = None

    def __post_init__(self):
        m = self.matrix
        if m.rows != m.cols or m.rows != m.group_order:
            raise ValueError(
                f"sequence matrix must be {m.group_order}x{m.group_order}, got {m.rows}x{m.cols}")
        report = verify(m)
        if not report.ok:
            raise VerificationError(report)
        a0 = (0,) * m.k if self.a0 is None else tuple(int(c) for c in self.a0)
        if len(a0) != m.k or any(not 0 <= c < m.p for c in a0):
            raise ValueError(f"a0={list(a0)} is not an element of Z_{m.p}^{m.k}")
        object.__setattr__(self, "a0", a0)

    @property
    def p(self) -> int:
        return self.matrix.p

    @property
    def k(self) -> int:
        return self.matrix.k

    @property
    def q(self) -> int:
        return self.matrix.rows

    @property
    def alphabet_size(self) -> int:
        return self.q

    # code-level tables: codes are recode() values of group elements

    @cached_property
    def _g(self) -> list[list[int]]:
        """``_g[n][j]`` is the code of ``g(j, n) = M[n][j]``."""
        return self.matrix.codes().tolist()

    @cached_property
    def _elements(self) -> list[tuple[int, ...]]:
        return [decode_element(v, self.p, self.k) for v in range(self.q)]

    @cached_property
    def add_table(self) -> np.ndarray:
        el, p = self._elements, self.p
        return np.array([[encode_element(add_elements(a, b, p), p) for b in el] for a in el],
                        dtype=np.int64)

    @cached_property
    def sub_table(self) -> np.ndarray:
        """``sub_table[x, y]`` is the code of ``x - y``."""
        el, p = self._elements, self.p
        return np.array([[encode_element(tuple((u - v) % p for u, v in zip(a, b)), p)
                          for b in el] for a in el], dtype=np.int64)

    @cached_property
    def _add(self) -> list[list[int]]:
        return self.add_table.tolist()

    @cached_property
    def _a0_code(self) -> int:
        return encode_element(self.a0, self.p)

    def value_code(self, n: int) -> int:
        """Code of ``a(n)`` via the digit closed form."""
        g, add = self._g, self._add
        digits = base_digits(n, self.q)
        acc = self._a0_code
        for i, d in enumerate(digits):
            nxt = digits[i + 1] if i + 1 < len(digits) else 0
            acc = add[acc][g[nxt][d]]
        return acc

    # vectorized block evaluation

    @cached_property
    def _block_digits(self) -> int:
        length, size = 1, self.q
        while size * self.q <= _BLOCK_TARGET:
            size *= self.q
            length += 1
        return length

    @cached_property
    def _low_tables(self) -> np.ndarray:
        """``T[rho, t]``: contribution of the low digits of ``t`` when the next digit is ``rho``."""
        q, L = self.q, self._block_digits
        t = np.arange(q ** L, dtype=np.int64)
        digits = [(t // q ** i) % q for i in range(L)]
        add, g = self.add_table, self.matrix.codes()
        u = np.zeros(q ** L, dtype=np.int64)
        for i in range(L - 1):
            u = add[u, g[digits[i + 1], digits[i]]]
        return np.stack([add[u, g[rho, digits[L - 1]]] for rho in range(q)])

    @cached_property
    def _block0(self) -> np.ndarray:
        q = self.q
        size = q ** self._block_digits
        out = np.empty(size, dtype=np.int64)
        out[0] = self._a0_code
        add, g = self.add_table, self.matrix.codes()
        lo, hi = 1, q
        while lo < size:
            t = np.arange(lo, min(hi, size), dtype=np.int64)
            parent = t // q
            out[lo:len(t) + lo] = add[out[parent], g[parent % q, t % q]]
            lo, hi = hi, hi * q
        return out

    def _block(self, c: int) -> np.ndarray:
        if c == 0:
            return self._block0
        ac = self.value_code(c)
        return self.add_table[ac][self._low_tables[c % self.q]]

    def symbols(self, start: int, count: int) -> np.ndarray:
        _check_range(start, count)
        size = self.q ** self._block_digits
        out = np.empty(count, dtype=np.int64)
        pos, end = start, start + count
        while pos < end:
            c, lo = divmod(pos, size)
            hi = min(size, end - c * size)
            out[pos - start:pos - start + hi - lo] = self._block(c)[lo:hi]
            pos += hi - lo
        return out


@dataclass(frozen=True, eq=False)
class CompositeGenerator:
    factors: tuple[FactorGenerator, ...]

    def __post_init__(self):
        factors = tuple(self.factors)
        if not factors:
            raise ValueError("a composite generator needs at least one factor")
        primes = [f.p for f in factors]
        if len(set(primes)) != len(primes):
            raise ValueError(f"factor primes must be pairwise distinct, got {primes}")
        object.__setattr__(self, "factors", factors)

    @property
    def alphabet_size(self) -> int:
        out = 1
        for f in self.factors:
            out *= f.q
        return out

    def combine(self, values: Sequence[int]) -> int:
        acc = 0
        for f, v in zip(self.factors, values):
            acc = acc * f.q + v
        return acc

    def symbols(self, start: int, count: int) -> np.ndarray:
        _check_range(start, count)
        acc = np.zeros(count, dtype=np.int64)
        for f in self.factors:
            acc *= f.q
            acc += f.symbols(start, count)
        return acc


@dataclass(frozen=True, eq=False)
class PeriodicSequence:
    """``x_n = pattern[n mod len(pattern)]``; a control sequence for tests."""

    pattern: tuple[int, ...]
    alphabet_size: int

    def symbols(self, start: int, count: int) -> np.ndarray:
        _check_range(start, count)
        pat = np.asarray(self.pattern, dtype=np.int64)
        return pat[(np.arange(start, start + count, dtype=np.int64)) % len(pat)]


@dataclass(frozen=True, eq=False)
class ArraySequence:
    """A finite explicit sequence; reading past its end is an error."""

    values: np.ndarray
    alphabet_size: int

    def symbols(self, start: int, count: int) -> np.ndarray:
        _check_range(start, count)
        if start + count > len(self.values):
            raise IndexError(f"range end {start + count} past sequence length {len(self.values)}")
        return np.asarray(self.values[start:start + count], dtype=np.int64)


# -- pointwise evaluation ---------------------------------------------------------

def g_lookup(f: FactorGenerator, j: int, n: int) -> tuple[int, ...]:
    return f.matrix.entries[n % f.q][j % f.q]


def value_recursive(f: FactorGenerator, n: int) -> tuple[int, ...]:
    if n < 0:
        raise ValueError("n must be non-negative")
    if n == 0:
        return f.a0
    m, j = divmod(n, f.q)
    return add_elements(value_recursive(f, m), g_lookup(f, j, m), f.p)


def value_digits(f: FactorGenerator, n: int) -> tuple[int, ...]:
    """``a(0) + sum_i g(d_i, d_{i+1})`` over the base-q digits of ``n``, top digit paired with 0."""
    if n < 0:
        raise ValueError("n must be non-negative")
    digits = base_digits(n, f.q) + [0]
    acc = f.a0
    for lo, hi in zip(digits, digits[1:]):
        acc = add_elements(acc, g_lookup(f, lo, hi), f.p)
    return acc


def composite_value(c: CompositeGenerator, n: int) -> int:
    return c.combine([recode(value_digits(f, n), f.p) for f in c.factors])


def symbol_at(gen, n: int) -> int:
    if isinstance(gen, FactorGenerator):
        return recode(value_digits(gen, n), gen.p)
    if isinstance(gen, CompositeGenerator):
        return composite_value(gen, n)
    return int(gen.symbols(n, 1)[0])


# -- incremental streaming ------------------------------------------------------------

def _factor_stream(f: FactorGenerator, start: int, count: int) -> Iterator[int]:
    q, g, add = f.q, f._g, f._add
    ident = 0
    a0 = f._a0_code
    digits = base_digits(start, q)
    # suf[i] = sum of g(d_j, d_{j+1}) for j >= i, with suf[len] = identity
    suf = [ident] * (len(digits) + 1)
    for i in range(len(digits) - 1, -1, -1):
        nxt = digits[i + 1] if i + 1 < len(digits) else 0
        suf[i] = add[g[nxt][digits[i]]][suf[i + 1]]
    for step in range(count):
        yield add[a0][suf[0]]
        if step == count - 1:
            return
        i = 0
        while i < len(digits) and digits[i] == q - 1:
            digits[i] = 0
            i += 1
        if i == len(digits):
            digits.append(1)
            suf.append(ident)
        else:
            digits[i] += 1
        top = len(digits)
        for j in range(i, -1, -1):
            nxt = digits[j + 1] if j + 1 < top else 0
            suf[j] = add[g[nxt][digits[j]]][suf[j + 1]]


def stream(gen, start: int, count: int) -> Iterator[int]:
    """Symbols for ``n = start, ..., start + count - 1``."""
    _check_range(start, count)
    if isinstance(gen, FactorGenerator):
        return _factor_stream(gen, start, count)
    if isinstance(gen, CompositeGenerator):
        parts = [_factor_stream(f, start, count) for f in gen.factors]
        return (gen.combine(vals) for vals in zip(*parts))
    return _chunked(gen, start, count)


def _chunked(gen, start: int, count: int, chunk: int = 1 << 16) -> Iterator[int]:
    pos, end = start, start + count
    while pos < end:
        n = min(chunk, end - pos)
        yield from gen.symbols(pos, n).tolist()
        pos += n
