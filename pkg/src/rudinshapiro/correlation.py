"""Order-2 correlation sums, character sums and the explicit error bound.

Every generator here is anything with ``alphabet_size`` and
``symbols(start, count) -> ndarray`` (see :mod:`rudinshapiro.sequence`).
Correlation sums are exact integers; the index range is split into
contiguous chunks that may be evaluated on several worker threads and are
reduced by integer addition, so the result does not depend on the split.

Character sums ``S_N(h)`` are built from an exact histogram of the group
differences ``a(n + r2) - a(n + r1)``: for each ``h`` the terms are grouped by
phase ``h . d mod p`` and only the final ``p`` integer counts are combined in
floating point.
"""

from __future__ import annotations

import cmath
import csv
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .diffmat import all_nonzero_h, construct, decode_element, load_matrix
from .field import is_prime
from .sequence import MAX_INDEX, CompositeGenerator, FactorGenerator, stream

DEFAULT_CHUNK = 1 << 22


@dataclass(frozen=True)
class ShiftPair:
    r1: int
    r2: int

    def __post_init__(self):
        if not 0 <= self.r1 < self.r2:
            raise ValueError(f"shift needs 0 <= r1 < r2, got ({self.r1}, {self.r2})")

    @property
    def r(self) -> int:
        return self.r2 - self.r1


def _shift(shift) -> ShiftPair:
    return shift if isinstance(shift, ShiftPair) else ShiftPair(*shift)


@dataclass(frozen=True)
class CorrelationReport:
    N: int
    shift: ShiftPair
    sum: int
    alphabet_size: int

    @property
    def main(self) -> Fraction:
        return Fraction(self.N * (self.alphabet_size - 1), self.alphabet_size)

    @property
    def deviation(self) -> Fraction:
        return self.sum - self.main

    @property
    def normalized(self) -> float:
        return self.sum / self.N


@dataclass(frozen=True)
class ExpSumResult:
    h: tuple[int, ...]
    value: complex
    modulus_bound: float | None = None


def delta(x, y) -> int:
    return 0 if x == y else 1


# -- chunked evaluation -------------------------------------------------------------

def _chunks(N: int, chunk: int):
    return [(s, min(s + chunk, N)) for s in range(0, N, chunk)]


def _resolve_workers(workers):
    if workers is None:
        return os.cpu_count() or 1
    return max(1, int(workers))


def _map_chunks(fn, N: int, workers, chunk: int):
    parts = _chunks(N, chunk)
    workers = _resolve_workers(workers)
    if workers == 1 or len(parts) == 1:
        return [fn(lo, hi) for lo, hi in parts]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda b: fn(*b), parts))


def _check_extent(N: int, shift: ShiftPair) -> None:
    if N < 0:
        raise ValueError("N must be non-negative")
    if N + shift.r2 > MAX_INDEX:
        raise OverflowError(f"N + r2 = {N + shift.r2} exceeds the 2^63 index range")


def correlation_count(gen, N: int, shift, workers=None, chunk: int = DEFAULT_CHUNK) -> int:
    """``sum_{n<N} delta(x[n + r1], x[n + r2])`` as an exact integer."""
    shift = _shift(shift)
    _check_extent(N, shift)
    r = shift.r

    def part(lo, hi):
        x = gen.symbols(lo + shift.r1, hi - lo + r)
        return int(np.count_nonzero(x[:hi - lo] != x[r:]))

    return sum(_map_chunks(part, N, workers, chunk))


def correlation_sum(gen, N: int, shift, workers=None, chunk: int = DEFAULT_CHUNK) -> CorrelationReport:
    if N < 1:
        raise ValueError("N must be >= 1")
    shift = _shift(shift)
    total = correlation_count(gen, N, shift, workers, chunk)
    return CorrelationReport(N, shift, total, gen.alphabet_size)


def correlation_sum_ring(gen, N: int, shift) -> int:
    """Single pass over ``x[r1 .. r2 + N)`` holding only the last ``r`` symbols."""
    shift = _shift(shift)
    _check_extent(N, shift)
    r = shift.r
    ring = [None] * r
    total = 0
    for i, x in enumerate(stream(gen, shift.r1, N + r)):
        slot = i % r
        if i >= r:
            total += ring[slot] != x
        ring[slot] = x
    return total


def c_r_estimate(gen, shift, N: int) -> Fraction:
    """``(1/N) sum delta``: the finite-N stand-in for the liminf ``C_r``."""
    return Fraction(correlation_sum(gen, N, shift).sum, N)


# -- character sums -----------------------------------------------------------------

def difference_histogram(gen: FactorGenerator, N: int, shift, workers=None,
                         chunk: int = DEFAULT_CHUNK) -> np.ndarray:
    """Counts of each group code ``a(n + r2) - a(n + r1)`` over ``n < N``."""
    shift = _shift(shift)
    _check_extent(N, shift)
    r, q, sub = shift.r, gen.q, gen.sub_table

    def part(lo, hi):
        x = gen.symbols(lo + shift.r1, hi - lo + r)
        return np.bincount(sub[x[r:], x[:hi - lo]], minlength=q)

    hist = np.zeros(q, dtype=np.int64)
    for h in _map_chunks(part, N, workers, chunk):
        hist += h
    return hist


def _character_sum(hist: np.ndarray, h, p: int, k: int) -> complex:
    by_phase = [0] * p
    for code, cnt in enumerate(hist.tolist()):
        if cnt:
            d = decode_element(code, p, k)
            by_phase[sum(a * b for a, b in zip(h, d)) % p] += cnt
    terms = [c * unit_root(t, p) for t, c in enumerate(by_phase)]
    return complex(math.fsum(z.real for z in terms), math.fsum(z.imag for z in terms))


def unit_root(t: int, p: int) -> complex:
    """``e(t/p)``, exact at the quarter turns."""
    t %= p
    if 4 * t % p == 0:
        return (1, 1j, -1, -1j)[4 * t // p]
    return cmath.exp(2j * math.pi * t / p)


def exponential_sum(gen: FactorGenerator, h, shift, N: int, workers=None) -> ExpSumResult:
    """``S_N(h) = sum_{n<N} e((1/p) sum_i h_i (a_i(n + r2) - a_i(n + r1)))``."""
    shift = _shift(shift)
    h = tuple(int(x) for x in h)
    if len(h) != gen.k or any(not 0 <= x < gen.p for x in h) or not any(h):
        raise ValueError(f"h must be a nonzero vector in [0, {gen.p})^{gen.k}, got {list(h)}")
    if N == 0:
        return ExpSumResult(h, 0j)
    hist = difference_histogram(gen, N, shift, workers)
    bound = theorem_bound(gen.p, gen.k, shift.r, N) if N > shift.r * gen.q else None
    return ExpSumResult(h, _character_sum(hist, h, gen.p, gen.k), bound)


def all_exponential_sums(gen: FactorGenerator, shift, N: int, workers=None) -> dict:
    shift = _shift(shift)
    hist = difference_histogram(gen, N, shift, workers) if N else np.zeros(gen.q, dtype=np.int64)
    return {h: _character_sum(hist, h, gen.p, gen.k) for h in all_nonzero_h(gen.p, gen.k)}


def theorem_bound(p: int, k: int, r: int, N: int) -> float:
    """Explicit bound on ``|S_N(h)|`` for shift difference ``r``, valid when ``N > r p^k``.

    ``r * (q (q-1)(q+2) / (2 k log p)) * log(N / r) + r (q + 2)`` with
    ``q = p^k`` and natural logarithms.
    """
    q = p ** k
    if r < 1:
        raise ValueError("shift difference r must be >= 1")
    if N <= r * q:
        raise ValueError(f"bound requires N > r p^k = {r * q}, got N={N}")
    return r * (q * (q - 1) * (q + 2) / (2 * k * math.log(p))) * math.log(N / r) + r * (q + 2)


def identity_residual(gen: FactorGenerator, shift, N: int, workers=None) -> float:
    """Gap between the exact correlation sum and its character-sum expansion."""
    shift = _shift(shift)
    total = correlation_count(gen, N, shift, workers)
    sums = all_exponential_sums(gen, shift, N, workers)
    q = gen.q
    expansion = N * (1 - 1 / q) - math.fsum(s.real for s in sums.values()) / q
    return abs(total - expansion)


# -- sweeps -----------------------------------------------------------------------------

@dataclass
class FactorSpec:
    """One factor of a sweep generator: a built field table or a matrix file."""

    build: tuple[int, int] | None = None
    modulus: tuple[int, ...] | None = None
    matrix: str | None = None
    a0: tuple[int, ...] | None = None

    def __post_init__(self):
        if (self.build is None) == (self.matrix is None):
            raise ValueError("a factor needs exactly one of 'build' or 'matrix'")
        if self.build is not None:
            self.build = tuple(int(x) for x in self.build)
            if len(self.build) != 2:
                raise ValueError("'build' must be [p, k]")
        if self.modulus is not None:
            self.modulus = tuple(int(x) for x in self.modulus)
        if self.a0 is not None:
            self.a0 = tuple(int(x) for x in self.a0)

    def generator(self, base_dir=None) -> FactorGenerator:
        if self.build is not None:
            p, k = self.build
            m = construct(p, k, k, self.modulus)
        else:
            path = Path(self.matrix)
            if base_dir is not None and not path.is_absolute():
                path = Path(base_dir) / path
            m = load_matrix(path)
        return FactorGenerator(m, self.a0)

    def to_dict(self) -> dict:
        out = {}
        if self.build is not None:
            out["build"] = list(self.build)
        if self.modulus is not None:
            out["modulus"] = list(self.modulus)
        if self.matrix is not None:
            out["matrix"] = self.matrix
        if self.a0 is not None:
            out["a0"] = list(self.a0)
        return out

    @classmethod
    def from_dict(cls, doc: dict) -> "FactorSpec":
        unknown = set(doc) - {"build", "modulus", "matrix", "a0"}
        if unknown:
            raise ValueError(f"unknown factor keys: {sorted(unknown)}")
        return cls(doc.get("build"), doc.get("modulus"), doc.get("matrix"), doc.get("a0"))


@dataclass
class SweepSpec:
    factors: list[FactorSpec]
    N: list[int]
    shifts: list[ShiftPair]
    out: str | None = None
    base_dir: str | None = field(default=None, compare=False)

    def __post_init__(self):
        if not self.factors:
            raise ValueError("sweep needs at least one factor")
        self.N = [int(n) for n in self.N]
        if any(n < 1 for n in self.N):
            raise ValueError("every N must be >= 1")
        self.shifts = [_shift(s) for s in self.shifts]

    def generator(self):
        gens = [f.generator(self.base_dir) for f in self.factors]
        return gens[0] if len(gens) == 1 else CompositeGenerator(tuple(gens))

    def to_dict(self) -> dict:
        out = {
            "factors": [f.to_dict() for f in self.factors],
            "N": list(self.N),
            "shifts": [[s.r1, s.r2] for s in self.shifts],
        }
        if self.out is not None:
            out["out"] = self.out
        return out

    @classmethod
    def from_dict(cls, doc: dict, base_dir=None) -> "SweepSpec":
        unknown = set(doc) - {"factors", "N", "shifts", "out"}
        if unknown:
            raise ValueError(f"unknown sweep keys: {sorted(unknown)}")
        try:
            factors = [FactorSpec.from_dict(f) for f in doc["factors"]]
            return cls(factors, doc["N"], [tuple(s) for s in doc["shifts"]], doc.get("out"), base_dir)
        except KeyError as exc:
            raise ValueError(f"sweep spec missing key {exc}") from exc

    @classmethod
    def load(cls, path) -> "SweepSpec":
        path = Path(path)
        return cls.from_dict(json.loads(path.read_text(encoding="utf-8")), base_dir=path.parent)

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


CSV_COLUMNS = ["N", "r1", "r2", "sum", "main_num", "main_den", "deviation", "normalized", "bound"]


def deviation_bound(p: int, k: int, r: int, N: int) -> float:
    """Bound on ``|sum delta - N(1 - 1/p^k)|`` implied by the per-``h`` bound."""
    q = p ** k
    return (q - 1) / q * theorem_bound(p, k, r, N)


def report_row(gen, rep: CorrelationReport) -> dict:
    """One CSV row; ``bound`` caps ``|deviation|`` and is blank where it does not apply."""
    s, N = rep.shift, rep.N
    bound = ""
    if isinstance(gen, FactorGenerator) and is_prime(gen.p) and N > s.r * gen.q:
        bound = f"{deviation_bound(gen.p, gen.k, s.r, N):.6f}"
    return {
        "N": N, "r1": s.r1, "r2": s.r2, "sum": rep.sum,
        "main_num": rep.main.numerator, "main_den": rep.main.denominator,
        "deviation": str(rep.deviation),
        "normalized": f"{rep.normalized:.12f}",
        "bound": bound,
    }


def sweep_rows(spec: SweepSpec, workers=None) -> list[dict]:
    gen = spec.generator()
    return [report_row(gen, correlation_sum(gen, N, s, workers))
            for N in spec.N for s in spec.shifts]


def format_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


def sweep(spec: SweepSpec, out=None, workers=None) -> str:
    """Run every (N, shift) cell, N-major; writes the CSV when a path is given.

    A relative ``out`` in the spec resolves against the spec's directory.
    """
    text = format_csv(sweep_rows(spec, workers))
    target = out
    if target is None and spec.out is not None:
        target = Path(spec.out)
        if spec.base_dir is not None and not target.is_absolute():
            target = Path(spec.base_dir) / target
    if target is not None:
        with open(target, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return text
