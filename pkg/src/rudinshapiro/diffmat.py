"""Difference matrices over Z_m^k.

Entries are tuples of ``k`` residues.  A matrix is a difference matrix when,
for every ordered pair of distinct columns, the row-wise differences cover the
group uniformly.  Verification accepts any modulus ``m >= 2`` so that
non-examples such as the ``ij mod 4`` grid over Z_4 can be rejected; the
constructive and automorphism code requires a prime.

Group elements are ranked by the big-endian integer
``sum(c[i] * m**(k-1-i))`` (:func:`encode_element`).  The identity encodes to
0, and the same value is the symbol used when a Z_p^k sequence is recoded
onto ``{0, ..., p^k - 1}``.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

import numpy as np

from .field import FieldContext, is_prime, multiplication_table, project_phi

Element = tuple[int, ...]


class MatrixError(ValueError):
    """Malformed matrix, operation or parameters."""


class MatrixFormatError(MatrixError):
    """A matrix document could not be parsed."""


class VerificationError(MatrixError):
    """A matrix failed the difference property where one was required."""

    def __init__(self, report: "DiffCheckReport"):
        super().__init__(report.describe())
        self.report = report


def encode_element(g, p: int) -> int:
    v = 0
    for c in g:
        v = v * p + c
    return v


def decode_element(v: int, p: int, k: int) -> Element:
    out = [0] * k
    for i in range(k - 1, -1, -1):
        v, out[i] = divmod(v, p)
    return tuple(out)


def add_elements(a, b, p: int) -> Element:
    return tuple((x + y) % p for x, y in zip(a, b))


def neg_element(a, p: int) -> Element:
    return tuple(-x % p for x in a)


@dataclass(frozen=True)
class DifferenceMatrix:
    """An ``rows x cols`` grid of Z_p^k elements.

    The difference property is not assumed; call :func:`verify`.
    """

    p: int
    k: int
    entries: tuple[tuple[Element, ...], ...]
    provenance: str = field(default="constructed", compare=False)

    def __post_init__(self):
        if self.p < 2 or self.k < 1:
            raise MatrixError(f"invalid group parameters p={self.p}, k={self.k}")
        entries = tuple(tuple(tuple(int(c) for c in e) for e in row) for row in self.entries)
        if not entries or not entries[0]:
            raise MatrixError("matrix must have at least one row and one column")
        width = len(entries[0])
        for row in entries:
            if len(row) != width:
                raise MatrixError("ragged matrix: rows have different lengths")
            for e in row:
                if len(e) != self.k or any(not 0 <= c < self.p for c in e):
                    raise MatrixError(f"entry {e} is not an element of Z_{self.p}^{self.k}")
        object.__setattr__(self, "entries", entries)

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0])

    @property
    def group_order(self) -> int:
        return self.p ** self.k

    def __getitem__(self, idx) -> Element:
        i, j = idx
        return self.entries[i][j]

    def codes(self) -> np.ndarray:
        """Entries as big-endian integer codes, shape ``(rows, cols)``."""
        return np.array([[encode_element(e, self.p) for e in row] for row in self.entries],
                        dtype=np.int64)

    def replace(self, entries, provenance=None) -> "DifferenceMatrix":
        return DifferenceMatrix(self.p, self.k, entries, provenance or self.provenance)

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "k": self.k,
            "rows": self.rows,
            "cols": self.cols,
            "entries": [[list(e) for e in row] for row in self.entries],
        }

    @classmethod
    def from_dict(cls, doc: dict, provenance: str = "loaded") -> "DifferenceMatrix":
        try:
            p, k = int(doc["p"]), int(doc["k"])
            entries = doc["entries"]
            m = cls(p, k, entries, provenance)
        except MatrixFormatError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise MatrixFormatError(f"malformed matrix document: {exc}") from exc
        if "rows" in doc and int(doc["rows"]) != m.rows:
            raise MatrixFormatError(f"declared rows={doc['rows']} but found {m.rows}")
        if "cols" in doc and int(doc["cols"]) != m.cols:
            raise MatrixFormatError(f"declared cols={doc['cols']} but found {m.cols}")
        return m


# -- serialization ------------------------------------------------------------

def dumps_matrix(m: DifferenceMatrix) -> str:
    rows = ",\n".join(
        "    [" + ", ".join(json.dumps(list(e)) for e in row) + "]" for row in m.entries)
    return (f'{{\n  "p": {m.p},\n  "k": {m.k},\n  "rows": {m.rows},\n  "cols": {m.cols},\n'
            f'  "entries": [\n{rows}\n  ]\n}}\n')


def save_matrix(m: DifferenceMatrix, path) -> None:
    Path(path).write_text(dumps_matrix(m), encoding="utf-8")


def read_matrix(path) -> DifferenceMatrix:
    """Parse a matrix document without checking the difference property."""
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise MatrixFormatError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc
    if not isinstance(doc, dict):
        raise MatrixFormatError(f"{path}: top level must be an object")
    return DifferenceMatrix.from_dict(doc, provenance=f"loaded({path})")


def load_matrix(path) -> DifferenceMatrix:
    """Parse and verify; raises :class:`VerificationError` on failure."""
    m = read_matrix(path)
    report = verify(m)
    if not report.ok:
        raise VerificationError(report)
    return m


# -- construction and verification ---------------------------------------------

def construct(p: int, k: int, n: int | None = None, modulus=None) -> DifferenceMatrix:
    """The ``p^k x p^k`` multiplication table of GF(p^k), truncated to Z_p^n."""
    if n is None:
        n = k
    if not 1 <= n <= k:
        raise MatrixError(f"target exponent n={n} outside 1..{k}")
    ctx = FieldContext.create(p, k, modulus)
    table = multiplication_table(ctx)
    entries = tuple(tuple(project_phi(e, n) for e in row) for row in table)
    return DifferenceMatrix(p, n, entries, f"constructed(p={p}, k={k}, modulus={list(ctx.modulus)})")


@dataclass(frozen=True)
class DiffCheckReport:
    ok: bool
    failing_pair: tuple[int, int, Element, int, int] | None = None
    reason: str | None = None

    def describe(self) -> str:
        if self.ok:
            return "ok"
        if self.failing_pair is None:
            return f"not a difference matrix: {self.reason}"
        i, j, g, seen, want = self.failing_pair
        return (f"not a difference matrix: columns ({i},{j}) difference "
                f"{list(g)} occurs {seen} times, expected {want}")


def verify(m: DifferenceMatrix) -> DiffCheckReport:
    s = m.group_order
    if m.rows % s:
        return DiffCheckReport(False, reason=f"rows={m.rows} not divisible by group order {s}")
    want = m.rows // s
    coords = np.array(m.entries, dtype=np.int64)           # (rows, cols, k)
    weights = m.p ** np.arange(m.k - 1, -1, -1, dtype=np.int64)
    for i in range(m.cols):
        diff = (coords[:, i:i + 1, :] - coords) % m.p       # (rows, cols, k)
        codes = diff @ weights                               # (rows, cols)
        counts = np.zeros((m.cols, s), dtype=np.int64)
        np.add.at(counts, (np.broadcast_to(np.arange(m.cols), codes.shape), codes), 1)
        counts[i] = want                                     # skip the diagonal
        bad = np.argwhere(counts != want)
        if bad.size:
            j, code = (int(x) for x in bad[0])
            return DiffCheckReport(
                False, (i, j, decode_element(code, m.p, m.k), int(counts[j, code]), want))
    return DiffCheckReport(True)


def collapse(m: DifferenceMatrix, h) -> DifferenceMatrix:
    """The Z_p matrix ``h_1 G_1 + ... + h_k G_k`` of coordinate combinations."""
    h = tuple(int(x) % m.p for x in h)
    if len(h) != m.k:
        raise MatrixError(f"h must have {m.k} components, got {len(h)}")
    if not any(h):
        raise MatrixError("h must not be the zero vector")
    if m.rows != m.cols or m.rows != m.group_order:
        raise MatrixError(f"collapse needs a square matrix of size {m.group_order}")
    entries = tuple(
        tuple((sum(a * b for a, b in zip(h, e)) % m.p,) for e in row) for row in m.entries)
    return DifferenceMatrix(m.p, 1, entries, f"collapse(h={list(h)})")


# -- equivalence operations ------------------------------------------------------

@dataclass(frozen=True)
class PermuteRows:
    """New row ``i`` is old row ``perm[i]``."""
    perm: tuple[int, ...]


@dataclass(frozen=True)
class PermuteCols:
    """New column ``j`` is old column ``perm[j]``."""
    perm: tuple[int, ...]


@dataclass(frozen=True)
class AddToRow:
    row: int
    element: Element


@dataclass(frozen=True)
class AddToCol:
    col: int
    element: Element


@dataclass(frozen=True)
class Automorphism:
    """``g -> A g`` for an invertible ``k x k`` matrix ``A`` over Z_p (g as a column)."""
    matrix: tuple[tuple[int, ...], ...]


EquivalenceOp = Union[PermuteRows, PermuteCols, AddToRow, AddToCol, Automorphism]


def _rank_mod_p(a, p: int) -> int:
    rows = [list(r) for r in a]
    rank, ncols = 0, len(rows[0]) if rows else 0
    for c in range(ncols):
        pivot = next((r for r in range(rank, len(rows)) if rows[r][c] % p), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        inv = pow(rows[rank][c], -1, p)
        rows[rank] = [x * inv % p for x in rows[rank]]
        for r in range(len(rows)):
            if r != rank and rows[r][c] % p:
                f = rows[r][c]
                rows[r] = [(x - f * y) % p for x, y in zip(rows[r], rows[rank])]
        rank += 1
    return rank


def _check_perm(perm, n: int, what: str) -> tuple[int, ...]:
    perm = tuple(int(x) for x in perm)
    if sorted(perm) != list(range(n)):
        raise MatrixError(f"{what} permutation {list(perm)} is not a permutation of 0..{n - 1}")
    return perm


def _check_element(g, m: DifferenceMatrix) -> Element:
    g = tuple(int(x) for x in g)
    if len(g) != m.k or any(not 0 <= c < m.p for c in g):
        raise MatrixError(f"{list(g)} is not an element of Z_{m.p}^{m.k}")
    return g


def apply_op(m: DifferenceMatrix, op: EquivalenceOp) -> DifferenceMatrix:
    p, e = m.p, m.entries
    match op:
        case PermuteRows(perm):
            perm = _check_perm(perm, m.rows, "row")
            return m.replace(tuple(e[i] for i in perm))
        case PermuteCols(perm):
            perm = _check_perm(perm, m.cols, "column")
            return m.replace(tuple(tuple(row[j] for j in perm) for row in e))
        case AddToRow(row, g):
            g = _check_element(g, m)
            if not 0 <= row < m.rows:
                raise MatrixError(f"row {row} out of range")
            return m.replace(tuple(
                tuple(add_elements(x, g, p) for x in r) if i == row else r
                for i, r in enumerate(e)))
        case AddToCol(col, g):
            g = _check_element(g, m)
            if not 0 <= col < m.cols:
                raise MatrixError(f"column {col} out of range")
            return m.replace(tuple(
                tuple(add_elements(x, g, p) if j == col else x for j, x in enumerate(r))
                for r in e))
        case Automorphism(a):
            a = tuple(tuple(int(x) % p for x in r) for r in a)
            if len(a) != m.k or any(len(r) != m.k for r in a):
                raise MatrixError(f"automorphism must be a {m.k}x{m.k} matrix")
            if not is_prime(p) or _rank_mod_p(a, p) != m.k:
                raise MatrixError("automorphism matrix is not invertible mod p")

            def act(x):
                return tuple(sum(c * v for c, v in zip(r, x)) % p for r in a)
            return m.replace(tuple(tuple(act(x) for x in r) for r in e))
    raise MatrixError(f"unknown equivalence operation {op!r}")


def apply_ops(m: DifferenceMatrix, ops) -> DifferenceMatrix:
    for op in ops:
        m = apply_op(m, op)
    return m


# -- order normalization -----------------------------------------------------------

def _row_keys(m: DifferenceMatrix):
    return [tuple(encode_element(x, m.p) for x in r) for r in m.entries]


def _col_keys(m: DifferenceMatrix):
    keys = _row_keys(m)
    return [tuple(r[j] for r in keys) for j in range(m.cols)]


def is_order_normalized(m: DifferenceMatrix) -> bool:
    ident = (0,) * m.k
    if any(x != ident for x in m.entries[0]):
        return False
    if any(r[0] != ident for r in m.entries):
        return False
    rows, cols = _row_keys(m), _col_keys(m)
    return all(a <= b for a, b in zip(rows, rows[1:])) and all(a <= b for a, b in zip(cols, cols[1:]))


def normalization_ops(m: DifferenceMatrix, max_passes: int = 1000) -> list[EquivalenceOp]:
    """Operations 1-4 taking ``m`` to an order-normalized matrix.

    Column translations clear the first row, row translations clear the first
    column, then rows and columns are stable-sorted alternately until a full
    pass leaves the matrix unchanged.
    """
    ops: list[EquivalenceOp] = []
    cur = m
    for j, g in enumerate(m.entries[0]):
        if any(g):
            op = AddToCol(j, neg_element(g, m.p))
            ops.append(op)
            cur = apply_op(cur, op)
    for i, r in enumerate(cur.entries):
        if any(r[0]):
            op = AddToRow(i, neg_element(r[0], m.p))
            ops.append(op)
            cur = apply_op(cur, op)
    for _ in range(max_passes):
        changed = False
        keys = _row_keys(cur)
        perm = tuple(sorted(range(cur.rows), key=keys.__getitem__))
        if perm != tuple(range(cur.rows)):
            op = PermuteRows(perm)
            ops.append(op)
            cur = apply_op(cur, op)
            changed = True
        keys = _col_keys(cur)
        perm = tuple(sorted(range(cur.cols), key=keys.__getitem__))
        if perm != tuple(range(cur.cols)):
            op = PermuteCols(perm)
            ops.append(op)
            cur = apply_op(cur, op)
            changed = True
        if not changed:
            return ops
    raise RuntimeError(f"row/column sorting did not settle within {max_passes} passes")


def order_normalize(m: DifferenceMatrix) -> DifferenceMatrix:
    return apply_ops(m, normalization_ops(m))


def all_nonzero_h(p: int, k: int):
    for h in itertools.product(range(p), repeat=k):
        if any(h):
            yield h
