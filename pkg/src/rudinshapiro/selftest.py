"""Quick invariant checks bundled with the CLI (``rudinshapiro selftest``)."""

from __future__ import annotations

from .correlation import all_exponential_sums, correlation_count, identity_residual, theorem_bound
from .diffmat import all_nonzero_h, collapse, construct, order_normalize, verify
from .fixtures import fixture
from .sequence import FactorGenerator, classical_rs, recode, stream, value_digits, value_recursive

MATRIX1_PREFIX = [0, 0, 0, 0, 0, 1, 2, 3, 0, 2, 3, 1, 0, 3, 1, 2,
                   0, 0, 0, 0, 1, 0, 3, 2, 2, 0, 1, 3]


def _fixtures():
    good = all(verify(fixture(n)).ok for n in ("matrix1", "d8", "d9", "d9_left", "d9_right", "example1"))
    return good and not verify(fixture("ij_mod4")).ok


def _construction():
    for p, k in [(2, 1), (3, 1), (2, 2), (5, 1), (2, 3), (3, 2)]:
        m = construct(p, k)
        if not verify(m).ok:
            return False
        if p ** k in (4, 8, 9) and not all(verify(collapse(m, h)).ok for h in all_nonzero_h(p, k)):
            return False
    return True


def _matrix1_prefix():
    return list(stream(FactorGenerator(fixture("matrix1")), 0, 28)) == MATRIX1_PREFIX


def _digit_form():
    gens = [FactorGenerator(construct(2, 1)), FactorGenerator(fixture("matrix1")),
            FactorGenerator(construct(3, 2))]
    for f in gens:
        if any(value_recursive(f, n) != value_digits(f, n) for n in range(3000)):
            return False
    f = gens[0]
    return all(recode(value_digits(f, n), 2) == classical_rs(n) for n in range(4096))


def _normalization():
    return order_normalize(construct(3, 2, 1, (1, 0, 1))) == fixture("d9_left")


def _identity():
    f = FactorGenerator(fixture("matrix1"))
    return identity_residual(f, (1, 4), 5000) < 1e-6 * 5000


def _bound():
    f = FactorGenerator(construct(3, 2))
    for r in (1, 2):
        sums = all_exponential_sums(f, (0, r), 1 << 12)
        if max(abs(s) for s in sums.values()) > theorem_bound(3, 2, r, 1 << 12):
            return False
    return True


def _partition():
    f = FactorGenerator(fixture("matrix1"))
    a = correlation_count(f, 200_000, (0, 3), workers=1, chunk=1 << 16)
    b = correlation_count(f, 200_000, (0, 3), workers=4, chunk=12_345)
    return a == b


CHECKS = [
    ("bundled fixtures verify, ij mod 4 fails", _fixtures),
    ("field constructions and collapses verify", _construction),
    ("matrix1 stream matches the reference prefix", _matrix1_prefix),
    ("recursion equals digit form; classical Rudin-Shapiro agrees", _digit_form),
    ("GF(9) table normalizes to the reference class", _normalization),
    ("correlation sum equals its character-sum expansion", _identity),
    ("character sums below the explicit bound", _bound),
    ("correlation sum independent of partitioning", _partition),
]


def run_selftest():
    """Yield ``(name, passed)`` for every bundled check."""
    for name, check in CHECKS:
        try:
            ok = bool(check())
        except Exception:  # noqa: BLE001 - a crash is a failed check
            ok = False
        yield name, ok
