import cmath
import json
import math
from fractions import Fraction

import numpy as np
import pytest

from rudinshapiro import correlation as corr
from rudinshapiro.diffmat import all_nonzero_h, construct, save_matrix
from rudinshapiro.fixtures import fixture_path
from rudinshapiro.selftest import MATRIX1_PREFIX
from rudinshapiro.sequence import (
    ArraySequence,
    CompositeGenerator,
    FactorGenerator,
    PeriodicSequence,
    value_digits,
)


def test_delta():
    assert corr.delta(3, 3) == 0
    assert corr.delta((0, 1), (1, 0)) == 1


def test_count_from_reference_prefix(m1gen):
    want = sum(a != b for a, b in zip(MATRIX1_PREFIX, MATRIX1_PREFIX[1:]))
    assert want == 19
    rep = corr.correlation_sum(m1gen, 27, (0, 1))
    assert rep.sum == 19
    assert rep.main == Fraction(81, 4)
    assert rep.deviation == Fraction(-5, 4)


def test_theorem_bound_examples():
    assert corr.theorem_bound(2, 1, 1, 16) == pytest.approx(20.0)
    assert round(corr.theorem_bound(2, 2, 1, 4096)) == 222
    with pytest.raises(ValueError):
        corr.theorem_bound(2, 2, 1, 4)
    with pytest.raises(ValueError):
        corr.theorem_bound(2, 2, 0, 100)


def test_shift_pair_validation():
    assert corr.ShiftPair(1, 4).r == 3
    for bad in [(1, 1), (2, 1), (-1, 3)]:
        with pytest.raises(ValueError):
            corr.ShiftPair(*bad)


def brute_expsum(f, h, shift, N):
    r1, r2 = shift
    total = 0j
    for n in range(N):
        a, b = value_digits(f, n + r1), value_digits(f, n + r2)
        total += cmath.exp(2j * math.pi * sum(x * (y - z) for x, y, z in zip(h, b, a)) / f.p)
    return total


@pytest.mark.parametrize("q", [2, 3, 4, 9])
def test_exponential_sum_matches_brute_oracle(gen_by_q, q):
    f = gen_by_q[q]
    for shift in [(0, 1), (2, 5)]:
        for h in all_nonzero_h(f.p, f.k):
            got = corr.exponential_sum(f, h, shift, 700).value
            assert abs(got - brute_expsum(f, h, shift, 700)) < 1e-8


def test_exponential_sum_rejects_zero_h(m1gen):
    with pytest.raises(ValueError):
        corr.exponential_sum(m1gen, (0, 0), (0, 1), 10)
    assert corr.exponential_sum(m1gen, (1, 0), (0, 1), 0).value == 0


def test_unit_root_exact_quarters():
    assert corr.unit_root(1, 2) == -1
    assert corr.unit_root(1, 4) == 1j
    assert corr.unit_root(5, 2) == -1
    assert abs(corr.unit_root(1, 3) - cmath.exp(2j * math.pi / 3)) < 1e-15


@pytest.mark.parametrize("q", [2, 3, 4, 8, 9])
def test_identity_residual_small(gen_by_q, q):
    for shift in [(0, 1), (1, 4), (3, 11)]:
        assert corr.identity_residual(gen_by_q[q], shift, 5000) < 1e-6 * 5000


@pytest.mark.parametrize("q", [2, 3, 4, 8, 9])
def test_bound_holds_for_moderate_parameters(gen_by_q, q):
    f = gen_by_q[q]
    for r in (1, 3):
        N = 1 << 14
        for h, s in corr.all_exponential_sums(f, (0, r), N).items():
            assert abs(s) <= corr.theorem_bound(f.p, f.k, r, N)


def test_partition_invariance(m1gen):
    N, shift = 300_001, (2, 9)
    ref = corr.correlation_count(m1gen, N, shift, workers=1, chunk=N)
    for workers, chunk in [(1, 1000), (3, 7777), (4, 1 << 16), (8, 99_999)]:
        assert corr.correlation_count(m1gen, N, shift, workers, chunk) == ref
    assert corr.correlation_sum_ring(m1gen, N, shift) == ref


def test_ring_matches_chunked_on_composite(m1gen):
    c = CompositeGenerator((m1gen, FactorGenerator(construct(3, 1))))
    for shift in [(0, 1), (5, 6), (0, 13)]:
        assert corr.correlation_sum_ring(c, 20_000, shift) == \
            corr.correlation_count(c, 20_000, shift, chunk=3001)


def test_recode_invariance_against_tuple_oracle(m1gen):
    c = CompositeGenerator((m1gen, FactorGenerator(construct(3, 1))))
    N = 5000
    tuples = [tuple(value_digits(f, n) for f in c.factors) for n in range(N + 1)]
    tuple_sum = sum(corr.delta(a, b) for a, b in zip(tuples, tuples[1:]))
    assert corr.correlation_count(c, N, (0, 1)) == tuple_sum


def test_c_r_estimate_controls():
    const = PeriodicSequence((0,), 5)
    assert corr.c_r_estimate(const, (0, 1), 1000) == 0
    cyc = PeriodicSequence((0, 1, 2), 3)
    assert corr.c_r_estimate(cyc, (0, 1), 999) == 1
    assert corr.c_r_estimate(cyc, (0, 3), 999) == 0


def test_random_control_is_near_main_term():
    rng = np.random.default_rng(1234)
    x = ArraySequence(rng.integers(0, 4, size=200_001), 4)
    rep = corr.correlation_sum(x, 200_000, (0, 1))
    assert abs(rep.normalized - 0.75) < 0.01


def test_extent_errors(m1gen):
    with pytest.raises(OverflowError):
        corr.correlation_count(m1gen, 2 ** 63, (0, 1))
    with pytest.raises(ValueError):
        corr.correlation_sum(m1gen, 0, (0, 1))


def test_report_row_and_csv(m1gen):
    rep = corr.correlation_sum(m1gen, 27, (0, 1))
    row = corr.report_row(m1gen, rep)
    assert row["sum"] == 19 and row["deviation"] == "-5/4"
    assert (row["main_num"], row["main_den"]) == (81, 4)
    assert float(row["bound"]) == pytest.approx(0.75 * corr.theorem_bound(2, 2, 1, 27), abs=1e-6)
    assert abs(rep.deviation) <= float(row["bound"])
    small = corr.report_row(m1gen, corr.correlation_sum(m1gen, 4, (0, 1)))
    assert small["bound"] == ""
    text = corr.format_csv([row])
    assert text.splitlines()[0] == ",".join(corr.CSV_COLUMNS)
    assert "\r" not in text


def _spec(tmp_path, **kw):
    doc = {"factors": [{"matrix": str(fixture_path("matrix1"))}], "N": [1000, 27],
           "shifts": [[0, 1], [1, 4]]}
    doc.update(kw)
    return corr.SweepSpec.from_dict(doc, base_dir=tmp_path)


def test_sweep_row_order_and_determinism(tmp_path):
    spec = _spec(tmp_path)
    out = tmp_path / "a.csv"
    text = corr.sweep(spec, out)
    lines = text.splitlines()
    assert [tuple(l.split(",")[:3]) for l in lines[1:]] == [
        ("1000", "0", "1"), ("1000", "1", "4"), ("27", "0", "1"), ("27", "1", "4")]
    assert lines[3].split(",")[3] == "19"
    corr.sweep(spec, tmp_path / "b.csv", workers=4)
    assert out.read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_sweep_header_only(tmp_path):
    text = corr.sweep(_spec(tmp_path, shifts=[]))
    assert text == ",".join(corr.CSV_COLUMNS) + "\n"


def test_sweep_relative_matrix_path_and_composite(tmp_path):
    save_matrix(construct(3, 1), tmp_path / "z3.json")
    path = tmp_path / "spec.json"
    spec = corr.SweepSpec.from_dict({
        "factors": [{"build": [2, 2], "a0": [1, 1]}, {"matrix": "z3.json"}],
        "N": [500], "shifts": [[0, 1]]})
    path.write_text(spec.dumps())
    loaded = corr.SweepSpec.load(path)
    gen = loaded.generator()
    assert gen.alphabet_size == 12
    assert loaded == spec


def test_sweep_spec_round_trip(tmp_path):
    spec = _spec(tmp_path, out="x.csv")
    again = corr.SweepSpec.from_dict(spec.to_dict())
    assert again == spec
    assert again.dumps() == spec.dumps()
    assert corr.SweepSpec.from_dict(json.loads(spec.dumps())) == spec


@pytest.mark.parametrize("doc", [
    {"factors": [], "N": [10], "shifts": [[0, 1]]},
    {"factors": [{"build": [2, 2], "matrix": "m.json"}], "N": [10], "shifts": [[0, 1]]},
    {"factors": [{"build": [2, 2]}], "N": [0], "shifts": [[0, 1]]},
    {"factors": [{"build": [2, 2]}], "N": [10], "shifts": [[1, 0]]},
    {"factors": [{"build": [2, 2]}], "N": [10]},
    {"factors": [{"build": [2, 2], "colour": 1}], "N": [10], "shifts": [[0, 1]]},
])
def test_malformed_sweep_specs(doc):
    with pytest.raises(ValueError):
        corr.SweepSpec.from_dict(doc)
