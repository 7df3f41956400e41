import json

import pytest
from click.testing import CliRunner

from rudinshapiro.cli import main
from rudinshapiro.correlation import CSV_COLUMNS
from rudinshapiro.diffmat import construct, dumps_matrix, read_matrix
from rudinshapiro.fixtures import fixture, fixture_path
from rudinshapiro.selftest import MATRIX1_PREFIX


@pytest.fixture
def run():
    runner = CliRunner()

    def invoke(*args):
        return runner.invoke(main, [str(a) for a in args], catch_exceptions=False)

    return invoke


def error_line(res):
    lines = res.stderr.strip().splitlines()
    assert len(lines) == 1
    return lines[0]


@pytest.mark.parametrize("name", ["matrix1", "d8", "d9", "d9_left", "d9_right", "example1"])
def test_verify_bundled_fixtures(run, name):
    res = run("verify-matrix", "--file", fixture_path(name))
    assert res.exit_code == 0
    assert res.stdout.startswith("ok:")


def test_verify_ij_mod4_reports_pair(run):
    res = run("verify-matrix", "--file", fixture_path("ij_mod4"))
    assert res.exit_code == 1
    line = error_line(res)
    assert line.startswith("error: verify:")
    assert "0" in line and "2" in line


def test_truncated_file_is_parse_error(run, tmp_path):
    path = tmp_path / "t.json"
    path.write_text(fixture_path("matrix1").read_text()[:30])
    for cmd in ("verify-matrix", "normalize"):
        res = run(cmd, "--file", path)
        assert res.exit_code == 1
        assert error_line(res).startswith("error: parse:")


def test_missing_file_is_io_error(run, tmp_path):
    res = run("verify-matrix", "--file", tmp_path / "nope.json")
    assert res.exit_code == 1
    assert error_line(res).startswith("error: io:")


def test_usage_errors_exit_2(run):
    assert run("verify-matrix").exit_code == 2
    assert run("build-matrix", "--p", "x", "--k", "1").exit_code == 2
    assert run("gen-sequence", "--count", "3").exit_code == 2
    assert run("no-such-command").exit_code == 2


def test_build_matrix_stdout_and_file(run, tmp_path):
    res = run("build-matrix", "--p", 3, "--k", 2, "--n", 1, "--modulus", "1,0,1")
    assert res.exit_code == 0
    assert res.stdout == dumps_matrix(fixture("d9"))
    out = tmp_path / "m.json"
    assert run("build-matrix", "--p", 2, "--k", 2, "--out", out).exit_code == 0
    assert read_matrix(out) == construct(2, 2)
    assert run("verify-matrix", "--file", out).exit_code == 0


def test_build_matrix_preconditions(run):
    res = run("build-matrix", "--p", 4, "--k", 1)
    assert res.exit_code == 1 and error_line(res).startswith("error: precondition:")
    res = run("build-matrix", "--p", 2, "--k", 2, "--modulus", "1,0,1")
    assert res.exit_code == 1 and error_line(res).startswith("error: precondition:")


def test_normalize_gf9(run, tmp_path):
    out = tmp_path / "n.json"
    assert run("normalize", "--file", fixture_path("d9"), "--out", out).exit_code == 0
    assert read_matrix(out) == fixture("d9_left")
    res = run("normalize", "--file", fixture_path("matrix1"))
    assert res.stdout == fixture_path("matrix1").read_text()
    res = run("normalize", "--file", fixture_path("ij_mod4"))
    assert res.exit_code == 1 and error_line(res).startswith("error: verify:")


def test_mul_table(run):
    res = run("mul-table", "--p", 2, "--k", 2)
    assert res.exit_code == 0
    lines = res.stdout.splitlines()
    assert lines[0] == "# GF(2^2) modulus coefficients [1, 1, 1]"
    assert lines[3] == "(0,0) (0,1) (1,1) (1,0)"


def test_gen_sequence_matrix1_prefix(run):
    res = run("gen-sequence", "--matrix", fixture_path("matrix1"), "--count", 28)
    assert res.exit_code == 0
    assert res.stdout.strip() == ",".join(map(str, MATRIX1_PREFIX))
    res = run("gen-sequence", "--build", "2,2", "--start", 3, "--count", 2, "--format", "csv")
    assert res.stdout.splitlines()[0] == "n,symbol"
    assert [l.split(",")[0] for l in res.stdout.splitlines()[1:]] == ["3", "4"]


def test_gen_sequence_composite_and_a0(run):
    res = run("gen-sequence", "--factor", fixture_path("matrix1"), "--factor", "3,1",
              "--a0", "0,0", "--a0", "1", "--count", 4)
    assert res.exit_code == 0
    assert len(res.stdout.strip().split(",")) == 4
    res = run("gen-sequence", "--build", "2,2", "--a0", "1", "--a0", "1", "--count", 4)
    assert res.exit_code == 2


def test_gen_sequence_overflow(run):
    res = run("gen-sequence", "--build", "2,1", "--start", 2 ** 63 - 1, "--count", 2)
    assert res.exit_code == 1
    assert error_line(res).startswith("error: overflow:")


def test_gen_sequence_needs_a_generator(run):
    assert run("gen-sequence", "--count", 3).exit_code == 2


def test_correlate_csv(run):
    res = run("correlate", "--matrix", fixture_path("matrix1"), "--N", 27, "--threads", 2)
    assert res.exit_code == 0
    head, row = res.stdout.splitlines()
    assert head == ",".join(CSV_COLUMNS)
    assert row.split(",")[:7] == ["27", "0", "1", "19", "81", "4", "-5/4"]


def test_correlate_thread_count_does_not_change_output(run):
    args = ("correlate", "--build", "2,2", "--N", 200_000, "--r1", 1, "--r2", 4)
    assert run(*args, "--threads", 1).stdout == run(*args, "--threads", 4).stdout


def test_correlate_bad_shift_is_precondition(run):
    res = run("correlate", "--build", "2,2", "--N", 10, "--r1", 3, "--r2", 3)
    assert res.exit_code == 1 and error_line(res).startswith("error: precondition:")


def test_sweep_end_to_end(run, tmp_path):
    for name in ("matrix1", "d8", "d9"):
        (tmp_path / f"{name}.json").write_text(fixture_path(name).read_text())
    spec = {"factors": [{"matrix": "matrix1.json"}], "N": [100, 1000], "shifts": [[0, 1], [2, 7]],
            "out": "out.csv"}
    specfile = tmp_path / "sweep.json"
    specfile.write_text(json.dumps(spec))
    res = run("sweep", "--spec", specfile)
    assert res.exit_code == 0 and res.stdout == ""
    first = (tmp_path / "out.csv").read_bytes()
    assert len(first.decode().splitlines()) == 5
    assert run("sweep", "--spec", specfile, "--threads", 3).exit_code == 0
    assert (tmp_path / "out.csv").read_bytes() == first
    spec = {"factors": [{"matrix": "d8.json"}], "N": [500], "shifts": [[0, 1]]}
    specfile.write_text(json.dumps(spec))
    res = run("sweep", "--spec", specfile)
    assert res.exit_code == 0
    assert res.stdout.splitlines()[0] == ",".join(CSV_COLUMNS)
    # a D(9,9,Z_3) is a valid difference matrix but has too few symbols to drive a sequence
    spec["factors"] = [{"matrix": "d9.json"}]
    specfile.write_text(json.dumps(spec))
    res = run("sweep", "--spec", specfile)
    assert res.exit_code == 1 and error_line(res).startswith("error: precondition:")


def test_sweep_bad_spec(run, tmp_path):
    specfile = tmp_path / "s.json"
    specfile.write_text('{"factors": [], "N": [1], "shifts": []}')
    res = run("sweep", "--spec", specfile)
    assert res.exit_code == 1 and error_line(res).startswith("error: precondition:")
    specfile.write_text('{"factors": [')
    res = run("sweep", "--spec", specfile)
    assert res.exit_code == 1 and error_line(res).startswith("error: parse:")


def test_selftest(run):
    res = run("selftest")
    assert res.exit_code == 0
    lines = res.stdout.splitlines()
    assert len(lines) == 8 and all(l.startswith("PASS ") for l in lines)
