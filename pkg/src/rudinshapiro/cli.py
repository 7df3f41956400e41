"""Command-line front end.

Exit status is 0 on success, 1 on a domain failure (verification, parse or
precondition errors), 2 on usage errors.  Domain failures print a single
``error: <code>: <message>`` line on stderr.
"""

from __future__ import annotations

import functools
import json
import re
import sys
from pathlib import Path

import click

from . import correlation as corr
from .diffmat import (
    MatrixError,
    MatrixFormatError,
    VerificationError,
    construct,
    dumps_matrix,
    load_matrix,
    order_normalize,
    read_matrix,
    verify,
)
from .field import FieldContext, FieldError, multiplication_table
from .selftest import run_selftest
from .sequence import CompositeGenerator, FactorGenerator, stream


def _fail(code: str, message: str):
    click.echo(f"error: {code}: {message}", err=True)
    sys.exit(1)


def domain_errors(fn):
    """Translate library exceptions into the one-line error protocol."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except BrokenPipeError:
            sys.exit(0)
        except MatrixFormatError as exc:
            _fail("parse", str(exc))
        except VerificationError as exc:
            _fail("verify", str(exc))
        except json.JSONDecodeError as exc:
            _fail("parse", f"invalid JSON: {exc.msg} at line {exc.lineno}")
        except OverflowError as exc:
            _fail("overflow", str(exc))
        except OSError as exc:
            _fail("io", f"{exc.filename or ''}: {exc.strerror or exc}".strip(": "))
        except (MatrixError, FieldError, ValueError) as exc:
            _fail("precondition", str(exc))
    return wrapper


def _int_list(text: str | None, what: str):
    if text is None:
        return None
    try:
        return tuple(int(x) for x in text.split(",") if x.strip() != "")
    except ValueError:
        raise click.BadParameter(f"{what} must be comma-separated integers, got {text!r}")


_BUILD = re.compile(r"^\s*(\d+)\s*,\s*(\d+)\s*$")


def _factor(spec: str, a0) -> FactorGenerator:
    m = _BUILD.match(spec)
    if m:
        p, k = int(m.group(1)), int(m.group(2))
        return FactorGenerator(construct(p, k, k), a0)
    return FactorGenerator(load_matrix(spec), a0)


def _generator(matrix, build, factors, a0s):
    specs = list(factors)
    if matrix:
        specs.insert(0, matrix)
    if build:
        specs.insert(0, build)
    if not specs:
        raise click.UsageError("give --matrix FILE, --build P,K or one or more --factor")
    if len(a0s) > len(specs):
        raise click.UsageError(f"{len(a0s)} --a0 values for {len(specs)} factor(s)")
    a0s = [_int_list(a, "--a0") for a in a0s] + [None] * (len(specs) - len(a0s))
    gens = [_factor(s, a) for s, a in zip(specs, a0s)]
    return gens[0] if len(gens) == 1 else CompositeGenerator(tuple(gens))


def generator_options(fn):
    fn = click.option("--a0", "a0s", multiple=True,
                      help="Initial value a(0) as comma-separated coordinates; one per factor.")(fn)
    fn = click.option("--factor", "factors", multiple=True,
                      help="Factor as 'P,K' (field construction) or a matrix file; repeatable, "
                           "first factor most significant.")(fn)
    fn = click.option("--build", help="Construct the GF(P^K) matrix, given as 'P,K'.")(fn)
    fn = click.option("--matrix", type=click.Path(dir_okay=False),
                      help="Matrix document to use.")(fn)
    return fn


def _write(text: str, out):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        click.echo(text, nl=False)


@click.group()
@click.version_option(package_name="artifact")
def main():
    """Difference matrices and generalized Rudin-Shapiro sequences."""


@main.command("build-matrix")
@click.option("--p", "p", type=int, required=True, help="Field characteristic.")
@click.option("--k", "k", type=int, required=True, help="Field degree.")
@click.option("--n", "n", type=int, default=None, help="Target exponent (default K).")
@click.option("--modulus", help="Monic modulus coefficients, constant term first, e.g. 1,0,1.")
@click.option("--out", type=click.Path(dir_okay=False), help="Write here instead of stdout.")
@domain_errors
def build_matrix(p, k, n, modulus, out):
    """Multiplication table of GF(P^K) truncated to Z_P^N."""
    m = construct(p, k, n, _int_list(modulus, "--modulus"))
    _write(dumps_matrix(m), out)


@main.command("verify-matrix")
@click.option("--file", "path", type=click.Path(dir_okay=False), required=True)
@domain_errors
def verify_matrix(path):
    """Check the difference property of a matrix document."""
    m = read_matrix(path)
    report = verify(m)
    if not report.ok:
        raise VerificationError(report)
    click.echo(f"ok: D({m.rows},{m.cols},Z_{m.p}^{m.k}), "
               f"each difference {m.rows // m.group_order} time(s) per column pair")


@main.command()
@click.option("--file", "path", type=click.Path(dir_okay=False), required=True)
@click.option("--out", type=click.Path(dir_okay=False))
@domain_errors
def normalize(path, out):
    """Order-normalize a verified matrix."""
    _write(dumps_matrix(order_normalize(load_matrix(path))), out)


@main.command("mul-table")
@click.option("--p", "p", type=int, required=True)
@click.option("--k", "k", type=int, required=True)
@click.option("--modulus")
@domain_errors
def mul_table(p, k, modulus):
    """Print the GF(P^K) multiplication table as rows of coefficient tuples."""
    ctx = FieldContext.create(p, k, _int_list(modulus, "--modulus"))
    click.echo(f"# GF({p}^{k}) modulus coefficients {list(ctx.modulus)}")
    for row in multiplication_table(ctx):
        click.echo(" ".join("(" + ",".join(map(str, e.coeffs)) + ")" for e in row))


@main.command("gen-sequence")
@generator_options
@click.option("--start", type=int, default=0, show_default=True)
@click.option("--count", type=int, required=True)
@click.option("--format", "fmt", type=click.Choice(["symbols", "csv"]), default="symbols",
              show_default=True)
@domain_errors
def gen_sequence(matrix, build, factors, a0s, start, count, fmt):
    """Emit sequence symbols for n = START .. START+COUNT-1."""
    gen = _generator(matrix, build, factors, a0s)
    values = stream(gen, start, count)
    if fmt == "symbols":
        click.echo(",".join(map(str, values)))
    else:
        click.echo("n,symbol")
        for i, v in enumerate(values):
            click.echo(f"{start + i},{v}")


@main.command()
@generator_options
@click.option("--N", "N", type=int, required=True, help="Number of terms in the sum.")
@click.option("--r1", type=int, default=0, show_default=True)
@click.option("--r2", type=int, default=1, show_default=True)
@click.option("--threads", type=int, default=None, help="Worker threads (default: all CPUs).")
@domain_errors
def correlate(matrix, build, factors, a0s, N, r1, r2, threads):
    """Exact order-2 correlation sum, printed as a one-row CSV."""
    gen = _generator(matrix, build, factors, a0s)
    rep = corr.correlation_sum(gen, N, corr.ShiftPair(r1, r2), threads)
    row = corr.report_row(gen, rep)
    click.echo(corr.format_csv([row]), nl=False)


@main.command("sweep")
@click.option("--spec", "spec_path", type=click.Path(dir_okay=False), required=True)
@click.option("--out", type=click.Path(dir_okay=False), help="CSV path (overrides the spec).")
@click.option("--threads", type=int, default=None)
@domain_errors
def sweep_cmd(spec_path, out, threads):
    """Run a correlation sweep described by a JSON spec file."""
    spec = corr.SweepSpec.load(spec_path)
    text = corr.sweep(spec, out, threads)
    if out is None and spec.out is None:
        click.echo(text, nl=False)


@main.command()
def selftest():
    """Run the bundled invariant checks."""
    failed = 0
    for name, ok in run_selftest():
        click.echo(f"{'PASS' if ok else 'FAIL'} {name}")
        failed += not ok
    if failed:
        _fail("selftest", f"{failed} check(s) failed")


if __name__ == "__main__":
    main()
