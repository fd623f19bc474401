"""Command-line interface.

Usage:
    katokech spectrum katok --a 2/5 --count 3 --format csv
    katokech spectrum ellipsoid --x 1 --y 1 --count 6
    katokech spectrum katok --a-limit 0 --count 10
    katokech grading --a 2/5 --m1 1 --m2 1
    katokech generator --a sqrt2/2 --gamma 0 --degree 40
    katokech verify lattice --a 2/5 --n-max 40
    katokech verify bijection --a 1/2 --n-max 30
    katokech flow orbits --a 2/5

Exit codes: 0 success, 1 usage error, 2 verification failure,
3 numerical certification failure, 4 expected degeneracy (rational a).
Data goes to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import csv
import io
import json
import re
import sys
from fractions import Fraction

import click

from . import ech
from .arithmetic import DEFAULT_PRECISION, Param
from .errors import (
    AmbiguousComparison,
    AmbiguousFloor,
    IllConditioned,
    InvalidParameter,
    NoConvergence,
)
from .flow import find_closed_orbits, max_oracle_deviation
from .spectrum import (
    Generators,
    katok_spectrum,
    limit_generators,
    m2_stream,
    nab_stream,
)
from .verify import SUITES, random_points

SCHEMA_VERSION = "1"
SPECTRUM_COLUMNS = ["k", "m1", "m2", "value", "grading"]

EXIT_OK, EXIT_USAGE, EXIT_VERIFY, EXIT_NUMERIC, EXIT_DEGENERATE = 0, 1, 2, 3, 4


# -- parsing -----------------------------------------------------------------


def parse_param(token: str, prec: int) -> Param:
    try:
        return Param.parse(token, prec)
    except InvalidParameter as exc:
        raise click.UsageError(str(exc)) from exc


_PI_RE = re.compile(r"^(?P<c>[0-9./]*)\*?(pi|π)$")


def parse_generator(token: str, prec: int):
    """Return ``(value, carries_pi)``.

    Accepts ``p/q`` and decimals (exact), multiples of pi such as ``2pi``,
    and the named irrationals accepted for ``--a``.
    """
    tok = token.strip().lower().replace(" ", "")
    m = _PI_RE.match(tok)
    if m:
        c = m.group("c") or "1"
        return Fraction(c), True
    if re.fullmatch(r"\d+(/\d+)?|(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?", tok):
        return Fraction(tok), False
    try:
        if tok == "sqrt2":
            p = Param.sqrt2_over_2(prec)
            return 2 * p.value, False
        return Param.parse(tok, prec).value, False
    except InvalidParameter as exc:
        raise click.UsageError(f"cannot parse generator {token!r}") from exc


def _generators(x: str | None, y: str | None, prec: int) -> Generators:
    if x is None or y is None:
        raise click.UsageError("--x and --y are required for this spectrum")
    (xv, xpi), (yv, ypi) = parse_generator(x, prec), parse_generator(y, prec)
    if xpi != ypi:
        raise click.UsageError("--x and --y must both or neither be multiples of pi")
    try:
        return Generators(xv, yv, pi=xpi)
    except ValueError as exc:
        raise click.UsageError(str(exc)) from exc


# -- output ------------------------------------------------------------------


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def emit(command: dict, rows: list[dict], fmt: str, columns: list[str] | None = None, extra: dict | None = None) -> None:
    if fmt == "json":
        doc = {"schema_version": SCHEMA_VERSION, "command": command, "rows": rows}
        if extra:
            doc.update(extra)
        click.echo(json.dumps(doc, indent=2, ensure_ascii=False, allow_nan=True))
        return
    if columns is None:
        columns = list(rows[0]) if rows else []
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row.get(c)) for c in columns])
    click.echo(buf.getvalue(), nl=False)


def _echo(ctx: click.Context) -> dict:
    return {"name": ctx.command_path.split(" ", 1)[-1], **{k: v for k, v in ctx.params.items()}}


# -- commands ----------------------------------------------------------------


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
def cli():
    """ECH spectrum and Katok flow computations."""


format_option = click.option(
    "--format", "fmt", type=click.Choice(["json", "csv"]), default="json", show_default=True
)
prec_option = click.option(
    "--prec", type=click.IntRange(min=128), default=DEFAULT_PRECISION, show_default=True,
    help="Working precision in bits for real-mode parameters.",
)


@cli.command()
@click.argument("kind", type=click.Choice(["ellipsoid", "katok", "nab", "m2"]))
@click.option("--a", "a_token", help="Katok parameter: p/q, decimal, sqrt2/2 or 1/pi.")
@click.option("--a-limit", type=float, default=None, help="Use the a -> 0 limit generators (2pi, 2pi).")
@click.option("--x", "x_token", help="First generator (ellipsoid/nab/m2).")
@click.option("--y", "y_token", help="Second generator (ellipsoid/nab/m2).")
@click.option("--count", type=click.IntRange(min=1), default=10, show_default=True)
@click.option("--exact", is_flag=True, help="Print exact values (rational mode only).")
@format_option
@prec_option
@click.pass_context
def spectrum(ctx, kind, a_token, a_limit, x_token, y_token, count, exact, fmt, prec):
    """Tabulate a spectrum: N(x,y), M2(N(x,y)), ellipsoid or Katok."""
    extra = None
    if kind == "katok":
        if a_limit is not None and a_limit != 0:
            raise click.UsageError("--a-limit only supports 0")
        if a_token is None and a_limit is None:
            raise click.UsageError("katok spectrum needs --a or --a-limit 0")
        limit = m2_stream(limit_generators(), count=count) if a_limit is not None else None
        if a_token is None:
            entries = limit
        else:
            param = parse_param(a_token, prec)
            if exact and not param.is_exact:
                raise click.UsageError("--exact requires a rational parameter p/q")
            entries = katok_spectrum(param, count)
        rows = [e.as_row() for e in entries]
        if limit is not None and a_token is not None:
            dev = 0.0
            for row, lim in zip(rows, limit):
                row["limit_value"] = lim.value
                dev = max(dev, abs(row["value"] - lim.value))
            extra = {"limit_comparison": {"max_abs_deviation": dev}}
    else:
        gens = _generators(x_token, y_token, prec)
        if exact and not gens.is_exact:
            raise click.UsageError("--exact requires rational generators")
        stream = m2_stream if kind == "m2" else nab_stream
        rows = [e.as_row() for e in stream(gens, count=count)]
    if exact and fmt == "csv":
        for row in rows:
            row["value"] = row["value_exact"]
    emit(_echo(ctx), rows, fmt, SPECTRUM_COLUMNS, extra)


@cli.command()
@click.option("--a", "a_token", required=True)
@click.option("--m1", type=click.IntRange(min=0), required=True)
@click.option("--m2", type=click.IntRange(min=0), required=True)
@format_option
@prec_option
@click.pass_context
def grading(ctx, a_token, m1, m2, fmt, prec):
    """Grading, action and CZ data of the orbit set g1^m1 g2^m2."""
    param = parse_param(a_token, prec)
    os = ech.OrbitSet(m1, m2)
    gens = ech.katok_generators(param)
    row = {
        "m1": m1,
        "m2": m2,
        "gamma": os.gamma,
        "grading": ech.grading(os, param),
        "q_tau": str(ech.q_tau(os)),
        "value": gens.value(os),
        "value_exact": gens.exact_string(os),
    }
    emit(_echo(ctx), [row], fmt)


@cli.command()
@click.option("--a", "a_token", required=True)
@click.option("--gamma", type=click.IntRange(0, 1), default=0, show_default=True)
@click.option("--degree", type=click.IntRange(min=0), required=True)
@format_option
@prec_option
@click.pass_context
def generator(ctx, a_token, gamma, degree, fmt, prec):
    """The orbit set of a given class and even degree."""
    if degree % 2:
        raise click.UsageError("degree must be even")
    param = parse_param(a_token, prec)
    os = ech.generator_of_degree(gamma, degree, param)
    gens = ech.katok_generators(param)
    row = {
        "gamma": gamma, "degree": degree, "m1": os.m1, "m2": os.m2,
        "value": gens.value(os), "value_exact": gens.exact_string(os),
    }
    emit(_echo(ctx), [row], fmt)


@cli.command()
@click.argument("suite", type=click.Choice(sorted(SUITES)))
@click.option("--a", "a_token", required=True)
@click.option("--n-max", type=click.IntRange(min=0), default=None, help="Region bound (lattice, bijection).")
@click.option("--count", type=click.IntRange(min=1), default=None, help="Spectrum length (spectrum-agreement).")
@click.option("--k-max", type=click.IntRange(min=1), default=None, help="Largest k (floor-identity).")
@click.option("--seeds", type=click.IntRange(min=1), default=None, help="Random initial conditions (flow).")
@format_option
@prec_option
@click.pass_context
def verify(ctx, suite, a_token, n_max, count, k_max, seeds, fmt, prec):
    """Run a property suite; exit 0 iff every check passes."""
    param = parse_param(a_token, prec)
    kwargs = {}
    if suite in ("lattice", "bijection") and n_max is not None:
        kwargs["n_max"] = n_max
    if suite == "spectrum-agreement" and count is not None:
        kwargs["count"] = count
    if suite == "floor-identity" and k_max is not None:
        kwargs["k_max"] = k_max
    if suite == "flow" and seeds is not None:
        kwargs["seeds"] = seeds
    report = SUITES[suite](param, **kwargs)
    emit(_echo(ctx), [report.as_dict()] if fmt == "json" else [_flat(report.as_dict())], fmt)
    click.echo(f"{suite}: {report.status} ({report.checked} checked)", err=True)
    if report.status == "expected-degenerate":
        ctx.exit(EXIT_DEGENERATE)
    if not report.passed:
        ctx.exit(EXIT_VERIFY)


def _flat(d: dict) -> dict:
    return {k: (json.dumps(v, ensure_ascii=False) if isinstance(v, (dict, list)) else v) for k, v in d.items()}


@cli.command()
@click.argument("action", type=click.Choice(["orbits", "monodromy", "compare-oracle"]))
@click.option("--a", "a_token", required=True)
@click.option("--orbit", type=click.Choice(["g1", "g2"]), default=None)
@click.option("--t", "t_end", type=click.FloatRange(min=0), default=10.0, show_default=True)
@click.option("--step", type=click.FloatRange(min=1e-6, max=1e-1), default=1e-3, show_default=True)
@click.option("--seeds", type=click.IntRange(min=1), default=100, show_default=True)
@format_option
@click.pass_context
def flow(ctx, action, a_token, orbit, t_end, step, seeds, fmt):
    """Numerical experiments with the Katok geodesic flow."""
    param = parse_param(a_token, DEFAULT_PRECISION)
    if action == "compare-oracle":
        dev = max_oracle_deviation(param, random_points(param, seeds), t_end, step)
        rows = [{"a": float(param), "t": t_end, "step": step, "seeds": seeds, "max_deviation": dev}]
    else:
        records = find_closed_orbits(param, step=step)
        if orbit is not None:
            records = [r for r in records if r.label == orbit]
        rows = []
        for r in records:
            row = r.as_row(param)
            if action == "monodromy":
                row["matrix"] = [[float(v) for v in line] for line in r.matrix]
            rows.append(row)
        if fmt == "csv":
            rows = [_flat(r) for r in rows]
    emit(_echo(ctx), rows, fmt)


def main(argv: list[str] | None = None) -> int:
    try:
        rv = cli.main(args=argv, prog_name="katokech", standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.UsageError as exc:
        exc.show()
        return EXIT_USAGE
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return EXIT_USAGE
    except click.ClickException as exc:
        exc.show()
        return exc.exit_code
    except (AmbiguousFloor, AmbiguousComparison) as exc:
        where = f" (k={exc.k})" if getattr(exc, "k", None) is not None else ""
        click.echo(f"certification failure{where}: {exc}", err=True)
        return EXIT_NUMERIC
    except (NoConvergence, IllConditioned) as exc:
        click.echo(f"numerical failure: {exc}", err=True)
        return EXIT_NUMERIC
    except InvalidParameter as exc:
        click.echo(f"Error: {exc}", err=True)
        return EXIT_USAGE
    return rv if isinstance(rv, int) else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

