"""
density-cli: command line for matroid density analysis.

Exit codes: 0 ok, 1 verification mismatch or unexpected error, 2 parse or
input error, 3 oracle limit exceeded, 4 domain error (loops, rank 0).
"""

import dataclasses
import logging
import sys
from typing import Any, NoReturn, Optional

import click

from app import __version__
from app.config import Settings, load_settings
from app.formatting import emit, render_csv, render_json, render_table, render_value
from app.services.analysis import (
    addable_report,
    analyze_input,
    mkl_report,
    removal_report,
    spectrum_matrix,
    spectrum_report,
    spectrum_rows,
    toughness_report,
)
from app.services.verification import CHECKS, run_verification
from loaders.demo import DEMOS
from loaders.descriptors import LoadedInput, dump_pmf, load_input
from matroids.errors import CapacityError, DomainError, InputError

EXIT_MISMATCH = 1
EXIT_INPUT = 2
EXIT_CAPACITY = 3
EXIT_DOMAIN = 4

LOG_LEVELS = {0: logging.WARNING, 1: logging.INFO}


def fail(e: Exception) -> NoReturn:
    """Print an error and exit with the code for its class."""
    if isinstance(e, CapacityError):
        click.secho(f"Error: {e}", fg="red", err=True)
        click.echo("Hint: raise the limit with --oracle-limit", err=True)
        sys.exit(EXIT_CAPACITY)
    click.secho(f"Error: {e}", fg="red", err=True)
    if isinstance(e, DomainError):
        sys.exit(EXIT_DOMAIN)
    if isinstance(e, (InputError, FileNotFoundError)):
        sys.exit(EXIT_INPUT)
    sys.exit(EXIT_MISMATCH)


INPUT_OPTIONS = [
    click.argument("input_path", required=False, type=click.Path(dir_okay=False)),
    click.option("--demo", type=click.Choice(sorted(DEMOS)), help="Use a built-in demo graph"),
    click.option("--weights", "weights_path", type=click.Path(dir_okay=False), help="Weights file"),
    click.option("--oracle-limit", type=click.IntRange(min=1), help="Base enumeration cap"),
    click.option(
        "--format",
        "output_format",
        type=click.Choice(["table", "csv", "json"], case_sensitive=False),
        default="table",
        help="Output format",
    ),
    click.option("--output", default=None, help="Write output to file"),
    click.option("--compact", is_flag=True, help="Compact JSON output"),
]


def input_options(command):
    """Input selection, limits and output options shared by every analysis command."""
    for decorator in reversed(INPUT_OPTIONS):
        command = decorator(command)
    return command


def prepare(
    ctx: click.Context,
    input_path: Optional[str],
    demo: Optional[str],
    weights_path: Optional[str],
    oracle_limit: Optional[int],
) -> tuple[LoadedInput, Settings]:
    settings: Settings = ctx.obj["settings"]
    if oracle_limit is not None:
        settings = dataclasses.replace(settings, oracle_limit=oracle_limit)
    loaded = load_input(input_path, demo=demo, weights_path=weights_path)
    return loaded, settings


def _header(report: dict[str, Any]) -> str:
    source = report["provenance"]
    return f"Input: {source['source']} (SHA256: {source['sha256'][:16]}...)\n"


@click.group()
@click.option("-v", "--verbose", count=True, help="Log progress (-v info, -vv debug)")
@click.pass_context
def cli(ctx, verbose):
    """Matroid density analysis: principal partitions, truncation spectra, MKL."""
    logging.basicConfig(
        level=LOG_LEVELS.get(verbose, logging.DEBUG),
        format="%(levelname)s %(name)s: %(message)s",
    )
    ctx.ensure_object(dict)
    try:
        ctx.obj["settings"] = load_settings()
    except InputError as e:
        fail(e)


@cli.command()
@input_options
@click.option("--strict", is_flag=True, help="Also decide strict homogeneity")
@click.pass_context
def analyze(ctx, input_path, demo, weights_path, oracle_limit, output_format, output, compact,
            strict):
    """Universal density, principal partition, strength and arboricity."""
    try:
        loaded, settings = prepare(ctx, input_path, demo, weights_path, oracle_limit)
        report = analyze_input(loaded, settings, strict=strict)

        if output_format == "json":
            emit(render_json(report, compact), output)
        elif output_format == "csv":
            emit(render_csv(report["density"], "density"), output)
        else:
            lines = [
                _header(report),
                f"Elements: {report['elements']}  Rank: {report['rank']}\n",
                f"Strength S = {render_value(report['strength'])}  (tau = {report['tau']})\n",
                f"Arboricity D = {render_value(report['arboricity'])}"
                f"  (a = {report['cover_number']}, core of {len(report['core'])} elements)\n",
                f"Homogeneous: {'yes' if report['homogeneous'] else 'no'}\n",
            ]
            if "strict" in report:
                strict_yes = report["strict"]["strictly_homogeneous"]
                lines.append(f"Strictly homogeneous: {'yes' if strict_yes else 'no'}\n")
            lines.append("\nPrincipal partition:\n")
            lines.append(
                render_table(
                    [{k: v for k, v in b.items() if k != "elements"} for b in report["partition"]]
                )
            )
            lines.append("\nLevel counts:\n")
            lines.append(render_table(report["level_counts"]))
            lines.append("\nDensity:\n")
            lines.append(render_table(report["density"]))
            emit("".join(lines), output)
    except Exception as e:
        fail(e)


@cli.command()
@input_options
@click.option("--matrix", "mode", flag_value="matrix", help="Full t x element table")
@click.option("--ranges", "mode", flag_value="ranges", help="Group t by identical formulas")
@click.pass_context
def spectrum(ctx, input_path, demo, weights_path, oracle_limit, output_format, output, compact,
             mode):
    """Universal densities of every truncation t = 1..|E|."""
    try:
        loaded, settings = prepare(ctx, input_path, demo, weights_path, oracle_limit)
        report, table = spectrum_report(loaded, settings)

        if mode == "ranges":
            rows = [
                {"t_from": row["t_from"], "t_to": row["t_to"], **row["cells"]}
                for row in report["ranges"]
            ]
            schema = "spectrum-ranges"
        elif mode == "matrix":
            rows = spectrum_matrix(table)
            schema = "spectrum-matrix"
        else:
            rows = spectrum_rows(table)
            schema = "spectrum"

        if output_format == "json":
            emit(render_json({**report, "rows": rows}, compact), output)
        elif output_format == "csv":
            emit(render_csv(rows, schema), output)
        else:
            text = (
                _header(report)
                + f"Elements: {report['elements']}  Rank: {report['rank']}"
                + f"  Balancity: {report['balancity']}\n"
                + "Breakpoints c: "
                + ", ".join(str(p["c"]) for p in report["breakpoints"])
                + "\nDual breakpoints c': "
                + ", ".join(str(p["c"]) for p in report["dual_breakpoints"])
                + "\n\n"
                + render_table(rows)
            )
            emit(text, output)
    except Exception as e:
        fail(e)


@cli.command()
@input_options
@click.option("--tol", type=float, default=None, help="Duality-gap tolerance")
@click.option("--max-iter", type=click.IntRange(min=1), default=None, help="Iteration cap")
@click.option("--certify", is_flag=True, help="Add optimality certificates")
@click.option("--pmf-output", default=None, help="Write the solver's base pmf (JSON)")
@click.pass_context
def mkl(ctx, input_path, demo, weights_path, oracle_limit, output_format, output, compact,
        tol, max_iter, certify, pmf_output):
    """Minimum KL divergence over the base polytope."""
    try:
        loaded, settings = prepare(ctx, input_path, demo, weights_path, oracle_limit)
        report, pmf = mkl_report(loaded, settings, tol=tol, max_iter=max_iter, certify=certify)
        if pmf_output:
            count = dump_pmf(pmf, pmf_output)
            click.secho(f"✓ {count} bases written to: {pmf_output}", fg="green", err=True)
        if not report["converged"]:
            click.secho("⚠ Solver did not reach the tolerance", fg="yellow", err=True)

        if output_format == "json":
            emit(render_json(report, compact), output)
        elif output_format == "csv":
            emit(render_csv(report["density"], "mkl"), output)
        else:
            lines = [
                _header(report),
                f"Value: {render_value(report['value'])}\n",
                f"Iterations: {report['iterations']}"
                f"  Duality gap: {render_value(report['duality_gap'])}"
                f"  Converged: {'yes' if report['converged'] else 'no'}\n",
            ]
            if "certificates" in report:
                cert = report["certificates"]
                lines.append(
                    f"Distance to exact density: {render_value(cert['distance_to_exact'])}\n"
                    f"Length certificate: {'pass' if cert['length']['passed'] else 'fail'}\n"
                    f"V_max core: {'pass' if cert['vmax_core']['passed'] else 'fail'}\n"
                    f"Entropy bound: {render_value(cert['entropy_bound']['bound'])}\n"
                )
            lines.append("\n" + render_table(report["density"]))
            emit("".join(lines), output)
    except Exception as e:
        fail(e)


@cli.command()
@input_options
@click.option("-k", "k", type=click.IntRange(min=1), required=True, help="Number of bases")
@click.option("--oracle", is_flag=True, help="Cross-check by subset enumeration")
@click.pass_context
def nk(ctx, input_path, demo, weights_path, oracle_limit, output_format, output, compact,
       k, oracle):
    """Removal number N(M, k): the largest restriction covered by k bases."""
    try:
        loaded, settings = prepare(ctx, input_path, demo, weights_path, oracle_limit)
        report = removal_report(loaded, settings, k, oracle=oracle)

        if output_format == "json":
            emit(render_json(report, compact), output)
        elif output_format == "csv":
            rows = [{"k": k, "n_value": report["n_value"], "element": e} for e in report["witness"]]
            emit(render_csv(rows, "removal"), output)
        else:
            text = (
                _header(report)
                + f"N(M, {k}) = {report['n_value']}\n"
                + f"Level index: {render_value(report['level_index']) or '-'}\n"
                + f"Packs {k} disjoint bases: {'yes' if report['full_packing'] else 'no'}\n"
                + f"Witness ({len(report['witness'])} elements): "
                + " ".join(str(e) for e in report["witness"])
                + "\n"
            )
            if "oracle" in report:
                text += f"Oracle: {report['oracle']['n_value']}\n"
            emit(text, output)
        if "oracle" in report and not report["oracle"]["agrees"]:
            click.secho("✗ Oracle disagrees", fg="red", err=True)
            sys.exit(EXIT_MISMATCH)
    except Exception as e:
        fail(e)


@cli.command()
@input_options
@click.option("-k", "k", type=click.IntRange(min=2), required=True, help="Arboricity a(G)")
@click.pass_context
def addable(ctx, input_path, demo, weights_path, oracle_limit, output_format, output, compact,
            k):
    """Vertex pairs where a new edge keeps the arboricity at k."""
    try:
        loaded, settings = prepare(ctx, input_path, demo, weights_path, oracle_limit)
        report = addable_report(loaded, settings, k)

        rows = [{"u": u, "v": v, "addable": True} for u, v in report["addable"]]
        rows += [
            {"u": b["pair"][0], "v": b["pair"][1], "addable": False} for b in report["blocked"]
        ]
        if output_format == "json":
            emit(render_json(report, compact), output)
        elif output_format == "csv":
            emit(render_csv(rows, "addable", columns=["u", "v", "addable"]), output)
        else:
            text = (
                _header(report)
                + f"Case: {report['case']}  D(G) = {render_value(report['arboricity'])}\n"
                + f"Addable: {report['addable_count']}  Blocked: {report['blocked_count']}\n"
                + "".join(
                    f"Dense part: {' '.join(str(v) for v in w)}\n" for w in report["witnesses"]
                )
                + "\n"
                + render_table(rows, columns=["u", "v", "addable"])
            )
            emit(text, output)
    except Exception as e:
        fail(e)


@cli.command()
@input_options
@click.option("-c", "c", type=click.IntRange(min=1), required=True, help="Component count")
@click.option("--oracle", is_flag=True, help="Cross-check by subset enumeration")
@click.pass_context
def toughness(ctx, input_path, demo, weights_path, oracle_limit, output_format, output, compact,
              c, oracle):
    """c-order edge toughness of a connected graph."""
    try:
        loaded, settings = prepare(ctx, input_path, demo, weights_path, oracle_limit)
        report = toughness_report(loaded, settings, c, oracle=oracle)

        row = {"c": c, "toughness": report["toughness"]}
        if "oracle" in report:
            row["oracle"] = report["oracle"]["toughness"]
        if output_format == "json":
            emit(render_json(report, compact), output)
        elif output_format == "csv":
            emit(render_csv([row], "toughness"), output)
        else:
            emit(_header(report) + render_table([row]), output)
        if "oracle" in report and not report["oracle"]["agrees"]:
            click.secho("✗ Oracle disagrees", fg="red", err=True)
            sys.exit(EXIT_MISMATCH)
    except Exception as e:
        fail(e)


@cli.command()
@input_options
@click.option(
    "--check",
    "checks",
    multiple=True,
    type=click.Choice(list(CHECKS)),
    help="Run only these checks (repeatable)",
)
@click.option("--expect-sha256", default=None, help="Fail if the input fingerprint changed")
@click.pass_context
def verify(ctx, input_path, demo, weights_path, oracle_limit, output_format, output, compact,
           checks, expect_sha256):
    """Cross-check the engine against brute-force oracles."""
    try:
        loaded, settings = prepare(ctx, input_path, demo, weights_path, oracle_limit)
        report = run_verification(
            loaded, settings, only=list(checks) or None, expect_sha256=expect_sha256
        )

        if output_format == "json":
            emit(render_json(report, compact), output)
        elif output_format == "csv":
            emit(render_csv(report["errors"] + report["warnings"], "verification",
                            columns=["type", "severity", "check", "issue", "details"]), output)
        else:
            text = (
                f"Input: {loaded.source} (SHA256: {loaded.sha256[:16]}...)\n"
                + render_table(report["checks"])
                + "".join(
                    f"  • [{i['check']}] {i['issue']}: {i['details']}\n"
                    for i in report["errors"] + report["warnings"]
                )
            )
            emit(text, output)

        if report["status"] == "pass":
            click.secho("✓ All verification checks passed", fg="green", err=True)
        elif report["status"] == "warnings":
            click.secho(f"⚠ {report['summary']}", fg="yellow", err=True)
        else:
            click.secho(f"✗ {report['summary']}", fg="red", err=True)
            sys.exit(EXIT_MISMATCH)
    except Exception as e:
        fail(e)


@cli.command()
def version():
    """Display version information."""
    click.echo("\nMatroid Density Tools")
    click.echo(f"Version: {__version__}")
    click.echo(f"Python: {sys.version.split()[0]}\n")


if __name__ == "__main__":
    cli()
