"""
Output rendering for the CLI.

Rationals always print in lowest terms as "p/q" (integers without a
denominator). CSV output starts with a schema comment line so downstream
readers can detect format changes.
"""

import io
import json
import math
from collections.abc import Mapping
from fractions import Fraction
from pathlib import Path
from typing import Any, Optional

import click
import pandas as pd

from matroids.ground import format_fraction

CSV_SCHEMA_VERSION = 1
FLOAT_DIGITS = 12


def render_value(value: Any) -> str:
    """Scalar to text: exact "p/q" for rationals, 12 significant digits for floats."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, Fraction)):
        return format_fraction(Fraction(value))
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return f"{value:.{FLOAT_DIGITS}g}"
    if value is None:
        return ""
    return str(value)


def to_jsonable(obj: Any) -> Any:
    """
    Convert a report to JSON-ready values.

    Fractions become "p/q" strings, infinities "inf", tuples lists and
    frozensets sorted lists; mapping keys become strings.
    """
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, Fraction):
        return format_fraction(obj)
    if isinstance(obj, int):
        return obj
    if isinstance(obj, float):
        return render_value(obj) if math.isinf(obj) or math.isnan(obj) else obj
    if isinstance(obj, Mapping):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (set, frozenset)):
        return [to_jsonable(v) for v in sorted(obj, key=str)]
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    return str(obj)


def render_json(report: Mapping, compact: bool = False) -> str:
    indent = None if compact else 2
    return json.dumps(to_jsonable(report), indent=indent) + "\n"


def render_csv(rows: list[Mapping], schema: str, columns: Optional[list[str]] = None) -> str:
    """
    CSV with a "# schema=<name> version=<n>" first line.

    Args:
        rows: Records; values are rendered with render_value
        schema: Schema name, e.g. "spectrum"
        columns: Column order (defaults to the keys of the first row)
    """
    df = pd.DataFrame(
        [{k: render_value(v) for k, v in row.items()} for row in rows], columns=columns
    )
    buffer = io.StringIO()
    buffer.write(f"# schema={schema} version={CSV_SCHEMA_VERSION}\n")
    df.to_csv(buffer, index=False, lineterminator="\n")
    return buffer.getvalue()


def render_table(rows: list[Mapping], columns: Optional[list[str]] = None) -> str:
    """Fixed-width text table."""
    if not rows:
        return "(no rows)\n"
    df = pd.DataFrame(
        [{k: render_value(v) for k, v in row.items()} for row in rows], columns=columns
    )
    return df.to_string(index=False) + "\n"


def emit(text: str, output: Optional[str]) -> None:
    """Write rendered text to ``output`` or stdout."""
    if output:
        Path(output).write_text(text, encoding="utf-8")
        click.secho(f"✓ Output written to: {output}", fg="green", err=True)
    else:
        click.echo(text, nl=False)
