"""
Table command for pm-scheme.

Prints or writes the eigenvalue table for one n.
"""
from pathlib import Path
from typing import Optional

import typer
from typing_extensions import Annotated

from pm_scheme.commands.common import (
    TableSource,
    cli_errors,
    console_service,
    get_config,
    obtain_table,
    progress_tracker,
)
from pm_scheme.config import OutputFormat
from pm_scheme.table_formats import to_csv, to_json, to_rich


def table(
    ctx: typer.Context,
    n: Annotated[int, typer.Option("--n", help="Half the number of vertices")],
    source: Annotated[TableSource, typer.Option("--source", help="auto, oracle or formulas")] = TableSource.AUTO,
    output_format: Annotated[Optional[OutputFormat], typer.Option("--format", "-f", help="csv, json or pretty")] = None,
    out: Annotated[Optional[Path], typer.Option("--out", "-o", help="Write to this file instead of stdout")] = None,
):
    """
    Build the table of eigenvalues for one n.

    [bold]Sources:[/]

    • [green]oracle[/]: recovered from counted intersection numbers, cached in the data directory
    • [green]formulas[/]: closed forms only; unreached cells are left empty
    • [green]auto[/] (default): oracle up to n=7, formulas beyond

    [bold]Examples:[/]

    • [cyan]pm-scheme table --n 5 --format csv[/] - Canonical CSV
    • [cyan]pm-scheme table --n 2[/] - Pretty 2×2 display
    • [cyan]pm-scheme table --n 12 --source formulas --format json --out n12.json[/]
    """
    config = get_config(ctx)
    output_format = output_format or config.format
    with cli_errors():
        result = obtain_table(config, n, source, progress_tracker())

    if output_format == OutputFormat.PRETTY:
        if out is not None:
            console_service.print("[yellow]Pretty output is for the terminal; use --format csv or json with --out[/]")
            raise typer.Exit(2)
        console_service.print(to_rich(result))
    else:
        text = to_csv(result) if output_format == OutputFormat.CSV else to_json(result)
        if out is not None:
            out.write_text(text)
            console_service.print(f"[green]✅ Wrote n={n} table to {out}[/]")
        else:
            typer.echo(text, nl=False)

    if not result.is_complete:
        message = f"The n={n} table is partial: only closed-form cells are filled"
        if output_format == OutputFormat.PRETTY:
            console_service.note(message)
        else:
            typer.echo(f"NOTE {message}", err=True)
