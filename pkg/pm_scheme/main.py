"""
Main CLI interface for pm-scheme using Typer.

Commands:
- pm-scheme table     # Eigenvalue table for one n
- pm-scheme verify    # Check the theory against exact tables
- pm-scheme gap       # Spectral gap of one relation
- pm-scheme diameter  # Diameter of one relation's graph
- pm-scheme fit       # Interpolate a family's symmetric function
- pm-scheme scan      # Smallest gap and largest diameter over all relations
"""
import logging

# Set logging levels early to prevent chatty output
logging.basicConfig(level=logging.WARN)

from pathlib import Path
from typing import Optional

import structlog
import typer
from rich.console import Console
from rich.markup import escape
from rich.panel import Panel
from typing_extensions import Annotated

from pm_scheme.commands.common import EXIT_UNSUPPORTED
from pm_scheme.commands.explore import diameter, fit, gap, scan
from pm_scheme.commands.table import table
from pm_scheme.commands.verify import verify_app
from pm_scheme.config import Config
from pm_scheme.table_cache import package_version

app = typer.Typer(
    name="pm-scheme",
    help="🔢 Exact eigenvalues of the perfect matching association scheme",
    rich_markup_mode="rich",
    no_args_is_help=True,
    pretty_exceptions_enable=False,
)

app.add_typer(verify_app, name="verify")
app.command(name="table")(table)
app.command(name="gap")(gap)
app.command(name="diameter")(diameter)
app.command(name="fit")(fit)
app.command(name="scan")(scan)

console = Console()


def version_callback(value: bool):
    if value:
        console.print(Panel(
            f"[bold cyan]pm-scheme[/] version [green]{package_version()}[/]",
            title="Version Information",
            border_style="cyan"
        ))
        raise typer.Exit()


def configure_logging(verbose: bool):
    level = logging.INFO if verbose else logging.WARNING
    logging.getLogger().setLevel(level)
    structlog.configure(
        wrapper_class=structlog.make_filtering_bound_logger(level),
        logger_factory=structlog.stdlib.LoggerFactory(),
    )


@app.callback()
def main(
    ctx: typer.Context,
    version: Annotated[bool, typer.Option("--version", callback=version_callback, is_eager=True,
                                          help="Show version information")] = False,
    verbose: Annotated[bool, typer.Option("--verbose", help="Log progress of the oracle and caches")] = False,
    data_dir: Annotated[Optional[Path], typer.Option("--data-dir", help="Where oracle tables are cached")] = None,
    seed: Annotated[Optional[int], typer.Option("--seed", help="Seed for the oracle's random combinations")] = None,
    workers: Annotated[Optional[int], typer.Option("--workers", help="Processes for intersection counting")] = None,
    max_oracle_n: Annotated[Optional[int], typer.Option("--max-oracle-n",
                                                        help="Largest n the oracle may build")] = None,
    max_diameter_n: Annotated[Optional[int], typer.Option("--max-diameter-n",
                                                          help="Largest n for diameter searches")] = None,
):
    """
    🔢 Exact eigenvalues of the perfect matching association scheme

    Use [bold cyan]pm-scheme COMMAND --help[/] to see options for specific commands.

    [bold]Common workflows:[/]

    • [cyan]pm-scheme table --n 5 --format csv[/] - Eigenvalue table from the oracle
    • [cyan]pm-scheme verify conjecture --n 7[/] - Second-largest eigenvalues on the near-row
    • [cyan]pm-scheme verify induction --family 3,2 --n 15[/] - Induction step of a family
    • [cyan]pm-scheme gap --mu "[2,1^4]" --n 6[/] - Spectral gap of one relation
    • [cyan]pm-scheme scan --n 6 --diameters[/] - Smallest gap and largest diameter

    [bold]Settings:[/] ~/.pm_scheme, then PM_SCHEME_* variables, then these options.
    Raising a guard above its default prints a size estimate before the run.
    """
    configure_logging(verbose)
    try:
        ctx.obj = Config.resolve(data_dir=str(data_dir) if data_dir is not None else None,
                                 seed=seed, workers=workers, max_oracle_n=max_oracle_n,
                                 max_diameter_n=max_diameter_n)
    except ValueError as error:
        console.print(f"[red]❌ Error:[/] Invalid settings: {escape(str(error))}")
        raise typer.Exit(EXIT_UNSUPPORTED)


if __name__ == "__main__":
    app()
