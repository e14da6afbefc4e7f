"""
Plumbing shared by the subcommands: the resolved Config, table sourcing with caching, and
the mapping from library exceptions onto exit codes.
"""
from contextlib import contextmanager
from enum import Enum
from typing import Iterator, Optional

import structlog
import typer
from rich.console import Console
from rich.markup import escape

from pm_scheme.config import DEFAULT_MAX_DIAMETER_N, DEFAULT_MAX_ORACLE_N, Config
from pm_scheme.console_service import RichConsoleService
from pm_scheme.errors import (
    AmbiguousRowAssignmentError,
    DegenerateCombinationError,
    IncompleteTableError,
    InconsistentDataError,
    PartitionError,
    UnderdeterminedSystemError,
    UnsupportedError,
)
from pm_scheme.matchings import total_matchings
from pm_scheme.partitions import Partition, generate_partitions
from pm_scheme.progress_tracker import ProgressTracker
from pm_scheme.table_cache import TableCache
from pm_scheme.tables import EigTable, build_table_formulas, build_table_oracle

logger = structlog.get_logger()

console_service = RichConsoleService()
status_service = RichConsoleService(Console(stderr=True))

EXIT_FAIL = 1
EXIT_UNSUPPORTED = 2
EXIT_AMBIGUOUS = 3

AUTO_ORACLE_N = 7


class TableSource(str, Enum):
    AUTO = "auto"
    ORACLE = "oracle"
    FORMULAS = "formulas"


def get_config(ctx: typer.Context) -> Config:
    if isinstance(ctx.obj, Config):
        return ctx.obj
    return Config.resolve()


def fail(message: str, code: int):
    console_service.print(f"[red]❌ Error:[/] {escape(message)}")
    raise typer.Exit(code)


@contextmanager
def cli_errors() -> Iterator[None]:
    """Map library exceptions onto the exit-code contract."""
    try:
        yield
    except PartitionError as error:
        logger.error("Could not parse input", token=error.token)
        token = f" (offending token: {error.token})" if error.token else ""
        fail(f"{error}{token}", EXIT_UNSUPPORTED)
    except UnsupportedError as error:
        logger.error("Request outside supported range", limit=error.limit)
        estimate = f" (estimated cost: {error.estimate})" if error.estimate else ""
        fail(f"{error}{estimate}", EXIT_UNSUPPORTED)
    except IncompleteTableError as error:
        fail(str(error), EXIT_UNSUPPORTED)
    except (AmbiguousRowAssignmentError, DegenerateCombinationError) as error:
        logger.error("Oracle could not assign eigenspaces", error=str(error))
        candidates = getattr(error, "candidates", None)
        suffix = f" (candidates: {', '.join(candidates)})" if candidates else ""
        fail(f"{error}{suffix}", EXIT_AMBIGUOUS)
    except (UnderdeterminedSystemError, InconsistentDataError) as error:
        fail(str(error), EXIT_FAIL)


def parse_partition(text: str) -> Partition:
    """Accept the bracket grammar or a bare comma list such as 3,2."""
    stripped = text.strip()
    if not stripped.startswith("["):
        stripped = f"[{stripped}]"
    return Partition.parse(stripped)


def oracle_table(config: Config, n: int, tracker: Optional[ProgressTracker] = None) -> EigTable:
    """The oracle table for n, from the cache when a matching entry exists."""
    if n < 2:
        raise UnsupportedError(f"Tables need n ≥ 2, got {n}", limit=2)
    if n > config.max_oracle_n:
        raise UnsupportedError(f"Oracle tables are limited to n ≤ {config.max_oracle_n}, got {n}",
                               limit=config.max_oracle_n,
                               estimate=oracle_estimate(n))
    cache = TableCache(config.data_dir)
    cached = cache.get(n, config.seed)
    if cached is not None:
        return cached
    if n > DEFAULT_MAX_ORACLE_N:
        status_service.note(f"n={n} is above the default oracle guard of {DEFAULT_MAX_ORACLE_N}: "
                            f"{oracle_estimate(n)}")
    callback = None
    if tracker is not None:
        tracker.start_progress(f"Counting intersection numbers for n={n}")
        callback = tracker.create_callback()
    try:
        table = build_table_oracle(n, seed=config.seed, retries=config.retries, workers=config.workers,
                                   max_n=config.max_oracle_n, progress_callback=callback)
    finally:
        if tracker is not None:
            tracker.stop_progress()
    cache.put(table, config.seed, config.max_oracle_n)
    return table


def oracle_estimate(n: int) -> str:
    relations = len(generate_partitions(n))
    return (f"about {relations * total_matchings(n):,} relation checks over {total_matchings(n):,} matchings, "
            f"{relations ** 3 * 8:,} bytes of intersection numbers")


def diameter_estimate(n: int) -> str:
    return f"{total_matchings(n):,} matchings, {total_matchings(n):,} bytes for the visited bitmap"


def warn_above_diameter_default(n: int):
    if n > DEFAULT_MAX_DIAMETER_N:
        status_service.note(f"n={n} is above the default diameter guard of {DEFAULT_MAX_DIAMETER_N}: "
                            f"{diameter_estimate(n)}")


def obtain_table(config: Config, n: int, source: TableSource = TableSource.AUTO,
                 tracker: Optional[ProgressTracker] = None) -> EigTable:
    if n < 2:
        raise UnsupportedError(f"Tables need n ≥ 2, got {n}", limit=2)
    if source == TableSource.FORMULAS or (source == TableSource.AUTO and n > AUTO_ORACLE_N):
        return build_table_formulas(n)
    return oracle_table(config, n, tracker)


def progress_tracker() -> ProgressTracker:
    """Progress goes to stderr so table text on stdout stays clean."""
    return ProgressTracker(console=Console(stderr=True))
