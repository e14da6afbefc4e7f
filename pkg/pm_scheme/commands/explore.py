"""
Exploration commands for pm-scheme: spectral gaps, diameters, interpolation and scans.
"""
import re
from typing import List, Optional, Tuple

import structlog
import typer
from typing_extensions import Annotated

from pm_scheme.commands.common import (
    cli_errors,
    console_service,
    get_config,
    oracle_table,
    parse_partition,
    progress_tracker,
    warn_above_diameter_default,
)
from pm_scheme.errors import PartitionError, ThresholdError, UnsupportedError
from pm_scheme.matchings import DiameterResult, diameter as bfs_diameter
from pm_scheme.partitions import Partition, generate_partitions
from pm_scheme.spectra import (
    FamilySpec,
    family_polynomials,
    family_second_eig,
    hook_gap,
    near_full_cycle_eig,
    valency,
)
from pm_scheme.symfunc import catalog_prefixes, fit_e_mu, format_expr
from pm_scheme.tables import gap_report, smallest_gap

logger = structlog.get_logger()

_RANGE = re.compile(r"^(\d+)\s*(?:\.\.|-)\s*(\d+)$")


def _relation_at(mu: Partition, n: Optional[int]) -> Partition:
    """μ itself, or μ padded with parts 1 up to size n."""
    if n is None or n == mu.n:
        return mu
    if n < mu.n:
        raise PartitionError(f"{mu} is a partition of {mu.n}, larger than n={n}", token=str(mu))
    return Partition(parts=mu.parts + (1,) * (n - mu.n))


def _hook_leg(mu: Partition) -> Optional[int]:
    if mu.length >= 2 and all(part == 1 for part in mu.parts[1:]) and mu.parts[0] >= 2:
        return mu.length - 1
    return None


def _closed_form_gap(mu: Partition, force: bool, oracle_n: int) -> Optional[Tuple[int, int, str]]:
    """(second eigenvalue, gap, label) from the closed forms, or None when the oracle should answer."""
    n = mu.n
    prefix = Partition(parts=tuple(part for part in mu.parts if part > 1))
    if prefix in catalog_prefixes():
        try:
            second, gap = family_second_eig(prefix, n, force=force)
        except ThresholdError:
            if n <= oracle_n:
                logger.info("Closed form below its proven range, using the oracle", prefix=str(prefix), n=n)
                return None
            raise
        below = n < family_polynomials(prefix).threshold
        label = f"family {prefix}" + (" (forced below the proven range, not claimed to be a gap)" if below else "")
        return second, gap, label
    leg = _hook_leg(mu)
    if leg is not None and leg <= n - 2:
        gap = hook_gap(n, leg)
        return valency(mu) - gap, gap, "hook product"
    if n >= 3 and mu == Partition.of(n - 1, 1):
        second, gap = near_full_cycle_eig(n)
        return second, gap, "near-full cycle"
    return None


def gap(
    ctx: typer.Context,
    mu: Annotated[str, typer.Option("--mu", help="Relation, e.g. \"[2,1^4]\"")],
    n: Annotated[Optional[int], typer.Option("--n", help="Pad the relation with parts 1 up to this size")] = None,
    force: Annotated[bool, typer.Option("--force", help="Evaluate a family closed form below its proven range")] = False,
):
    """
    Spectral gap of one relation: closed forms first, the oracle table up to the guard otherwise.

    [bold]Examples:[/]

    • [cyan]pm-scheme gap --mu "[2,1^4]" --n 6[/] - Transposition family, gap 11
    • [cyan]pm-scheme gap --mu "[3,2]" --n 6 --force[/] - Closed form below its proven range
    """
    config = get_config(ctx)
    with cli_errors():
        relation = _relation_at(parse_partition(mu), n)
        size = relation.n
        if size < 2 or relation.parts == (1,) * size:
            raise UnsupportedError(f"The identity relation {relation} has no spectral gap", limit=2)
        found = _closed_form_gap(relation, force, config.max_oracle_n)
        if found is None:
            report = gap_report(oracle_table(config, size, progress_tracker()), relation)
            found = (report.second_eig, report.gap, "oracle table")

    second, value, label = found
    console_service.print(f"[bold]{value}[/]")
    console_service.print(f"[dim]gap of {relation} at n={size}: valency {valency(relation)}, "
                          f"second eigenvalue {second}, from {label}[/]")


def _print_diameter(result: DiameterResult):
    if result.connected:
        console_service.print(f"[bold]{result.diameter}[/]")
    else:
        console_service.print(f"[bold]disconnected[/] ({result.reachable} of {result.total} matchings reachable)")


def diameter(
    ctx: typer.Context,
    mu: Annotated[str, typer.Option("--mu", help="Relation, e.g. \"[2,1^3]\"")],
):
    """
    Diameter of the graph of one relation, by breadth-first search over all matchings.

    [bold]Examples:[/]

    • [cyan]pm-scheme diameter --mu "[2,1^3]"[/] - The flip graph at n=5, diameter 4
    """
    config = get_config(ctx)
    with cli_errors():
        relation = parse_partition(mu)
        if relation.n <= config.max_diameter_n:
            warn_above_diameter_default(relation.n)
        tracker = progress_tracker()
        tracker.start_progress(f"Searching {relation}")
        try:
            result = bfs_diameter(relation, max_n=config.max_diameter_n, progress_callback=tracker.create_callback())
        finally:
            tracker.stop_progress()
    _print_diameter(result)


def _parse_range(text: str) -> List[int]:
    match = _RANGE.match(text.strip())
    if not match:
        raise PartitionError(f"Expected a range such as 5..8, got '{text}'", token=text)
    low, high = int(match.group(1)), int(match.group(2))
    if low > high:
        raise PartitionError(f"Range {text} is empty", token=text)
    return list(range(low, high + 1))


def fit(
    ctx: typer.Context,
    prefix: Annotated[str, typer.Option("--prefix", help="Non-unit parts of the family, e.g. 3,2")],
    n_range: Annotated[str, typer.Option("--n-range", help="Oracle tables to fit against, e.g. 5..8")],
    held_out: Annotated[Optional[int], typer.Option("--held-out", help="Check the fit against this n")] = None,
):
    """
    Interpolate the symmetric function of a family from oracle columns.

    [bold]Examples:[/]

    • [cyan]pm-scheme fit --prefix 3,2 --n-range 5..8[/]
    • [cyan]pm-scheme fit --prefix 2 --n-range 3..4 --held-out 5[/]
    """
    config = get_config(ctx)
    with cli_errors():
        family = _family(prefix)
        sizes = _parse_range(n_range)
        if held_out is not None and held_out < family.min_n:
            raise UnsupportedError(f"Family {family.prefix} starts at n={family.min_n}, got {held_out}",
                                   limit=family.min_n)
        data = [_column(config, family, size) for size in sizes if size >= family.min_n]
        check = _column(config, family, held_out) if held_out is not None else None
        expr = fit_e_mu(family.prefix, data, held_out=check)

    console_service.print(format_expr(expr))
    if check is not None:
        console_service.note(f"held-out column n={held_out} reproduced exactly")


def _family(text: str) -> FamilySpec:
    prefix = parse_partition(text)
    if any(part < 2 for part in prefix.parts):
        raise PartitionError(f"A family prefix needs parts ≥ 2, got '{text}'", token=text)
    return FamilySpec(prefix=prefix)


def _column(config, family: FamilySpec, size: int):
    table = oracle_table(config, size, progress_tracker())
    return size, dict(zip(table.rows, table.complete_column(family.mu(size))))


def scan(
    ctx: typer.Context,
    n: Annotated[int, typer.Option("--n", help="Half the number of vertices")],
    diameters: Annotated[bool, typer.Option("--diameters", help="Also find the largest finite diameter")] = False,
):
    """
    Find the column with the smallest spectral gap, and optionally the largest diameter.

    [bold]Examples:[/]

    • [cyan]pm-scheme scan --n 6[/] - Smallest gap at [2,1,1,1,1]
    • [cyan]pm-scheme scan --n 5 --diameters[/]
    """
    config = get_config(ctx)
    with cli_errors():
        report = smallest_gap(oracle_table(config, n, progress_tracker()))
        results = []
        if diameters:
            if n > config.max_diameter_n:
                raise UnsupportedError(f"Diameters are limited to n ≤ {config.max_diameter_n}, got {n}",
                                       limit=config.max_diameter_n)
            warn_above_diameter_default(n)
            tracker = progress_tracker()
            relations = [mu for mu in sorted(generate_partitions(n)) if mu.parts != (1,) * n]
            tracker.start_progress(f"Diameters for n={n}", total=len(relations))
            try:
                for done, mu in enumerate(relations, start=1):
                    results.append(bfs_diameter(mu, max_n=config.max_diameter_n))
                    tracker.update_progress(completed=done, current=str(mu))
            finally:
                tracker.stop_progress()

    console_service.print(f"smallest gap at [bold]{report.mu}[/]: {report.gap} "
                          f"(second eigenvalue {report.second_eig})")
    if diameters:
        finite = [result for result in results if result.connected]
        if finite:
            widest = max(finite, key=lambda result: (result.diameter, result.mu))
            console_service.print(f"largest diameter at [bold]{widest.mu}[/]: {widest.diameter}")
        disconnected = [str(result.mu) for result in results if not result.connected]
        if disconnected:
            console_service.note(f"disconnected: {', '.join(disconnected)}")
