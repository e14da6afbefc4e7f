"""
Verify subcommand for pm-scheme.

Each check prints a PASS/FAIL verdict and exits 0 on pass, 1 on fail, 2 when unsupported.
"""
import json
import random

import typer
from typing_extensions import Annotated

from pm_scheme.commands.common import (
    EXIT_FAIL,
    cli_errors,
    console_service,
    get_config,
    oracle_table,
    parse_partition,
    progress_tracker,
)
from pm_scheme.errors import PartitionError, UnsupportedError
from pm_scheme.matchings import intersection_numbers
from pm_scheme.ratios import audit_merges, oracle_valency_ratio
from pm_scheme.spectra import FamilySpec, dimension_bound_check, verify_induction_step
from pm_scheme.symfunc import catalog_prefixes
from pm_scheme.tables import (
    check_column_orthogonality,
    check_dimension_sum,
    check_scheme_axioms,
    check_trace_identity,
    verify_conjecture,
)

verify_app = typer.Typer(
    name="verify",
    help="✅ Check the theory against exact tables",
    rich_markup_mode="rich"
)

EXHAUSTIVE_AXIOM_N = 6
ORACLE_RATIO_N = 6

NOption = Annotated[int, typer.Option("--n", help="Half the number of vertices")]
JsonOption = Annotated[bool, typer.Option("--json", help="Print the verdict as JSON")]


def _finish(passed: bool, message: str, as_json: bool, details: dict):
    if as_json:
        typer.echo(json.dumps({"passed": passed, "message": message, **details}, indent=2))
    else:
        console_service.verdict(passed, message)
    if not passed:
        raise typer.Exit(EXIT_FAIL)


@verify_app.command()
def conjecture(ctx: typer.Context, n: NOption, as_json: JsonOption = False):
    """
    Check that every applicable column has its second-largest eigenvalue on the near-row eigenspace.

    [bold]Examples:[/]

    • [cyan]pm-scheme verify conjecture --n 7[/]
    """
    config = get_config(ctx)
    with cli_errors():
        verdict = verify_conjecture(oracle_table(config, n, progress_tracker()))

    if not as_json:
        for column in verdict.failures:
            rows = ", ".join(str(shape) for shape in column.second_largest_rows)
            console_service.print(f"  {column.mu}: second largest {column.second_largest} at {rows}")
    applicable = sum(1 for column in verdict.columns if column.applicable)
    _finish(verdict.overall, f"conjecture at n={n} over {applicable} applicable columns", as_json,
            {"n": n, "failures": [str(column.mu) for column in verdict.failures]})


@verify_app.command()
def trace(ctx: typer.Context, n: NOption, as_json: JsonOption = False):
    """
    Check the trace identity on every column, the dimension sum and column orthogonality.

    [bold]Examples:[/]

    • [cyan]pm-scheme verify trace --n 6[/]
    """
    config = get_config(ctx)
    with cli_errors():
        table = oracle_table(config, n, progress_tracker())
    failing = check_trace_identity(table)
    dimensions = check_dimension_sum(table)
    orthogonal = check_column_orthogonality(table)
    _finish(not failing and dimensions and orthogonal,
            f"trace identity, dimension sum and orthogonality at n={n}", as_json,
            {"n": n, "trace_failures": [str(mu) for mu in failing], "dimension_sum": dimensions,
             "orthogonality": orthogonal})


@verify_app.command()
def induction(
    ctx: typer.Context,
    family: Annotated[str, typer.Option("--family", help="Non-unit parts of the family, e.g. 3,2")],
    n: NOption,
    as_json: JsonOption = False,
):
    """
    Scan every eigenspace and admissible row for the induction step of a catalog family.

    [bold]Examples:[/]

    • [cyan]pm-scheme verify induction --family 3,2 --n 15[/]
    • [cyan]pm-scheme --workers 4 verify induction --family 5 --n 20[/]
    """
    config = get_config(ctx)
    with cli_errors():
        prefix = parse_partition(family)
        if prefix not in catalog_prefixes():
            known = ", ".join(str(item) for item in catalog_prefixes())
            raise PartitionError(f"No closed form for family {prefix}; known families: {known}", token=family)
        if n < prefix.n:
            raise UnsupportedError(f"Family {prefix} starts at n={prefix.n}, got {n}", limit=prefix.n)
        verdict = verify_induction_step(FamilySpec(prefix=prefix), n, workers=config.workers)

    if not as_json:
        console_service.print(f"  right side {verdict.rhs}, {verdict.checked} increments checked, "
                              f"smallest slack {verdict.slack} at {verdict.worst_shape} row {verdict.worst_row}")
    _finish(verdict.passed, f"induction step for {prefix} at n={n}", as_json,
            {"n": n, "family": str(prefix), "rhs": verdict.rhs, "slack": verdict.slack,
             "checked": verdict.checked})


@verify_app.command()
def ratios(ctx: typer.Context, n: NOption, as_json: JsonOption = False):
    """
    Check that merging two parts scales valency and near-row eigenvalue by the same ratio.

    [bold]Examples:[/]

    • [cyan]pm-scheme verify ratios --n 5[/]
    """
    get_config(ctx)
    with cli_errors():
        if n < 3:
            raise UnsupportedError(f"Merges with a trailing part 1 need n ≥ 3, got {n}", limit=3)
        audits = audit_merges(n)
        confirmed = [audit for audit in audits if n <= ORACLE_RATIO_N
                     and oracle_valency_ratio(audit.spec) == audit.valency_ratio]

    failures = [audit for audit in audits if not audit.agrees]
    if not as_json:
        for audit in failures:
            console_service.print(f"  {audit.spec}: valency ratio {audit.valency_ratio}, "
                                  f"near-row ratio {audit.tau_ratio}")
        factors = {audit.valency_ratio / audit.printed_constant for audit in audits}
        if factors:
            shown = ", ".join(str(factor) for factor in sorted(factors))
            console_service.note(f"the printed merge constant differs from the valency ratio by a factor of {shown}")
        if n <= ORACLE_RATIO_N:
            console_service.note(f"{len(confirmed)} of {len(audits)} valency ratios confirmed by sphere counts")
    passed = not failures and (n > ORACLE_RATIO_N or len(confirmed) == len(audits))
    _finish(passed, f"merge ratios at n={n} over {len(audits)} merges", as_json,
            {"n": n, "merges": len(audits), "failures": [str(audit.spec) for audit in failures]})


@verify_app.command("scheme-axioms")
def scheme_axioms(
    ctx: typer.Context,
    n: NOption,
    sample: Annotated[int, typer.Option("--sample", help="Relations sampled above n=6")] = 3,
    as_json: JsonOption = False,
):
    """
    Check φ_i·φ_j = Σ_k p^k_ij·φ_k on every eigenspace against counted intersection numbers.

    Exhaustive up to n=6; above that a seeded sample of relations is counted.

    [bold]Examples:[/]

    • [cyan]pm-scheme verify scheme-axioms --n 5[/]
    """
    config = get_config(ctx)
    with cli_errors():
        table = oracle_table(config, n, progress_tracker())
        rows = None
        if n > EXHAUSTIVE_AXIOM_N:
            rng = random.Random(config.seed)
            rows = rng.sample(table.columns, min(sample, len(table.columns)))
        tracker = progress_tracker()
        tracker.start_progress(f"Counting intersection numbers for n={n}")
        try:
            data = intersection_numbers(n, rows=rows, workers=config.workers,
                                        progress_callback=tracker.create_callback(), max_n=config.max_oracle_n)
        finally:
            tracker.stop_progress()
    passed = check_scheme_axioms(table, data)
    scope = "exhaustive" if rows is None else f"{len(rows)} sampled relations"
    _finish(passed, f"scheme axioms at n={n} ({scope})", as_json, {"n": n, "scope": scope})


@verify_app.command()
def degbou(ctx: typer.Context, n: NOption, as_json: JsonOption = False):
    """
    Check that large eigenvalues sit on eigenspaces within the dimension bound.

    [bold]Examples:[/]

    • [cyan]pm-scheme verify degbou --n 7[/]
    """
    config = get_config(ctx)
    with cli_errors():
        table = oracle_table(config, n, progress_tracker())
        reports = [dimension_bound_check(table, mu) for mu in table.columns]
    violations = [report for report in reports if not report.holds]
    if not as_json:
        for report in violations:
            shapes = ", ".join(str(shape) for shape in report.violations)
            console_service.print(f"  {report.mu}: {shapes} exceed {report.bound}")
    _finish(not violations, f"dimension bound at n={n} over {len(reports)} columns", as_json,
            {"n": n, "violations": [str(report.mu) for report in violations]})
