"""
Text renderings of EigTable: canonical CSV, JSON and a rich table for the terminal.

CSV and JSON output is byte-deterministic; both parse back to an equal EigTable.
"""
import csv
import io
import json
from typing import Any, Dict, List, Optional

from rich.table import Table

from pm_scheme.errors import PartitionError
from pm_scheme.partitions import Partition
from pm_scheme.tables import EigTable, Provenance

CORNER = "lambda\\mu"
DIM = "Dim"


def _cell(value: Optional[int]) -> str:
    return "" if value is None else str(value)


def to_csv(table: EigTable) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow([CORNER] + [str(mu) for mu in table.columns] + [DIM])
    for shape, row, dimension in zip(table.rows, table.values, table.dims):
        writer.writerow([str(shape)] + [_cell(value) for value in row] + [str(dimension)])
    return buffer.getvalue()


def from_csv(text: str, provenance: Provenance = Provenance.ORACLE) -> EigTable:
    """Parse canonical CSV; CSV carries no provenance so every column gets the one given."""
    records = list(csv.reader(io.StringIO(text)))
    if not records or records[0][0] != CORNER or records[0][-1] != DIM:
        raise PartitionError(f"CSV header must start with {CORNER} and end with {DIM}",
                             token=records[0][0] if records and records[0] else None)
    columns = [Partition.parse(cell) for cell in records[0][1:-1]]
    rows: List[Partition] = []
    values: List[List[Optional[int]]] = []
    dims: List[int] = []
    for record in records[1:]:
        if len(record) != len(columns) + 2:
            raise PartitionError(f"Row has {len(record)} cells, expected {len(columns) + 2}", token=record[0])
        rows.append(Partition.parse(record[0]))
        values.append([int(cell) if cell else None for cell in record[1:-1]])
        dims.append(int(record[-1]))
    n = columns[0].n if columns else 0
    return EigTable(n=n, columns=columns, rows=rows, values=values, dims=dims,
                    provenance={str(mu): provenance for mu in columns})


def to_json(table: EigTable) -> str:
    return json.dumps(to_document(table), indent=2) + "\n"


def to_document(table: EigTable) -> Dict[str, Any]:
    return {
        "n": table.n,
        "columns": [str(mu) for mu in table.columns],
        "rows": [str(shape) for shape in table.rows],
        "values": table.values,
        "dims": table.dims,
        "provenance": {key: table.provenance[key].value for key in (str(mu) for mu in table.columns)
                       if key in table.provenance},
    }


def from_document(document: Dict[str, Any]) -> EigTable:
    return EigTable(
        n=document["n"],
        columns=[Partition.parse(text) for text in document["columns"]],
        rows=[Partition.parse(text) for text in document["rows"]],
        values=document["values"],
        dims=document["dims"],
        provenance={key: Provenance(value) for key, value in document["provenance"].items()})


def from_json(text: str) -> EigTable:
    return from_document(json.loads(text))


def to_rich(table: EigTable) -> Table:
    """Rows and columns in canonical order; absent cells show as a dash."""
    complete = "" if table.is_complete else " (partial)"
    rendered = Table(title=f"Eigenvalues for n={table.n}{complete}", show_header=True, header_style="bold cyan")
    rendered.add_column(CORNER, style="green", no_wrap=True)
    for mu in table.columns:
        style = "dim" if table.provenance.get(str(mu)) == Provenance.INTERPOLATED else None
        rendered.add_column(str(mu), justify="right", style=style)
    rendered.add_column(DIM, justify="right", style="magenta")
    for shape, row, dimension in zip(table.rows, table.values, table.dims):
        rendered.add_row(str(shape), *["-" if value is None else str(value) for value in row], str(dimension))
    return rendered
