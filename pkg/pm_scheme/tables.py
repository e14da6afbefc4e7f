"""
Eigenvalue tables of the perfect matching scheme and the checks run against them.

Rows are eigenspaces λ ⊢ n in descending canonical order, columns are relations μ ⊢ n in
ascending canonical order.
"""
import random
from enum import Enum
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import structlog
import sympy
from pydantic import BaseModel, ConfigDict

from pm_scheme.errors import (
    AmbiguousRowAssignmentError,
    DegenerateCombinationError,
    IncompleteTableError,
)
from pm_scheme.matchings import IntersectionData, ProgressCallback, intersection_numbers
from pm_scheme.partitions import Partition, dim_hook, double_factorial, generate_partitions
from pm_scheme.spectra import GapReport, phi_n11, trace_identity_check, valency
from pm_scheme.symfunc import PowerSumExpr, e_catalog, catalog_prefixes, evaluate

logger = structlog.get_logger()

GENERATOR_START = 3


class Provenance(str, Enum):
    CLOSED_FORM = "closed-form"
    INTERPOLATED = "interpolated"
    ORACLE = "oracle"


class EigTable(BaseModel):
    """The matrix of eigenvalues φ^λ_μ with eigenspace dimensions f^{2λ}.

    Absent cells (formula-built tables) are None.
    """
    model_config = ConfigDict(frozen=True)

    n: int
    columns: List[Partition]
    rows: List[Partition]
    values: List[List[Optional[int]]]
    dims: List[int]
    provenance: Dict[str, Provenance]

    def model_post_init(self, __context):
        expected = generate_partitions(self.n)
        if self.rows != expected:
            raise ValueError(f"Rows must be the partitions of {self.n} in descending order")
        if self.columns != sorted(expected):
            raise ValueError(f"Columns must be the partitions of {self.n} in ascending order")
        if len(self.values) != len(self.rows) or any(len(row) != len(self.columns) for row in self.values):
            raise ValueError("Values must have one entry per row and column")
        if len(self.dims) != len(self.rows):
            raise ValueError("Dims must have one entry per row")

    def row_index(self, shape: Partition) -> int:
        return self.rows.index(shape)

    def column_index(self, mu: Partition) -> int:
        return self.columns.index(mu)

    def value(self, shape: Partition, mu: Partition) -> Optional[int]:
        return self.values[self.row_index(shape)][self.column_index(mu)]

    def column(self, mu: Partition) -> List[Optional[int]]:
        position = self.column_index(mu)
        return [row[position] for row in self.values]

    def complete_column(self, mu: Partition) -> List[int]:
        column = self.column(mu)
        if any(value is None for value in column):
            raise IncompleteTableError(f"Column {mu} of the n={self.n} table has absent cells")
        return column

    def is_column_complete(self, mu: Partition) -> bool:
        return all(value is not None for value in self.column(mu))

    @property
    def is_complete(self) -> bool:
        return all(value is not None for row in self.values for value in row)

    def require_complete(self):
        if not self.is_complete:
            missing = [str(mu) for mu in self.columns if not self.is_column_complete(mu)]
            raise IncompleteTableError(f"The n={self.n} table has incomplete columns: {', '.join(missing)}")


def _generator_sets(relations: Sequence[Partition]) -> List[List[Partition]]:
    """Non-identity relations by valency, three first, doubling until all are used."""
    ordered = sorted(relations[1:], key=lambda mu: (valency(mu), mu))
    sets = []
    size = GENERATOR_START
    while True:
        sets.append(ordered[:size])
        if size >= len(ordered):
            return sets
        size *= 2


def _merge(data: Optional[IntersectionData], more: IntersectionData) -> IntersectionData:
    if data is None:
        return more
    p = [[data.p[k][i] if data.p[k][i] is not None else more.p[k][i]
          for i in range(len(data.relations))] for k in range(len(data.relations))]
    return IntersectionData(n=data.n, relations=data.relations, reps=data.reps, p=p)


def _simple_roots(matrix: sympy.Matrix) -> Optional[List[int]]:
    """Integer eigenvalues of the matrix, or None when one is repeated."""
    x = sympy.Symbol("x")
    _, factors = sympy.factor_list(matrix.charpoly(x).as_expr(), x)
    roots = []
    for factor, multiplicity in factors:
        poly = sympy.Poly(factor, x)
        if poly.degree() != 1:
            raise ArithmeticError(f"Characteristic polynomial has a non-linear factor {factor}")
        if multiplicity > 1:
            return None
        a, b = poly.all_coeffs()
        root = sympy.Rational(-b, a)
        if not root.is_integer:
            raise ArithmeticError(f"Eigenvalue {root} is not an integer")
        roots.append(int(root))
    return roots


def _eigenvector_row(combination: sympy.Matrix, root: int) -> List[int]:
    kernel = (combination - root * sympy.eye(combination.rows)).nullspace()
    if len(kernel) != 1:
        raise ArithmeticError(f"Eigenvalue {root} has a {len(kernel)}-dimensional kernel")
    vector = kernel[0]
    if vector[0] == 0:
        raise ArithmeticError("Eigenvector vanishes on the identity relation")
    scaled = vector / vector[0]
    if not all(entry.is_integer for entry in scaled):
        raise ArithmeticError(f"Eigenvector for {root} is not integral after scaling")
    return [int(entry) for entry in scaled]


def _multiplicity(n: int, row: Sequence[int], valencies: Sequence[int]) -> int:
    total = sum(sympy.Rational(phi * phi, v) for phi, v in zip(row, valencies))
    value = sympy.Rational(double_factorial(2 * n - 1)) / total
    if not value.is_integer:
        raise ArithmeticError(f"Eigenspace multiplicity {value} is not an integer")
    return int(value)


def _tie_break_columns(n: int) -> List[Tuple[Partition, PowerSumExpr]]:
    columns = [(Partition(parts=(2,) + (1,) * (n - 2)), e_catalog(Partition.of(2)))]
    if n >= 3:
        columns.append((Partition(parts=(3,) + (1,) * (n - 3)), e_catalog(Partition.of(3))))
    return columns


def _assign_row(n: int, row: Sequence[int], relations: Sequence[Partition],
                multiplicity: int) -> Partition:
    candidates = [shape for shape in generate_partitions(n) if dim_hook(shape) == multiplicity]
    if len(candidates) > 1:
        for mu, expr in _tie_break_columns(n):
            observed = row[relations.index(mu)]
            candidates = [shape for shape in candidates if evaluate(expr, shape) == observed]
    if len(candidates) != 1:
        raise AmbiguousRowAssignmentError(
            f"Eigenvector with multiplicity {multiplicity} matches {len(candidates)} eigenspaces",
            candidates=[str(shape) for shape in candidates])
    return candidates[0]


def _recover_rows(n: int, data: IntersectionData, generators: Sequence[Partition],
                  rng: random.Random, retries: int) -> Optional[Dict[Partition, List[int]]]:
    relations = data.relations
    valencies = [valency(mu) for mu in relations]
    matrices = [sympy.Matrix(data.matrix(data.index(mu))) for mu in generators]
    for attempt in range(1, retries + 1):
        coefficients = [rng.randint(-9, 9) for _ in generators]
        combination = sympy.zeros(len(relations), len(relations))
        for c, matrix in zip(coefficients, matrices):
            combination += c * matrix
        roots = _simple_roots(combination)
        if roots is None:
            logger.warning("Repeated eigenvalue in random combination", n=n, generators=len(generators),
                           attempt=attempt)
            continue
        assigned: Dict[Partition, List[int]] = {}
        for root in roots:
            row = _eigenvector_row(combination, root)
            shape = _assign_row(n, row, relations, _multiplicity(n, row, valencies))
            if shape in assigned:
                raise AmbiguousRowAssignmentError(f"Two eigenvectors were assigned to {shape}",
                                                  candidates=[str(shape)])
            assigned[shape] = row
        return assigned
    return None


def build_table_oracle(n: int, seed: int = 1, retries: int = 8, workers: int = 1, max_n: int = 8,
                       progress_callback: Optional[ProgressCallback] = None) -> EigTable:
    """Recover the full eigenvalue table from counted intersection numbers.

    Args:
        n: Half the number of vertices
        seed: Seeds the random combinations of intersection matrices
        retries: Random combinations tried per generator set
        workers: Process count for intersection counting
        max_n: Resource guard passed on to intersection_numbers
        progress_callback: Called with (relation, done, total) while counting

    Raises:
        UnsupportedError: If n exceeds the guard
        DegenerateCombinationError: If every combination had a repeated eigenvalue
        AmbiguousRowAssignmentError: If an eigenvector matches several eigenspaces
    """
    if n < 2:
        raise ValueError(f"Oracle tables need n ≥ 2, got {n}")
    logger.info("Building oracle table", n=n, seed=seed)
    relations = sorted(generate_partitions(n))
    rng = random.Random(seed)
    data: Optional[IntersectionData] = None
    assigned = None
    for generators in _generator_sets(relations):
        fresh = [mu for mu in generators if data is None or data.p[0][data.index(mu)] is None]
        data = _merge(data, intersection_numbers(n, rows=fresh, workers=workers,
                                                 progress_callback=progress_callback, max_n=max_n))
        logger.debug("Trying generator set", n=n, generators=[str(mu) for mu in generators])
        assigned = _recover_rows(n, data, generators, rng, retries)
        if assigned is not None:
            break
    if assigned is None:
        raise DegenerateCombinationError(
            f"Every random combination at n={n} had a repeated eigenvalue after {retries} retries per set")

    rows = generate_partitions(n)
    table = EigTable(
        n=n, columns=relations, rows=rows,
        values=[assigned[shape] for shape in rows],
        dims=[dim_hook(shape) for shape in rows],
        provenance={str(mu): Provenance.ORACLE for mu in relations})
    logger.info("Oracle table built", n=n, generators=len(generators))
    return table


def _integral_cell(expr: PowerSumExpr, shape: Partition, mu: Partition) -> int:
    value = evaluate(expr, shape)
    if not value.is_integer:
        raise ArithmeticError(f"Closed form for column {mu} gives {value} on row {shape}, not an integer")
    return int(value)


def _family_prefix(mu: Partition) -> Partition:
    return Partition.model_construct(parts=tuple(part for part in mu.parts if part > 1))


def build_table_formulas(n: int, fitted: Optional[Mapping[Partition, PowerSumExpr]] = None) -> EigTable:
    """Fill what the closed forms reach; other cells stay None.

    Columns: the identity relation and every catalog family (plus fitted families, marked
    interpolated). Rows [n] and [n−1,1] are filled for every relation.
    A closed form that gives a non-integer cell raises ArithmeticError.
    """
    if n < 2:
        raise ValueError(f"Formula tables need n ≥ 2, got {n}")
    rows = generate_partitions(n)
    columns = sorted(rows)
    catalog = {prefix: e_catalog(prefix) for prefix in catalog_prefixes()}
    fitted = dict(fitted or {})
    full_row, near_row = Partition.of(n), Partition.of(n - 1, 1)

    values: List[List[Optional[int]]] = [[None] * len(columns) for _ in rows]
    provenance: Dict[str, Provenance] = {}
    for position, mu in enumerate(columns):
        prefix = _family_prefix(mu)
        expr = None
        if not prefix.parts:
            for row in values:
                row[position] = 1
            provenance[str(mu)] = Provenance.CLOSED_FORM
            continue
        if prefix in catalog:
            expr, kind = catalog[prefix], Provenance.CLOSED_FORM
        elif prefix in fitted:
            expr, kind = fitted[prefix], Provenance.INTERPOLATED
        if expr is not None:
            for r, shape in enumerate(rows):
                values[r][position] = _integral_cell(expr, shape, mu)
            provenance[str(mu)] = kind
            continue
        values[rows.index(full_row)][position] = valency(mu)
        values[rows.index(near_row)][position] = phi_n11(mu)
        provenance[str(mu)] = Provenance.CLOSED_FORM

    logger.info("Formula table built", n=n, complete_columns=sum(
        1 for position in range(len(columns)) if all(row[position] is not None for row in values)))
    return EigTable(n=n, columns=columns, rows=rows, values=values,
                    dims=[dim_hook(shape) for shape in rows], provenance=provenance)


def second_largest(table: EigTable, mu: Partition) -> Tuple[int, List[Partition]]:
    """Largest φ^λ_μ over λ ≠ [n], with every row attaining it."""
    column = table.complete_column(mu)
    pairs = [(shape, value) for shape, value in zip(table.rows, column) if shape != Partition.of(table.n)]
    best = max(value for _, value in pairs)
    return best, [shape for shape, value in pairs if value == best]


def second_largest_abs(table: EigTable, mu: Partition) -> Tuple[int, List[Partition]]:
    """Largest |φ^λ_μ| over λ ≠ [n], with every row attaining it."""
    column = table.complete_column(mu)
    pairs = [(shape, abs(value)) for shape, value in zip(table.rows, column) if shape != Partition.of(table.n)]
    best = max(value for _, value in pairs)
    return best, [shape for shape, value in pairs if value == best]


def conjecture_applies(mu: Partition) -> bool:
    """At least two parts of size 1, or μ = [n−1,1] with n ≠ 4."""
    n = mu.n
    return mu.ones >= 2 or (n >= 3 and mu == Partition.of(n - 1, 1) and n != 4)


class ColumnVerdict(BaseModel):
    mu: Partition
    applicable: bool
    second_largest: int
    second_largest_rows: List[Partition]
    conjecture_holds: bool


class ConjectureVerdict(BaseModel):
    n: int
    columns: List[ColumnVerdict]

    @property
    def overall(self) -> bool:
        return all(column.conjecture_holds for column in self.columns if column.applicable)

    @property
    def failures(self) -> List[ColumnVerdict]:
        return [column for column in self.columns if column.applicable and not column.conjecture_holds]


def verify_conjecture(table: EigTable) -> ConjectureVerdict:
    """For every applicable column, the second-largest eigenvalue sits on [n−1,1].

    Raises:
        IncompleteTableError: If any column has absent cells
    """
    table.require_complete()
    n = table.n
    near_row = Partition.of(n - 1, 1)
    verdicts = []
    for mu in table.columns:
        if mu.parts == (1,) * n:
            continue
        value, rows = second_largest(table, mu)
        verdicts.append(ColumnVerdict(mu=mu, applicable=conjecture_applies(mu), second_largest=value,
                                      second_largest_rows=rows, conjecture_holds=near_row in rows))
    result = ConjectureVerdict(n=n, columns=verdicts)
    logger.info("Conjecture checked", n=n, overall=result.overall,
                applicable=sum(1 for verdict in verdicts if verdict.applicable))
    return result


def derangement_spectrum(table: EigTable) -> List[int]:
    """Per-row sums over the columns without parts of size 1."""
    table.require_complete()
    positions = [position for position, mu in enumerate(table.columns) if mu.ones == 0]
    return [sum(row[position] for position in positions) for row in table.values]


def check_scheme_axioms(table: EigTable, data: IntersectionData,
                        pairs: Optional[Sequence[Tuple[int, int]]] = None) -> bool:
    """φ_i φ_j = Σ_k p^k_ij φ_k on every row, for counted i and all j (or the given pairs)."""
    table.require_complete()
    if data.relations != table.columns:
        raise ValueError("Intersection data and table index different relations")
    size = len(table.columns)
    if pairs is None:
        pairs = [(i, j) for i in data.computed_rows for j in range(size)]
    for shape, row in zip(table.rows, table.values):
        for i, j in pairs:
            expected = sum(data.p[k][i][j] * row[k] for k in range(size))
            if row[i] * row[j] != expected:
                logger.debug("Scheme axiom fails", row=str(shape), i=str(table.columns[i]), j=str(table.columns[j]))
                return False
    return True


def check_column_orthogonality(table: EigTable) -> bool:
    """Σ_λ f^{2λ} φ_i φ_j = (2n−1)!! v_i [i = j]."""
    table.require_complete()
    total = double_factorial(2 * table.n - 1)
    size = len(table.columns)
    for i in range(size):
        v = valency(table.columns[i])
        for j in range(i, size):
            inner = sum(f * row[i] * row[j] for f, row in zip(table.dims, table.values))
            if inner != (total * v if i == j else 0):
                return False
    return True


def check_dimension_sum(table: EigTable) -> bool:
    return sum(table.dims) == double_factorial(2 * table.n - 1)


def check_trace_identity(table: EigTable) -> List[Partition]:
    """Columns failing the trace identity (empty when all hold)."""
    return [mu for mu in table.columns if not trace_identity_check(table.n, mu, table)]


class CellMismatch(BaseModel):
    row: Partition
    column: Partition
    left: int
    right: int


class RouteAgreement(BaseModel):
    compared: int
    mismatches: List[CellMismatch]

    @property
    def agrees(self) -> bool:
        return not self.mismatches


def route_agreement(left: EigTable, right: EigTable) -> RouteAgreement:
    """Compare every cell present in both tables."""
    if left.n != right.n:
        raise ValueError(f"Tables for n={left.n} and n={right.n} cannot be compared")
    compared = 0
    mismatches = []
    for shape, left_row, right_row in zip(left.rows, left.values, right.values):
        for mu, a, b in zip(left.columns, left_row, right_row):
            if a is None or b is None:
                continue
            compared += 1
            if a != b:
                mismatches.append(CellMismatch(row=shape, column=mu, left=a, right=b))
    return RouteAgreement(compared=compared, mismatches=mismatches)


def gap_report(table: EigTable, mu: Partition) -> GapReport:
    value, rows = second_largest(table, mu)
    v = valency(mu)
    return GapReport(n=table.n, mu=mu, valency=v, second_eig=value, gap=v - value, witness_rows=rows)


def smallest_gap(table: EigTable) -> GapReport:
    """The non-identity column with the smallest spectral gap; ties go to the smaller relation."""
    table.require_complete()
    reports = [gap_report(table, mu) for mu in table.columns if mu.parts != (1,) * table.n]
    return min(reports, key=lambda report: (report.gap, report.mu))
