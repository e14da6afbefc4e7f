"""
Closed-form eigenvalues, valencies, gaps, thresholds and bound checks.

Everything here is exact: irrational comparisons are decided by squaring both sides.
"""
import math
from concurrent.futures import ProcessPoolExecutor
from itertools import permutations, product
from typing import TYPE_CHECKING, Dict, List, Optional, Sequence, Tuple

import structlog
import sympy
from pydantic import BaseModel, ConfigDict, field_validator
from sympy import Poly, QQ, Rational

from pm_scheme.errors import ThresholdError, UnsupportedError
from pm_scheme.matchings import representative, translation
from pm_scheme.partitions import (
    Partition,
    dim_hook,
    double,
    double_factorial,
    generate_partitions,
    irr_char,
    small_dimension_threshold,
    successors,
)
from pm_scheme.symfunc import delta_eval, e_catalog, evaluate

if TYPE_CHECKING:
    from pm_scheme.tables import EigTable

logger = structlog.get_logger()

n_symbol = sympy.Symbol("n")

MAX_ZONAL_N = 5


class FamilySpec(BaseModel):
    """μ(n) = [prefix, 1^(n−|prefix|)] for a prefix of parts ≥ 2."""
    model_config = ConfigDict(frozen=True)

    prefix: Partition

    @field_validator("prefix")
    @classmethod
    def validate_prefix(cls, prefix: Partition) -> Partition:
        if not prefix.parts or any(part < 2 for part in prefix.parts):
            raise ValueError(f"A family prefix needs parts ≥ 2, got {prefix}")
        return prefix

    @property
    def min_n(self) -> int:
        return self.prefix.n

    def mu(self, n: int) -> Partition:
        if n < self.min_n:
            raise ValueError(f"Family {self.prefix} starts at n={self.min_n}, got {n}")
        return Partition(parts=self.prefix.parts + (1,) * (n - self.min_n))


class GapReport(BaseModel):
    n: int
    mu: Partition
    valency: int
    second_eig: int
    gap: int
    witness_rows: List[Partition]

    def model_post_init(self, __context):
        if self.gap != self.valency - self.second_eig:
            raise ValueError(f"Gap {self.gap} is not valency {self.valency} minus {self.second_eig}")
        if self.second_eig > self.valency:
            raise ValueError(f"Second eigenvalue {self.second_eig} exceeds valency {self.valency}")


def valency(mu: Partition) -> int:
    """v_μ = 2ⁿn! / Π_i (2μ_i)^{m_i} m_i!"""
    n = mu.n
    denominator = 1
    for part, count in mu.multiplicities().items():
        denominator *= (2 * part) ** count * math.factorial(count)
    return 2 ** n * math.factorial(n) // denominator


def phi_n11(mu: Partition) -> int:
    """Eigenvalue of A_μ on the [n−1,1] eigenspace."""
    n = mu.n
    if n < 2:
        raise ValueError("The [n−1,1] eigenspace needs n ≥ 2")
    numerator = valency(mu) * ((2 * n - 1) * mu.ones - n)
    denominator = 2 * n * (n - 1)
    if numerator % denominator:
        raise ArithmeticError(f"Near-row eigenvalue of {mu} is not an integer")
    return numerator // denominator


class ValencyExtremes(BaseModel):
    maximum: int
    argmax: Partition
    minimum: int
    argmin: Partition


def max_min_valency(n: int) -> ValencyExtremes:
    """Largest and smallest valency over μ ⊢ n, by a full scan."""
    if n < 2:
        raise ValueError("Valency extremes need n ≥ 2")
    shapes = generate_partitions(n)
    argmax = max(shapes, key=valency)
    argmin = min(shapes, key=valency)
    if valency(argmax) != double_factorial(2 * n - 2):
        raise ArithmeticError(f"Largest valency at n={n} is not (2n−2)!!")
    return ValencyExtremes(maximum=valency(argmax), argmax=argmax, minimum=valency(argmin), argmin=argmin)


_Q = 2 * n_symbol ** 5 - 30 * n_symbol ** 4 + 165 * n_symbol ** 3 - 405 * n_symbol ** 2 + 418 * n_symbol - 120

# prefix: (smallest n the closed form is proved for, second eigenvalue, gap)
_FAMILIES: Dict[Tuple[int, ...], Tuple[int, sympy.Expr, sympy.Expr]] = {
    (2,): (3, n_symbol ** 2 - 3 * n_symbol + 1, 2 * n_symbol - 1),
    (3,): (5,
           Rational(4, 3) * n_symbol ** 3 - 8 * n_symbol ** 2 + Rational(38, 3) * n_symbol - 4,
           4 * n_symbol ** 2 - 10 * n_symbol + 4),
    (2, 2): (6,
             Rational(1, 2) * n_symbol ** 4 - 5 * n_symbol ** 3 + Rational(33, 2) * n_symbol ** 2
             - 20 * n_symbol + 6,
             2 * n_symbol ** 3 - 11 * n_symbol ** 2 + 17 * n_symbol - 6),
    (4,): (6,
           2 * n_symbol ** 4 - 20 * n_symbol ** 3 + 66 * n_symbol ** 2 - 80 * n_symbol + 24,
           8 * n_symbol ** 3 - 44 * n_symbol ** 2 + 68 * n_symbol - 24),
    (3, 2): (7,
             Rational(2, 3) * _Q,
             Rational(1, 3) * (20 * n_symbol ** 4 - 190 * n_symbol ** 3 + 610 * n_symbol ** 2
                               - 740 * n_symbol + 240)),
    (5,): (6,
           Rational(8, 5) * _Q,
           16 * n_symbol ** 4 - 152 * n_symbol ** 3 + 488 * n_symbol ** 2 - 592 * n_symbol + 192),
}


class FamilyPolynomials(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    prefix: Partition
    threshold: int
    second: Poly
    gap: Poly


def family_polynomials(prefix: Partition) -> FamilyPolynomials:
    if prefix.parts not in _FAMILIES:
        raise ValueError(f"No closed-form gap for family {prefix}")
    threshold, second, gap = _FAMILIES[prefix.parts]
    return FamilyPolynomials(prefix=prefix, threshold=threshold,
                             second=Poly(second, n_symbol, domain=QQ), gap=Poly(gap, n_symbol, domain=QQ))


def family_second_eig(prefix: Partition, n: int, force: bool = False) -> Tuple[int, int]:
    """Second-largest eigenvalue and spectral gap of A_μ(n) for a catalog family.

    Args:
        prefix: Non-unit parts of μ
        n: Size; must reach the family's proven range unless forced
        force: Evaluate the polynomials anyway; the result is then not claimed to be a gap

    Raises:
        ThresholdError: If n is below the proven range and force is not set
    """
    polynomials = family_polynomials(prefix)
    if n < prefix.n:
        raise ValueError(f"Family {prefix} needs n ≥ {prefix.n}, got {n}")
    if n < polynomials.threshold and not force:
        raise ThresholdError(
            f"The closed form for {prefix} is proved for n ≥ {polynomials.threshold}, got {n}",
            threshold=polynomials.threshold)
    second = polynomials.second.eval(n)
    gap = polynomials.gap.eval(n)
    if not (second.is_integer and gap.is_integer):
        raise ArithmeticError(f"Closed form for {prefix} is not integral at n={n}")
    return int(second), int(gap)


def family_gap_report(prefix: Partition, n: int) -> GapReport:
    second, gap = family_second_eig(prefix, n)
    mu = FamilySpec(prefix=prefix).mu(n)
    return GapReport(n=n, mu=mu, valency=valency(mu), second_eig=second, gap=gap,
                     witness_rows=[Partition.of(n - 1, 1)])


def near_full_cycle_eig(n: int) -> Tuple[int, int]:
    """Eigenvalue on [n−1,1] and gap for μ = [n−1,1]."""
    if n < 3:
        raise ValueError("μ = [n−1,1] needs n ≥ 3")
    second = 2 ** (n - 3) * math.factorial(n - 2)
    return second, second * (2 * n - 1)


def hook_gap(n: int, ell: int) -> int:
    """(2n−1)(2n−4)(2n−6)⋯(2ℓ+2) for the hook [n−ℓ, 1^ℓ], 1 ≤ ℓ ≤ n−2."""
    if not 1 <= ell <= n - 2:
        raise ValueError(f"Hook leg must satisfy 1 ≤ ℓ ≤ n−2, got ℓ={ell} for n={n}")
    value = (2 * n - 1) * math.prod(range(2 * n - 4, 2 * ell + 1, -2))
    mu = Partition(parts=(n - ell,) + (1,) * ell)
    if value != valency(mu) - phi_n11(mu):
        raise ArithmeticError(f"Hook product disagrees with valency − near-row eigenvalue for {mu}")
    return value


def trace_identity_check(n: int, mu: Partition, table: 'EigTable') -> bool:
    """v_μ(2n−1)!! = Σ_λ f^{2λ}(φ^λ_μ)², and Σ_λ f^{2λ}φ^λ_μ = 0 off the identity relation.

    Raises:
        IncompleteTableError: If the column has absent cells
    """
    if mu.n != n or table.n != n:
        raise ValueError(f"Relation {mu} and table n={table.n} do not match n={n}")
    column = table.complete_column(mu)
    dims = table.dims
    squares = sum(f * phi * phi for f, phi in zip(dims, column))
    if squares != valency(mu) * double_factorial(2 * n - 1):
        return False
    if mu.parts != (1,) * n and sum(f * phi for f, phi in zip(dims, column)) != 0:
        return False
    return True


class DegreeBound(BaseModel):
    """f^{2λ} ≤ factor · n^{3/2}, with a rational envelope for display."""
    mu: Partition
    n: int
    factor: int
    envelope: int

    def admits(self, dimension: int) -> bool:
        """Exact test of dimension ≤ factor · n^{3/2}."""
        return dimension * dimension <= self.factor * self.factor * self.n ** 3

    def __str__(self) -> str:
        return f"{self.factor}·{self.n}^(3/2) ≤ {self.envelope}"


def degbou(mu: Partition, n: int) -> DegreeBound:
    if mu.n != n:
        raise ValueError(f"{mu} is not a partition of {n}")
    product_term = 1
    for part, count in mu.multiplicities().items():
        product_term *= math.factorial(count) * (2 * part) ** count
    factor = 4 * product_term
    root = math.isqrt(n ** 3)
    if root * root < n ** 3:
        root += 1
    return DegreeBound(mu=mu, n=n, factor=factor, envelope=factor * root)


class DimensionBoundReport(BaseModel):
    mu: Partition
    bound: DegreeBound
    checked: List[Partition]
    violations: List[Partition]

    @property
    def holds(self) -> bool:
        return not self.violations


def dimension_bound_check(table: 'EigTable', mu: Partition) -> DimensionBoundReport:
    """Rows λ ∉ {[n],[n−1,1]} with |φ^λ_μ| ≥ |φ^[n−1,1]_μ| must have f^{2λ} within degbou."""
    n = table.n
    column = table.complete_column(mu)
    bound = degbou(mu, n)
    near_row = Partition.of(n - 1, 1)
    reference = abs(column[table.rows.index(near_row)])
    checked = []
    violations = []
    for shape, value, dimension in zip(table.rows, column, table.dims):
        if shape in (Partition.of(n), near_row) or abs(value) < reference:
            continue
        checked.append(shape)
        if not bound.admits(dimension):
            violations.append(shape)
    return DimensionBoundReport(mu=mu, bound=bound, checked=checked, violations=violations)


def threshold_inequality_holds(k: int, n: int) -> bool:
    """n(2n−1)(2n−5)/3 > 8n^{3/2}(n−k)(2k)!!, decided exactly."""
    left = n * (2 * n - 1) * (2 * n - 5)
    if left <= 0:
        return False
    right = n - k
    if right <= 0:
        return True
    return left * left > 9 * 64 * n ** 3 * right * right * double_factorial(2 * k) ** 2


def threshold_n(k: int) -> int:
    """Smallest n > 2k satisfying threshold_inequality_holds, by doubling then bisection."""
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    low = 2 * k
    high = 2 * k + 1
    while not threshold_inequality_holds(k, high):
        low, high = high, 2 * high
    while high - low > 1:
        middle = (low + high) // 2
        if threshold_inequality_holds(k, middle):
            high = middle
        else:
            low = middle
    logger.debug("Threshold found", k=k, n=high)
    return high


def sqrt_ratio_holds(n: int) -> bool:
    """(2n−1)!!/(2n)!! < 1/√(n+1), squared."""
    odd = double_factorial(2 * n - 1)
    even = double_factorial(2 * n)
    return odd * odd * (n + 1) < even * even


def sqrt_ratio_scan(max_n: int, start: int = 2) -> Optional[int]:
    """First n in [start, max_n] where sqrt_ratio_holds fails, or None."""
    odd_squared = double_factorial(2 * start - 1) ** 2
    even_squared = double_factorial(2 * start) ** 2
    for n in range(start, max_n + 1):
        if n > start:
            odd_squared *= (2 * n - 1) ** 2
            even_squared *= (2 * n) ** 2
        if odd_squared * (n + 1) >= even_squared:
            return n
    return None


def small_dim_eigenspaces(n: int) -> List[Partition]:
    """λ ⊢ n whose eigenspace dimension is below C(2n,3) − C(2n,2)."""
    if n < 7:
        raise UnsupportedError(f"The small-dimension classification needs n ≥ 7, got {n}", limit=7)
    threshold = small_dimension_threshold(n)
    return [shape for shape in generate_partitions(n) if dim_hook(shape) < threshold]


def _hyperoctahedral(n: int):
    for order in permutations(range(n)):
        for flips in product((0, 1), repeat=n):
            h = [0] * (2 * n)
            for pair, target in enumerate(order):
                h[2 * pair] = 2 * target + flips[pair]
                h[2 * pair + 1] = 2 * target + 1 - flips[pair]
            yield h


def _permutation_cycle_type(sigma: Sequence[int]) -> Partition:
    seen = [False] * len(sigma)
    lengths = []
    for start in range(len(sigma)):
        if seen[start]:
            continue
        length = 0
        v = start
        while not seen[v]:
            seen[v] = True
            v = sigma[v]
            length += 1
        lengths.append(length)
    return Partition.model_construct(parts=tuple(sorted(lengths, reverse=True)))


def zonal_check(mu: Partition, shape: Partition) -> Rational:
    """φ^λ_μ as (v_μ/|H_n|) Σ_{h∈H_n} χ^{2λ}(x_μ h), with H_n the stabilizer of P0.

    Raises:
        UnsupportedError: If n exceeds 5
    """
    n = mu.n
    if shape.n != n:
        raise ValueError(f"{shape} and {mu} are partitions of different sizes")
    if n > MAX_ZONAL_N:
        raise UnsupportedError(f"Zonal sums are limited to n ≤ {MAX_ZONAL_N}, got {n}", limit=MAX_ZONAL_N,
                               estimate=f"{2 ** n * math.factorial(n):,} group elements")
    x = translation(representative(mu))
    doubled = double(shape)
    total = 0
    for h in _hyperoctahedral(n):
        total += irr_char(doubled, _permutation_cycle_type([x[v] for v in h]))
    return Rational(valency(mu) * total, 2 ** n * math.factorial(n))


class InductionVerdict(BaseModel):
    prefix: Partition
    n: int
    passed: bool
    rhs: int
    worst_shape: Optional[Partition] = None
    worst_row: Optional[int] = None
    slack: Optional[int] = None
    checked: int


def _induction_chunk(prefix_parts: Tuple[int, ...], shapes: Sequence[Tuple[int, Tuple[int, ...]]], rhs):
    expr = e_catalog(Partition.model_construct(parts=prefix_parts))
    worst = None
    checked = 0
    for position, parts in shapes:
        shape = Partition.model_construct(parts=parts)
        for _, i in successors(shape):
            slack = rhs - delta_eval(expr, shape, i)
            checked += 1
            candidate = (slack, position, i)
            if worst is None or candidate < worst:
                worst = candidate
    return worst, checked


def verify_induction_step(family: FamilySpec, n: int, workers: int = 1) -> InductionVerdict:
    """ΔE(λ) ≤ E([n,1]) − E([n−1,1]) for every λ ⊢ n other than [n] and every admissible row."""
    prefix = family.prefix
    if n < family.min_n:
        raise ValueError(f"Family {prefix} starts at n={family.min_n}, got {n}")
    if n < 2:
        raise ValueError("The induction step needs n ≥ 2")
    expr = e_catalog(prefix)
    rhs = evaluate(expr, Partition.of(n, 1)) - evaluate(expr, Partition.of(n - 1, 1))
    shapes = [(position, shape.parts) for position, shape in enumerate(generate_partitions(n))
              if shape.parts != (n,)]
    if workers > 1:
        size = math.ceil(len(shapes) / workers)
        chunks = [shapes[start:start + size] for start in range(0, len(shapes), size)]
        with ProcessPoolExecutor(max_workers=workers) as executor:
            results = list(executor.map(_induction_chunk, [prefix.parts] * len(chunks), chunks,
                                        [rhs] * len(chunks)))
    else:
        results = [_induction_chunk(prefix.parts, shapes, rhs)]
    checked = sum(count for _, count in results)
    worst = min(result for result, _ in results if result is not None)
    slack, position, row = worst
    verdict = InductionVerdict(
        prefix=prefix, n=n, passed=bool(slack >= 0), rhs=int(rhs),
        worst_shape=generate_partitions(n)[position], worst_row=row, slack=int(slack), checked=checked)
    logger.info("Induction step checked", prefix=str(prefix), n=n, passed=verdict.passed,
                slack=verdict.slack, checked=checked)
    return verdict
