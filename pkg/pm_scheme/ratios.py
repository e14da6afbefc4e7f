"""
Merging two parts of a relation and the ratios that merging predicts.

The merge constant in its usual printed form is kept verbatim as ``printed_constant``; every
law is checked against the valency ratio, which the oracle confirms by counting spheres.
"""
from typing import List, Optional, Tuple, Union

import structlog
from pydantic import BaseModel, ConfigDict
from sympy import Rational

from pm_scheme.errors import HypothesisError, UnsupportedError
from pm_scheme.matchings import sphere
from pm_scheme.partitions import Partition, generate_partitions
from pm_scheme.spectra import family_polynomials, family_second_eig, phi_n11, valency
from pm_scheme.symfunc import catalog_prefixes
from pm_scheme.tables import EigTable, gap_report

logger = structlog.get_logger()

UNDEFINED = "undefined"

RatioValue = Union[Rational, str]


class MergeSpec(BaseModel):
    """Merge parts i and j (1-based, i < j) of μ into one part μ_i + μ_j."""
    model_config = ConfigDict(frozen=True)

    mu: Partition
    i: int
    j: int

    def model_post_init(self, __context):
        if not 1 <= self.i < self.j <= self.mu.length:
            raise ValueError(f"Merge indices must satisfy 1 ≤ i < j ≤ {self.mu.length}, got ({self.i}, {self.j})")

    @property
    def mu_i(self) -> int:
        return self.mu.part(self.i)

    @property
    def mu_j(self) -> int:
        return self.mu.part(self.j)

    @property
    def merged(self) -> Partition:
        rest = [part for position, part in enumerate(self.mu.parts, start=1) if position not in (self.i, self.j)]
        return Partition(parts=tuple(sorted(rest + [self.mu_i + self.mu_j], reverse=True)))

    @property
    def n_i(self) -> int:
        return self.mu.multiplicities()[self.mu_i]

    @property
    def n_j(self) -> int:
        return self.mu.multiplicities()[self.mu_j]

    @property
    def m(self) -> int:
        return self.merged.multiplicities()[self.mu_i + self.mu_j]

    def __str__(self) -> str:
        return f"{self.mu} → {self.merged}"


def merge_spec(mu: Partition, i: int, j: int) -> MergeSpec:
    first, second = sorted((i, j))
    return MergeSpec(mu=mu, i=first, j=second)


def admissible_merges(mu: Partition) -> List[MergeSpec]:
    """Every index pair whose parts are both at least 2."""
    big = [position for position, part in enumerate(mu.parts, start=1) if part >= 2]
    return [MergeSpec(mu=mu, i=i, j=j) for index, i in enumerate(big) for j in big[index + 1:]]


def printed_constant(spec: MergeSpec) -> Rational:
    """n_i(n_i−1)μ_i/(2m) for equal parts, n_i n_j μ_i μ_j/(m(μ_i+μ_j)) otherwise.

    Raises:
        HypothesisError: If either merged part is 1
    """
    if spec.mu_i < 2 or spec.mu_j < 2:
        raise HypothesisError(f"Merging {spec} uses a part of size 1", condition="μ_i, μ_j > 1")
    if spec.mu_i == spec.mu_j:
        return Rational(spec.n_i * (spec.n_i - 1) * spec.mu_i, 2 * spec.m)
    return Rational(spec.n_i * spec.n_j * spec.mu_i * spec.mu_j, spec.m * (spec.mu_i + spec.mu_j))


def valency_ratio(spec: MergeSpec) -> Rational:
    return Rational(valency(spec.merged), valency(spec.mu))


def oracle_valency_ratio(spec: MergeSpec, max_n: int = 8) -> Rational:
    """The valency ratio from sphere sizes counted by generating every neighbour of the base matching."""
    if spec.mu.n > max_n:
        raise UnsupportedError(f"Sphere counts are limited to n ≤ {max_n}, got {spec.mu.n}", limit=max_n)
    merged = sum(1 for _ in sphere(spec.merged))
    original = sum(1 for _ in sphere(spec.mu))
    return Rational(merged, original)


def _tau_hypothesis(spec: MergeSpec) -> Optional[str]:
    if spec.mu.ones == 0:
        return "μ_ℓ = 1"
    if spec.mu_i == 1 or spec.mu_j == 1:
        return "i, j < ℓ"
    return None


def tau_ratio(spec: MergeSpec) -> RatioValue:
    """φ^[n−1,1] of the merged relation over that of μ, or "undefined" on a zero denominator.

    Raises:
        HypothesisError: If μ has no part 1 or a merged part is one of its trailing 1s
    """
    condition = _tau_hypothesis(spec)
    if condition is not None:
        raise HypothesisError(f"The near-row ratio for {spec} needs {condition}", condition=condition)
    denominator = phi_n11(spec.mu)
    if denominator == 0:
        return UNDEFINED
    return Rational(phi_n11(spec.merged), denominator)


class GapRatioReport(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    spec: MergeSpec
    source: str
    gap: int
    merged_gap: int
    gap_ratio: Rational
    valency_ratio: Rational
    tau_ratio: Optional[RatioValue] = None
    printed_constant: Rational

    @property
    def c_factor(self) -> Rational:
        return self.valency_ratio / self.printed_constant

    @property
    def consistent(self) -> bool:
        if self.gap_ratio != self.valency_ratio:
            return False
        return self.tau_ratio is None or self.tau_ratio == self.valency_ratio


def _family_gap(mu: Partition) -> Optional[int]:
    prefix = Partition(parts=tuple(part for part in mu.parts if part > 1))
    if prefix not in catalog_prefixes() or mu.n < family_polynomials(prefix).threshold:
        return None
    _, gap = family_second_eig(prefix, mu.n)
    return gap


def gap_ratio_report(spec: MergeSpec, table: Optional[EigTable] = None) -> GapRatioReport:
    """Gap ratio next to the valency, near-row and printed ratios.

    Gaps come from the table when one is given, otherwise from the catalog closed forms.

    Raises:
        UnsupportedError: If neither source has both gaps
        IncompleteTableError: If a needed table column has absent cells
    """
    if table is not None:
        if table.n != spec.mu.n:
            raise ValueError(f"Table n={table.n} does not match {spec.mu}")
        gaps: Tuple[Optional[int], Optional[int]] = (gap_report(table, spec.mu).gap,
                                                     gap_report(table, spec.merged).gap)
        source = "table"
    else:
        gaps = (_family_gap(spec.mu), _family_gap(spec.merged))
        source = "closed-form"
    if gaps[0] is None or gaps[1] is None:
        raise UnsupportedError(f"No gap is available for {spec} without a table")
    gap, merged_gap = gaps
    tau = tau_ratio(spec) if _tau_hypothesis(spec) is None else None
    report = GapRatioReport(spec=spec, source=source, gap=gap, merged_gap=merged_gap,
                            gap_ratio=Rational(merged_gap, gap), valency_ratio=valency_ratio(spec),
                            tau_ratio=tau, printed_constant=printed_constant(spec))
    logger.debug("Gap ratio", merge=str(spec), gap_ratio=str(report.gap_ratio),
                 valency_ratio=str(report.valency_ratio), consistent=report.consistent)
    return report


class MergeAudit(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    spec: MergeSpec
    valency_ratio: Rational
    tau_ratio: RatioValue
    printed_constant: Rational

    @property
    def agrees(self) -> bool:
        return self.tau_ratio == self.valency_ratio


def audit_merges(n: int) -> List[MergeAudit]:
    """valency_ratio against tau_ratio for every admissible merge of every μ ⊢ n ending in a 1."""
    audits = []
    for mu in generate_partitions(n):
        if mu.ones == 0:
            continue
        for spec in admissible_merges(mu):
            audits.append(MergeAudit(spec=spec, valency_ratio=valency_ratio(spec), tau_ratio=tau_ratio(spec),
                                     printed_constant=printed_constant(spec)))
    logger.info("Merges audited", n=n, merges=len(audits), failures=sum(1 for audit in audits if not audit.agrees))
    return audits
