"""
Integer partitions and the symmetric-group data indexed by them.

Partitions play three roles in the scheme: relation labels (half-lengths of the cycles of a
union of two matchings), eigenspace labels (λ ⊢ n standing for the even shape 2λ ⊢ 2n) and
power-sum monomials. The canonical total order is lexicographic on part sequences; tables
list rows in descending and columns in ascending canonical order.
"""
import math
import re
from collections import Counter
from enum import Enum
from functools import lru_cache
from typing import Dict, Iterator, List, Tuple

from pydantic import BaseModel, ConfigDict, field_validator

from pm_scheme.errors import PartitionError, UnsupportedError

_TOKEN = re.compile(r"^(\d+)(?:\^(\d+))?$")


class Partition(BaseModel):
    """A weakly decreasing tuple of positive integers; the empty tuple is the partition of 0."""
    model_config = ConfigDict(frozen=True)

    parts: Tuple[int, ...] = ()

    @field_validator("parts")
    @classmethod
    def validate_parts(cls, parts: Tuple[int, ...]) -> Tuple[int, ...]:
        if any(part < 1 for part in parts):
            raise ValueError(f"Partition parts must be positive: {parts}")
        if any(a < b for a, b in zip(parts, parts[1:])):
            raise ValueError(f"Partition parts must be weakly decreasing: {parts}")
        return parts

    @classmethod
    def of(cls, *parts: int) -> 'Partition':
        return cls(parts=tuple(parts))

    @classmethod
    def parse(cls, text: str) -> 'Partition':
        """Parse the bracket grammar, e.g. ``[3,2,1]`` or ``[2,1^3]``.

        Args:
            text: Partition text; whitespace is ignored

        Returns:
            Partition: The parsed partition with exponents expanded

        Raises:
            PartitionError: If the text does not follow the grammar
        """
        compact = re.sub(r"\s+", "", text)
        if not (compact.startswith("[") and compact.endswith("]")):
            raise PartitionError(f"Partition must be enclosed in brackets: '{text}'", token=text)
        body = compact[1:-1]
        if not body:
            return cls()
        parts: List[int] = []
        for token in body.split(","):
            match = _TOKEN.match(token)
            if match is None:
                raise PartitionError(f"Invalid partition token '{token}' in '{text}'", token=token)
            value = int(match.group(1))
            repeat = int(match.group(2)) if match.group(2) is not None else 1
            if value < 1 or repeat < 1:
                raise PartitionError(f"Invalid partition token '{token}' in '{text}'", token=token)
            parts.extend([value] * repeat)
        if any(a < b for a, b in zip(parts, parts[1:])):
            raise PartitionError(f"Partition parts must be weakly decreasing: '{text}'", token=text)
        return cls(parts=tuple(parts))

    @property
    def n(self) -> int:
        return sum(self.parts)

    @property
    def length(self) -> int:
        return len(self.parts)

    @property
    def ones(self) -> int:
        """Number of parts equal to 1."""
        return self.parts.count(1)

    def multiplicities(self) -> Dict[int, int]:
        return dict(Counter(self.parts))

    def part(self, i: int) -> int:
        """1-based part access with zero padding."""
        return self.parts[i - 1] if 1 <= i <= len(self.parts) else 0

    def __str__(self) -> str:
        return "[" + ",".join(str(part) for part in self.parts) + "]"

    def __lt__(self, other: 'Partition') -> bool:
        return self.parts < other.parts

    def __le__(self, other: 'Partition') -> bool:
        return self.parts <= other.parts

    def __gt__(self, other: 'Partition') -> bool:
        return self.parts > other.parts

    def __ge__(self, other: 'Partition') -> bool:
        return self.parts >= other.parts


# Cycle types are partitions recording half-lengths of union cycles.
CycleType = Partition


class Dominance(str, Enum):
    GREATER = "greater"
    LESS = "less"
    EQUAL = "equal"
    INCOMPARABLE = "incomparable"


class ContentVector(BaseModel):
    """Contents j − i of the boxes of a doubled shape, in reading order."""
    model_config = ConfigDict(frozen=True)

    values: Tuple[int, ...]
    shape: Partition


def _partition_parts(n: int, largest: int) -> Iterator[Tuple[int, ...]]:
    if n == 0:
        yield ()
        return
    for head in range(min(n, largest), 0, -1):
        for tail in _partition_parts(n - head, head):
            yield (head,) + tail


@lru_cache(maxsize=None)
def _partitions_of(n: int) -> Tuple[Partition, ...]:
    return tuple(Partition.model_construct(parts=parts) for parts in _partition_parts(n, n))


def generate_partitions(n: int) -> List[Partition]:
    """All partitions of n in descending canonical order, [n] first and [1^n] last."""
    if n < 0:
        raise ValueError(f"Cannot partition a negative integer: {n}")
    return list(_partitions_of(n))


def dominance_compare(a: Partition, b: Partition) -> Dominance:
    if a.n != b.n:
        raise ValueError(f"Dominance needs partitions of the same n: {a} ⊢ {a.n}, {b} ⊢ {b.n}")
    if a == b:
        return Dominance.EQUAL
    a_ahead = b_ahead = False
    a_sum = b_sum = 0
    for i in range(1, max(a.length, b.length) + 1):
        a_sum += a.part(i)
        b_sum += b.part(i)
        if a_sum > b_sum:
            a_ahead = True
        elif b_sum > a_sum:
            b_ahead = True
    if a_ahead and b_ahead:
        return Dominance.INCOMPARABLE
    return Dominance.GREATER if a_ahead else Dominance.LESS


def double(shape: Partition) -> Partition:
    return Partition.model_construct(parts=tuple(2 * part for part in shape.parts))


def conjugate(shape: Partition) -> Partition:
    if not shape.parts:
        return shape
    return Partition.model_construct(
        parts=tuple(sum(1 for part in shape.parts if part > j) for j in range(shape.parts[0])))


def content(shape: Partition) -> ContentVector:
    """Contents of the Young tableau of 2λ, row by row from the top."""
    doubled = double(shape)
    values = tuple(j - i for i, row in enumerate(doubled.parts) for j in range(row))
    return ContentVector(values=values, shape=doubled)


def add_to_row(shape: Partition, i: int) -> Partition:
    """Add one unit to row i (1-based); i = length + 1 opens a new row.

    Raises:
        ValueError: If the result is not a partition
    """
    k = shape.length
    if i < 1 or i > k + 1:
        raise ValueError(f"Row index {i} out of range for {shape}")
    if 2 <= i <= k and shape.parts[i - 2] == shape.parts[i - 1]:
        raise ValueError(f"Row {i} of {shape} cannot grow: the row above has the same length")
    if i == k + 1:
        return Partition.model_construct(parts=shape.parts + (1,))
    parts = list(shape.parts)
    parts[i - 1] += 1
    return Partition.model_construct(parts=tuple(parts))


def successors(shape: Partition) -> List[Tuple[Partition, int]]:
    """Every partition of n + 1 obtained by growing one row, with the row index used."""
    grown = []
    for i in range(1, shape.length + 2):
        if 2 <= i <= shape.length and shape.parts[i - 2] == shape.parts[i - 1]:
            continue
        grown.append((add_to_row(shape, i), i))
    return grown


def double_factorial(k: int) -> int:
    return math.prod(range(k, 0, -2))


def hook_length_dimension(shape: Partition) -> int:
    """Number of standard Young tableaux of the shape, by the hook length formula."""
    columns = conjugate(shape).parts
    hooks = 1
    for i, row in enumerate(shape.parts):
        for j in range(row):
            hooks *= row - j + columns[j] - i - 1
    return math.factorial(shape.n) // hooks


@lru_cache(maxsize=None)
def dim_hook(shape: Partition) -> int:
    """Dimension f^{2λ} of the eigenspace indexed by λ."""
    return hook_length_dimension(double(shape))


def dim_frobenius(shape: Partition) -> int:
    """f^{2λ} from first-column hook lengths (Frobenius)."""
    doubled = double(shape).parts
    k = len(doubled)
    lengths = [doubled[i] + k - 1 - i for i in range(k)]
    numerator = math.factorial(2 * shape.n)
    for i in range(k):
        for j in range(i + 1, k):
            numerator *= lengths[i] - lengths[j]
    denominator = math.prod(math.factorial(length) for length in lengths)
    if numerator % denominator:
        raise ArithmeticError(f"Frobenius formula is not integral for {shape}")
    return numerator // denominator


@lru_cache(maxsize=None)
def _murnaghan_nakayama(shape: Tuple[int, ...], cycles: Tuple[int, ...]) -> int:
    if not cycles:
        return 0 if shape else 1
    r, rest = cycles[0], cycles[1:]
    k = len(shape)
    beads = [shape[i] + k - 1 - i for i in range(k)]
    occupied = set(beads)
    value = 0
    for bead in beads:
        target = bead - r
        if target < 0 or target in occupied:
            continue
        height = sum(1 for other in beads if target < other < bead)
        moved = sorted([other for other in beads if other != bead] + [target], reverse=True)
        smaller = tuple(part for part in (moved[i] - (k - 1 - i) for i in range(k)) if part > 0)
        value += (-1) ** height * _murnaghan_nakayama(smaller, rest)
    return value


def irr_char(shape: Partition, cycle_type: Partition) -> int:
    """Irreducible character χ^shape at a permutation of the given cycle type.

    Rim hooks are removed on the abacus: a rim hook of length r is a bead moved r
    positions down onto an empty position, with sign given by the beads it passes.
    """
    if shape.n != cycle_type.n:
        raise PartitionError(
            f"Character needs shape and cycle type of the same size: {shape}, {cycle_type}")
    return _murnaghan_nakayama(shape.parts, cycle_type.parts)


def small_dimension_threshold(n: int) -> int:
    return math.comb(2 * n, 3) - math.comb(2 * n, 2)


def small_dimension_shapes(n: int) -> List[Partition]:
    """Partitions of 2n whose irreducible dimension is at most C(2n,3) − C(2n,2)."""
    if n < 7:
        raise UnsupportedError(f"The small-dimension classification needs n ≥ 7, got {n}", limit=7)
    threshold = small_dimension_threshold(n)
    return [shape for shape in generate_partitions(2 * n) if hook_length_dimension(shape) <= threshold]


def listed_small_dimension_shapes(n: int) -> List[Partition]:
    """The ten classified shapes, in descending canonical order."""
    m = 2 * n
    shapes = [
        [m], [1] * m, [m - 1, 1], [2] + [1] * (m - 2), [m - 2, 2],
        [2, 2] + [1] * (m - 4), [m - 2, 1, 1], [3] + [1] * (m - 3), [m - 3, 3],
        [2, 2, 2] + [1] * (m - 6),
    ]
    return sorted((Partition(parts=tuple(parts)) for parts in shapes), reverse=True)
