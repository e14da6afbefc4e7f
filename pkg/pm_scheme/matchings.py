"""
Brute-force oracle over the perfect matchings of K_2n.

Vertices are 0-based internally and 1-based in text. A matching is stored as its partner
tuple; hot loops work on raw tuples and only the public surface wraps them in Matching.
P0 is the base matching {0,1},{2,3},... and every sphere around an arbitrary matching X is
P0's sphere translated by a permutation carrying P0 onto X.
"""
import math
import random
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple

import structlog
from pydantic import BaseModel, ConfigDict, field_validator

from pm_scheme.errors import PartitionError, UnsupportedError
from pm_scheme.partitions import Partition, double_factorial, generate_partitions

logger = structlog.get_logger()

ProgressCallback = Callable[[str, int, int], None]

MAX_ENUMERATION_N = 9

Partners = Tuple[int, ...]


class Matching(BaseModel):
    """A perfect matching of K_2n given by its fixed-point-free involution on 0..2n−1."""
    model_config = ConfigDict(frozen=True)

    partner: Partners

    @field_validator("partner")
    @classmethod
    def validate_partner(cls, partner: Partners) -> Partners:
        size = len(partner)
        if size == 0 or size % 2:
            raise ValueError(f"A perfect matching needs an even, positive number of vertices, got {size}")
        for vertex, mate in enumerate(partner):
            if not 0 <= mate < size or mate == vertex or partner[mate] != vertex:
                raise ValueError(f"Vertex {vertex + 1} is not properly matched")
        return partner

    @classmethod
    def from_edges(cls, edges: Sequence[Tuple[int, int]]) -> 'Matching':
        partner = [-1] * (2 * len(edges))
        for a, b in edges:
            if max(a, b) >= len(partner) or partner[a] != -1 or partner[b] != -1:
                raise ValueError(f"Edges do not form a perfect matching: {list(edges)}")
            partner[a], partner[b] = b, a
        return cls(partner=tuple(partner))

    @classmethod
    def parse(cls, text: str) -> 'Matching':
        """Parse ``"a1 a2 | a3 a4 | ..."`` with 1-based vertices."""
        edges = []
        for block in text.split("|"):
            tokens = block.split()
            if len(tokens) != 2 or not all(token.isdigit() for token in tokens):
                raise PartitionError(f"Invalid matching pair '{block.strip()}' in '{text}'", token=block.strip())
            a, b = int(tokens[0]) - 1, int(tokens[1]) - 1
            if a < 0 or b < 0:
                raise PartitionError(f"Vertices are numbered from 1: '{block.strip()}'", token=block.strip())
            edges.append((a, b))
        try:
            return cls.from_edges(edges)
        except ValueError as error:
            raise PartitionError(str(error), token=text) from error

    @property
    def n(self) -> int:
        return len(self.partner) // 2

    def edges(self) -> List[Tuple[int, int]]:
        """Edges as (min, max), sorted by min."""
        return [(v, mate) for v, mate in enumerate(self.partner) if v < mate]

    def __str__(self) -> str:
        return " | ".join(f"{a + 1} {b + 1}" for a, b in self.edges())


def base_matching(n: int) -> Matching:
    return Matching.model_construct(partner=_base_partners(n))


def _base_partners(n: int) -> Partners:
    return tuple(v ^ 1 for v in range(2 * n))


def total_matchings(n: int) -> int:
    return double_factorial(2 * n - 1)


def _pairings(partner: List[int], remaining: List[int]) -> Iterator[Partners]:
    if not remaining:
        yield tuple(partner)
        return
    first, rest = remaining[0], remaining[1:]
    for index, mate in enumerate(rest):
        partner[first], partner[mate] = mate, first
        yield from _pairings(partner, rest[:index] + rest[index + 1:])


def enumerate_matchings(n: int) -> Iterator[Matching]:
    """Every matching of K_2n once, pairing the smallest unmatched vertex first; this is rank order."""
    if not 1 <= n <= MAX_ENUMERATION_N:
        raise UnsupportedError(
            f"Enumeration supports 1 ≤ n ≤ {MAX_ENUMERATION_N}, got {n}", limit=MAX_ENUMERATION_N,
            estimate=f"{total_matchings(max(n, 1)):,} matchings")
    for partner in _pairings([0] * (2 * n), list(range(2 * n))):
        yield Matching.model_construct(partner=partner)


def _cycle_type(p: Partners, q: Partners) -> Tuple[int, ...]:
    seen = [False] * len(p)
    halves = []
    for start in range(len(p)):
        if seen[start]:
            continue
        length = 0
        v = start
        while not seen[v]:
            seen[v] = True
            w = p[v]
            seen[w] = True
            length += 1
            v = q[w]
        halves.append(length)
    halves.sort(reverse=True)
    return tuple(halves)


def relation(p: Matching, q: Matching) -> Partition:
    """Half-lengths of the cycles of P ∪ Q; a shared edge is a part 1."""
    if p.n != q.n:
        raise ValueError(f"Matchings of different sizes: {p.n} and {q.n}")
    return Partition.model_construct(parts=_cycle_type(p.partner, q.partner))


def _rank(partner: Partners) -> int:
    remaining = list(range(len(partner)))
    value = 0
    while remaining:
        first = remaining.pop(0)
        index = remaining.index(partner[first])
        remaining.pop(index)
        value += index * double_factorial(len(remaining) - 1)
    return value


def rank(matching: Matching) -> int:
    """Position of the matching in enumeration order, via the mixed-radix partner code."""
    return _rank(matching.partner)


def _unrank(n: int, value: int) -> Partners:
    partner = [0] * (2 * n)
    remaining = list(range(2 * n))
    while remaining:
        first = remaining.pop(0)
        place = double_factorial(len(remaining) - 2)
        index, value = divmod(value, place)
        mate = remaining.pop(index)
        partner[first], partner[mate] = mate, first
    return tuple(partner)


def unrank(n: int, value: int) -> Matching:
    if not 0 <= value < total_matchings(n):
        raise ValueError(f"Rank {value} out of range for n={n}")
    return Matching.model_construct(partner=_unrank(n, value))


def _translate(sigma: Sequence[int], partner: Partners) -> Partners:
    image = [0] * len(partner)
    for v, mate in enumerate(partner):
        image[sigma[v]] = sigma[mate]
    return tuple(image)


def apply_permutation(sigma: Sequence[int], matching: Matching) -> Matching:
    """σP, the matching with edges {σ(a), σ(b)}; σ is a 0-based permutation of the vertices."""
    if sorted(sigma) != list(range(len(matching.partner))):
        raise ValueError("Not a permutation of the matching's vertices")
    return Matching.model_construct(partner=_translate(sigma, matching.partner))


def _translation(partner: Partners) -> List[int]:
    sigma = []
    for v, mate in enumerate(partner):
        if v < mate:
            sigma.extend((v, mate))
    return sigma


def translation(matching: Matching) -> List[int]:
    """The permutation sending P0's sorted edges endpoint-wise onto the matching's sorted edges."""
    return _translation(matching.partner)


def _representative_partners(parts: Sequence[int]) -> Partners:
    partner = [0] * (2 * sum(parts))
    start = 0
    for part in parts:
        vertices = list(range(2 * start, 2 * (start + part)))
        if part == 1:
            partner[vertices[0]], partner[vertices[1]] = vertices[1], vertices[0]
        else:
            for k in range(part):
                a = vertices[2 * k + 1]
                b = vertices[(2 * k + 2) % len(vertices)]
                partner[a], partner[b] = b, a
        start += part
    return tuple(partner)


def representative(mu: Partition) -> Matching:
    """A matching Q with relation(P0, Q) = μ; each cycle joins consecutive P0 edges."""
    if mu.n < 1:
        raise ValueError("Relations are partitions of n ≥ 1")
    return Matching.model_construct(partner=_representative_partners(mu.parts))


def _sphere_partners(n: int, parts: Sequence[int]) -> Iterator[Partners]:
    partner = [-1] * (2 * n)
    unused = list(range(n))
    counts = Counter(parts)

    def close_cycles() -> Iterator[Partners]:
        if not unused:
            yield tuple(partner)
            return
        first = unused.pop(0)
        for length in sorted(counts, reverse=True):
            if counts[length] == 0 or length > len(unused) + 1:
                continue
            counts[length] -= 1
            yield from extend(first, 2 * first + 1, length - 1)
            counts[length] += 1
        unused.insert(0, first)

    def extend(first: int, exit_vertex: int, left: int) -> Iterator[Partners]:
        if left == 0:
            entry = 2 * first
            partner[exit_vertex], partner[entry] = entry, exit_vertex
            yield from close_cycles()
            partner[exit_vertex] = partner[entry] = -1
            return
        for index in range(len(unused)):
            pair = unused.pop(index)
            for entry, leave in ((2 * pair, 2 * pair + 1), (2 * pair + 1, 2 * pair)):
                partner[exit_vertex], partner[entry] = entry, exit_vertex
                yield from extend(first, leave, left - 1)
                partner[exit_vertex] = partner[entry] = -1
            unused.insert(index, pair)

    yield from close_cycles()


def sphere(mu: Partition) -> Iterator[Matching]:
    """Every matching R with relation(P0, R) = μ, generated directly, v_μ of them."""
    if mu.n < 1:
        raise ValueError("Relations are partitions of n ≥ 1")
    for partner in _sphere_partners(mu.n, mu.parts):
        yield Matching.model_construct(partner=partner)


class IntersectionData(BaseModel):
    """Intersection numbers p[k][i][j] over relations in ascending canonical order.

    Slices p[k][i] for relations i outside the requested rows are None.
    """
    n: int
    relations: List[Partition]
    reps: List[Matching]
    p: List[List[Optional[List[int]]]]

    def index(self, mu: Partition) -> int:
        return self.relations.index(mu)

    @property
    def computed_rows(self) -> List[int]:
        return [i for i in range(len(self.relations)) if self.p[0][i] is not None]

    def count(self, k: Partition, i: Partition, j: Partition) -> int:
        value = self.p[self.index(k)][self.index(i)]
        if value is None:
            raise KeyError(f"Relation {i} was not counted")
        return value[self.index(j)]

    def matrix(self, i: int) -> List[List[int]]:
        """B_i with (B_i)[j][k] = p[k][i][j]; its right eigenvectors are the eigenvalue rows."""
        size = len(self.relations)
        if self.p[0][i] is None:
            raise KeyError(f"Relation {self.relations[i]} was not counted")
        return [[self.p[k][i][j] for k in range(size)] for j in range(size)]

    def row_sums_hold(self, valencies: Sequence[int]) -> bool:
        return all(sum(self.p[k][i]) == valencies[i]
                   for k in range(len(self.relations)) for i in self.computed_rows)


def _count_slices(n: int, rows: Sequence[Tuple[int, Tuple[int, ...]]], targets: Sequence[Tuple[int, Partners]],
                  index: Dict[Tuple[int, ...], int]) -> Dict[Tuple[int, int], List[int]]:
    counts: Dict[Tuple[int, int], List[int]] = {}
    for k, _ in targets:
        for i, _ in rows:
            counts[(k, i)] = [0] * len(index)
    for i, parts in rows:
        for partner in _sphere_partners(n, parts):
            for k, rep in targets:
                counts[(k, i)][index[_cycle_type(partner, rep)]] += 1
    return counts


def _chunks(items: Sequence, pieces: int) -> List[Sequence]:
    size = math.ceil(len(items) / pieces)
    return [items[start:start + size] for start in range(0, len(items), size)]


def intersection_numbers(n: int, rows: Optional[Sequence[Partition]] = None, workers: int = 1,
                         progress_callback: Optional[ProgressCallback] = None,
                         max_n: int = 8) -> IntersectionData:
    """Count p^k_ij for every k, j and the requested i (all relations by default).

    Args:
        n: Half the number of vertices
        rows: Relations i whose slices are counted
        workers: Process count; the k-loop is split across them
        progress_callback: Called with (relation, done, total) after each slice
        max_n: Resource guard

    Raises:
        UnsupportedError: If n exceeds the guard
    """
    if not 1 <= n <= max_n:
        raise UnsupportedError(
            f"Intersection numbers are limited to n ≤ {max_n}, got {n}", limit=max_n,
            estimate=f"{len(generate_partitions(max(n, 1))) * total_matchings(max(n, 1)):,} relation checks")
    relations = sorted(generate_partitions(n))
    index = {mu.parts: position for position, mu in enumerate(relations)}
    wanted = sorted(set(rows), key=relations.index) if rows is not None else relations
    reps = [representative(mu) for mu in relations]
    targets = [(k, rep.partner) for k, rep in enumerate(reps)]
    logger.info("Counting intersection numbers", n=n, rows=len(wanted), workers=workers)

    p: List[List[Optional[List[int]]]] = [[None] * len(relations) for _ in relations]
    executor = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        for done, mu in enumerate(wanted, start=1):
            slice_rows = [(index[mu.parts], mu.parts)]
            if executor is not None:
                futures = [executor.submit(_count_slices, n, slice_rows, chunk, index)
                           for chunk in _chunks(targets, workers)]
                results = [future.result() for future in futures]
            else:
                results = [_count_slices(n, slice_rows, targets, index)]
            for counts in results:
                for (k, i), column in counts.items():
                    p[k][i] = column
            if progress_callback:
                progress_callback(str(mu), done, len(wanted))
    finally:
        if executor is not None:
            executor.shutdown()
    logger.info("Intersection numbers counted", n=n, rows=len(wanted))
    return IntersectionData(n=n, relations=relations, reps=reps, p=p)


class QuotientMatrix(BaseModel):
    """The 2×2 quotient of X_μ by {matchings containing edge {1,2}, the rest}."""
    model_config = ConfigDict(frozen=True)

    a_mu: int
    b_mu: int
    valency: int

    def model_post_init(self, __context):
        if not (0 <= self.a_mu <= self.valency and 0 <= self.b_mu <= self.valency):
            raise ValueError(f"Quotient counts out of range: a={self.a_mu}, b={self.b_mu}, v={self.valency}")

    @property
    def matrix(self) -> List[List[int]]:
        return [[self.a_mu, self.valency - self.a_mu], [self.b_mu, self.valency - self.b_mu]]

    @property
    def eigenvalues(self) -> Tuple[int, int]:
        return self.valency, self.a_mu - self.b_mu


def _outside_partners(n: int) -> Partners:
    partner = list(_base_partners(n))
    partner[0], partner[2], partner[1], partner[3] = 2, 0, 3, 1
    return tuple(partner)


def _neighbors_in_first_block(sigma: Sequence[int], sphere_partners: Sequence[Partners]) -> int:
    a, b = sigma.index(0), sigma.index(1)
    return sum(1 for partner in sphere_partners if partner[a] == b)


def quotient_counts(mu: Partition, max_n: int = 8) -> QuotientMatrix:
    """a_μ from P0 and b_μ from {1,3},{2,4},{5,6},..., the first matching outside the {1,2} block."""
    n = mu.n
    if n < 2:
        raise ValueError("The quotient needs n ≥ 2")
    if n > max_n:
        raise UnsupportedError(f"Quotient counts are limited to n ≤ {max_n}, got {n}", limit=max_n)
    neighbors = list(_sphere_partners(n, mu.parts))
    a = _neighbors_in_first_block(list(range(2 * n)), neighbors)
    b = _neighbors_in_first_block(_translation(_outside_partners(n)), neighbors)
    return QuotientMatrix(a_mu=a, b_mu=b, valency=len(neighbors))


def hook_quotient_closed_form(n: int, ell: int) -> QuotientMatrix:
    """a, b and v for the hook μ = [n−ℓ, 1^ℓ], 1 ≤ ℓ ≤ n−2."""
    if not 1 <= ell <= n - 2:
        raise ValueError(f"Hook leg must satisfy 1 ≤ ℓ ≤ n−2, got ℓ={ell} for n={n}")
    return QuotientMatrix(
        a_mu=math.comb(n - 1, ell - 1) * double_factorial(2 * n - 2 * ell - 2),
        b_mu=math.comb(n - 2, ell) * double_factorial(2 * n - 2 * ell - 4),
        valency=math.comb(n, ell) * double_factorial(2 * n - 2 * ell - 2),
    )


def _random_partners(n: int, rng: random.Random, inside: bool) -> Partners:
    while True:
        vertices = list(range(2 * n))
        rng.shuffle(vertices)
        partner = [0] * (2 * n)
        for a, b in zip(vertices[::2], vertices[1::2]):
            partner[a], partner[b] = b, a
        if (partner[0] == 1) == inside:
            return tuple(partner)


def check_equitable(mu: Partition, samples: int = 20, seed: int = 1) -> bool:
    """Recount a_μ from random matchings containing {1,2} and b_μ from random ones that do not."""
    n = mu.n
    expected = quotient_counts(mu)
    neighbors = list(_sphere_partners(n, mu.parts))
    rng = random.Random(seed)
    for inside, target in ((True, expected.a_mu), (False, expected.b_mu)):
        for _ in range(samples):
            sigma = _translation(_random_partners(n, rng, inside))
            if _neighbors_in_first_block(sigma, neighbors) != target:
                logger.warning("Quotient partition is not equitable", mu=str(mu), inside=inside)
                return False
    return True


class DiameterResult(BaseModel):
    mu: Partition
    connected: bool
    diameter: Optional[int] = None
    reachable: int
    total: int


def diameter(mu: Partition, max_n: int = 7, progress_callback: Optional[ProgressCallback] = None) -> DiameterResult:
    """Eccentricity of P0 in X_μ by level-synchronous BFS over ranks; the graph is vertex-transitive.

    Raises:
        UnsupportedError: If n exceeds the guard; the estimate is the visited bitmap size
    """
    n = mu.n
    total = total_matchings(n) if n >= 1 else 0
    if n > max_n:
        raise UnsupportedError(f"Diameter is limited to n ≤ {max_n}, got {n}", limit=max_n,
                               estimate=f"{total:,} bytes for the visited bitmap")
    if n == 1:
        return DiameterResult(mu=mu, connected=True, diameter=0, reachable=1, total=1)
    if mu.parts == (1,) * n:
        return DiameterResult(mu=mu, connected=False, reachable=0, total=total)

    neighbors = list(_sphere_partners(n, mu.parts))
    visited = bytearray(total)
    start = _rank(_base_partners(n))
    visited[start] = 1
    frontier = [start]
    reached = 1
    depth = 0
    while frontier:
        following = []
        for vertex in frontier:
            sigma = _translation(_unrank(n, vertex))
            for partner in neighbors:
                code = _rank(_translate(sigma, partner))
                if not visited[code]:
                    visited[code] = 1
                    following.append(code)
        if not following:
            break
        depth += 1
        reached += len(following)
        frontier = following
        logger.debug("BFS level expanded", mu=str(mu), depth=depth, frontier=len(frontier))
        if progress_callback:
            progress_callback(f"depth {depth}", reached, total)
    connected = reached == total
    logger.info("BFS finished", mu=str(mu), depth=depth, reached=reached, total=total)
    return DiameterResult(mu=mu, connected=connected, diameter=depth if connected else None,
                          reachable=reached, total=total)
