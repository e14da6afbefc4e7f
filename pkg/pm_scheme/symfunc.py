"""
Power-sum symmetric functions over Q[t], evaluated at contents of doubled shapes.

A PowerSumExpr maps monomial indices (partitions whose parts are power-sum subscripts) to
polynomials in t. Evaluation at λ ⊢ n substitutes t = 2n, p_k = Σ content^k over the boxes
of 2λ and p_∅ = 1.
"""
import re
from fractions import Fraction
from functools import lru_cache
from itertools import chain
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

import structlog
import sympy
from pydantic import BaseModel, ConfigDict
from sympy import Poly, QQ, Rational

from pm_scheme.errors import IncompleteTableError, InconsistentDataError, UnderdeterminedSystemError
from pm_scheme.partitions import Partition, add_to_row, content, generate_partitions

logger = structlog.get_logger()

t = sympy.Symbol("t")

Scalar = Union[int, Fraction, Rational]
FitColumn = Tuple[int, Mapping[Partition, Scalar]]

_TERM = re.compile(r"\(([^()]*)\)\*p\[([\d,]*)\]")
_POLY_TERM = re.compile(r"^(-?\d+(?:/\d+)?)(?:\*t(?:\^(\d+))?)?$")


def poly_t(expression) -> Poly:
    return Poly(expression, t, domain=QQ)


class PowerSumExpr(BaseModel):
    """An element of Λ[t] in the power-sum basis; zero coefficients are never stored."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    terms: Dict[Partition, Poly] = {}

    @classmethod
    def build(cls, terms: Mapping[Partition, object]) -> 'PowerSumExpr':
        """Create an expression from coefficients given as anything sympy can read as a polynomial in t."""
        cleaned = {}
        for monomial, coefficient in terms.items():
            poly = coefficient if isinstance(coefficient, Poly) else poly_t(coefficient)
            if not poly.is_zero:
                cleaned[monomial] = poly
        return cls(terms=cleaned)

    @classmethod
    def monomial(cls, *parts: int, coefficient=1) -> 'PowerSumExpr':
        return cls.build({Partition(parts=tuple(sorted(parts, reverse=True))): coefficient})

    def __add__(self, other: 'PowerSumExpr') -> 'PowerSumExpr':
        merged: Dict[Partition, Poly] = dict(self.terms)
        for monomial, poly in other.terms.items():
            merged[monomial] = merged[monomial] + poly if monomial in merged else poly
        return PowerSumExpr.build(merged)

    def __neg__(self) -> 'PowerSumExpr':
        return PowerSumExpr(terms={monomial: -poly for monomial, poly in self.terms.items()})

    def __sub__(self, other: 'PowerSumExpr') -> 'PowerSumExpr':
        return self + (-other)

    def scale(self, factor) -> 'PowerSumExpr':
        """Multiply every coefficient by a rational or a polynomial in t."""
        multiplier = poly_t(factor)
        return PowerSumExpr.build({monomial: poly * multiplier for monomial, poly in self.terms.items()})

    def __mul__(self, other: 'PowerSumExpr') -> 'PowerSumExpr':
        """Formal product; monomials concatenate their subscripts."""
        product: Dict[Partition, Poly] = {}
        for left, left_poly in self.terms.items():
            for right, right_poly in other.terms.items():
                monomial = Partition.model_construct(
                    parts=tuple(sorted(left.parts + right.parts, reverse=True)))
                poly = left_poly * right_poly
                product[monomial] = product[monomial] + poly if monomial in product else poly
        return PowerSumExpr.build(product)

    def evaluate(self, shape: Partition) -> Rational:
        return evaluate(self, shape)

    def __str__(self) -> str:
        return format_expr(self)


@lru_cache(maxsize=None)
def _power_sum(k: int, parts: Tuple[int, ...]) -> int:
    return sum(value ** k for value in content(Partition.model_construct(parts=parts)).values)


def power_sum(k: int, shape: Partition) -> int:
    """p_k at the contents of 2λ; p_0 is the constant 1."""
    if k < 0:
        raise ValueError(f"Power sums are indexed by non-negative integers, got {k}")
    if k == 0:
        return 1
    return _power_sum(k, shape.parts)


def _monomial_value(monomial: Partition, shape: Partition) -> int:
    value = 1
    for k in monomial.parts:
        value *= power_sum(k, shape)
    return value


def evaluate(expr: PowerSumExpr, shape: Partition) -> Rational:
    """Exact value of expr at the contents of 2λ with t = 2n."""
    if shape.n < 1:
        raise ValueError("Evaluation needs a partition of n ≥ 1")
    t_value = 2 * shape.n
    total = sympy.Integer(0)
    for monomial, poly in expr.terms.items():
        total += poly.eval(t_value) * _monomial_value(monomial, shape)
    return Rational(total)


def _format_poly(poly: Poly) -> str:
    """Ascending powers of t; negative terms after the first are written with ' - '."""
    text = ""
    for degree, coefficient in enumerate(reversed(poly.all_coeffs())):
        if coefficient == 0:
            continue
        magnitude = coefficient if not text else abs(coefficient)
        if degree == 0:
            piece = str(magnitude)
        elif degree == 1:
            piece = f"{magnitude}*t"
        else:
            piece = f"{magnitude}*t^{degree}"
        if text:
            text += (" - " if coefficient < 0 else " + ") + piece
        else:
            text = piece
    return text


def format_expr(expr: PowerSumExpr) -> str:
    """Render as ``(<poly>)*p[<parts>]`` terms, monomials in descending canonical order."""
    if not expr.terms:
        return "0"
    ordered = sorted(expr.terms, reverse=True)
    return " + ".join(
        f"({_format_poly(expr.terms[monomial])})*p[{','.join(str(part) for part in monomial.parts)}]"
        for monomial in ordered)


def _parse_poly(text: str) -> Poly:
    poly = poly_t(0)
    for piece in text.replace(" - ", " + -").split(" + "):
        match = _POLY_TERM.match(piece.strip())
        if match is None:
            raise ValueError(f"Invalid polynomial term '{piece}'")
        coefficient = Rational(match.group(1))
        if "*t" not in piece:
            degree = 0
        else:
            degree = int(match.group(2)) if match.group(2) is not None else 1
        poly += poly_t(coefficient * t ** degree)
    return poly


def parse_expr(text: str) -> PowerSumExpr:
    """Inverse of format_expr."""
    stripped = text.strip()
    if stripped == "0":
        return PowerSumExpr()
    matches = list(_TERM.finditer(stripped))
    if not matches or " + ".join(match.group(0) for match in matches) != stripped:
        raise ValueError(f"Invalid power-sum expression '{text}'")
    terms: Dict[Partition, Poly] = {}
    for match in matches:
        monomial = Partition.parse(f"[{match.group(2)}]")
        terms[monomial] = _parse_poly(match.group(1))
    return PowerSumExpr.build(terms)


def _p(*parts: int) -> Partition:
    return Partition.model_construct(parts=parts)


_CATALOG: Dict[Tuple[int, ...], Dict[Partition, object]] = {
    (2,): {
        _p(1): Rational(1, 2),
        _p(): -t / 4,
    },
    (3,): {
        _p(2): Rational(1, 2),
        _p(1): -1,
        _p(): (3 * t - t ** 2) / 4,
    },
    (2, 2): {
        _p(1, 1): Rational(1, 8),
        _p(2): Rational(-3, 4),
        _p(1): (10 - t) / 8,
        _p(): (9 * t ** 2 - 24 * t) / 32,
    },
    (4,): {
        _p(3): Rational(1, 2),
        _p(2): Rational(-9, 4),
        _p(1): (11 - 2 * t) / 2,
        _p(): (8 * t ** 2 - 23 * t) / 8,
    },
    (3, 2): {
        _p(3): -2,
        _p(2, 1): Rational(1, 4),
        _p(2): (60 - t) / 8,
        _p(1, 1): Rational(-1, 2),
        _p(1): (29 * t - 120 - t ** 2) / 8,
        _p(): (116 * t - 47 * t ** 2 + t ** 3) / 16,
    },
    (5,): {
        _p(4): Rational(1, 2),
        _p(3): -4,
        _p(2): (40 - 3 * t) / 2,
        _p(1, 1): -1,
        _p(1): 7 * t - 34,
        _p(): (217 * t - 96 * t ** 2 + 5 * t ** 3) / 12,
    },
}


def catalog_prefixes() -> List[Partition]:
    return [Partition(parts=parts) for parts in _CATALOG]


def e_catalog(prefix: Partition) -> PowerSumExpr:
    """The known E_μ for μ = [prefix, 1^(n−|prefix|)].

    Raises:
        ValueError: If the prefix has no closed form in the catalog
    """
    if prefix.parts not in _CATALOG:
        raise ValueError(f"No closed form in catalog for prefix {prefix}")
    return PowerSumExpr.build(_CATALOG[prefix.parts])


def delta_eval(expr: PowerSumExpr, shape: Partition, i: int) -> Rational:
    """f(c(λ⁺)) − f(c(λ)) where λ⁺ grows row i; t follows each shape's own size."""
    grown = add_to_row(shape, i)
    return evaluate(expr, grown) - evaluate(expr, shape)


_ROW = sympy.Symbol("lambda_i")
_INDEX = sympy.Symbol("i")
_P1 = sympy.Symbol("p1")

_DELTA_FORMS = {
    "p1": 4 * _ROW - 2 * _INDEX + 3,
    "p2": 2 * _INDEX ** 2 - 6 * _INDEX + 5 - 8 * _INDEX * _ROW + 12 * _ROW + 8 * _ROW ** 2,
    "p1sq": (8 * _ROW - 4 * _INDEX + 6) * _P1
    + 16 * _ROW ** 2 - 16 * _INDEX * _ROW + 24 * _ROW + 4 * _INDEX ** 2 - 12 * _INDEX + 9,
    "p3": -2 * _INDEX ** 3 + 12 * _INDEX ** 2 * _ROW - 24 * _INDEX * _ROW ** 2 + 16 * _ROW ** 3
    + 9 * _INDEX ** 2 - 36 * _INDEX * _ROW + 36 * _ROW ** 2 - 15 * _INDEX + 30 * _ROW + 9,
}


def delta_closed_forms(name: str, row_length: int, i: int) -> Union[Rational, Tuple[Rational, Rational]]:
    """Closed-form increment of p1, p2, p1² or p3 when row i (currently row_length long) grows.

    Args:
        name: One of ``p1``, ``p2``, ``p1sq``, ``p3``
        row_length: The old length λ_i, 0 for a new row
        i: The 1-based row index

    Returns:
        The increment; for ``p1sq`` the pair (coefficient of p1, constant)
    """
    if name not in _DELTA_FORMS:
        raise ValueError(f"Unknown increment formula '{name}'; expected one of {sorted(_DELTA_FORMS)}")
    value = sympy.expand(_DELTA_FORMS[name].subs({_ROW: row_length, _INDEX: i}))
    if name == "p1sq":
        return Rational(value.coeff(_P1, 1)), Rational(value.coeff(_P1, 0))
    return Rational(value)


class BasisMonomial(BaseModel):
    model_config = ConfigDict(frozen=True)

    monomial: Partition
    degree_bound: int


class MonomialBasis(BaseModel):
    """Monomials p_λ with λ ≤ μ̄, each with the largest admissible degree of its coefficient."""
    prefix: Partition
    reduced: Partition
    entries: List[BasisMonomial]

    @property
    def monomials(self) -> List[Partition]:
        return [entry.monomial for entry in self.entries]

    def bound(self, monomial: Partition) -> int:
        for entry in self.entries:
            if entry.monomial == monomial:
                return entry.degree_bound
        raise KeyError(str(monomial))


def _set_partitions(items: Sequence[int]) -> Iterator[List[List[int]]]:
    if not items:
        yield []
        return
    head, rest = items[0], items[1:]
    for blocks in _set_partitions(rest):
        yield [[head]] + blocks
        for index in range(len(blocks)):
            yield blocks[:index] + [[head] + blocks[index]] + blocks[index + 1:]


def merges(shape: Partition) -> List[Partition]:
    """Every partition obtained by summing the parts of shape over disjoint blocks."""
    found = {
        tuple(sorted((sum(block) for block in blocks), reverse=True))
        for blocks in _set_partitions(list(shape.parts))
    }
    return sorted((Partition.model_construct(parts=parts) for parts in found), reverse=True)


def monomial_basis(prefix: Partition) -> MonomialBasis:
    if not prefix.parts or any(part < 2 for part in prefix.parts):
        raise ValueError(f"A family prefix needs parts ≥ 2, got {prefix}")
    reduced = Partition.model_construct(parts=tuple(part - 1 for part in prefix.parts))
    candidates = set(merges(reduced))
    for size in range(reduced.n):
        candidates.update(generate_partitions(size))
    entries = []
    for monomial in sorted(candidates, reverse=True):
        bound = reduced.n - monomial.n + reduced.length - monomial.length
        if bound >= 0:
            entries.append(BasisMonomial(monomial=monomial, degree_bound=bound))
    return MonomialBasis(prefix=prefix, reduced=reduced, entries=entries)


def _rows(basis: MonomialBasis, cap: int, data: Sequence[FitColumn]):
    matrix_rows = []
    targets = []
    for n, column in data:
        for shape in generate_partitions(n):
            row = []
            for entry in basis.entries:
                value = _monomial_value(entry.monomial, shape)
                row.extend(value * (2 * n) ** k for k in range(min(entry.degree_bound, cap) + 1))
            matrix_rows.append(row)
            targets.append(Rational(column[shape]))
    return sympy.Matrix(matrix_rows), sympy.Matrix(targets)


def _check_complete(n: int, column: Mapping[Partition, Scalar]):
    missing = [str(shape) for shape in generate_partitions(n) if column.get(shape) is None]
    if missing:
        raise IncompleteTableError(f"Column for n={n} lacks values at {', '.join(missing)}")


def fit_e_mu(prefix: Partition, data: Sequence[FitColumn],
             held_out: Optional[FitColumn] = None) -> PowerSumExpr:
    """Recover E_μ from eigenvalue columns by one exact linear solve.

    Coefficient degrees are capped uniformly at the smallest cap for which the data are
    consistent; the per-monomial bounds stay upper limits.

    Args:
        prefix: Non-unit parts of the family, e.g. ``[3,2]``
        data: (n, column) pairs; a column maps every λ ⊢ n to φ^λ_μ(n)
        held_out: Optional extra column checked against the fitted expression

    Raises:
        UnderdeterminedSystemError: If the consistent system has free parameters
        InconsistentDataError: If no cap reproduces the data or the held-out column disagrees
    """
    basis = monomial_basis(prefix)
    for n, column in chain(data, [held_out] if held_out else []):
        _check_complete(n, column)
    largest = max(entry.degree_bound for entry in basis.entries)
    for cap in range(largest + 1):
        matrix, targets = _rows(basis, cap, data)
        try:
            solution, parameters = matrix.gauss_jordan_solve(targets)
        except ValueError:
            logger.debug("Fit inconsistent at degree cap", prefix=str(prefix), cap=cap)
            continue
        if parameters.shape[0] > 0:
            raise UnderdeterminedSystemError(
                f"Data for {prefix} leave {parameters.shape[0]} coefficients free at degree cap {cap}")
        expr = _assemble(basis, cap, solution)
        logger.info("Fitted symmetric function", prefix=str(prefix), cap=cap, terms=len(expr.terms))
        if held_out is not None:
            n, column = held_out
            mismatched = [str(shape) for shape in generate_partitions(n)
                          if evaluate(expr, shape) != Rational(column[shape])]
            if mismatched:
                raise InconsistentDataError(
                    f"Fitted expression for {prefix} disagrees with held-out n={n} at {', '.join(mismatched)}")
        return expr
    raise InconsistentDataError(f"No expression in the basis of {prefix} reproduces the data")


def _assemble(basis: MonomialBasis, cap: int, solution) -> PowerSumExpr:
    terms = {}
    position = 0
    for entry in basis.entries:
        size = min(entry.degree_bound, cap) + 1
        coefficients = solution[position:position + size]
        position += size
        terms[entry.monomial] = sum(Rational(c) * t ** k for k, c in enumerate(coefficients))
    return PowerSumExpr.build(terms)


def p1_bounds_hold(shape: Partition) -> bool:
    """The content-sum bounds: p1 ≥ 2n − n², and p1 > n²/4 when λ₁ > n/2."""
    n = shape.n
    p1 = power_sum(1, shape)
    if p1 < 2 * n - n * n:
        return False
    if 2 * shape.part(1) > n and 4 * p1 <= n * n:
        return False
    return True
