import random
from itertools import product

import pytest
from pytest import fixture
from sympy import Rational

from pm_scheme.errors import IncompleteTableError, InconsistentDataError, UnderdeterminedSystemError
from pm_scheme.partitions import Dominance, Partition, dominance_compare, generate_partitions, successors
from pm_scheme.symfunc import (
    PowerSumExpr,
    catalog_prefixes,
    delta_closed_forms,
    delta_eval,
    e_catalog,
    evaluate,
    fit_e_mu,
    format_expr,
    merges,
    monomial_basis,
    p1_bounds_hold,
    parse_expr,
    power_sum,
    t,
)
from pm_scheme.tables import build_table_oracle


def P(text: str) -> Partition:
    return Partition.parse(text)


def column(n: int, values):
    return n, dict(zip(generate_partitions(n), values))


def fit_e_mu_for(prefix: str, data, held_out=None):
    return fit_e_mu(P(prefix), data, held_out=held_out)


class DescribeEvaluate:

    def should_evaluate_the_transposition_family_on_a_row(self):
        assert evaluate(e_catalog(P("[2]")), P("[5]")) == 20

    def should_evaluate_the_transposition_family_on_a_near_row(self):
        assert evaluate(e_catalog(P("[2]")), P("[4,1]")) == 11

    def should_evaluate_the_three_cycle_family_on_a_column(self):
        assert evaluate(e_catalog(P("[3]")), P("[1^5]")) == 20

    def should_treat_the_empty_monomial_as_one(self):
        expr = PowerSumExpr.monomial(coefficient=t)

        assert evaluate(expr, P("[3,1]")) == 8

    def should_sum_powers_of_contents(self):
        assert power_sum(1, P("[2,1]")) == 5
        assert power_sum(2, P("[1]")) == 1
        assert power_sum(0, P("[4]")) == 1


class DescribeECatalog:

    def should_list_six_families(self):
        assert [str(prefix) for prefix in catalog_prefixes()] == [
            "[2]", "[3]", "[2,2]", "[4]", "[3,2]", "[5]"]

    def should_give_the_largest_eigenvalue_of_the_three_two_family(self):
        assert evaluate(e_catalog(P("[3,2]")), P("[6]")) == 960

    def should_give_the_five_cycle_family_on_the_near_row(self):
        assert evaluate(e_catalog(P("[5]")), P("[5,1]")) == 192

    def should_give_the_double_transposition_family_on_the_near_row(self):
        assert evaluate(e_catalog(P("[2,2]")), P("[5,1]")) == 48

    def should_reject_prefixes_without_a_closed_form(self):
        with pytest.raises(ValueError):
            e_catalog(P("[6]"))


class DescribeDeltaEval:

    def should_grow_the_first_row(self):
        assert delta_eval(PowerSumExpr.monomial(1), P("[3,1]"), 1) == 13

    def should_open_a_new_row(self):
        assert delta_eval(PowerSumExpr.monomial(1), P("[2,1]"), 3) == -3

    def should_match_the_three_cycle_increment_on_the_near_row(self):
        expr = e_catalog(P("[3]"))

        for n in range(3, 12):
            assert delta_eval(expr, Partition.of(n - 1, 1), 1) == 4 * n * n - 12 * n + 6

    def should_reject_inadmissible_rows(self):
        with pytest.raises(ValueError):
            delta_eval(PowerSumExpr.monomial(1), P("[2,2]"), 2)


class DescribeDeltaClosedForms:

    def should_evaluate_the_square_sum_increment(self):
        assert delta_closed_forms("p2", 1, 1) == 13

    def should_evaluate_a_new_row_increment(self):
        assert delta_closed_forms("p1", 0, 2) == -1

    def should_agree_with_direct_evaluation_of_the_cube_sum(self):
        assert delta_closed_forms("p3", 2, 1) == delta_eval(PowerSumExpr.monomial(3), P("[2]"), 1)

    def should_agree_with_direct_evaluation_on_random_growth(self):
        rng = random.Random(7)

        for _ in range(1000):
            shape = rng.choice(generate_partitions(rng.randint(1, 30)))
            _, i = rng.choice(successors(shape))
            row = shape.part(i)
            for name, parts in (("p1", (1,)), ("p2", (2,)), ("p3", (3,))):
                assert delta_closed_forms(name, row, i) == delta_eval(PowerSumExpr.monomial(*parts), shape, i)
            coefficient, constant = delta_closed_forms("p1sq", row, i)
            expected = delta_eval(PowerSumExpr.monomial(1, 1), shape, i)
            assert coefficient * power_sum(1, shape) + constant == expected

    def should_reject_unknown_names(self):
        with pytest.raises(ValueError):
            delta_closed_forms("p4", 1, 1)


class DescribePowerSumExpr:

    def should_render_terms_with_monomials_descending(self):
        assert format_expr(e_catalog(P("[2]"))) == "(1/2)*p[1] + (-1/4*t)*p[]"

    def should_write_later_negative_terms_with_a_minus(self):
        expr = PowerSumExpr.build({P("[1]"): Rational(1, 2) - Rational(1, 8) * t})

        result = format_expr(expr)

        assert result == "(1/2 - 1/8*t)*p[1]"
        assert parse_expr(result) == expr

    def should_never_render_a_plus_minus_pair(self):
        for prefix in catalog_prefixes():
            assert "+ -" not in format_expr(e_catalog(prefix))

    def should_render_the_zero_expression(self):
        assert format_expr(PowerSumExpr()) == "0"

    def should_parse_every_catalog_entry_back(self):
        for prefix in catalog_prefixes():
            expr = e_catalog(prefix)

            assert parse_expr(format_expr(expr)) == expr

    def should_reject_malformed_text(self):
        with pytest.raises(ValueError):
            parse_expr("(1/2)*q[1]")

    def should_drop_cancelled_terms(self):
        expr = e_catalog(P("[3]"))

        assert (expr - expr).terms == {}

    def should_evaluate_sums_scalings_and_products_pointwise(self):
        rng = random.Random(11)
        prefixes = catalog_prefixes()

        for _ in range(50):
            a = e_catalog(rng.choice(prefixes))
            b = e_catalog(rng.choice(prefixes))
            factor = Rational(rng.randint(-9, 9), rng.randint(1, 9))
            shape = rng.choice(generate_partitions(rng.randint(2, 9)))
            left, right = evaluate(a, shape), evaluate(b, shape)

            assert evaluate(a + b, shape) == left + right
            assert evaluate(a.scale(factor), shape) == factor * left
            assert evaluate(a * b, shape) == left * right


class DescribeMonomialBasis:

    def should_collect_smaller_sizes_and_merges_for_three_two(self):
        basis = monomial_basis(P("[3,2]"))

        assert [str(m) for m in basis.monomials] == ["[3]", "[2,1]", "[2]", "[1,1]", "[1]", "[]"]
        assert basis.reduced == P("[2,1]")

    def should_bound_degrees_by_size_and_length(self):
        basis = monomial_basis(P("[3,2]"))

        assert [entry.degree_bound for entry in basis.entries] == [1, 0, 2, 1, 3, 5]

    def should_reduce_the_transposition_family_to_two_monomials(self):
        assert [str(m) for m in monomial_basis(P("[2]")).monomials] == ["[1]", "[]"]

    def should_drop_monomials_with_negative_bounds(self):
        assert [str(m) for m in monomial_basis(P("[4]")).monomials] == ["[3]", "[2]", "[1,1]", "[1]", "[]"]

    def should_contain_the_support_of_every_catalog_entry(self):
        for prefix in catalog_prefixes():
            basis = monomial_basis(prefix)
            expr = e_catalog(prefix)
            for monomial, poly in expr.terms.items():
                assert poly.degree() <= basis.bound(monomial)

    def should_merge_parts_over_blocks(self):
        assert [str(m) for m in merges(P("[2,1,1]"))] == ["[4]", "[3,1]", "[2,2]", "[2,1,1]"]

    def should_reject_unit_parts(self):
        with pytest.raises(ValueError):
            monomial_basis(P("[2,1]"))


@fixture(scope="module")
def oracle_tables():
    return {n: build_table_oracle(n) for n in range(5, 9)}


def oracle_column(table, prefix: Partition):
    mu = Partition(parts=prefix.parts + (1,) * (table.n - prefix.n))
    return table.n, dict(zip(table.rows, table.complete_column(mu)))


class DescribeFitEMu:

    def should_recover_the_transposition_family_from_two_columns(self):
        data = [column(3, [6, 1, -3]), column(4, [12, 5, 2, -1, -6])]

        result = fit_e_mu_for("[2]", data)

        assert result == e_catalog(P("[2]"))

    def should_recover_the_double_transposition_family(self):
        data = [
            column(4, [12, -2, 7, -2, 3]),
            column(5, [60, 6, 11, -10, 5, -3, 15]),
            column(6, [180, 48, 27, -12, 33, 3, -21, 15, 3, 3, 45]),
            column(7, [420, 160, 79, 16, 69, 9, -39, 21, 15, -9, -29, 15, 7, 25, 105]),
        ]

        result = fit_e_mu_for("[2,2]", data)

        assert result == e_catalog(P("[2,2]"))

    def should_recover_the_three_two_family_from_four_columns(self):
        data = [
            column(5, [160, -20, 20, -4, -10, 10, -20]),
            column(6, [960, 80, 24, -60, 120, 0, 12, -60, 0, 20, -120]),
            column(7, [3360, 760, 148, -56, 228, -42, -78, 84, -60, 12, 52, -60, 28, -20, -420]),
            column(8, [8960, 2960, 848, 440, 512, -28, -184, 608, 132, -132, -72,
                       -52, 0, 96, -60, 68, 80, -160, -28, 32, -220, -1120]),
        ]

        result = fit_e_mu_for("[3,2]", data)

        assert result == e_catalog(P("[3,2]"))

    @pytest.mark.parametrize("prefix", ["[3,2]", "[5]"])
    def should_recover_the_catalog_from_oracle_tables_five_to_eight(self, oracle_tables, prefix):
        data = [oracle_column(oracle_tables[n], P(prefix)) for n in range(5, 9)]

        result = fit_e_mu_for(prefix, data)

        assert result == e_catalog(P(prefix))

    def should_accept_a_matching_held_out_column(self):
        data = [column(3, [6, 1, -3]), column(4, [12, 5, 2, -1, -6])]

        result = fit_e_mu_for("[2]", data, held_out=column(5, [20, 11, 6, 3, 0, -4, -10]))

        assert evaluate(result, P("[1^5]")) == -10

    def should_reject_a_disagreeing_held_out_column(self):
        data = [column(3, [6, 1, -3]), column(4, [12, 5, 2, -1, -6])]

        with pytest.raises(InconsistentDataError):
            fit_e_mu_for("[2]", data, held_out=column(5, [20, 11, 6, 3, 0, -4, -11]))

    def should_report_inconsistent_data(self):
        data = [column(3, [6, 1, -3]), column(4, [12, 5, 2, -1, 99])]

        with pytest.raises(InconsistentDataError):
            fit_e_mu_for("[2]", data)

    def should_report_an_underdetermined_system(self):
        with pytest.raises(UnderdeterminedSystemError):
            fit_e_mu_for("[2,2]", [column(2, [1, 1])])

    def should_require_complete_columns(self):
        with pytest.raises(IncompleteTableError):
            fit_e_mu_for("[2]", [(3, {P("[3]"): 6})])


class DescribeContentBounds:

    def should_hold_for_every_partition_up_to_thirty(self):
        for n in range(1, 31):
            assert all(p1_bounds_hold(shape) for shape in generate_partitions(n))

    def should_attain_the_lower_bound_on_the_column(self):
        for n in range(1, 10):
            assert power_sum(1, Partition(parts=(1,) * n)) == 2 * n - n * n


class DescribeTranspositionFamilyMonotonicity:

    def should_increase_strictly_with_dominance(self):
        expr = e_catalog(P("[2]"))

        for n in range(2, 9):
            for a, b in product(generate_partitions(n), repeat=2):
                if dominance_compare(a, b) == Dominance.GREATER:
                    assert evaluate(expr, a) > evaluate(expr, b)
