import pytest

from pm_scheme.errors import ThresholdError, UnsupportedError
from pm_scheme.partitions import Partition, generate_partitions
from pm_scheme.spectra import (
    FamilySpec,
    GapReport,
    degbou,
    threshold_inequality_holds,
    family_gap_report,
    family_polynomials,
    family_second_eig,
    hook_gap,
    max_min_valency,
    near_full_cycle_eig,
    phi_n11,
    small_dim_eigenspaces,
    sqrt_ratio_holds,
    sqrt_ratio_scan,
    threshold_n,
    valency,
    verify_induction_step,
    zonal_check,
)
from pm_scheme.symfunc import catalog_prefixes, e_catalog, evaluate


def P(text: str) -> Partition:
    return Partition.parse(text)


FOUR_TABLE = {
    P("[4]"): [1, 12, 12, 32, 48],
    P("[3,1]"): [1, 5, -2, 4, -8],
    P("[2,2]"): [1, 2, 7, -8, -2],
    P("[2,1,1]"): [1, -1, -2, -2, 4],
    P("[1^4]"): [1, -6, 3, 8, -6],
}


class DescribeValency:

    def should_count_neighbours_of_the_three_two_relation(self):
        assert valency(P("[3,2]")) == 160

    def should_be_one_for_the_identity(self):
        for n in range(1, 8):
            assert valency(Partition(parts=(1,) * n)) == 1

    def should_count_neighbours_of_the_full_cycle(self):
        assert valency(P("[4]")) == 48

    def should_find_extremes_at_the_full_cycle_and_identity(self):
        for n, largest in ((2, 2), (4, 48), (5, 384)):
            result = max_min_valency(n)

            assert (result.maximum, result.argmax) == (largest, Partition.of(n))
            assert (result.minimum, result.argmin) == (1, Partition(parts=(1,) * n))


class DescribePhiN11:

    def should_give_the_transposition_eigenvalue(self):
        assert phi_n11(P("[2,1^3]")) == 11

    def should_be_negative_without_fixed_edges(self):
        assert phi_n11(P("[5]")) == -48

    def should_give_the_near_full_cycle_eigenvalue(self):
        assert phi_n11(P("[4,1]")) == 24

    def should_take_the_sign_of_the_fixed_edge_count_expression(self):
        for n in range(2, 13):
            for mu in generate_partitions(n):
                sign = (2 * n - 1) * mu.ones - n
                value = phi_n11(mu)
                assert (value > 0) == (sign > 0)
                assert (value < 0) == (sign < 0)

    def should_need_two_or_more(self):
        with pytest.raises(ValueError):
            phi_n11(P("[1]"))


class DescribeFamilySecondEig:

    def should_give_the_double_transposition_pair(self):
        assert family_second_eig(P("[2,2]"), 6) == (48, 132)

    def should_give_the_five_cycle_pair(self):
        assert family_second_eig(P("[5]"), 6) == (192, 2112)

    def should_refuse_below_the_proven_range(self):
        with pytest.raises(ThresholdError) as error:
            family_second_eig(P("[3,2]"), 6)

        assert error.value.threshold == 7

    def should_evaluate_below_the_proven_range_when_forced(self):
        assert family_second_eig(P("[3,2]"), 6, force=True) == (80, 880)

    def should_match_table_gaps_at_seven(self):
        assert family_second_eig(P("[3,2]"), 7)[1] == 2600
        assert family_second_eig(P("[5]"), 7)[1] == 6240

    def should_agree_with_two_independent_routes(self):
        for prefix in catalog_prefixes():
            family = FamilySpec(prefix=prefix)
            expr = e_catalog(prefix)
            threshold = family_polynomials(prefix).threshold
            for n in range(threshold, 101):
                mu = family.mu(n)
                second, gap = family_second_eig(prefix, n)

                assert second == phi_n11(mu) == evaluate(expr, Partition.of(n - 1, 1))
                assert gap == valency(mu) - second

    def should_give_the_valency_on_the_full_row(self):
        for prefix in catalog_prefixes():
            family = FamilySpec(prefix=prefix)
            for n in range(family.min_n, 11):
                assert evaluate(e_catalog(prefix), Partition.of(n)) == valency(family.mu(n))

    def should_build_gap_reports_witnessed_by_the_near_row(self):
        result = family_gap_report(P("[2]"), 6)

        assert (result.second_eig, result.gap) == (19, 11)
        assert result.witness_rows == [P("[5,1]")]

    def should_reject_inconsistent_gap_reports(self):
        with pytest.raises(ValueError):
            GapReport(n=5, mu=P("[2,1^3]"), valency=20, second_eig=11, gap=8, witness_rows=[])

    def should_reject_unit_parts_in_family_prefixes(self):
        with pytest.raises(ValueError):
            FamilySpec(prefix=P("[2,1]"))


class DescribeHookGap:

    def should_multiply_the_descending_evens(self):
        assert hook_gap(5, 2) == 54

    def should_reduce_to_2n_minus_1_for_an_empty_product(self):
        assert hook_gap(5, 3) == 9
        assert hook_gap(6, 4) == 11

    def should_reject_the_identity_hook(self):
        with pytest.raises(ValueError):
            hook_gap(6, 5)

    def should_equal_valency_minus_near_row_eigenvalue(self):
        for n in range(3, 31):
            for ell in range(1, n - 1):
                mu = Partition(parts=(n - ell,) + (1,) * ell)
                assert hook_gap(n, ell) == valency(mu) - phi_n11(mu)

    def should_match_the_near_full_cycle_closed_form(self):
        for n in range(3, 21):
            second, gap = near_full_cycle_eig(n)

            assert second == phi_n11(Partition.of(n - 1, 1))
            assert gap == hook_gap(n, 1)


class DescribeDegbou:

    def should_multiply_factorials_and_doubled_parts(self):
        result = degbou(P("[2,1^3]"), 5)

        assert result.factor == 4 * 192
        assert result.envelope == 768 * 12

    def should_give_eight_n_for_the_full_cycle(self):
        assert degbou(Partition.of(7), 7).factor == 56

    def should_compare_exactly_against_the_irrational_bound(self):
        bound = degbou(P("[2,1^3]"), 5)

        assert bound.admits(8586)
        assert not bound.admits(8587)

    def should_reject_mismatched_sizes(self):
        with pytest.raises(ValueError):
            degbou(P("[2,1]"), 4)


class DescribeThresholds:

    def should_find_the_exact_threshold_for_k_one(self):
        assert threshold_n(1) == 148

    def should_fail_at_six(self):
        assert not threshold_inequality_holds(1, 6)

    def should_return_minimal_solutions(self):
        for k in range(1, 5):
            n = threshold_n(k)

            assert threshold_inequality_holds(k, n)
            assert not threshold_inequality_holds(k, n - 1)

    def should_exceed_twice_k(self):
        for k in range(1, 7):
            assert threshold_n(k) > 2 * k

    def should_hold_the_square_root_ratio_at_two(self):
        assert sqrt_ratio_holds(2)

    def should_hold_the_square_root_ratio_up_to_ten_thousand(self):
        assert sqrt_ratio_scan(10_000) is None


class DescribeSmallDimEigenspaces:

    def should_find_the_row_and_near_row_at_seven(self):
        assert small_dim_eigenspaces(7) == [P("[7]"), P("[6,1]")]

    def should_find_the_row_and_near_row_at_eight(self):
        assert small_dim_eigenspaces(8) == [P("[8]"), P("[7,1]")]

    def should_refuse_below_seven(self):
        with pytest.raises(UnsupportedError):
            small_dim_eigenspaces(6)


class DescribeZonalCheck:

    def should_give_minus_one_at_two(self):
        assert zonal_check(P("[2]"), P("[1,1]")) == -1

    def should_give_two_for_the_three_cycle_on_the_column(self):
        assert zonal_check(P("[3]"), P("[1^3]")) == 2

    def should_give_one_on_the_identity_relation(self):
        for shape in generate_partitions(3):
            assert zonal_check(P("[1^3]"), shape) == 1

    def should_reproduce_the_table_at_four(self):
        columns = sorted(generate_partitions(4))

        for shape, row in FOUR_TABLE.items():
            assert [zonal_check(mu, shape) for mu in columns] == row

    def should_reproduce_spot_cells_at_five(self):
        assert zonal_check(P("[5]"), P("[3,2]")) == -8
        assert zonal_check(P("[3,1,1]"), P("[2,2,1]")) == -10

    def should_refuse_beyond_five(self):
        with pytest.raises(UnsupportedError):
            zonal_check(P("[6]"), P("[6]"))


class DescribeVerifyInductionStep:

    def should_pass_for_every_catalog_family_at_fifteen(self):
        for prefix in catalog_prefixes():
            result = verify_induction_step(FamilySpec(prefix=prefix), 15)

            assert result.passed
            assert result.slack == 0

    def should_use_the_near_row_increment_as_the_right_side(self):
        for n in (5, 9):
            result = verify_induction_step(FamilySpec(prefix=P("[3]")), n)

            assert result.rhs == 4 * n * n - 12 * n + 6

    def should_not_depend_on_the_worker_split(self):
        family = FamilySpec(prefix=P("[2,2]"))

        assert verify_induction_step(family, 12, workers=3) == verify_induction_step(family, 12)
