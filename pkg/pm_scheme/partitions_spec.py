import math
from itertools import product

import pytest

from pm_scheme.errors import PartitionError, UnsupportedError
from pm_scheme.partitions import (
    Dominance,
    Partition,
    add_to_row,
    content,
    dim_frobenius,
    dim_hook,
    dominance_compare,
    double,
    double_factorial,
    generate_partitions,
    irr_char,
    listed_small_dimension_shapes,
    small_dimension_shapes,
    successors,
)


def P(text: str) -> Partition:
    return Partition.parse(text)


def _class_size(cycle_type: Partition) -> int:
    z = 1
    for part, count in cycle_type.multiplicities().items():
        z *= part ** count * math.factorial(count)
    return math.factorial(cycle_type.n) // z


class DescribePartition:

    def should_parse_plain_parts(self):
        result = P("[3,2,1]")

        assert result.parts == (3, 2, 1)
        assert result.n == 6

    def should_expand_exponents_and_ignore_whitespace(self):
        result = P(" [ 2 , 1^3 ] ")

        assert result.parts == (2, 1, 1, 1)

    def should_print_fully_expanded(self):
        assert str(P("[2,1^3]")) == "[2,1,1,1]"

    def should_parse_the_empty_partition(self):
        result = P("[]")

        assert result.parts == ()
        assert result.n == 0

    def should_report_the_offending_token(self):
        with pytest.raises(PartitionError) as error:
            P("[3,x,1]")

        assert error.value.token == "x"

    def should_reject_increasing_parts(self):
        with pytest.raises(PartitionError):
            P("[1,2]")

    def should_reject_missing_brackets(self):
        with pytest.raises(PartitionError):
            P("3,2")

    def should_reject_non_positive_parts_on_construction(self):
        with pytest.raises(ValueError):
            Partition.of(2, 0)

    def should_count_parts_of_size_one(self):
        assert P("[3,1,1]").ones == 2
        assert P("[4]").ones == 0

    def should_be_hashable_and_equal_by_parts(self):
        assert {P("[2,1]"), Partition.of(2, 1)} == {Partition.of(2, 1)}


class DescribeGeneratePartitions:

    def should_yield_the_empty_partition_for_zero(self):
        assert generate_partitions(0) == [Partition()]

    def should_list_partitions_of_four_from_row_to_column(self):
        result = generate_partitions(4)

        assert len(result) == 5
        assert result[0] == P("[4]")
        assert result[-1] == P("[1^4]")

    def should_list_fifteen_partitions_of_seven(self):
        assert len(generate_partitions(7)) == 15

    def should_match_the_partition_numbers(self):
        counts = [len(generate_partitions(n)) for n in range(11)]

        assert counts == [1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42]

    def should_be_sorted_descending(self):
        result = generate_partitions(8)

        assert result == sorted(result, reverse=True)

    def should_reject_negative_n(self):
        with pytest.raises(ValueError):
            generate_partitions(-1)


class DescribeDominanceCompare:

    def should_place_the_single_row_above_everything(self):
        assert dominance_compare(P("[4]"), P("[3,1]")) == Dominance.GREATER

    def should_find_incomparable_pairs(self):
        assert dominance_compare(P("[4,1,1]"), P("[3,3]")) == Dominance.INCOMPARABLE

    def should_report_equal_partitions(self):
        assert dominance_compare(P("[2,2]"), P("[2,2]")) == Dominance.EQUAL

    def should_report_less_when_reversed(self):
        assert dominance_compare(P("[2,1,1]"), P("[3,1]")) == Dominance.LESS

    def should_reject_partitions_of_different_sizes(self):
        with pytest.raises(ValueError):
            dominance_compare(P("[2]"), P("[2,1]"))

    def should_be_a_partial_order(self):
        for n in range(1, 9):
            shapes = generate_partitions(n)
            for a, b in product(shapes, repeat=2):
                forward = dominance_compare(a, b)
                backward = dominance_compare(b, a)
                if forward == Dominance.GREATER:
                    assert backward == Dominance.LESS
                if forward == Dominance.EQUAL:
                    assert a == b
            for a, b, c in product(shapes, repeat=3):
                if dominance_compare(a, b) == Dominance.GREATER and dominance_compare(b, c) == Dominance.GREATER:
                    assert dominance_compare(a, c) == Dominance.GREATER

    def should_be_refined_by_the_canonical_order(self):
        for n in range(1, 9):
            for a, b in product(generate_partitions(n), repeat=2):
                if dominance_compare(a, b) == Dominance.GREATER:
                    assert a > b


class DescribeDouble:

    def should_double_every_part(self):
        assert double(P("[3,2,1]")) == P("[6,4,2]")
        assert double(P("[1,1]")) == P("[2,2]")
        assert double(Partition()) == Partition()


class DescribeContent:

    def should_read_the_doubled_tableau_row_by_row(self):
        result = content(P("[3,2,1]"))

        assert result.values == (0, 1, 2, 3, 4, 5, -1, 0, 1, 2, -2, -1)
        assert result.shape == P("[6,4,2]")

    def should_handle_single_boxes_and_columns(self):
        assert content(P("[1]")).values == (0, 1)
        assert content(P("[1,1]")).values == (0, 1, -1, 0)

    def should_have_one_value_per_box(self):
        for shape in generate_partitions(6):
            assert len(content(shape).values) == 12

    def should_sum_to_n_times_2n_minus_1_on_a_single_row(self):
        for n in range(1, 51):
            assert sum(content(Partition.of(n)).values) == n * (2 * n - 1)


class DescribeSuccessors:

    def should_grow_each_admissible_row(self):
        result = successors(P("[2,1]"))

        assert result == [(P("[3,1]"), 1), (P("[2,2]"), 2), (P("[2,1,1]"), 3)]

    def should_grow_a_single_box(self):
        assert successors(P("[1]")) == [(P("[2]"), 1), (P("[1,1]"), 2)]

    def should_skip_rows_blocked_by_an_equal_row_above(self):
        assert successors(P("[2,2]")) == [(P("[3,2]"), 1), (P("[2,2,1]"), 3)]

    def should_offer_one_more_row_than_distinct_part_sizes(self):
        for n in range(1, 9):
            for shape in generate_partitions(n):
                assert len(successors(shape)) == len(set(shape.parts)) + 1

    def should_reject_blocked_rows_when_adding_directly(self):
        with pytest.raises(ValueError):
            add_to_row(P("[2,2]"), 2)


class DescribeDimHook:

    def should_give_one_for_a_single_row(self):
        assert dim_hook(P("[5]")) == 1

    def should_match_the_eigenspace_dimensions_at_five(self):
        assert dim_hook(P("[4,1]")) == 35
        assert dim_hook(P("[1^5]")) == 42

    def should_agree_with_frobenius_and_characters(self):
        for n in range(1, 7):
            identity = Partition(parts=(1,) * (2 * n))
            for shape in generate_partitions(n):
                expected = dim_hook(shape)
                assert dim_frobenius(shape) == expected
                assert irr_char(double(shape), identity) == expected

    def should_sum_to_the_number_of_matchings(self):
        for n in range(1, 9):
            dims = [dim_hook(shape) for shape in generate_partitions(n)]
            assert sum(dims) == double_factorial(2 * n - 1)
            assert sum(d * d for d in dims) <= math.factorial(2 * n)


class DescribeIrrChar:

    def should_be_one_on_the_trivial_representation(self):
        for cycle_type in generate_partitions(6):
            assert irr_char(Partition.of(6), cycle_type) == 1

    def should_give_the_dimension_of_two_two(self):
        assert irr_char(P("[2,2]"), P("[1^4]")) == 2

    def should_be_the_sign_on_the_alternating_representation(self):
        assert irr_char(P("[1^4]"), P("[2,1,1]")) == -1
        assert irr_char(P("[1^4]"), P("[2,2]")) == 1

    def should_satisfy_row_orthogonality(self):
        n = 6
        classes = generate_partitions(n)
        for shape in classes:
            norm = sum(_class_size(rho) * irr_char(shape, rho) ** 2 for rho in classes)
            assert norm == math.factorial(n)

    def should_reject_mismatched_sizes(self):
        with pytest.raises(PartitionError):
            irr_char(P("[2,2]"), P("[2,1]"))


class DescribeSmallDimensionShapes:

    def should_find_exactly_the_ten_classified_shapes(self):
        for n in (7, 8):
            assert small_dimension_shapes(n) == listed_small_dimension_shapes(n)

    def should_refuse_below_seven(self):
        with pytest.raises(UnsupportedError):
            small_dimension_shapes(6)
