from itertools import combinations
from math import comb

import pytest

from intransitive_dice.dice import standard_die, validate_proper
from intransitive_dice.enumeration import (
    CountTable,
    TripleClass,
    classify_triple,
    count_proper,
    enumerate_proper,
    iter_proper_faces,
    triple_census,
    triple_census_bruteforce,
)
from intransitive_dice.errors import InvalidArgument, ResourceLimitError


@pytest.mark.parametrize("n, expected", [(1, 1), (4, 5), (10, 2934), (16, 4669367), (23, 36912710568)])
def test_count_proper_table_values(n, expected):
    assert count_proper(n) == expected


def test_rows_past_23_are_shifted_by_one():
    # the published rows labelled 25..28 are Pr(24)..Pr(27)
    assert count_proper(24) == 135565151486
    assert count_proper(27) == 6850369296298
    assert count_proper(28) == 25474010264330


def test_count_table_cells():
    t = CountTable(6)
    for m in range(1, 7):
        assert t.cell(0, 0, m) == 1
        assert t.cell(0, 3, m) == 0
    # cell(p, s, m) = sum_v cell(p-1, s-v, min(m, v))
    for p in range(1, 7):
        for s in range(0, 22):
            for m in range(1, 7):
                rhs = sum(t.cell(p - 1, s - v, min(m, v)) for v in range(1, m + 1) if s - v >= 0)
                assert t.cell(p, s, m) == rhs


def test_unrank_is_a_bijection():
    t = CountTable(7)
    ranked = [t.unrank(r) for r in range(t.total)]
    assert sorted(ranked) == list(iter_proper_faces(7))
    with pytest.raises(InvalidArgument):
        t.unrank(t.total)


def test_enumerate_small_lists():
    assert [d.faces for d in enumerate_proper(3)] == [(1, 2, 3), (2, 2, 2)]
    assert [d.faces for d in enumerate_proper(4)] == [
        (1, 1, 4, 4), (1, 2, 3, 4), (1, 3, 3, 3), (2, 2, 2, 4), (2, 2, 3, 3)]
    five = [d.faces for d in enumerate_proper(5)]
    assert len(five) == 12 and five[0] == (1, 1, 3, 5, 5) and five[-1] == (3, 3, 3, 3, 3)


def test_enumeration_limit():
    with pytest.raises(ResourceLimitError, match="Pr\\(10\\) = 2934"):
        next(enumerate_proper(10, limit=1000))


@pytest.mark.parametrize("n", range(1, 15))
def test_dp_matches_enumeration(n):
    dice = list(iter_proper_faces(n))
    assert len(dice) == count_proper(n)
    if n <= 9:
        assert dice == sorted(set(dice))
        assert all(validate_proper(d) for d in dice)


def test_classify_triple():
    assert classify_triple((1, 1, 4, 4), (1, 3, 3, 3), (2, 2, 2, 4)) is TripleClass.INTRANSITIVE
    assert classify_triple((1, 1, 4, 4), standard_die(4), (2, 2, 2, 4)) is TripleClass.HAS_TIE
    # (1,2,2,5,5) beats both others (12-9 and 10-9), so no cycle
    assert classify_triple((1, 1, 3, 5, 5), (1, 1, 4, 4, 5), (1, 2, 2, 5, 5)) is TripleClass.TRANSITIVE
    with pytest.raises(InvalidArgument):
        classify_triple((1, 2, 3), (1, 2, 3), (1, 1, 4, 4))


def test_triple_census_n4():
    c = triple_census(4)
    assert (c.total, c.intransitive) == (10, 1)
    assert c.intransitive + c.transitive + c.with_ties == c.total


def test_triple_census_n3_empty():
    assert triple_census(3).total == 0


def test_triple_census_n5_frozen():
    # values from the brute-force classification of all C(12, 3) triples
    c = triple_census(5)
    assert (c.total, c.intransitive, c.transitive, c.with_ties) == (220, 23, 54, 143)


@pytest.mark.parametrize("n", [4, 5, 6, 7])
def test_matrix_census_matches_bruteforce(n):
    fast, slow = triple_census(n), triple_census_bruteforce(n)
    assert fast == slow
    assert fast.total == comb(count_proper(n), 3)


def test_census_budget():
    with pytest.raises(ResourceLimitError):
        triple_census(11, max_dice=5000)


def gaussian_binomial_coeffs(m, k):
    """Coefficients of the q-binomial [m choose k]_q, by the q-Pascal recurrence."""
    rows = {(0, 0): [1]}

    def g(a, b):
        if b < 0 or b > a:
            return [0]
        if (a, b) not in rows:
            # [a, b] = [a-1, b-1] + q^b [a-1, b]
            left, right = g(a - 1, b - 1), [0] * b + g(a - 1, b)
            size = max(len(left), len(right))
            rows[a, b] = [(left[i] if i < len(left) else 0) + (right[i] if i < len(right) else 0)
                          for i in range(size)]
        return rows[a, b]

    return g(m, k)


@pytest.mark.parametrize("n", [2, 5, 10, 17, 23, 24, 28])
def test_count_matches_gaussian_binomial(n):
    # proper dice minus 1 per face = partitions of n(n-1)/2 in an n x (n-1) box
    assert count_proper(n) == gaussian_binomial_coeffs(2 * n - 1, n)[n * (n - 1) // 2]
