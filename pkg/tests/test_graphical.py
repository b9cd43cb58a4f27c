from fractions import Fraction
from itertools import combinations_with_replacement

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from respart import builtin
from respart.errors import DomainError
from respart.graphical import (
    fraction_scaling_table,
    graphical_fraction,
    is_graphical_erdos_gallai,
    is_graphical_nash_williams,
    is_realizable_bruteforce,
)
from respart.partitions import Partition, enumerate_partitions

from oracles import realizable

P = Partition.of


@pytest.mark.parametrize(
    "parts, expected",
    [
        ([1, 1], True),
        ([2, 2], False),
        ([3], False),
        ([2, 1, 1], True),
        ([1, 1, 1, 1], True),
        ([4], False),
        ([], True),
        ([2, 2, 2], True),
        ([3, 1, 1, 1], True),
        ([3, 3, 1, 1], False),
    ],
)
def test_examples_all_criteria(parts, expected):
    p = P(parts)
    assert is_graphical_nash_williams(p) is expected
    assert is_graphical_erdos_gallai(p) is expected
    if parts:
        assert is_realizable_bruteforce(p) is expected


def test_bruteforce_size_limit():
    with pytest.raises(DomainError):
        is_realizable_bruteforce(P([1] * 10))


def small_sequences():
    for v in range(1, 7):
        for combo in combinations_with_replacement(range(1, v), v):
            if sum(combo) % 2 == 0:
                yield P(combo)


def test_bruteforce_matches_edge_subset_oracle():
    # the backtracking realizer against a plain scan over every edge subset
    for p in small_sequences():
        assert is_realizable_bruteforce(p) == realizable(list(p.parts)), p


@pytest.mark.parametrize("name", ["identity", "binary", "linear:2", "linear:3"])
def test_criteria_agree_up_to_20(name):
    r = builtin(name)
    for n in range(0, 21, 2):
        for p in enumerate_partitions(n, r):
            assert is_graphical_nash_williams(p) == is_graphical_erdos_gallai(p), p


def test_criteria_agree_with_bruteforce_small():
    for n in range(0, 17, 2):
        for p in enumerate_partitions(n, builtin("identity")):
            if len(p) <= 8:
                truth = is_realizable_bruteforce(p)
                assert is_graphical_nash_williams(p) == truth, p
                assert is_graphical_erdos_gallai(p) == truth, p


@settings(max_examples=300, deadline=None)
@given(st.lists(st.integers(1, 12), max_size=14).map(Partition.of))
def test_appending_an_edge_preserves_graphicality(p):
    if is_graphical_nash_williams(p):
        q = Partition.of(p.parts + (1, 1))
        assert is_graphical_nash_williams(q)
        assert is_graphical_erdos_gallai(q)


@settings(max_examples=300, deadline=None)
@given(st.lists(st.integers(1, 20), max_size=20).map(Partition.of))
def test_criteria_agree_random(p):
    assert is_graphical_nash_williams(p) == is_graphical_erdos_gallai(p)


def test_fraction_examples():
    rep = graphical_fraction(2, builtin("identity"))
    assert (rep.graphical, rep.total, rep.fraction) == (1, 2, Fraction(1, 2))
    rep = graphical_fraction(4, builtin("identity"))
    assert (rep.graphical, rep.total) == (2, 5)
    rep = graphical_fraction(4, builtin("binary"))
    assert (rep.graphical, rep.total) == (2, 4)
    rep = graphical_fraction(0, builtin("identity"))
    assert (rep.graphical, rep.total) == (1, 1)


def test_fraction_rejects_odd():
    with pytest.raises(DomainError):
        graphical_fraction(5, builtin("identity"))


def test_fraction_invariants():
    for n in range(0, 31, 2):
        rep = graphical_fraction(n, builtin("linear:2"))
        assert 0 <= rep.graphical <= rep.total
        assert rep.fraction == Fraction(rep.graphical, rep.total)
        assert rep.scaled == pytest.approx(float(rep.fraction) * n**0.5)


def test_scaling_table_single_and_parallel():
    r = builtin("identity")
    assert fraction_scaling_table([12], r) == [graphical_fraction(12, r)]
    serial = fraction_scaling_table([10, 12, 14], r)
    parallel = fraction_scaling_table([10, 12, 14], r, workers=2)
    assert serial == parallel
    with pytest.raises(DomainError):
        fraction_scaling_table([14, 12], r)
