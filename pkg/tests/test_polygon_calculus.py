import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from isocrystals import LengthMismatch, SlopeVector, dominance_leq, polygon_of
from isocrystals.polygon import total

F = Fraction


def test_polygon_examples():
    assert list(polygon_of([0, 0]).vertices) == [(0, 0), (2, 0)]
    assert list(polygon_of([1, 0]).vertices) == [(0, 0), (1, 0), (2, 1)]
    assert list(polygon_of([F(1, 2), F(1, 2)]).vertices) == [(0, 0), (2, 1)]


def test_dominance_examples():
    assert dominance_leq([F(1, 2), F(1, 2)], [1, 0])
    assert dominance_leq([3, F(1, 3)], [3, F(1, 3)])
    assert not dominance_leq([2, 0], [1, 1])


def test_dominance_needs_equal_lengths():
    with pytest.raises(LengthMismatch):
        dominance_leq([1], [1, 0])


def test_total_examples():
    assert total([1, 0]) == 1
    assert total([5, -5]) == 0
    assert total([F(1, 2), F(1, 2)]) == 1


def test_constructor_sorts_decreasingly():
    assert SlopeVector([0, 2, F(1, 2)]).entries == (2, F(1, 2), 0)
    assert SlopeVector.parse("[1/2, 3, -1]") == [3, F(1, 2), -1]


slopes = st.lists(st.fractions(min_value=-6, max_value=6, max_denominator=5), min_size=1, max_size=8)


@settings(max_examples=300, deadline=None)
@given(slopes)
def test_polygon_endpoints_and_convexity(xs):
    P = polygon_of(xs)
    assert P.vertices[0] == (0, 0)
    assert P.vertices[-1] == (len(xs), sum(xs)) and P.endpoint == P.vertices[-1]
    assert P.is_convex()


@settings(max_examples=300, deadline=None)
@given(slopes, st.integers(0, 10 ** 6))
def test_dominance_is_polygon_comparison(xs, seed):
    rng = random.Random(seed)
    ys = [x + F(rng.randint(-3, 3), rng.randint(1, 3)) for x in xs]
    shift = (sum(xs) - sum(ys)) / len(xs)
    ys = [y + shift for y in ys]
    assert dominance_leq(xs, ys) == polygon_of(xs).on_or_above(polygon_of(ys))


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(-4, 4), min_size=3, max_size=3), st.integers(1, 6))
def test_dominance_partial_order(seeds, d):
    rngs = [random.Random(s) for s in seeds]
    a, b, c = ([rng.randint(-3, 3) for _ in range(d)] for rng in rngs)
    assert dominance_leq(a, a)
    if dominance_leq(a, b) and dominance_leq(b, a):
        assert SlopeVector(a) == SlopeVector(b)
    if dominance_leq(a, b) and dominance_leq(b, c):
        assert dominance_leq(a, c)
