import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from isocrystals import (CoeffContext, DivisionByUncertain, InsufficientPrecision, ValuedMatrix,
                         ValuedScalar, kernel, random_unimodular, smith_valuations)


def test_uniformizer_valuation(c2):
    assert c2.pi().valuation() == 1
    assert c2.pi().inverse().valuation() == -1
    assert (c2.pi() ** 3).valuation() == 3


def test_self_cancellation_is_exact_zero(c2):
    x = c2.scalar([3, 5]) * c2.pi(2)
    assert (x - x).is_exact_zero


def test_cancellation_at_precision_horizon():
    ctx = CoeffContext(2, 2, N=5)
    one = ValuedScalar.known(ctx, 0, (1, 0), 5)
    u = ctx.scalar([1, 1])
    d = (one + ctx.pi(5) * u) - one
    assert d.is_bounded and d.lower_bound() == 5


def test_division_by_uncertain_is_refused():
    ctx = CoeffContext(2, 1, N=5)
    a = ValuedScalar.known(ctx, 0, (1,), 5)
    with pytest.raises((DivisionByUncertain, InsufficientPrecision)):
        ctx.one() / (a - ctx.one())


def test_frobenius_fixes_pi_and_prime_field(c2, c3):
    for ctx in (c2, c3):
        assert ctx.pi().frobenius() == ctx.pi()
        assert ctx.scalar(7).frobenius() == ctx.scalar(7)


def test_frobenius_has_order_r(c2, c3):
    rng = random.Random(1)
    for ctx in (c2, c3):
        for _ in range(100):
            a = ctx.random_unit(rng) * ctx.pi(rng.randint(-3, 3))
            assert a.frobenius(ctx.r) == a


def _teichmuller(ctx, x, steps=12):
    """Fixed point of y -> y**q by Newton iteration on y**(q-1) = 1."""
    q = ctx.p ** ctx.r
    y = x
    for _ in range(steps):
        f = y ** (q - 1) - ctx.one()
        df = ctx.scalar(q - 1) * y ** (q - 2)
        y = y - f / df
    return y


@pytest.mark.parametrize("p", [2, 3, 5])
def test_frobenius_matches_teichmuller_oracle(p):
    ctx = CoeffContext(p, 2, N=20)
    t = _teichmuller(ctx, ctx.gen())
    assert (t ** (p ** 2 - 1) - ctx.one()).lower_bound() >= 20
    diff = t.frobenius() - t ** p
    assert diff.is_zero()


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(-5, 5), st.integers(-5, 5))
def test_valuation_algebra(seed, va, vb):
    ctx = CoeffContext(3, 2, N=30)
    rng = random.Random(seed)
    a = ctx.random_unit(rng) * ctx.pi(va)
    b = ctx.random_unit(rng) * ctx.pi(vb)
    assert (a * b).valuation() == va + vb
    s = a + b
    if va != vb:
        assert s.valuation() == min(va, vb)
    elif not s.is_exact_zero:
        assert s.lower_bound() >= min(va, vb)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_frobenius_is_a_ring_map(seed):
    ctx = CoeffContext(2, 2, N=40)
    rng = random.Random(seed)
    a, b = ctx.random_unit(rng), ctx.random_unit(rng) * ctx.pi(rng.randint(0, 4))
    assert (a + b).frobenius() == a.frobenius() + b.frobenius()
    assert (a * b).frobenius() == a.frobenius() * b.frobenius()


def test_kernel_examples(c1):
    assert kernel(ValuedMatrix.identity(c1, 3)).ncols == 0
    assert kernel(ValuedMatrix.zeros(c1, 2, 2)).ncols == 2
    M = ValuedMatrix.from_values(c1, [[1, 1], [1, 1]])
    K = kernel(M)
    assert K.ncols == 1
    v = K.column(0)
    assert (M @ v).is_zero()
    assert (v[0, 0] + v[1, 0]).is_zero()


def test_smith_examples(c2):
    p = c2.p
    assert smith_valuations(ValuedMatrix.from_values(c2, [[p * p, 0], [0, 1]])) == [2, 0]
    g, _ = random_unimodular(c2, 3, random.Random(0), 16)
    assert smith_valuations(g) == [0, 0, 0]
    assert smith_valuations(ValuedMatrix.from_values(c2, [[0, p], [1, 0]])) == [1, 0]


def test_smith_invariant_under_unimodular_multiplication(c2):
    rng = random.Random(3)
    M = ValuedMatrix.from_values(c2, [[4, 1, 0], [0, 2, 0], [8, 0, 1]])
    base = smith_valuations(M)
    for _ in range(10):
        U, _ = random_unimodular(c2, 3, rng, 16)
        V, _ = random_unimodular(c2, 3, rng, 16)
        assert smith_valuations(U @ M @ V) == base


def test_random_unimodular_inverse(c2):
    rng = random.Random(4)
    for n in range(1, 6):
        g, gi = random_unimodular(c2, n, rng, 16)
        assert (g @ gi - ValuedMatrix.identity(c2, n)).is_zero()


def test_fractional_scalars(c1):
    x = c1.scalar(Fraction(3, 4))
    assert x.valuation() == -2


@settings(max_examples=50, deadline=None)
@given(st.integers(3, 6), st.lists(st.integers(-2 ** 70, 2 ** 70), min_size=72, max_size=72))
def test_packed_product_matches_dot(n, pool):
    from isocrystals.linalg import _packed_product, ring_of
    R = ring_of(CoeffContext(2, 2, N=64))
    it = iter(pool * 2)
    rows = [[(next(it), next(it)) for _ in range(n)] for _ in range(3)]
    cols = [[(next(it), next(it)) for _ in range(n)] for _ in range(2)]
    got = _packed_product(R, rows, cols, n)
    assert got == [[R.dot(r, c) for c in cols] for r in rows]
