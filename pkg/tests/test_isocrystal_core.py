import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from isocrystals import (CoeffContext, ValuedMatrix, diagonal_isocrystal, newton_vector_of,
                         random_unimodular, standard_form)
from isocrystals.generate import random_isocrystal
from isocrystals.isocrystal import (CyclicSpans, IsotypicSums, generic_slope_decomposition,
                                    simple_block)

F = Fraction


def test_standard_form_examples(c2):
    assert standard_form(c2, [(0, 1, 3)]).newton_vector() == [0, 0, 0]
    assert standard_form(c2, [(1, 1, 1)]).newton_vector() == [1]
    X = standard_form(c2, [(1, 2, 1)])
    assert X.A.equal_at_precision(ValuedMatrix.from_values(c2, [[0, 2], [1, 0]]))
    assert X.newton_vector() == [F(1, 2), F(1, 2)]


def test_simple_block_needs_coprime(c2):
    with pytest.raises(ValueError):
        simple_block(c2, 2, 4)


def test_diagonal_frobenius(c2):
    X = diagonal_isocrystal(c2, [0, 3, -2, 3])
    assert X.newton_vector() == [3, 3, 0, -2]


def test_half_slope_square_is_scalar(c2):
    # phi**2 on the companion block of slope 1/2 has matrix A sigma(A) = pi I
    X = standard_form(c2, [(1, 2, 1)])
    B = X.power_matrix(2)
    assert B.equal_at_precision(ValuedMatrix.identity(c2, 2).scale_pi(1))


@pytest.mark.parametrize("summands", [[(1, 2, 1)], [(0, 1, 1), (1, 1, 1)],
                                      [(2, 3, 1), (-1, 2, 1)], [(-3, 4, 1), (0, 1, 2)]])
def test_newton_invariant_under_conjugation(c2, summands):
    X = standard_form(c2, summands)
    want = X.newton_vector()
    rng = random.Random(7)
    for _ in range(50):
        g, gi = random_unimodular(c2, X.d, rng, 16)
        assert newton_vector_of(g @ X.A @ gi.frobenius(1), c2.r) == want


def test_slope_decomposition_diagonal(c2):
    X = diagonal_isocrystal(c2, [0, 1])
    dec = generic_slope_decomposition(X)
    E0, E1 = dec.component(F(0)), dec.component(F(1))
    assert E0.ncols == 1 and E1.ncols == 1
    assert E0[1, 0].is_zero() and not E0[0, 0].is_zero()
    assert E1[0, 0].is_zero() and not E1[1, 0].is_zero()


def test_slope_decomposition_half(c2):
    X = standard_form(c2, [(1, 2, 1)])
    dec = generic_slope_decomposition(X)
    assert dec.s == 2
    assert dec.slopes() == [F(1, 2)]
    assert dec.component(F(1, 2)).ncols == 2
    assert dec.verify(X)


def test_slope_decomposition_trivial_plane(c2):
    X = standard_form(c2, [(0, 1, 2)])
    dec = generic_slope_decomposition(X)
    assert dec.component(F(0)).ncols == 2


def test_family_of_simple_object(c2):
    fam = standard_form(c2, [(1, 2, 1)]).subobject_family()
    assert sorted(s.dim for s in fam) == [0, 2]
    assert fam.complete


def test_family_of_two_slopes(c2):
    fam = standard_form(c2, [(0, 1, 1), (1, 1, 1)]).subobject_family()
    assert len(fam) == 4 and fam.complete


def test_cyclic_span_of_rational_vector(c2):
    X = standard_form(c2, [(0, 1, 2)])
    t = 5  # any element fixed by sigma
    v = ValuedMatrix.from_values(c2, [[1], [t]])
    W = X.cyclic_span(v)
    assert W.ncols == 1
    assert X.is_stable(W)


def test_cyclic_span_of_non_rational_vector(c2):
    X = standard_form(c2, [(0, 1, 2)])
    v = ValuedMatrix.from_values(c2, [[1], [c2.gen()]])
    assert X.cyclic_span(v).ncols == 2


def test_repeated_slope_family_is_incomplete(c2):
    X = standard_form(c2, [(0, 1, 2), (1, 1, 1)])
    fam = X.subobject_family()
    assert not fam.complete
    assert len(fam) > 4


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 5))
def test_random_isocrystal_properties(seed, d):
    ctx = CoeffContext(2, 2, N=64)
    rng = random.Random(seed)
    X, summands, _ = random_isocrystal(ctx, rng, d, multfree=rng.random() < 0.5)
    nu = X.newton_vector()
    declared = [F(a, b) for a, b, m in summands for _ in range(b * m)]
    assert nu == declared
    assert nu.total() == X.A.det().valuation()
    assert nu.total().denominator == 1
    X._hint = None
    dec = X.slope_decomposition()
    assert dec.verify(X)
    fam = IsotypicSums().build(X)
    assert all(X.is_stable(s.basis) for s in fam)
    if X.is_multiplicity_free():
        assert fam.complete and len(fam) == 2 ** len(dec.parts)


def test_cyclic_spans_members_are_stable(c2):
    X = standard_form(c2, [(0, 1, 3)])
    fam = CyclicSpans(8, 8, seed=1).build(X)
    assert len(fam) > 0
    assert all(X.is_stable(s.basis) for s in fam)
