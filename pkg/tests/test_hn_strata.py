import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from isocrystals import CoeffContext, ValuedMatrix, standard_form
from isocrystals.errors import ConditionIFailsError
from isocrystals.existence import GenericityBudget, construct_admissible_filtration
from isocrystals.filtration import Admissible, Filtration, check_weak_admissibility
from isocrystals.generate import random_dominating, random_isocrystal
from isocrystals.hn import hn_vector, stratum_sample


def test_admissible_gives_zero(c2):
    X = standard_form(c2, [(0, 1, 1), (1, 1, 1)])
    F = construct_admissible_filtration(X, [1, 0])
    lam = hn_vector(X, F)
    assert lam.is_zero() and lam.exact


def test_rational_line(c1):
    X = standard_form(c1, [(0, 1, 2)])
    F = Filtration(X, [1, -1], ValuedMatrix.from_values(c1, [[1, 0], [5, 1]]))
    lam = hn_vector(X, F)
    assert list(lam.slopes) == [1, -1]
    assert lam.flag[1].dim == 1


def test_line_in_slope_zero_part(c2):
    X = standard_form(c2, [(0, 1, 1), (1, 1, 1)])
    E0 = X.slope_decomposition().component(Fraction(0))
    F = Filtration.from_first_step(X, [1, 0], E0)
    lam = hn_vector(X, F)
    assert list(lam.slopes) == [1, -1]
    assert lam.step_slopes() == [1, -1]


def test_requires_matching_totals(c2):
    X = standard_form(c2, [(1, 2, 1)])
    with pytest.raises(ConditionIFailsError):
        hn_vector(X, Filtration.random(X, [0, 0], random.Random(0)))


def test_strata_samples(c1, c2):
    X = standard_form(c2, [(0, 1, 1), (1, 1, 1)])
    strata = stratum_sample(X, [1, 0], 20, seed=1)
    assert list(strata[0].slopes) == [0, 0]
    assert strata[0].count >= 18
    assert sum(s.count for s in strata) == 20
    Y = standard_form(c1, [(0, 1, 2)])
    strata = stratum_sample(Y, [1, -1], 10, seed=2)
    assert len(strata) == 1 and list(strata[0].slopes) == [1, -1]
    Z = standard_form(c2, [(2, 1, 1)])
    strata = stratum_sample(Z, [2], 3)
    assert len(strata) == 1 and list(strata[0].slopes) == [0]


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_vector_shape(seed):
    ctx = CoeffContext(2, 2, N=64)
    rng = random.Random(seed)
    X, _, _ = random_isocrystal(ctx, rng, rng.randint(1, 4))
    mu = random_dominating(X.newton_vector(), rng)
    if mu is None:
        return
    F = Filtration.random(X, mu.as_ints(), rng)
    lam = hn_vector(X, F)
    assert sum(lam.slopes) == 0
    steps = lam.step_slopes()
    assert all(a > b for a, b in zip(steps, steps[1:]))
    assert lam.is_zero() == isinstance(check_weak_admissibility(X, F), Admissible)
