import random

import pytest
from hypothesis import given, settings, strategies as st

from isocrystals import CoeffContext, ValuedMatrix, diagonal_isocrystal, standard_form
from isocrystals.errors import RelationFails
from isocrystals.filtration import (Admissible, CheckStrategy, Filtration,
                                    check_weak_admissibility)
from isocrystals.phin import (PhiNModule, check_weak_admissibility_phiN, monodromy_block,
                              random_phi_n_module, slope_shift_holds)


def _m(ctx, rows):
    return ValuedMatrix.from_values(ctx, rows)


def test_zero_monodromy_is_valid(c2):
    X = standard_form(c2, [(0, 1, 1), (1, 1, 1)])
    m = PhiNModule(X, ValuedMatrix.zeros(c2, 2, 2))
    assert m.validate()
    F = Filtration.random(X, [1, 0], random.Random(1))
    assert type(check_weak_admissibility_phiN(m, F)) is type(check_weak_admissibility(X, F))


def test_two_dimensional_relation(c1):
    X = diagonal_isocrystal(c1, [0, 1])
    m = PhiNModule(X, _m(c1, [[0, 1], [0, 0]]))
    assert m.validate()
    R, _ = m.relation_residual()
    assert R.is_zero()
    assert slope_shift_holds(m)


def test_identity_monodromy_rejected(c1):
    X = diagonal_isocrystal(c1, [0, 1])
    with pytest.raises(RelationFails):
        PhiNModule(X, ValuedMatrix.identity(c1, 2))


def test_wrong_direction_rejected(c1):
    X = diagonal_isocrystal(c1, [0, 1])
    with pytest.raises(RelationFails):
        PhiNModule(X, _m(c1, [[0, 0], [1, 0]]))


def test_unstable_subobject_excluded(c1):
    X = diagonal_isocrystal(c1, [0, 1])
    m = PhiNModule(X, _m(c1, [[0, 1], [0, 0]]))
    F = Filtration(X, [1, 0], _m(c1, [[0, 1], [1, 0]]))
    fam = m.stable_family(CheckStrategy().family(X, F))
    dims = sorted(s.dim for s in fam)
    # of the two eigenlines only span(e1) survives
    assert dims == [0, 1, 2]
    assert next(s for s in fam if s.dim == 1).basis[1, 0].is_zero()
    assert isinstance(check_weak_admissibility_phiN(m, F), Admissible)


def test_monodromy_block(c2):
    X, N = monodromy_block(c2, 1, 2, 3)
    m = PhiNModule(X, N)
    assert slope_shift_holds(m)
    assert sorted(set(X.newton_vector())) == [-0.5, 0.5]


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_random_modules(seed):
    ctx = CoeffContext(2, 2, N=64)
    rng = random.Random(seed)
    m = random_phi_n_module(ctx, rng)
    assert m.validate() and slope_shift_holds(m)
    # admissible for the isocrystal implies admissible for the module
    strategy = CheckStrategy(seed=seed)
    fam = strategy.family(m.X)
    assert all(m.is_N_stable(s.basis) for s in m.stable_family(fam))
