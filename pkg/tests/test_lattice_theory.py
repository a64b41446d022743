import random

import pytest
from hypothesis import given, settings, strategies as st

from isocrystals import CoeffContext, ValuedMatrix, diagonal_isocrystal, standard_form
from isocrystals.errors import DominanceFails, NoConvergence, NotStronglyDivisible
from isocrystals.existence import GenericityBudget, construct_admissible_filtration
from isocrystals.filtration import Filtration
from isocrystals.generate import random_dominating, random_isocrystal
from isocrystals.lattice import (Lattice, T, adapted_bounds, check_mazur,
                                 construct_lattice_of_type, laffaille_iterate, lattice_type,
                                 strongly_divisible, strongly_divisible_basis)


def _m(ctx, rows):
    return ValuedMatrix.from_values(ctx, rows)


def test_type_of_standard_lattices(c2):
    assert list(lattice_type(Lattice.standard(standard_form(c2, [(1, 2, 1)])))) == [1, 0]
    X = diagonal_isocrystal(c2, [2, 0, -1])
    M = Lattice.standard(X)
    assert list(lattice_type(M)) == [2, 0, -1]
    # scaling the lattice does not change its type
    assert lattice_type(M.scaled(3)) == lattice_type(M)


def test_type_of_skewed_lattice(c1):
    X = standard_form(c1, [(0, 1, 2)])
    # M spanned by e1 and pi^-1 e2: phi(M) = M since sigma fixes everything
    M = Lattice(X, ValuedMatrix.pi_diagonal(c1, [0, -1]))
    assert list(lattice_type(M)) == [0, 0]


def test_mazur_examples(c2):
    assert check_mazur(Lattice.standard(standard_form(c2, [(1, 2, 1)])))
    X = standard_form(c2, [(0, 1, 3)])
    rng = random.Random(1)
    for _ in range(5):
        M = Lattice.random(X, rng)
        assert check_mazur(M) and lattice_type(M).total() == 0


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_mazur_on_random_lattices(seed):
    ctx = CoeffContext(2, 2, N=64)
    rng = random.Random(seed)
    X, _, _ = random_isocrystal(ctx, rng, rng.randint(1, 4), multfree=False)
    M = Lattice.random(X, rng)
    assert check_mazur(M)
    assert lattice_type(M).total() == X.t_N


def test_strongly_divisible_examples(c1):
    X = standard_form(c1, [(0, 1, 1)])
    assert strongly_divisible(Lattice.standard(X), Filtration(X, [0], ValuedMatrix.identity(c1, 1)))
    Y = standard_form(c1, [(1, 1, 1)])
    M = Lattice.standard(Y)
    one = ValuedMatrix.identity(c1, 1)
    assert strongly_divisible(M, Filtration(Y, [1], one))
    F0 = Filtration(Y, [0], one)
    assert not strongly_divisible(M, F0)
    assert T(M, F0) == M.scaled(1)


def test_already_adapted_lattice_returns_in_one_step(c2):
    X = diagonal_isocrystal(c2, [1, 0])
    F = Filtration(X, [1, 0], ValuedMatrix.identity(c2, 2))
    M = Lattice.standard(X)
    out = laffaille_iterate(M, F)
    assert out == M and out.iterations == 1
    assert adapted_bounds(M, F) == (M, M)


def test_iteration_on_non_rational_line(c2):
    X = standard_form(c2, [(0, 1, 2)])
    F = Filtration(X, [1, -1], _m(c2, [[1, 0], [c2.gen(), 1]]))
    M = laffaille_iterate(Lattice.standard(X), F)
    assert list(lattice_type(M)) == [1, -1]
    u, e = strongly_divisible_basis(M, F)
    assert Lattice(X, e) == M
    assert Lattice(X, X.phi(u)) == M.phi_image()


def test_iteration_on_rational_line_diverges(c1):
    X = standard_form(c1, [(0, 1, 2)])
    F = Filtration(X, [1, -1], _m(c1, [[1, 0], [3, 1]]))
    with pytest.raises(NoConvergence) as info:
        laffaille_iterate(Lattice.standard(X), F)
    assert len(info.value.drift) > 1


def test_basis_certificate_trivial_cases(c1):
    X = standard_form(c1, [(0, 1, 2)])
    F = Filtration(X, [0, 0], ValuedMatrix.identity(c1, 2))
    u, e = strongly_divisible_basis(Lattice.standard(X), F)
    assert Lattice(X, u) == Lattice.standard(X) == Lattice(X, e)
    Y = standard_form(c1, [(1, 1, 1)])
    one = ValuedMatrix.identity(c1, 1)
    u, e = strongly_divisible_basis(Lattice.standard(Y), Filtration(Y, [1], one))
    assert e.equal_at_precision(one)
    with pytest.raises(NotStronglyDivisible):
        strongly_divisible_basis(Lattice.standard(Y), Filtration(Y, [0], one))


def test_bounds_nesting_and_duality(c2):
    rng = random.Random(11)
    checked = 0
    for i in range(8):
        X, _, _ = random_isocrystal(c2, rng, rng.randint(1, 3))
        mu = random_dominating(X.newton_vector(), rng)
        if mu is None:
            continue
        F = construct_admissible_filtration(X, mu.as_ints(), GenericityBudget(seed=i))
        M = Lattice.random(X, rng, spread=1)
        lo, hi = adapted_bounds(M, F)
        assert lo <= M <= hi
        assert strongly_divisible(lo, F) and strongly_divisible(hi, F)
        Xd = X.dual()
        lo_d, _ = adapted_bounds(M.dual(Xd), F.dual(Xd))
        assert lo_d == hi.dual(Xd)
        checked += 1
    assert checked >= 3


def test_construct_examples(c2):
    X = diagonal_isocrystal(c2, [1, 0, -2])
    M = construct_lattice_of_type(X, [1, 0, -2])
    assert list(lattice_type(M)) == [1, 0, -2]
    Y = standard_form(c2, [(1, 2, 1)])
    assert list(lattice_type(construct_lattice_of_type(Y, [1, 0]))) == [1, 0]
    with pytest.raises(DominanceFails):
        construct_lattice_of_type(Y, [0, 0])
    with pytest.raises(DominanceFails):
        construct_lattice_of_type(Y, [2, 0, -1])


def test_lattice_operations(c2):
    X = standard_form(c2, [(0, 1, 2)])
    M = Lattice.standard(X)
    assert M.scaled(1) <= M and not M <= M.scaled(1)
    assert (M + M.scaled(-1)) == M.scaled(-1)
    assert (M & M.scaled(1)) == M.scaled(1)
    assert M.scaled(2).covolume() - M.covolume() == 4
