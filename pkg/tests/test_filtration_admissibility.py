import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from isocrystals import CoeffContext, ValuedMatrix, standard_form
from isocrystals.filtration import (Admissible, CheckStrategy, ConditionIFails, Filtration,
                                    NotAdmissible, check_by_polygons, check_weak_admissibility,
                                    induced, induced_type, intersection_dims, rationality_probe)
from isocrystals.generate import random_dominating, random_isocrystal
from isocrystals.isocrystal import SubIsocrystal


def _flag(ctx, rows):
    return ValuedMatrix.from_values(ctx, rows)


def test_type_and_hodge_number(c2):
    X = standard_form(c2, [(0, 1, 2)])
    F = Filtration(X, [0, 1], ValuedMatrix.identity(c2, 2))
    assert list(F.type_of()) == [1, 0] and F.t_H == 1
    F0 = Filtration(X, [0, 0], ValuedMatrix.identity(c2, 2))
    assert F0.t_H == 0 and F0.levels() == [0]
    assert Filtration(X, [3, -3], ValuedMatrix.identity(c2, 2)).t_H == 0


def test_steps_have_right_dimensions(c2):
    X = standard_form(c2, [(0, 1, 4)])
    F = Filtration.random(X, [2, 2, 0, -1], random.Random(1))
    assert [F.c(i) for i in (3, 2, 1, 0, -1, -2)] == [0, 2, 2, 3, 4, 4]
    assert F.F(2).ncols == 2


def test_induced_on_whole_and_zero(c2):
    X = standard_form(c2, [(0, 1, 1), (1, 1, 1)])
    F = Filtration.random(X, [1, 0], random.Random(2))
    assert induced_type(F, X.whole()) == F.type_of()
    G = induced(F, X.zero_sub())
    assert G.t_H == 0 and G.d == 0


def test_transverse_intersection_dims(c2):
    X = standard_form(c2, [(0, 1, 3)])
    F = Filtration.random(X, [2, 1, 0], random.Random(3))
    W = X.sub(_flag(c2, [[1, 0], [0, 1], [0, 0]]))
    dims = intersection_dims(F, W)
    for i in F.levels():
        assert dims[i] == max(0, F.c(i) - (X.d - W.dim))
    # transverse intersections carry the smallest entries of mu
    assert list(induced_type(F, W)) == [1, 0]


def test_rank_one_only_type_one_admissible(c1):
    Y = standard_form(c1, [(1, 1, 1)])
    rng = random.Random(4)
    assert isinstance(check_weak_admissibility(Y, Filtration.random(Y, [1], rng)), Admissible)
    for m in (0, 2, -1):
        v = check_weak_admissibility(Y, Filtration.random(Y, [m], rng))
        assert isinstance(v, ConditionIFails) and v.t_N == 1


def test_rational_line_is_destabilizing(c1):
    X = standard_form(c1, [(0, 1, 2)])
    F = Filtration(X, [1, -1], _flag(c1, [[1, 0], [3, 1]]))
    v = check_weak_admissibility(X, F)
    assert isinstance(v, NotAdmissible)
    assert (v.t_H, v.t_N) == (1, 0)
    assert v.witness.dim == 1
    assert v.reverify(F)


def test_every_flag_over_level_one_fails(c1):
    X = standard_form(c1, [(0, 1, 2)])
    rng = random.Random(5)
    for _ in range(10):
        assert isinstance(check_weak_admissibility(X, Filtration.random(X, [2, -2], rng)),
                          NotAdmissible)


def test_non_rational_line_is_admissible(c2):
    X = standard_form(c2, [(0, 1, 2)])
    F = Filtration(X, [1, -1], _flag(c2, [[1, 0], [c2.gen(), 1]]))
    v = check_weak_admissibility(X, F)
    assert isinstance(v, Admissible) and v.complete


def test_probe_finds_fixed_line(c2):
    X = standard_form(c2, [(0, 1, 2)])
    F = Filtration(X, [1, -1], _flag(c2, [[1, 0], [7, 1]]))
    recs = [r for r in rationality_probe(F) if r.slope is None]
    assert len(recs) == 1 and recs[0].found and recs[0].basis.ncols == 1
    assert X.is_stable(recs[0].basis)


def test_probe_no_fixed_line(c2):
    X = standard_form(c2, [(0, 1, 2)])
    F = Filtration(X, [1, -1], _flag(c2, [[1, 0], [c2.gen(), 1]]))
    assert not any(r.found for r in rationality_probe(F))


def test_probe_plane_with_one_rational_line(c2):
    X = standard_form(c2, [(0, 1, 3)])
    t = c2.gen()
    # the plane spanned by (1, 1, 0) and (0, t, t*t) meets the rational points in one line
    flag = _flag(c2, [[1, 0, 0], [1, t, 0], [0, t * t, 1]])
    F = Filtration(X, [1, 1, -2], flag)
    recs = [r for r in rationality_probe(F) if r.slope is None]
    assert recs[0].found and recs[0].basis.ncols == 1
    line = recs[0].basis
    expected = _flag(c2, [[1], [1], [0]])
    assert X.sub(line.hstack(expected)).dim == 1
    v = check_weak_admissibility(X, F)
    assert isinstance(v, NotAdmissible) and v.reverify(F)


def test_simple_isocrystal_verdict_depends_only_on_total(c2):
    X = standard_form(c2, [(1, 3, 1)])
    rng = random.Random(6)
    for mu, want in (([1, 0, 0], Admissible), ([1, 1, -1], Admissible), ([2, 0, 0], ConditionIFails)):
        F = Filtration.random(X, mu, rng)
        assert isinstance(check_weak_admissibility(X, F), want)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_sum_and_polygon_forms_agree(seed):
    ctx = CoeffContext(2, 2, N=64)
    rng = random.Random(seed)
    X, _, _ = random_isocrystal(ctx, rng, rng.randint(1, 4), multfree=rng.random() < 0.7)
    mu = random_dominating(X.newton_vector(), rng)
    if mu is None:
        return
    F = Filtration.random(X, mu.as_ints(), rng)
    strategy = CheckStrategy(seed=seed)
    fam = strategy.family(X, F)
    v = check_weak_admissibility(X, F, strategy, fam)
    ok, _ = check_by_polygons(X, F, fam)
    assert ok == (not isinstance(v, (NotAdmissible, ConditionIFails)))
    if isinstance(v, NotAdmissible):
        assert v.reverify(F)
    assert induced_type(F, X.whole()) == F.type_of()


def test_hodge_additive_over_sums(c2):
    X = standard_form(c2, [(0, 1, 1), (1, 1, 1)])
    F = Filtration(X, [1, 0], ValuedMatrix.identity(c2, 2))
    dec = X.slope_decomposition()
    parts = [SubIsocrystal(X, E) for _, E in dec.parts]
    assert sum(induced(F, s).t_H for s in parts) == F.t_H


def test_constructor_rejects_bad_input(c2):
    X = standard_form(c2, [(0, 1, 2)])
    with pytest.raises(ValueError):
        Filtration(X, [1, 0], _flag(c2, [[1, 2], [2, 4]]))
    with pytest.raises(ValueError):
        Filtration(X, [1, 0, 0], ValuedMatrix.identity(c2, 2))
