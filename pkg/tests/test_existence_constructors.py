import random

import pytest
from hypothesis import given, settings, strategies as st

from isocrystals import CoeffContext, ValuedMatrix, standard_form
from isocrystals.errors import DominanceFails, RetriesExhausted
from isocrystals.existence import (GenericityBudget, construct_admissible_filtration,
                                   transversality_report)
from isocrystals.filtration import (Admissible, Filtration, NotAdmissible,
                                    check_weak_admissibility)
from isocrystals.generate import random_dominating, random_isocrystal, random_non_dominating


def test_rank_one(c2):
    X = standard_form(c2, [(3, 1, 1)])
    F = construct_admissible_filtration(X, [3])
    assert F.mu == [3] and isinstance(F.verdict, Admissible)


def test_two_slopes_complete_certificate(c2):
    X = standard_form(c2, [(0, 1, 1), (1, 1, 1)])
    F = construct_admissible_filtration(X, [1, 0])
    assert isinstance(F.verdict, Admissible) and F.verdict.complete
    assert all(row["ok"] for row in F.report)
    assert isinstance(check_weak_admissibility(X, F), Admissible)


def test_simple_half_slope(c2):
    X = standard_form(c2, [(1, 2, 1)])
    F = construct_admissible_filtration(X, [1, 0], GenericityBudget(seed=3))
    assert F.t_H == 1 and isinstance(F.verdict, Admissible)


def test_rational_plane_exhausts_retries(c1):
    X = standard_form(c1, [(0, 1, 2)])
    with pytest.raises(RetriesExhausted) as info:
        construct_admissible_filtration(X, [1, -1])
    assert isinstance(info.value.witness, NotAdmissible)


def test_dominance_checked(c2):
    X = standard_form(c2, [(1, 2, 1)])
    for mu in ([0, 0], [1, 1], [2, -1, 0]):
        with pytest.raises(DominanceFails):
            construct_admissible_filtration(X, mu)


def test_report_generic_line_against_hyperplane(c2):
    X = standard_form(c2, [(0, 1, 2), (1, 1, 1)])
    H = X.sub(X.slope_decomposition().component(0))
    F = Filtration.random(X, [1, 0, 0], random.Random(9))
    rows = transversality_report(F, [H])
    assert rows and all(row["ok"] for row in rows)


def test_report_flags_contained_step(c2):
    X = standard_form(c2, [(0, 1, 2), (1, 1, 1)])
    E0 = X.slope_decomposition().component(0)
    H = X.sub(E0)
    F = Filtration.from_first_step(X, [1, 0, 0], E0.columns([0]))
    rows = {row["level"]: row for row in transversality_report(F, [H])}
    assert rows[1]["dim"] == 1 and rows[1]["generic"] == 0 and not rows[1]["ok"]


def test_report_skips_whole_space(c2):
    X = standard_form(c2, [(0, 1, 2)])
    F = Filtration.random(X, [1, -1], random.Random(2))
    assert transversality_report(F, [X.whole(), X.zero_sub()]) == []


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_multiplicity_free_always_constructs(seed):
    ctx = CoeffContext(2, 2, N=64)
    rng = random.Random(seed)
    X, _, _ = random_isocrystal(ctx, rng, rng.randint(1, 4))
    mu = random_dominating(X.newton_vector(), rng)
    if mu is None:
        with pytest.raises(DominanceFails):
            construct_admissible_filtration(X, random_non_dominating(X.newton_vector(), rng))
        return
    F = construct_admissible_filtration(X, mu.as_ints(), GenericityBudget(seed=seed))
    assert F.type_of() == mu
    v = check_weak_admissibility(X, F)
    assert isinstance(v, Admissible) and v.complete
