"""Constructing admissible filtrations of a prescribed type."""

from __future__ import annotations

import random
from dataclasses import dataclass

from .errors import DominanceFails, RetriesExhausted
from .filtration import (Admissible, CheckStrategy, Filtration, ProbablyAdmissible,
                         check_weak_admissibility, intersection_dims)
from .polygon import SlopeVector, dominance_leq


@dataclass
class GenericityBudget:
    """Retries and randomness used by the constructor."""
    retries: int = 3
    seed: int = 0
    digits: int | None = 16
    strategy: CheckStrategy | None = None

    def rng(self, attempt):
        return random.Random(f"{self.seed}:{attempt}")


def transversality_report(F, family):
    """Rows comparing dim(F^i cap D') with the generic value max(0, c_i - d + d').

    Each row is a dict with keys ``sub``, ``level``, ``dim``, ``generic`` and
    ``ok``.  Members of dimension 0 or d are skipped.
    """
    d = F.d
    rows = []
    for sub in family:
        if sub.dim in (0, d):
            continue
        dims = intersection_dims(F, sub)
        for i in F.levels():
            generic = max(0, F.c(i) - d + sub.dim)
            rows.append({"sub": sub, "level": i, "dim": dims[i], "generic": generic,
                         "ok": dims[i] == generic})
    return rows


def construct_admissible_filtration(X, mu, budget=None):
    """Random flag of type mu that passes the check and is transverse to the family.

    Raises DominanceFails when mu does not dominate the Newton vector and
    RetriesExhausted (with the last failing verdict as witness) when every
    attempt fails.  The returned filtration carries ``verdict`` and
    ``report`` attributes.
    """
    budget = GenericityBudget() if budget is None else budget
    strategy = budget.strategy or CheckStrategy(seed=budget.seed)
    mu = SlopeVector(mu)
    nu = X.newton_vector()
    if len(mu) != X.d or not mu.is_integral() or not dominance_leq(nu, mu):
        raise DominanceFails(mu, nu)
    last = None
    for attempt in range(budget.retries):
        F = Filtration.random(X, mu.as_ints(), budget.rng(attempt), budget.digits)
        family = strategy.family(X, F)
        verdict = check_weak_admissibility(X, F, strategy, family)
        if not isinstance(verdict, (Admissible, ProbablyAdmissible)):
            last = verdict
            continue
        report = transversality_report(F, family)
        bad = [row for row in report if not row["ok"]]
        if bad:
            last = bad[0]
            continue
        F.verdict = verdict
        F.report = report
        return F
    raise RetriesExhausted(f"no admissible transverse flag in {budget.retries} attempts", last)
