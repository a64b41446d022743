"""Harder-Narasimhan vectors of filtered isocrystals and sampling of strata."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import ConditionIFailsError
from .filtration import CheckStrategy, Filtration, induced_t_H
from .polygon import SlopeVector


@dataclass
class HNVector:
    """Slope vector lambda and the flag 0 = D_0 < D_1 < ... < D_k = D realizing it.

    ``exact`` is True when the subobject family was complete; otherwise the
    vector is a heuristic built from the subobjects that were found.
    """
    slopes: SlopeVector
    flag: list = field(repr=False)
    exact: bool = True

    def is_zero(self):
        return all(x == 0 for x in self.slopes)

    def step_slopes(self):
        """HN slope of each step of the flag, in order."""
        out, k = [], 0
        for a, b in zip(self.flag, self.flag[1:]):
            out.append(self.slopes[k])
            k += b.dim - a.dim
        return out


def hn_vector(X, F, strategy=None, family=None):
    """Greedy maximal destabilizing flag.

    At each step the candidate next members are the sums C + D_j over the
    family; the one with the largest (delta t_H - delta t_N) / delta dim wins,
    ties going to the larger dimension and then to family order.
    """
    if F.t_H != X.t_N:
        raise ConditionIFailsError(F.t_H, X.t_N)
    strategy = CheckStrategy() if strategy is None else strategy
    fam = strategy.family(X, F) if family is None else family
    members = list(fam)
    cur = X.zero_sub()
    h_cur, n_cur = 0, 0
    flag = [cur]
    slopes = []
    cache = {}
    while cur.dim < X.d:
        best = None
        for idx, C in enumerate(members):
            S = cur + C
            if S.dim == cur.dim:
                continue
            if S.key not in cache:
                cache[S.key] = (induced_t_H(F, S), S.t_N)
            h, n = cache[S.key]
            slope = Fraction((h - h_cur) - (n - n_cur), S.dim - cur.dim)
            rank_key = (slope, S.dim, -idx)
            if best is None or rank_key > best[0]:
                best = (rank_key, S, h, n)
        if best is None:
            # the family does not reach D; close the flag with D itself
            S = X.whole()
            h, n = F.t_H, X.t_N
            slope = Fraction((h - h_cur) - (n - n_cur), S.dim - cur.dim)
        else:
            (slope, _, _), S, h, n = best
        slopes.extend([slope] * (S.dim - cur.dim))
        flag.append(S)
        cur, h_cur, n_cur = S, h, n
    return HNVector(SlopeVector(slopes), flag, exact=fam.complete)


@dataclass
class Stratum:
    slopes: SlopeVector
    count: int
    witness: Filtration = field(repr=False)


def stratum_sample(X, mu, trials, seed=0, strategy=None):
    """Observed HN strata among ``trials`` random filtrations of type mu.

    Returns strata sorted by decreasing frequency.  Only observed strata are
    reported; absent strata may still be nonempty.
    """
    strategy = CheckStrategy(seed=seed) if strategy is None else strategy
    seen = {}
    for t in range(trials):
        rng = random.Random(f"{seed}:{t}")
        F = Filtration.random(X, mu, rng)
        lam = hn_vector(X, F, strategy).slopes
        if lam in seen:
            seen[lam].count += 1
        else:
            seen[lam] = Stratum(lam, 1, F)
    return sorted(seen.values(), key=lambda s: (-s.count, s.slopes.entries))
