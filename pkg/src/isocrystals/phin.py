"""(phi, N)-modules: an isocrystal with a nilpotent monodromy N, N phi = q phi N."""

from __future__ import annotations

from fractions import Fraction
from math import gcd

from .errors import RelationFails
from .filtration import CheckStrategy, check_weak_admissibility
from .isocrystal import Family, standard_form
from .linalg import INF, ValuedMatrix, random_unimodular, rank


class PhiNModule:
    """Isocrystal ``X`` with monodromy matrix ``N`` (linear, same coordinates)."""

    def __init__(self, X, N, check=True):
        if N.shape != (X.d, X.d):
            raise ValueError("monodromy must be d x d")
        self.X = X
        self.N = N
        if check:
            self.validate()

    def __repr__(self):
        return f"PhiNModule(d={self.X.d})"

    @property
    def q(self):
        return self.X.ctx.p

    def _negligible(self, M, base):
        """Every entry zero at precision or of valuation >= base + N - 2."""
        need = base + self.X.ctx.N - 2
        for row in M.valuations():
            for v in row:
                if v != INF and v < need:
                    return False
        return True

    def relation_residual(self):
        """N A - q A sigma(N): zero exactly when N phi = q phi N."""
        A = self.X.A
        lhs = self.N @ A
        rhs = (A @ self.N.frobenius(1)).scale_pi(1)
        return lhs - rhs, min(lhs.min_valuation(), rhs.min_valuation())

    def validate(self):
        """Raise RelationFails unless N phi = q phi N and N is nilpotent."""
        d = self.X.d
        if d == 0 or self.N.is_zero():
            return True
        R, base = self.relation_residual()
        base = 0 if base == INF else min(base, 0)
        if not self._negligible(R, base):
            raise RelationFails("N phi differs from q phi N")
        P = self.N
        for _ in range(d - 1):
            P = P @ self.N
        if not self._negligible(P, min(0, self.N.min_valuation()) * d):
            raise RelationFails("N is not nilpotent")
        return True

    def is_N_stable(self, W):
        k = W.ncols
        if k == 0 or self.N.is_zero():
            return True
        return rank(W.hstack(self.N @ W)) == k

    def stable_family(self, family):
        """The members of a sub-isocrystal family that are also N-stable."""
        out = Family(self.X, complete=family.complete)
        for sub in family:
            if self.is_N_stable(sub.basis):
                out.add(sub)
        return out

    def to_json(self):
        from .serialize import isocrystal_to_json
        return {"iso": isocrystal_to_json(self.X), "monodromy": self.N.to_json()}


def check_weak_admissibility_phiN(m, F, strategy=None):
    """Same as the isocrystal check, over the N-stable members of the family."""
    strategy = CheckStrategy() if strategy is None else strategy
    family = m.stable_family(strategy.family(m.X, F))
    return check_weak_admissibility(m.X, F, strategy, family)


def slope_shift_holds(m):
    """N maps V_alpha into V_{alpha - 1} for every slope alpha."""
    dec = m.X.slope_decomposition()
    for alpha, E in dec.parts:
        img = m.N @ E
        if img.is_zero():
            continue
        try:
            target = dec.component(alpha - 1)
        except KeyError:
            return False
        if rank(target.hstack(img)) != target.ncols:
            return False
    return True


def monodromy_block(ctx, a, b, c=1):
    """Isocrystal E_{a/b} + E_{(a-b)/b} with N e_i = c p**(i-1) f_i."""
    X = standard_form(ctx, [(a, b, 1), (a - b, b, 1)])
    grid = [[0] * (2 * b) for _ in range(2 * b)]
    for i in range(b):
        grid[b + i][i] = c * ctx.p ** i
    return X, ValuedMatrix.from_values(ctx, grid)


def random_phi_n_module(ctx, rng, max_b=2, extra=True, conjugate=True, digits=16):
    """Seeded random (phi, N)-module built from a monodromy block, an optional
    extra isoclinic summand, and a random change of basis."""
    while True:
        b = rng.randint(1, max_b)
        a = rng.randint(-2, 3)
        if gcd(a, b) == 1 and gcd(a - b, b) == 1:
            break
    c = rng.randrange(1, ctx.p ** 4)
    X, N = monodromy_block(ctx, a, b, c)
    summands = list(X.summands)
    if extra:
        used = {Fraction(a, b), Fraction(a - b, b)}
        e = rng.randint(-3, 4)
        if e not in used:
            summands.append((e, 1, 1))
            X = standard_form(ctx, summands)
            N = N.block_diag(ValuedMatrix.zeros(ctx, 1, 1))
    if conjugate:
        g, g_inv = random_unimodular(ctx, X.d, rng, digits)
        X = X.base_change(g, g_inv)
        N = g @ N @ g_inv
    return PhiNModule(X, N)
