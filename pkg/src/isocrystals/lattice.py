"""Lattices in isocrystals: types, Mazur's inequality, strongly divisible
lattices and the adapted-lattice iteration."""

from __future__ import annotations

from .errors import (ConstructionRetryExhausted, DominanceFails, InsufficientPrecision,
                     NoConvergence, NotStronglyDivisible, RetriesExhausted)
from .linalg import (ValuedMatrix, column_hermite, inverse, is_integral, random_unimodular,
                     saturate, smith_valuations)
from .polygon import SlopeVector, dominance_leq


class Lattice:
    """Full-rank lattice spanned by the columns of a matrix.

    The stored basis is the canonical Hermite basis, so two lattices are equal
    exactly when their keys agree.
    """

    def __init__(self, X, basis):
        if basis.nrows != X.d or basis.ncols < X.d:
            raise ValueError("lattice generators must be d x n with n >= d")
        self.X = X
        if X.d == 0:
            self.basis, self.key = basis, ("empty",)
        else:
            self.basis, self.key = column_hermite(basis)

    def __repr__(self):
        return f"Lattice(d={self.X.d}, covolume={self.covolume()})"

    def __eq__(self, other):
        return isinstance(other, Lattice) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    @classmethod
    def standard(cls, X):
        return cls(X, ValuedMatrix.identity(X.ctx, X.d))

    @classmethod
    def random(cls, X, rng, spread=3, digits=16):
        """g1 diag(pi**a) g2 pi**s with random unimodular g1, g2 (entries with
        ``digits`` p-adic digits), 0 <= a_i <= spread and |s| <= spread."""
        ctx = X.ctx
        g1, _ = random_unimodular(ctx, X.d, rng, digits)
        g2, _ = random_unimodular(ctx, X.d, rng, digits)
        D = ValuedMatrix.pi_diagonal(ctx, [rng.randint(0, spread) for _ in range(X.d)])
        shift = rng.randint(-spread, spread)
        return cls(X, (g1 @ D @ g2).scale_pi(shift))

    # -- basic operations ---------------------------------------------------------

    def covolume(self):
        """Valuation of the determinant of a basis."""
        if self.X.d == 0:
            return 0
        vals = self.basis.valuations()
        return sum(vals[i][i] for i in range(self.X.d))

    def scaled(self, k):
        return Lattice(self.X, self.basis.scale_pi(k))

    def contains(self, other):
        return is_integral(inverse(self.basis) @ other.basis)

    def __le__(self, other):
        return other.contains(self)

    def __add__(self, other):
        return Lattice(self.X, self.basis.hstack(other.basis))

    def dual_basis(self):
        """Basis of {f : f(M) in O} in dual coordinates."""
        return inverse(self.basis).transpose()

    def intersection(self, other):
        Bd = self.dual_basis().hstack(other.dual_basis())
        H, _ = column_hermite(Bd)
        return Lattice(self.X, inverse(H).transpose())

    __and__ = intersection

    def phi_image(self):
        return Lattice(self.X, self.X.phi(self.basis))

    def dual(self, Xd=None):
        Xd = self.X.dual() if Xd is None else Xd
        return Lattice(Xd, self.dual_basis())

    def tensor(self, other, Xt=None):
        Xt = self.X.tensor(other.X) if Xt is None else Xt
        return Lattice(Xt, self.basis.kron(other.basis))

    def to_json(self):
        return {"basis": self.basis.to_json()}

    @classmethod
    def from_json(cls, X, doc):
        return cls(X, ValuedMatrix.from_json(X.ctx, doc["basis"]))


# -- types and Mazur's inequality ----------------------------------------------------

def lattice_type(M):
    """Elementary divisors of phi(M) relative to M, decreasing."""
    if M.X.d == 0:
        return SlopeVector([])
    C = inverse(M.basis) @ M.X.phi(M.basis)
    return SlopeVector(smith_valuations(C))


def check_mazur(M):
    return dominance_leq(M.X.newton_vector(), lattice_type(M))


# -- strongly divisible lattices ------------------------------------------------------

def adapted_basis(M, F):
    """Basis u of M with F^i cap M spanned by the u_r with mu_r >= i.

    Returned as a matrix whose r-th column belongs to the jump F.mu[r].
    """
    coords = inverse(M.basis) @ F.flag
    blocks = [F.c(i) for i in F.levels()]
    S = saturate(coords, blocks)
    return M.basis @ S


def T(M, F):
    """phi(sum_i pi**(-i) (F^i cap M))."""
    u = adapted_basis(M, F)
    img = M.X.phi(u)
    try:
        return Lattice(M.X, _scale_columns(img, [-m for m in F.mu]))
    except ValueError as exc:
        # phi(u) is invertible, so a rank defect here is lost precision
        raise InsufficientPrecision("T(M) not determined at the working precision") from exc


def _scale_columns(B, exps):
    D = ValuedMatrix.pi_diagonal(B.ctx, exps)
    return B @ D


def strongly_divisible(M, F):
    return T(M, F) == M


def default_budget(F):
    mu = F.mu
    if not mu:
        return 1
    return 20 * len(mu) * (mu[0] - mu[-1] + 1)


def laffaille_iterate(M0, F, max_iter=None, mode="descending", drift_limit=None):
    """Adapted lattice reached from M0.

    ``mode="descending"`` iterates M -> M cap T(M): the sequence decreases and
    contains every adapted lattice inside M0, so when it stops it stops at the
    largest adapted lattice inside M0.  ``"ascending"`` iterates M -> M + T(M)
    (smallest adapted lattice containing M0) and ``"plain"`` iterates M -> T(M).
    The covolume of each step is recorded; NoConvergence carries that drift.
    It is raised when the budget runs out or when the covolume has moved by
    more than ``drift_limit``, by default the larger of a quarter of the
    working precision and d (mu_1 - mu_d).
    """
    budget = default_budget(F) if max_iter is None else max_iter
    M = M0
    drift = [M.covolume()]
    if drift_limit is None:
        hodge = F.d * (F.mu[0] - F.mu[-1]) if F.mu else 0
        drift_limit = max(4, M0.X.ctx.N // 4, hodge)
    limit = drift_limit
    seen = {M.key}
    for step in range(1, budget + 1):
        if abs(drift[-1] - drift[0]) > limit:
            raise NoConvergence(step - 1, drift, "covolume drift exceeds the limit")
        TM = T(M, F)
        if TM == M:
            M.iterations = step
            return M
        if mode == "descending":
            nxt = M & TM
        elif mode == "ascending":
            nxt = M + TM
        elif mode == "plain":
            nxt = TM
        else:
            raise ValueError(f"unknown mode {mode!r}")
        if nxt == M:
            raise NoConvergence(step, drift, "stuck: T(M) strictly comparable to M (t_H != t_N?)")
        if nxt.key in seen:
            raise NoConvergence(step, drift, "the iteration cycles")
        seen.add(nxt.key)
        M = nxt
        drift.append(M.covolume())
    raise NoConvergence(budget, drift)


def adapted_bounds(M, F, max_iter=None):
    """(M_max, M_min): largest adapted lattice inside M, smallest containing M."""
    Mmax = laffaille_iterate(M, F, max_iter, mode="descending")
    Mmin = laffaille_iterate(M, F, max_iter, mode="ascending")
    return Mmax, Mmin


def strongly_divisible_basis(M, F):
    """Adapted basis u of a strongly divisible M and e_r = pi**(-mu_r) phi(u_r).

    Returns (u, e).  Raises NotStronglyDivisible unless T(M) = M, and checks
    that e is a basis of M with pi**mu_r e_r spanning phi(M), which makes the
    type of M equal to mu.
    """
    if not strongly_divisible(M, F):
        raise NotStronglyDivisible("T(M) differs from M")
    u = adapted_basis(M, F)
    e = _scale_columns(M.X.phi(u), [-m for m in F.mu])
    if Lattice(M.X, e) != M:
        raise NotStronglyDivisible("e is not a basis of M")
    # pi**mu_r e_r = phi(u_r), and u is a basis of M, so these span phi(M)
    if Lattice(M.X, M.X.phi(u)) != M.phi_image():
        raise InsufficientPrecision("phi(u) does not span phi(M) at this precision")
    return u, e


def construct_lattice_of_type(X, mu, budget=None, max_iter=None):
    """Lattice of type mu, through an admissible filtration of type mu."""
    from .existence import construct_admissible_filtration
    mu = SlopeVector(mu)
    nu = X.newton_vector()
    if len(mu) != X.d or not mu.is_integral() or not dominance_leq(nu, mu):
        raise DominanceFails(mu, nu)
    try:
        F = construct_admissible_filtration(X, mu.as_ints(), budget)
    except RetriesExhausted as exc:
        if isinstance(exc, ConstructionRetryExhausted):
            raise
        raise ConstructionRetryExhausted(str(exc), exc.witness) from exc
    M = laffaille_iterate(Lattice.standard(X), F, max_iter)
    if lattice_type(M) != mu:
        raise InsufficientPrecision("adapted lattice has the wrong type at this precision")
    M.filtration = F
    return M
