"""Isocrystals (D, phi): standard forms, Newton vectors, slope decomposition
and sub-isocrystals."""

from __future__ import annotations

import random
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from math import gcd, lcm

from .errors import InsufficientPrecision, NotDiagonalizableAtPrecision
from .linalg import (ValuedMatrix, column_basis, intersect_spans, inverse, rank,
                     ring_of, saturate, span_key)
from .polygon import SlopeVector, lower_hull


class Isocrystal:
    """Finite-dimensional space with Frobenius ``phi(v) = A sigma(v)``.

    ``rho`` is the declared rationality level: every entry of ``A`` is fixed by
    ``sigma**rho``.  ``rational_level`` optionally restricts sub-isocrystals to
    those defined over the fixed field of ``sigma**rational_level``.
    """

    def __init__(self, ctx, A, rho=None, rational_level=None, summands=None, hint=None):
        if A.nrows != A.ncols:
            raise ValueError("Frobenius matrix must be square")
        self.ctx = ctx
        self.A = A
        self.d = A.nrows
        self.rho = ctx.r if rho is None else rho
        if self.rho < 1:
            raise ValueError("rationality level must be positive")
        self.rational_level = rational_level
        self.summands = summands
        self._hint = hint

    def __repr__(self):
        tag = f", summands={self.summands}" if self.summands else ""
        return f"Isocrystal(d={self.d}, p={self.ctx.p}, r={self.ctx.r}{tag})"

    # -- Frobenius ---------------------------------------------------------------

    @cached_property
    def A_inv(self):
        return inverse(self.A)

    def phi(self, V):
        """Image of the columns of V."""
        return self.A @ V.frobenius(1)

    def phi_inverse(self, V):
        return (self.A_inv @ V).frobenius(-1)

    def power_matrix(self, s):
        """Matrix B_s with phi**s(v) = B_s sigma**s(v)."""
        B = self.A
        for k in range(1, s):
            B = B @ self.A.frobenius(k)
        return B

    @cached_property
    def t_N(self):
        """v(det A), the total of the Newton vector."""
        return self.A.det().valuation()

    # -- Newton vector -------------------------------------------------------------

    @cached_property
    def _newton(self):
        return newton_vector_of(self.A, self.rho)

    def newton_vector(self):
        return self._newton

    def is_multiplicity_free(self):
        for slope, mult in self.newton_vector().multiplicities():
            if mult != slope.denominator:
                return False
        return True

    def slopes(self):
        return [s for s, _ in self.newton_vector().multiplicities()]

    # -- slope decomposition ---------------------------------------------------------

    def decomposition_period(self):
        dens = [s.denominator for s in self.slopes()] or [1]
        return lcm(*dens, self.ctx.r)

    @cached_property
    def _decomposition(self):
        hint = self._hint
        if isinstance(hint, tuple):
            # decomposition of the source of a base change, moved along g
            src, g = hint
            self._hint = hint = src._decomposition.transformed(g)
        if hint is not None:
            return hint
        return generic_slope_decomposition(self)

    def slope_decomposition(self):
        return self._decomposition

    # -- base change and functoriality -------------------------------------------------

    def base_change(self, g, g_inv=None):
        """Isomorphic isocrystal in the coordinates v' = g v."""
        g_inv = inverse(g) if g_inv is None else g_inv
        A2 = g @ self.A @ g_inv.frobenius(1)
        hint = None
        if self._hint is not None:
            hint = (self, g)
        return Isocrystal(self.ctx, A2, rho=self.ctx.r, rational_level=self.rational_level,
                          summands=self.summands, hint=hint)

    def dual(self):
        """Dual isocrystal: matrix (A^T)^{-1}."""
        A2 = inverse(self.A.transpose())
        summands = None
        if self.summands is not None:
            summands = [(-a, b, m) for a, b, m in self.summands]
        hint = self._decomposition.dual() if self._hint is not None else None
        return Isocrystal(self.ctx, A2, rho=self.rho, rational_level=self.rational_level,
                          summands=summands, hint=hint)

    def tensor(self, other):
        A2 = self.A.kron(other.A)
        hint = None
        if self._hint is not None and other._hint is not None:
            hint = self._decomposition.tensor(other._decomposition)
        rl = self.rational_level or other.rational_level
        return Isocrystal(self.ctx, A2, rho=lcm(self.rho, other.rho), rational_level=rl, hint=hint)

    # -- subspaces -------------------------------------------------------------------

    def is_stable(self, W):
        """phi(span W) = span W at the working precision."""
        k = W.ncols
        if k == 0:
            return True
        if rank(W.hstack(self.phi(W))) != k:
            return False
        m = self.rational_level
        if m is not None and m % self.ctx.r:
            return rank(W.hstack(W.frobenius(m))) == k
        return True

    def sub(self, W, check=True):
        """The sub-isocrystal spanned by the columns of W."""
        return SubIsocrystal(self, W, check=check)

    def zero_sub(self):
        return SubIsocrystal(self, ValuedMatrix.zeros(self.ctx, self.d, 0), check=False)

    def whole(self):
        return SubIsocrystal(self, ValuedMatrix.identity(self.ctx, self.d), check=False)

    def largest_stable_inside(self, W):
        """Largest phi-stable subspace contained in span W (restricted to the
        rational level when one is declared)."""
        cur = column_basis(W) if W.ncols else W
        m = self.rational_level
        restrict = m is not None and m % self.ctx.r
        while cur.ncols:
            nxt = intersect_spans(cur, self.phi_inverse(cur))
            if restrict and nxt.ncols:
                nxt = intersect_spans(nxt, nxt.frobenius(-m))
            if nxt.ncols == cur.ncols:
                return cur
            cur = nxt
        return cur

    def stable_hull(self, W):
        """Smallest phi-stable subspace containing span W."""
        cur = column_basis(W) if W.ncols else W
        m = self.rational_level
        restrict = m is not None and m % self.ctx.r
        while True:
            nxt = column_basis(cur.hstack(self.phi(cur)))
            if restrict:
                nxt = column_basis(nxt.hstack(nxt.frobenius(m)))
            if nxt.ncols == cur.ncols:
                return cur
            cur = nxt

    def cyclic_span(self, v):
        return self.stable_hull(v)

    # -- subobject families -------------------------------------------------------------

    def subobject_family(self, strategy=None):
        """Certified sub-isocrystals; see :class:`IsotypicSums` and :class:`CyclicSpans`."""
        if strategy is None:
            strategy = default_strategy()
        return strategy.build(self)


class SubIsocrystal:
    """A phi-stable subspace with its induced Frobenius.

    The basis is saturated, so the induced matrix is computed on the pivot rows
    of a unit-triangular block.
    """

    def __init__(self, parent, W, check=True, saturated=False):
        self.parent = parent
        ctx = parent.ctx
        if W.ncols and not saturated:
            W = column_basis(W)
        self.basis = W
        self.dim = W.ncols
        if check and not parent.is_stable(W):
            raise ValueError("subspace is not phi-stable")
        self._ctx = ctx

    def __repr__(self):
        return f"SubIsocrystal(dim={self.dim}, t_N={self.t_N})"

    @cached_property
    def key(self):
        return span_key(self.basis)

    @cached_property
    def induced_matrix(self):
        """Matrix A' with phi(W) = W A'."""
        if self.dim == 0:
            return ValuedMatrix.zeros(self._ctx, 0, 0)
        return self.coordinates(self.parent.phi(self.basis))

    @cached_property
    def _pivots(self):
        return _pivot_rows(self.basis)

    @cached_property
    def _pivot_inverse(self):
        return inverse(self.basis.rows_of(self._pivots))

    def coordinates(self, V):
        """Coordinates in this basis of vectors V lying in the subspace."""
        return self._pivot_inverse @ V.rows_of(self._pivots)

    @cached_property
    def t_N(self):
        if self.dim == 0:
            return 0
        return self.induced_matrix.det().valuation()

    def newton_vector(self):
        if self.dim == 0:
            return SlopeVector([])
        return newton_vector_of(self.induced_matrix, self._ctx.r)

    def as_isocrystal(self):
        return Isocrystal(self._ctx, self.induced_matrix, rho=self._ctx.r)

    def contains(self, other):
        if other.dim == 0:
            return True
        return rank(self.basis.hstack(other.basis)) == self.dim

    def __add__(self, other):
        if other.dim == 0:
            return self
        if self.dim == 0:
            return other
        return SubIsocrystal(self.parent, column_basis(self.basis.hstack(other.basis)), check=False)

    def intersection(self, other):
        return SubIsocrystal(self.parent, intersect_spans(self.basis, other.basis), check=False)


def _pivot_rows(W):
    """Rows of an integral full-rank W whose square minor is a unit."""
    R = ring_of(W.ctx)
    d, k = W.shape
    # greedy: reuse the saturation pivot search on a copy
    S = W
    used = []
    cols = [[S.data[i][j] for i in range(d)] for j in range(k)]
    p = W.ctx.p
    K = S.K if S.K is not None else W.ctx.N
    modK = p ** K
    for c in range(k):
        bi = -1
        for j in range(c, k):
            for i in range(d):
                if i not in used and R.val(cols[j][i]) == 0:
                    bi, bj = i, j
                    break
            if bi != -1:
                break
        if bi == -1:
            raise InsufficientPrecision("basis is not saturated")
        cols[c], cols[bj] = cols[bj], cols[c]
        piv = cols[c]
        uinv = R.unit_inv(piv[bi], K)
        for j in range(c + 1, k):
            y = R.mod(R.mul(cols[j][bi], uinv), modK)
            if not R.is_zero(y):
                cols[j] = [R.mod(R.sub(a, R.mul(y, b)), modK) for a, b in zip(cols[j], piv)]
        used.append(bi)
    return sorted(used)


# -- Newton vectors ---------------------------------------------------------------

def newton_vector_of(A, rho):
    """Slopes of phi = A sigma when A is fixed by sigma**rho."""
    d = A.nrows
    if d == 0:
        return SlopeVector([])
    B = A
    for k in range(1, rho):
        B = B @ A.frobenius(k)
    coeffs = B.charpoly()
    # coefficient of t**i is coeffs[d - i]
    known, bounds = [], []
    for i in range(d + 1):
        c = coeffs[d - i]
        if c.is_known:
            known.append((i, c.v))
        elif c.is_bounded:
            bounds.append((i, c.v))
    if not known or known[0][0] != 0:
        raise InsufficientPrecision("determinant valuation not certified")
    hull = lower_hull(known)
    for i, b in bounds:
        if b < _hull_value(hull, i):
            raise InsufficientPrecision("characteristic polynomial coefficient below the hull")
    slopes = []
    for (x0, y0), (x1, y1) in zip(hull, hull[1:]):
        s = -Fraction(y1 - y0) / ((x1 - x0) * rho)
        slopes.extend([s] * int(x1 - x0))
    return SlopeVector(slopes)


def _hull_value(hull, x):
    for (x0, y0), (x1, y1) in zip(hull, hull[1:]):
        if x0 <= x <= x1:
            return y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    return hull[-1][1]


# -- standard forms ---------------------------------------------------------------

def simple_block(ctx, a, b):
    """Companion block of E_{a/b}: phi e_i = e_{i+1}, phi e_b = pi**a e_1."""
    if b < 1 or gcd(a, b) != 1:
        raise ValueError(f"need gcd(a, b) = 1 and b >= 1, got ({a}, {b})")
    grid = [[0] * b for _ in range(b)]
    for i in range(b - 1):
        grid[i + 1][i] = 1
    grid[0][b - 1] = Fraction(ctx.p) ** a
    return ValuedMatrix.from_values(ctx, grid)


def standard_form(ctx, summands, rational_level=None):
    """Direct sum of simple blocks; summands are (a, b, multiplicity) triples."""
    summands = [tuple(int(x) for x in s) for s in summands]
    blocks = []
    for a, b, m in summands:
        if m < 0:
            raise ValueError("negative multiplicity")
        blocks.extend([(a, b)] * m)
    d = sum(b for _, b in blocks)
    A = ValuedMatrix.zeros(ctx, 0, 0)
    for a, b in blocks:
        A = A.block_diag(simple_block(ctx, a, b))
    dens = [b for _, b in blocks] or [1]
    s = lcm(*dens, ctx.r)
    parts = {}
    offset = 0
    for a, b in blocks:
        alpha = Fraction(a, b)
        parts.setdefault(alpha, []).extend(range(offset, offset + b))
        offset += b
    I = ValuedMatrix.identity(ctx, d)
    hint = SlopeDecomposition(s, [(alpha, I.columns(idx)) for alpha, idx in
                                  sorted(parts.items(), reverse=True)])
    return Isocrystal(ctx, A, rho=1, rational_level=rational_level, summands=summands, hint=hint)


def diagonal_isocrystal(ctx, exponents):
    """phi = diag(pi**a_1, ..., pi**a_d) sigma."""
    return standard_form(ctx, [(a, 1, 1) for a in exponents])


# -- slope decomposition ------------------------------------------------------------

class SlopeDecomposition:
    """Bases of the spaces V_alpha = {v : phi**s v = pi**(s alpha) v}."""

    def __init__(self, s, parts):
        self.s = s
        self.parts = list(parts)

    def __repr__(self):
        dims = ", ".join(f"{a}: {B.ncols}" for a, B in self.parts)
        return f"SlopeDecomposition(s={self.s}, {{{dims}}})"

    def slopes(self):
        return [a for a, _ in self.parts]

    def component(self, alpha):
        for a, B in self.parts:
            if a == alpha:
                return B
        raise KeyError(alpha)

    def basis_matrix(self):
        M = None
        for _, B in self.parts:
            M = B if M is None else M.hstack(B)
        return M

    def transformed(self, g):
        return SlopeDecomposition(self.s, [(a, g @ B) for a, B in self.parts])

    def dual(self):
        """Decomposition of the dual: dual basis vectors, slopes negated."""
        E = self.basis_matrix()
        Ed = inverse(E).transpose()
        out, offset = [], 0
        for a, B in self.parts:
            out.append((-a, Ed.columns(range(offset, offset + B.ncols))))
            offset += B.ncols
        out.sort(key=lambda t: t[0], reverse=True)
        return SlopeDecomposition(self.s, out)

    def tensor(self, other):
        s = lcm(self.s, other.s)
        parts = {}
        for a, B in self.parts:
            for b, C in other.parts:
                parts.setdefault(a + b, []).append(B.kron(C))
        out = []
        for alpha in sorted(parts, reverse=True):
            mats = parts[alpha]
            M = mats[0]
            for X in mats[1:]:
                M = M.hstack(X)
            out.append((alpha, M))
        return SlopeDecomposition(s, out)

    def verify(self, X):
        """Check phi**s v = pi**(s alpha) v on every basis vector, and that the
        bases together span D."""
        B = X.power_matrix(self.s)
        for alpha, E in self.parts:
            lhs = B @ E.frobenius(self.s)
            rhs = E.scale_pi(int(alpha * self.s))
            if not lhs.equal_at_precision(rhs):
                return False
        M = self.basis_matrix()
        return M is not None and M.ncols == X.d and rank(M) == X.d


def generic_slope_decomposition(X):
    """Kernels of B_s - pi**(s alpha) with s a multiple of the residue degree, so
    that phi**s is linear over the coefficient field."""
    s = X.decomposition_period()
    B = X.power_matrix(s)
    from .linalg import kernel
    parts = []
    for alpha, mult in X.newton_vector().multiplicities():
        shift = ValuedMatrix.identity(X.ctx, X.d).scale_pi(int(alpha * s))
        ker = kernel(B - shift)
        if ker.ncols != mult:
            raise NotDiagonalizableAtPrecision(
                f"slope {alpha}: kernel of dimension {ker.ncols}, expected {mult}")
        parts.append((alpha, ker))
    dec = SlopeDecomposition(s, parts)
    if rank(dec.basis_matrix()) != X.d:
        raise NotDiagonalizableAtPrecision("slope spaces do not span")
    return dec


# -- subobject strategies --------------------------------------------------------------

class Family:
    """A deduplicated list of sub-isocrystals; ``complete`` when it provably
    contains every sub-isocrystal."""

    def __init__(self, X, complete=False):
        self.X = X
        self.members = []
        self._keys = set()
        self.complete = complete

    def add(self, sub):
        key = sub.key
        if key in self._keys:
            return False
        self._keys.add(key)
        self.members.append(sub)
        return True

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)


class IsotypicSums:
    """All sums of whole isoclinic components."""

    def build(self, X, family=None):
        family = Family(X) if family is None else family
        dec = X.slope_decomposition()
        parts = dec.parts
        n = len(parts)
        for size in range(n + 1):
            for combo in combinations(range(n), size):
                if not combo:
                    family.add(X.zero_sub())
                    continue
                W = parts[combo[0]][1]
                for j in combo[1:]:
                    W = W.hstack(parts[j][1])
                family.add(SubIsocrystal(X, column_basis(W), check=True))
        if X.rational_level is None and X.is_multiplicity_free():
            family.complete = True
        return family


class CyclicSpans:
    """phi-cyclic subobjects generated by structured and random slope vectors,
    together with their sums with isoclinic components."""

    def __init__(self, structured=16, random_count=64, seed=0):
        self.structured = structured
        self.random_count = random_count
        self.seed = seed

    def vectors(self, X):
        dec = X.slope_decomposition()
        rng = random.Random(self.seed)
        ctx = X.ctx
        out = []
        for alpha, E in dec.parts:
            k = E.ncols
            if k <= alpha.denominator:
                continue
            cols = [E.column(j) for j in range(k)]
            out.extend((alpha, c) for c in cols)
            for i, j in combinations(range(k), 2):
                out.append((alpha, cols[i] + cols[j]))
        out = out[: self.structured]
        parts = [(a, E) for a, E in dec.parts if E.ncols > a.denominator]
        for t in range(self.random_count if parts else 0):
            alpha, E = parts[t % len(parts)]
            coeffs = ValuedMatrix.from_values(ctx, [[_rational_random(ctx, X, rng)] for _ in range(E.ncols)])
            out.append((alpha, E @ coeffs))
        return out

    def build(self, X, family=None):
        family = Family(X) if family is None else family
        dec = X.slope_decomposition()
        for alpha, v in self.vectors(X):
            try:
                W = X.cyclic_span(v)
            except InsufficientPrecision:
                continue
            sub = SubIsocrystal(X, W, check=False)
            family.add(sub)
            others = [B for a, B in dec.parts if a != alpha]
            for size in range(1, len(others) + 1):
                for combo in combinations(others, size):
                    M = W
                    for B in combo:
                        M = M.hstack(B)
                    family.add(SubIsocrystal(X, column_basis(M), check=False))
        return family


def _rational_random(ctx, X, rng):
    m = X.rational_level
    if m is not None and m % ctx.r:
        # an element fixed by sigma**m: an integer is always safe
        return rng.randrange(ctx.p ** 8)
    return ctx.random_integer(rng, 8)


class Combined:
    """Union of several strategies; complete when the first complete one says so.

    With ``skip_when_complete`` the later strategies are not run once the
    family is already provably complete.
    """

    def __init__(self, *strategies, skip_when_complete=True):
        self.strategies = strategies
        self.skip_when_complete = skip_when_complete

    def build(self, X, family=None):
        family = Family(X) if family is None else family
        for strat in self.strategies:
            if family.complete and self.skip_when_complete:
                break
            strat.build(X, family)
        return family


def default_strategy(seed=0):
    return Combined(IsotypicSums(), CyclicSpans(16, 64, seed))
