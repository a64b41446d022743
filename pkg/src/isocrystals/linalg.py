"""Matrices over the coefficient field.

A ``ValuedMatrix`` stores ``p**e * X + O(p**(e + K))`` where ``X`` is a grid of
integral elements and ``K`` is one absolute precision shared by every entry
(``None`` for exact matrices).  Integral elements are plain ints when the
residue degree is 1 and integer r-tuples on the power basis otherwise.

Elimination always pivots on an entry of minimal valuation in the active
block, so every multiplier is integral and no division by an entry of
uncertain valuation ever happens.
"""

from __future__ import annotations

import math
import operator
from functools import cached_property
from itertools import chain

from .errors import InsufficientPrecision, LengthMismatch
from .scalar import ValuedScalar

INF = math.inf


class Ring:
    """Arithmetic on integral elements of one context, without bookkeeping."""

    def __init__(self, ctx):
        self.ctx = ctx
        p, r = ctx.p, ctx.r
        self.p, self.r = p, r
        if r == 1:
            self.zero, self.one = 0, 1
            self.add = lambda a, b: a + b
            self.sub = lambda a, b: a - b
            self.neg = lambda a: -a
            self.mul = lambda a, b: a * b
            self.smul = lambda c, a: c * a
            self.mod = lambda a, m: a % m
            self.is_zero = lambda a: a == 0
            self.shift_down = lambda a, k: a // p ** k
            self.to_tuple = lambda a: (a,)
            self.from_tuple = lambda t: t[0]
            self.maxabs = abs
        else:
            self.zero = (0,) * r
            self.one = (1,) + (0,) * (r - 1)
            self.add = lambda a, b: tuple(x + y for x, y in zip(a, b))
            self.sub = lambda a, b: tuple(x - y for x, y in zip(a, b))
            self.neg = lambda a: tuple(-x for x in a)
            self.smul = lambda c, a: tuple(c * x for x in a)
            self.mod = lambda a, m: tuple(x % m for x in a)
            self.is_zero = lambda a: not any(a)
            self.shift_down = lambda a, k: tuple(x // p ** k for x in a)
            self.to_tuple = tuple
            self.from_tuple = tuple
            self.maxabs = lambda a: max(abs(x) for x in a)
            if r == 2:
                f0, f1 = ctx.modulus[0], ctx.modulus[1]
                self._f0, self._f1 = f0, f1
                self.add = lambda a, b: (a[0] + b[0], a[1] + b[1])
                self.sub = lambda a, b: (a[0] - b[0], a[1] - b[1])
                self.mod = lambda a, m: (a[0] % m, a[1] % m)

                def mul(a, b):
                    a0, a1 = a
                    b0, b1 = b
                    t = a1 * b1
                    return (a0 * b0 - f0 * t, a0 * b1 + a1 * b0 - f1 * t)
                self.mul = mul
            else:
                self.mul = ctx.polymul
                self._rows = ctx._reduction_rows

    def val(self, a):
        """p-adic valuation of an integral element (inf for 0)."""
        p = self.p
        if self.r == 1:
            if a == 0:
                return INF
            if p == 2:
                return (a & -a).bit_length() - 1
            v = 0
            while a % p == 0:
                a //= p
                v += 1
            return v
        best = INF
        for c in a:
            if c:
                if p == 2:
                    v = (c & -c).bit_length() - 1
                else:
                    v = 0
                    while c % p == 0:
                        c //= p
                        v += 1
                if v < best:
                    best = v
                    if v == 0:
                        return 0
        return best

    def dot(self, xs, ys):
        """Sum of products, reduced modulo the modulus only once."""
        r = self.r
        if r == 1:
            return sum(map(operator.mul, xs, ys))
        if r == 2:
            s0 = s1 = s2 = 0
            for (a0, a1), (b0, b1) in zip(xs, ys):
                s0 += a0 * b0
                s1 += a0 * b1 + a1 * b0
                s2 += a1 * b1
            return (s0 - self._f0 * s2, s1 - self._f1 * s2)
        prod = [0] * (2 * r - 1)
        for a, b in zip(xs, ys):
            for i, ai in enumerate(a):
                if ai:
                    for j, bj in enumerate(b):
                        prod[i + j] += ai * bj
        low = prod[:r]
        for k, row in enumerate(self._rows):
            c = prod[r + k]
            if c:
                for i in range(r):
                    low[i] += c * row[i]
        return tuple(low)

    def frob(self, a, k):
        if self.r == 1:
            return a
        if self.r == 2:
            if k % 2 == 0:
                return a
            (s00, s01), (s10, s11) = self.ctx.frobenius_matrices[1]
            a0, a1 = a
            return (s00 * a0 + s01 * a1, s10 * a0 + s11 * a1)
        return self.ctx.apply_frobenius(a, k)

    def unit_inv(self, a, k):
        m = self.p ** k
        if self.r == 1:
            return pow(a % m, -1, m)
        if self.r == 2:
            # conjugate over norm, for the modulus t**2 + f1 t + f0
            a0, a1 = a
            f0, f1 = self._f0, self._f1
            ninv = pow((a0 * a0 - a0 * a1 * f1 + a1 * a1 * f0) % m, -1, m)
            return ((a0 - a1 * f1) * ninv % m, -a1 * ninv % m)
        return self.ctx.unit_inverse(a, k)

    def split(self, a, k):
        """(q, rem) with a = rem + p**k * q and rem reduced into [0, p**k)."""
        m = self.p ** k
        if self.r == 1:
            rem = a % m
            return (a - rem) // m, rem
        rem = tuple(x % m for x in a)
        return tuple((x - y) // m for x, y in zip(a, rem)), rem

    def to_scalar(self, a, e, K):
        return ValuedScalar.from_poly(self.ctx, e, self.to_tuple(a), K)


def ring_of(ctx):
    r = ctx.__dict__.get("_ring")
    if r is None:
        r = Ring(ctx)
        ctx.__dict__["_ring"] = r
    return r


def _min(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return a if a < b else b


class ValuedMatrix:
    """Dense matrix ``p**e * data + O(p**(e + K))`` over the coefficient field."""

    def __init__(self, ctx, data, e=0, K=None, shape=None):
        self.ctx = ctx
        self.data = [list(row) for row in data]
        if shape is None:
            shape = (len(self.data), len(self.data[0]) if self.data else 0)
        self.nrows, self.ncols = shape
        self.e = e
        self.K = K
        if K is not None:
            if K <= 0:
                R = ring_of(ctx)
                self.data = [[R.zero] * self.ncols for _ in range(self.nrows)]
                self.K = max(K, 0)
            else:
                self._reduce()
        else:
            self._cap()

    # -- construction ------------------------------------------------------------

    @classmethod
    def from_values(cls, ctx, grid):
        """Build from a grid of ValuedScalars, ints, Fractions or coefficient lists."""
        grid = [[ValuedScalar.from_value(ctx, x) for x in row] for row in grid]
        nrows = len(grid)
        ncols = len(grid[0]) if grid else 0
        e = None
        for row in grid:
            if len(row) != ncols:
                raise LengthMismatch("ragged matrix")
            for x in row:
                if x.v is not None and (e is None or x.v < e):
                    e = x.v
        R = ring_of(ctx)
        if e is None:
            return cls(ctx, [[R.zero] * ncols for _ in range(nrows)], 0, None, (nrows, ncols))
        K = None
        data = []
        p = ctx.p
        for row in grid:
            out = []
            for x in row:
                if x.unit is None:
                    out.append(R.zero)
                    if x.v is not None:
                        K = _min(K, x.v - e)
                else:
                    s = p ** (x.v - e)
                    out.append(R.smul(s, R.from_tuple(x.unit)))
                    if x.prec is not None:
                        K = _min(K, x.v + x.prec - e)
            data.append(out)
        return cls(ctx, data, e, K, (nrows, ncols))

    @classmethod
    def identity(cls, ctx, n):
        R = ring_of(ctx)
        return cls(ctx, [[R.one if i == j else R.zero for j in range(n)] for i in range(n)], 0, None, (n, n))

    @classmethod
    def zeros(cls, ctx, nrows, ncols):
        R = ring_of(ctx)
        return cls(ctx, [[R.zero] * ncols for _ in range(nrows)], 0, None, (nrows, ncols))

    @classmethod
    def diagonal(cls, ctx, values):
        n = len(values)
        grid = [[values[i] if i == j else 0 for j in range(n)] for i in range(n)]
        return cls.from_values(ctx, grid)

    @classmethod
    def pi_diagonal(cls, ctx, exponents):
        """diag(pi**a_1, ..., pi**a_n)."""
        n = len(exponents)
        R = ring_of(ctx)
        lo = min(exponents) if n else 0
        data = [[R.smul(ctx.p ** (exponents[i] - lo), R.one) if i == j else R.zero
                 for j in range(n)] for i in range(n)]
        return cls(ctx, data, lo, None, (n, n))

    def _reduce(self):
        R = ring_of(self.ctx)
        m = self.ctx.p ** self.K
        mod = R.mod
        self.data = [[mod(x, m) for x in row] for row in self.data]

    def _cap(self):
        """Turn an exact matrix whose entries grew too large into a finite one."""
        ctx = self.ctx
        R = ring_of(ctx)
        cap = ctx._exact_cap
        if ctx.r == 1:
            big = max(map(abs, chain.from_iterable(self.data)), default=0) >= cap
        elif ctx.r == 2:
            flat = chain.from_iterable
            big = max(map(abs, flat(flat(self.data))), default=0) >= cap
        else:
            big = any(R.maxabs(x) >= cap for row in self.data for x in row)
        if big:
            self._finitize()

    def _finitize(self):
        # the entries were exact, so keep as many digits as the cap allows
        K = self.default_precision() + self.ctx.N
        self.K = K
        self._reduce()

    def default_precision(self):
        """Flat precision that keeps N relative digits on every entry."""
        vmax = 0
        R = ring_of(self.ctx)
        for row in self.data:
            for x in row:
                v = R.val(x)
                if v != INF and v > vmax:
                    vmax = v
        return vmax + self.ctx.N

    def finite(self):
        """A copy with finite precision (exact matrices get default_precision)."""
        if self.K is not None:
            return self
        out = self.copy()
        out._finitize()
        return out

    def copy(self):
        return ValuedMatrix(self.ctx, self.data, self.e, self.K, (self.nrows, self.ncols))

    # -- access -------------------------------------------------------------------

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    @property
    def is_exact(self):
        return self.K is None

    def absolute_precision(self):
        return INF if self.K is None else self.e + self.K

    def __getitem__(self, idx):
        i, j = idx
        return ring_of(self.ctx).to_scalar(self.data[i][j], self.e, self.K)

    def entries(self):
        R = ring_of(self.ctx)
        return [[R.to_scalar(x, self.e, self.K) for x in row] for row in self.data]

    def column(self, j):
        return self.columns([j])

    def columns(self, idx):
        idx = list(idx)
        return ValuedMatrix(self.ctx, [[row[j] for j in idx] for row in self.data],
                            self.e, self.K, (self.nrows, len(idx)))

    def rows_of(self, idx):
        idx = list(idx)
        return ValuedMatrix(self.ctx, [self.data[i] for i in idx], self.e, self.K, (len(idx), self.ncols))

    def valuations(self):
        """Grid of entry valuations (inf for entries zero at precision)."""
        R = ring_of(self.ctx)
        out = []
        for row in self.data:
            out.append([R.val(x) + self.e if R.val(x) != INF else INF for x in row])
        return out

    def min_valuation(self):
        vals = [v for row in self.valuations() for v in row]
        return min(vals) if vals else INF

    def is_zero(self):
        R = ring_of(self.ctx)
        return all(R.is_zero(x) for row in self.data for x in row)

    def __repr__(self):
        body = "; ".join(", ".join(repr(x) for x in row) for row in self.entries())
        return f"ValuedMatrix[{self.nrows}x{self.ncols}]({body})"

    # -- structural ---------------------------------------------------------------

    def transpose(self):
        data = [list(col) for col in zip(*self.data)] if self.nrows else []
        return ValuedMatrix(self.ctx, data, self.e, self.K, (self.ncols, self.nrows))

    T = property(transpose)

    def hstack(self, other):
        if self.nrows != other.nrows:
            raise LengthMismatch("row counts differ")
        a, b = _align(self, other)
        data = [ra + rb for ra, rb in zip(a.data, b.data)]
        return ValuedMatrix(self.ctx, data, a.e, a.K, (self.nrows, self.ncols + other.ncols))

    def vstack(self, other):
        if self.ncols != other.ncols:
            raise LengthMismatch("column counts differ")
        a, b = _align(self, other)
        return ValuedMatrix(self.ctx, a.data + b.data, a.e, a.K, (self.nrows + other.nrows, self.ncols))

    def block_diag(self, other):
        R = ring_of(self.ctx)
        a, b = _align(self, other)
        data = [ra + [R.zero] * other.ncols for ra in a.data]
        data += [[R.zero] * self.ncols + rb for rb in b.data]
        return ValuedMatrix(self.ctx, data, a.e, a.K, (self.nrows + other.nrows, self.ncols + other.ncols))

    def kron(self, other):
        R = ring_of(self.ctx)
        mul = R.mul
        data = []
        for ra in self.data:
            for rb in other.data:
                data.append([mul(x, y) for x in ra for y in rb])
        return ValuedMatrix(self.ctx, data, self.e + other.e, _min(self.K, other.K),
                            (self.nrows * other.nrows, self.ncols * other.ncols))

    # -- arithmetic ---------------------------------------------------------------

    def __matmul__(self, other):
        if self.ncols != other.nrows:
            raise LengthMismatch(f"cannot multiply {self.shape} by {other.shape}")
        R = ring_of(self.ctx)
        dot, mod = R.dot, R.mod
        K = _min(self.K, other.K)
        cols = list(zip(*other.data)) if other.nrows else [()] * other.ncols
        data = _sparse_product(R, self.data, cols, self.ncols)
        if K is not None:
            m = self.ctx.p ** K
            data = [[mod(x, m) for x in row] for row in data]
        res = ValuedMatrix.__new__(ValuedMatrix)
        res.ctx, res.data, res.e, res.K = self.ctx, data, self.e + other.e, K
        res.nrows, res.ncols = self.nrows, other.ncols
        if K is None:
            res._cap()
        return res

    def __add__(self, other):
        if self.shape != other.shape:
            raise LengthMismatch("shapes differ")
        a, b = _align(self, other)
        add = ring_of(self.ctx).add
        data = [[add(x, y) for x, y in zip(ra, rb)] for ra, rb in zip(a.data, b.data)]
        return ValuedMatrix(self.ctx, data, a.e, a.K, self.shape)

    def __neg__(self):
        neg = ring_of(self.ctx).neg
        return ValuedMatrix(self.ctx, [[neg(x) for x in row] for row in self.data], self.e, self.K, self.shape)

    def __sub__(self, other):
        return self + (-other)

    def scale_pi(self, k):
        """pi**k times the matrix (exact)."""
        return ValuedMatrix(self.ctx, self.data, self.e + k, self.K, self.shape)

    def scale(self, c):
        """Multiply every entry by the scalar c."""
        c = ValuedScalar.from_value(self.ctx, c)
        if c.unit is None:
            if c.v is None:
                return ValuedMatrix.zeros(self.ctx, self.nrows, self.ncols)
            return ValuedMatrix(self.ctx, [[ring_of(self.ctx).zero] * self.ncols for _ in range(self.nrows)],
                                self.e + c.v, 0, self.shape)
        return _scale_by_unit(self, c)

    def frobenius(self, k=1):
        """Apply sigma**k entrywise."""
        ctx = self.ctx
        k %= ctx.r
        if k == 0:
            return self
        R = ring_of(ctx)
        frob = R.frob
        data = [[frob(x, k) for x in row] for row in self.data]
        K = self.K
        if not ctx.frobenius_is_exact:
            K = _min(K, ctx.frobenius_precision)
        return ValuedMatrix(ctx, data, self.e, K, self.shape)

    def truncate(self, K):
        """Forget everything beyond absolute precision e + K."""
        return ValuedMatrix(self.ctx, self.data, self.e, _min(self.K, K), self.shape)

    def with_absolute_precision(self, prec):
        return self.truncate(prec - self.e)

    def normalized(self):
        """Same matrix with e raised to the minimal entry valuation."""
        R = ring_of(self.ctx)
        w = INF
        for row in self.data:
            for x in row:
                v = R.val(x)
                if v < w:
                    w = v
        if w == INF or w == 0:
            return self
        sd = R.shift_down
        data = [[sd(x, w) for x in row] for row in self.data]
        K = None if self.K is None else self.K - w
        return ValuedMatrix(self.ctx, data, self.e + w, K, self.shape)

    def equal_at_precision(self, other):
        return self.shape == other.shape and (self - other).is_zero()

    # -- determinants and characteristic polynomials -------------------------------

    def charpoly(self):
        """Coefficients [c_0, ..., c_n] of det(t I - M) = sum c_j t**(n-j), as scalars.

        Division-free (Berkowitz), so the flat precision of the input carries over
        unchanged to every coefficient.
        """
        n = self.nrows
        if n != self.ncols:
            raise LengthMismatch("charpoly of a non-square matrix")
        coeffs = berkowitz(ring_of(self.ctx), self.data, None if self.K is None else self.ctx.p ** self.K)
        R = ring_of(self.ctx)
        out = []
        for j, c in enumerate(coeffs):
            out.append(R.to_scalar(c, j * self.e, self.K))
        return out

    def det(self):
        n = self.nrows
        c = self.charpoly()[n]
        return c if n % 2 == 0 else -c

    def to_json(self):
        return [[x.to_json() for x in row] for row in self.entries()]

    @classmethod
    def from_json(cls, ctx, doc):
        return cls.from_values(ctx, [[ValuedScalar.from_json(ctx, x) for x in row] for row in doc])


def _packed_product(R, rows, cols, n):
    """Products over a degree-2 ring by Kronecker substitution: a0 + a1 t is
    packed into the integer a0 + a1 2**B, so each dot product becomes one
    integer sum whose three 2**B-digits are the coefficients of 1, t, t**2."""
    flat = chain.from_iterable
    ba = max(map(abs, flat(flat(rows))), default=0).bit_length()
    bb = max(map(abs, flat(flat(cols))), default=0).bit_length()
    B = ba + bb + n.bit_length() + 3
    X = 1 << B
    mask, half = X - 1, X >> 1
    prows = [[a0 + (a1 << B) for a0, a1 in row] for row in rows]
    pcols = [[a0 + (a1 << B) for a0, a1 in col] for col in cols]
    f0, f1 = R._f0, R._f1
    mul = operator.mul
    out = []
    for pr in prows:
        line = []
        for pc in pcols:
            S = sum(map(mul, pr, pc))
            c0 = S & mask
            if c0 >= half:
                c0 -= X
            S = (S - c0) >> B
            c1 = S & mask
            if c1 >= half:
                c1 -= X
            c2 = (S - c1) >> B
            line.append((c0 - f0 * c2, c1 - f1 * c2))
        out.append(line)
    return out


def _sparse_product(R, rows, cols, n):
    """Row-by-column products that only visit positions where both factors
    can be nonzero."""
    if R.r == 2 and n >= 3:
        return _packed_product(R, rows, cols, n)
    is_zero, dot, zero = R.is_zero, R.dot, R.zero
    rows_nz = [[k for k, x in enumerate(row) if not is_zero(x)] for row in rows]
    cols_nz = [[k for k, x in enumerate(col) if not is_zero(x)] for col in cols]
    out = []
    for row, rn in zip(rows, rows_nz):
        line = []
        for col, cn in zip(cols, cols_nz):
            idx = rn if len(rn) <= len(cn) else cn
            if not idx:
                line.append(zero)
            elif len(idx) == n:
                line.append(dot(row, col))
            else:
                line.append(dot([row[k] for k in idx], [col[k] for k in idx]))
        out.append(line)
    return out


def _scale_by_unit(M, c):
    R = ring_of(M.ctx)
    u = R.from_tuple(c.unit)
    mul = R.mul
    data = [[mul(u, x) for x in row] for row in M.data]
    K = M.K
    if c.prec is not None:
        K = _min(K, c.prec)
    return ValuedMatrix(M.ctx, data, M.e + c.v, K, M.shape)


def _align(a, b):
    """Rewrite a and b over the same exponent e."""
    if a.e == b.e:
        if a.K == b.K:
            return a, b
        K = _min(a.K, b.K)
        return (a if a.K == K else ValuedMatrix(a.ctx, a.data, a.e, K, a.shape),
                b if b.K == K else ValuedMatrix(b.ctx, b.data, b.e, K, b.shape))
    if a.e > b.e:
        b2, a2 = _align(b, a)
        return a2, b2
    R = ring_of(a.ctx)
    s = a.ctx.p ** (b.e - a.e)
    sm = R.smul
    data = [[sm(s, x) for x in row] for row in b.data]
    Kb = None if b.K is None else b.K + b.e - a.e
    K = _min(a.K, Kb)
    a2 = a if K == a.K else ValuedMatrix(a.ctx, a.data, a.e, K, a.shape)
    return a2, ValuedMatrix(a.ctx, data, a.e, K, b.shape)


def berkowitz(R, A, m=None):
    """Characteristic polynomial coefficients (leading first) of a square grid.

    ``m`` is an optional modulus applied after every dot product.
    """
    n = len(A)
    dot, neg, one = R.dot, R.neg, R.one
    mod = (lambda x: x) if m is None else (lambda x: R.mod(x, m))
    if n == 0:
        return [one]
    vect = [one, neg(A[0][0])]
    for k in range(1, n):
        # border of the leading (k+1) x (k+1) block
        C = [A[i][k] for i in range(k)]
        Rw = A[k][:k]
        rows = [A[i][:k] for i in range(k)]
        t = [one, neg(A[k][k])]
        w = C
        for j in range(k):
            t.append(mod(neg(dot(Rw, w))))
            if j < k - 1:
                w = [mod(dot(row, w)) for row in rows]
        new = []
        for i in range(k + 2):
            lo, hi = max(0, i - k - 1), min(i, k)
            new.append(mod(dot([t[i - j] for j in range(lo, hi + 1)], vect[lo:hi + 1])))
        vect = new
    return vect


# -- elimination ------------------------------------------------------------------

class SmithData:
    """Result of full-pivot elimination: U * M * V = diag(pivots) (+ zero block).

    ``U`` and ``V`` are integral and unimodular (when requested); ``vals`` are the
    pivot valuations in increasing order, already including the exponent of M.
    """

    def __init__(self, rank, vals, pivots, U, V, K):
        self.rank = rank
        self.vals = vals
        self.pivots = pivots
        self.U = U
        self.V = V
        self.K = K


def _margin(ctx):
    return max(1, ctx.N // 4)


def smith(M, left=False, right=False, strict=True):
    """Full-pivot elimination with minimal-valuation pivots.

    The flat precision is preserved on the reduced matrix because every pivot
    row is divisible by its pivot's valuation.  Transforms lose at most the
    largest pivot valuation.  When ``strict`` and the matrix looks rank
    deficient, the decision is certified only if at least ``N // 4`` digits
    remain beyond the largest pivot; otherwise InsufficientPrecision.
    """
    ctx = M.ctx
    R = ring_of(ctx)
    p = ctx.p
    Mf = M.finite()
    K = Mf.K
    if K <= 0:
        raise InsufficientPrecision("matrix carries no digits")
    n, m = M.nrows, M.ncols
    a = [list(row) for row in Mf.data]
    mul, sub, add, val, mod = R.mul, R.sub, R.add, R.val, R.mod
    zero, one = R.zero, R.one
    U = [[one if i == j else zero for j in range(n)] for i in range(n)] if left else None
    V = [[one if i == j else zero for j in range(m)] for i in range(m)] if right else None
    modK = p ** K
    vals, pivots = [], []
    KT = K
    rank = 0
    for k in range(min(n, m)):
        best, bi, bj = INF, -1, -1
        for i in range(k, n):
            row = a[i]
            for j in range(k, m):
                v = val(row[j])
                if v < best:
                    best, bi, bj = v, i, j
                    if v == 0:
                        break
            if best == 0:
                break
        if best >= K:
            break
        if bi != k:
            a[k], a[bi] = a[bi], a[k]
            if U is not None:
                U[k], U[bi] = U[bi], U[k]
        if bj != k:
            for row in a:
                row[k], row[bj] = row[bj], row[k]
            if V is not None:
                for row in V:
                    row[k], row[bj] = row[bj], row[k]
        vp = best
        piv = a[k][k]
        unit = R.shift_down(piv, vp)
        kk = K - vp
        uinv = R.unit_inv(unit, kk)
        modk = p ** kk
        if kk < KT:
            KT = kk
        prow = a[k]
        for i in range(k + 1, n):
            y = a[i][k]
            if R.is_zero(y):
                continue
            mult = mod(mul(R.shift_down(y, vp), uinv), modk)
            row = a[i]
            for j in range(k, m):
                row[j] = mod(sub(row[j], mul(mult, prow[j])), modK)
            if U is not None:
                ur, uk = U[i], U[k]
                for j in range(n):
                    ur[j] = mod(sub(ur[j], mul(mult, uk[j])), modk)
        for j in range(k + 1, m):
            y = prow[j]
            if R.is_zero(y):
                continue
            if V is not None:
                mult = mod(mul(R.shift_down(y, vp), uinv), modk)
                for row in V:
                    row[j] = mod(sub(row[j], mul(mult, row[k])), modk)
            prow[j] = zero
        vals.append(vp + M.e)
        pivots.append(piv)
        rank += 1
    if strict and rank < min(n, m):
        top = vals[-1] - M.e if vals else 0
        if K - top < _margin(ctx):
            raise InsufficientPrecision("rank decision within the precision horizon")
    Um = ValuedMatrix(ctx, U, 0, KT, (n, n)) if left else None
    Vm = ValuedMatrix(ctx, V, 0, KT, (m, m)) if right else None
    out = SmithData(rank, vals, pivots, Um, Vm, K)
    return out


def rank(M, strict=True):
    if M.nrows == 0 or M.ncols == 0:
        return 0
    return smith(M, strict=strict).rank


def smith_valuations(M):
    """Elementary-divisor valuations of a square invertible matrix, decreasing."""
    if M.nrows != M.ncols:
        raise LengthMismatch("smith_valuations needs a square matrix")
    sd = smith(M)
    if sd.rank < M.nrows:
        raise InsufficientPrecision("matrix is singular at the working precision")
    return sorted(sd.vals, reverse=True)


def kernel(M):
    """Basis of the right kernel as the columns of a matrix (n x k).

    The columns are integral and span the saturated kernel lattice; they are
    known to flat precision ``K - max pivot valuation``, so ``M @ v`` vanishes
    to that precision (relative to the exponent of M).
    """
    m = M.ncols
    if M.nrows == 0:
        return ValuedMatrix.identity(M.ctx, m)
    sd = smith(M, right=True)
    return sd.V.columns(range(sd.rank, m))


def inverse(M):
    n = M.nrows
    if n != M.ncols:
        raise LengthMismatch("inverse of a non-square matrix")
    if n == 0:
        return M
    sd = smith(M, left=True, right=True)
    if sd.rank < n:
        raise InsufficientPrecision("matrix is singular at the working precision")
    ctx = M.ctx
    R = ring_of(ctx)
    p = ctx.p
    vrel = [v - M.e for v in sd.vals]
    vmax = max(vrel)
    K = sd.K
    # D^{-1} scaled by p**vmax: entries p**(vmax - v_i) / unit_i
    dinv = []
    for piv, v in zip(sd.pivots, vrel):
        u = R.shift_down(piv, v)
        dinv.append(R.smul(p ** (vmax - v), R.unit_inv(u, K - v)))
    V, U = sd.V, sd.U
    scaledV = [[R.mul(x, dinv[j]) for j, x in enumerate(row)] for row in V.data]
    Vs = ValuedMatrix(ctx, scaledV, 0, _min(V.K, K - vmax), (n, n))
    out = Vs @ U
    out.e = -vmax - M.e
    return out


def solve(A, B):
    """X with A X = B for invertible A."""
    return inverse(A) @ B


def is_integral(M):
    """All entries of valuation >= 0 (entries zero at precision count as integral)."""
    if M.e >= 0:
        return True
    R = ring_of(M.ctx)
    need = -M.e
    for row in M.data:
        for x in row:
            if R.val(x) < need:
                return False
    if M.K is not None and M.K < need:
        raise InsufficientPrecision("integrality not decidable at this precision")
    return True


def saturate(C, blocks=None):
    """Integral basis of (column span of C) intersected with the integral lattice.

    Columns are reduced in order, block by block: with ``blocks`` a list of
    increasing prefix lengths, the first ``blocks[t]`` output columns saturate
    the span of the first ``blocks[t]`` input columns.  Output columns are
    integral with a unit pivot, which certifies saturation.  The input must
    have full column rank.
    """
    ctx = C.ctx
    R = ring_of(ctx)
    p = ctx.p
    n, m = C.nrows, C.ncols
    if m == 0:
        return C.copy()
    Cf = C.finite()
    K = Cf.K
    if blocks is None:
        blocks = [m]
    cols = [[Cf.data[i][j] for i in range(n)] for j in range(m)]
    mul, sub, val, mod = R.mul, R.sub, R.val, R.mod
    used_rows = []
    KT = K
    start = 0
    out_cols = []
    for end in blocks:
        for k in range(start, end):
            best, bi, bj = INF, -1, -1
            for j in range(k, end):
                col = cols[j]
                for i in range(n):
                    if i in used_rows:
                        continue
                    v = val(col[i])
                    if v < best:
                        best, bi, bj = v, i, j
            if best >= KT:
                raise InsufficientPrecision("columns dependent at the working precision")
            if bj != k:
                cols[k], cols[bj] = cols[bj], cols[k]
            vp = best
            col = cols[k]
            unit = R.shift_down(col[bi], vp)
            kk = KT - vp
            uinv = R.unit_inv(unit, kk)
            modk = p ** kk
            # divide the pivot column by its pivot: integral since the pivot is minimal
            col = [mod(mul(R.shift_down(x, vp), uinv), modk) for x in col]
            cols[k] = col
            KT = kk
            for j in range(k + 1, m):
                y = cols[j][bi]
                if R.is_zero(y):
                    continue
                other = cols[j]
                cols[j] = [mod(sub(other[i], mul(y, col[i])), modk) for i in range(n)]
            for j in range(k + 1, m):
                cols[j] = [mod(x, modk) for x in cols[j]]
            used_rows.append(bi)
            out_cols.append(col)
        start = end
    data = [[out_cols[j][i] for j in range(m)] for i in range(n)]
    return ValuedMatrix(ctx, data, 0, KT, (n, m))


def column_hermite(B):
    """Canonical lower-triangular basis of the lattice spanned by the columns.

    Returns (H, key): H is an exact square matrix whose diagonal entries are
    powers of p and whose entries left of the diagonal are canonical residues
    modulo the diagonal entry of their row; key is a hashable form of H.
    Raises InsufficientPrecision when the precision does not determine the
    lattice, and ValueError when the columns do not span a full-rank lattice.
    """
    ctx = B.ctx
    R = ring_of(ctx)
    p = ctx.p
    d, n = B.nrows, B.ncols
    Bn = B.normalized()
    if Bn.K is None:
        # exact input: pick a precision large enough for every step
        Bf = Bn.truncate(Bn.default_precision() + _det_bound(Bn) + 2)
    else:
        Bf = Bn
    K = Bf.K
    cols = [[Bf.data[i][j] for i in range(d)] for j in range(n)]
    mul, sub, val, mod = R.mul, R.sub, R.val, R.mod
    KT = K
    diag = []
    for i in range(d):
        best, bj = INF, -1
        for j in range(i, n):
            v = val(cols[j][i])
            if v < best:
                best, bj = v, j
        if best >= KT:
            if bj == -1 or all(R.is_zero(cols[j][i]) for j in range(i, n)) and KT > ctx.N // 2 + sum(diag):
                raise ValueError("columns do not span a full-rank lattice")
            raise InsufficientPrecision("lattice not determined at the working precision")
        cols[i], cols[bj] = cols[bj], cols[i]
        k = best
        unit = R.shift_down(cols[i][i], k)
        kk = KT - k
        uinv = R.unit_inv(unit, kk)
        modk = p ** kk
        col = [mod(mul(x, uinv), modk) for x in cols[i]]
        col[i] = R.smul(p ** k, R.one)
        cols[i] = col
        KT = kk
        for j in range(i + 1, n):
            y = cols[j][i]
            if R.is_zero(mod(y, modk)):
                cols[j][i] = R.zero
                continue
            q = mod(R.shift_down(y, k), modk)
            other = cols[j]
            cols[j] = [mod(sub(other[t], mul(q, col[t])), modk) for t in range(d)]
            cols[j][i] = R.zero
        diag.append(k)
        for j in range(i):
            y = cols[j][i]
            q, rem = R.split(y, k)
            if not R.is_zero(q):
                other = cols[j]
                cols[j] = [mod(sub(other[t], mul(q, col[t])), modk) for t in range(d)]
            cols[j][i] = rem
        for j in range(n):
            cols[j] = [mod(x, modk) for x in cols[j]]
    # every entry must be determined: entries of row t are needed modulo p**diag[t]
    if KT < max(diag, default=0) + 1:
        raise InsufficientPrecision("lattice not determined at the working precision")
    data = []
    for t in range(d):
        row = []
        for j in range(d):
            if j > t:
                row.append(R.zero)
            elif j == t:
                row.append(R.smul(p ** diag[t], R.one))
            else:
                row.append(R.split(cols[j][t], diag[t])[1])
        data.append(row)
    H = ValuedMatrix(ctx, data, Bn.e, None, (d, d))
    key = (Bn.e, tuple(tuple(R.to_tuple(x) for x in row) for row in data))
    return H, key


def _det_bound(M):
    """Crude upper bound for the valuation spread created by elimination."""
    vals = [v for row in M.valuations() for v in row if v != INF]
    if not vals:
        return 0
    return (max(vals) - M.e) * M.nrows


def column_basis(C):
    """Saturated integral basis of the column span of C (columns may be dependent)."""
    ctx = C.ctx
    n, m = C.shape
    if m == 0 or n == 0:
        return ValuedMatrix.zeros(ctx, n, 0)
    Cn = C.normalized()
    sd = smith(Cn.transpose(), left=True)
    if sd.rank == 0:
        return ValuedMatrix.zeros(ctx, n, 0)
    rows = (sd.U @ Cn.transpose().scale_pi(-Cn.e)).rows_of(range(sd.rank))
    return saturate(rows.transpose())


def intersect_spans(W1, W2):
    """Basis of span(W1) intersected with span(W2); both inputs of full column rank."""
    ctx = W1.ctx
    if W1.ncols == 0 or W2.ncols == 0:
        return ValuedMatrix.zeros(ctx, W1.nrows, 0)
    a, b = W1.normalized(), W2.normalized()
    ker = kernel(a.scale_pi(-a.e).hstack(-b.scale_pi(-b.e)))
    if ker.ncols == 0:
        return ValuedMatrix.zeros(ctx, W1.nrows, 0)
    X = ker.rows_of(range(W1.ncols))
    return column_basis(a.scale_pi(-a.e) @ X)


def span_key(C):
    """Canonical hashable key of the L-span of the columns of C (full column rank).

    The saturated lattice of the span has a unique basis with unit pivots
    placed at the echelon rows of its reduction; entries are compared modulo
    p**(N // 2).
    """
    ctx = C.ctx
    d, k = C.shape
    if k == 0:
        return (d, 0)
    S = saturate(C)
    R = ring_of(ctx)
    p = ctx.p
    K = S.K if S.K is not None else ctx.N
    keep = max(1, ctx.N // 2)
    if K < keep:
        raise InsufficientPrecision("span not determined at the working precision")
    cols = [[S.data[i][j] for i in range(d)] for j in range(k)]
    mul, sub, val, mod = R.mul, R.sub, R.val, R.mod
    modK = p ** K
    piv_rows = []
    c = 0
    for i in range(d):
        if c == k:
            break
        bj = -1
        for j in range(c, k):
            if val(cols[j][i]) == 0:
                bj = j
                break
        if bj == -1:
            continue
        cols[c], cols[bj] = cols[bj], cols[c]
        uinv = R.unit_inv(cols[c][i], K)
        col = [mod(mul(x, uinv), modK) for x in cols[c]]
        cols[c] = col
        for j in range(k):
            if j != c:
                y = cols[j][i]
                if not R.is_zero(y):
                    cols[j] = [mod(sub(cols[j][t], mul(y, col[t])), modK) for t in range(d)]
        piv_rows.append(i)
        c += 1
    if c < k:
        raise InsufficientPrecision("span not determined at the working precision")
    mk = p ** keep
    return (d, k, tuple(piv_rows), tuple(tuple(R.to_tuple(mod(x, mk)) for x in col) for col in cols))


def random_unimodular(ctx, n, rng, digits=None):
    """Random g = L D U in GL_n of the valuation ring, with its inverse.

    L and U are unit lower and upper triangular with random integral entries
    of ``digits`` p-adic digits and D is a diagonal of random units.  Such
    products fill a dense open part of the group and invert by substitution.
    """
    digits = ctx.N if digits is None else digits
    R = ring_of(ctx)
    if n == 0:
        g = ValuedMatrix.zeros(ctx, 0, 0)
        return g, g
    bound = ctx.p ** digits
    if ctx.p == 2:
        def draw():
            return rng.getrandbits(digits)
    else:
        def draw():
            return rng.randrange(bound)

    def rnd():
        return R.from_tuple(tuple(draw() for _ in range(ctx.r)))

    Ld = [[rnd() if j < i else (R.one if i == j else R.zero) for j in range(n)] for i in range(n)]
    Ud = [[rnd() if j < i else (R.one if i == j else R.zero) for j in range(n)] for i in range(n)]
    units = [R.from_tuple(ctx.random_unit(rng, digits).unit) for _ in range(n)]
    K = 2 * ctx.N + digits
    mul = R.mul
    inv = [R.unit_inv(u, K) for u in units]
    # D U scales the rows of U; U^-1 D^-1 scales the columns of U^-1
    DU = [[mul(units[j], Ud[i][j]) for j in range(n)] for i in range(n)]
    Uinv = _unit_lower_inverse(R, Ud)
    UinvDinv = [[mul(Uinv[i][j], inv[i]) for j in range(n)] for i in range(n)]
    L = ValuedMatrix(ctx, Ld, 0, None, (n, n))
    g = L @ ValuedMatrix(ctx, DU, 0, None, (n, n)).transpose()
    Linv = ValuedMatrix(ctx, _unit_lower_inverse(R, Ld), 0, None, (n, n))
    g_inv = ValuedMatrix(ctx, UinvDinv, 0, K, (n, n)).transpose() @ Linv
    return g, g_inv


def _unit_lower_inverse(R, Ld):
    """Exact inverse of a unit lower-triangular matrix, by forward substitution."""
    n = len(Ld)
    X = [[R.one if i == j else R.zero for j in range(n)] for i in range(n)]
    dot, neg = R.dot, R.neg
    for i in range(n):
        for j in range(i):
            X[i][j] = neg(dot(Ld[i][j:i], [X[k][j] for k in range(j, i)]))
    return X