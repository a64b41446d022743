"""Coefficient field model: W(F_{p^r})[1/p] truncated at relative precision N.

Elements of the valuation ring are polynomials in a root ``x`` of a monic
integer ``modulus`` of degree ``r`` that is irreducible modulo ``p``; the
uniformizer is ``p`` itself.  The Frobenius automorphism is the Hensel lift of
``x -> x**p`` and is stored as a matrix on the power basis.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from functools import cached_property

DEFAULT_PRECISION = 64


def default_precision():
    raw = os.environ.get("ISOCRYSTAL_PRECISION")
    return int(raw) if raw else DEFAULT_PRECISION


def with_precision_retries(fn, N=None, retries=4):
    """Call ``fn(N)``, doubling N after each InsufficientPrecision.

    ``retries`` bounds the number of doublings; the last error propagates.
    Returns ``(result, N_used)``.
    """
    from .errors import InsufficientPrecision, NotDiagonalizableAtPrecision
    N = default_precision() if N is None else N
    for attempt in range(retries + 1):
        try:
            return fn(N), N
        except (InsufficientPrecision, NotDiagonalizableAtPrecision):
            if attempt == retries:
                raise
            N *= 2


# -- small polynomial helpers (coefficient lists, low degree first) --------

def _trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def _fp_divmod(a, b, p):
    a = [c % p for c in a]
    b = _trim([c % p for c in b])
    inv = pow(b[-1], -1, p)
    q = [0] * max(len(a) - len(b) + 1, 1)
    a = _trim(a)
    while len(a) >= len(b):
        shift = len(a) - len(b)
        c = a[-1] * inv % p
        q[shift] = c
        for i, bi in enumerate(b):
            a[i + shift] = (a[i + shift] - c * bi) % p
        a = _trim(a)
    return q, a


def _fp_mulmod(a, b, f, p):
    prod = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                prod[i + j] += ai * bj
    return _fp_divmod(prod, f, p)[1]


def _fp_gcd(a, b, p):
    a, b = _trim([c % p for c in a]), _trim([c % p for c in b])
    while b:
        a, b = b, _fp_divmod(a, b, p)[1]
    return a


def _fp_powmod_x(e, f, p):
    """x**e mod (f, p)."""
    result, base = [1], [0, 1]
    while e:
        if e & 1:
            result = _fp_mulmod(result, base, f, p)
        base = _fp_mulmod(base, base, f, p)
        e >>= 1
    return result


def _prime_factors(n):
    out, q = [], 2
    while q * q <= n:
        if n % q == 0:
            out.append(q)
            while n % q == 0:
                n //= q
        q += 1
    if n > 1:
        out.append(n)
    return out


def is_irreducible_mod_p(f, p):
    """Rabin's irreducibility test for a monic integer polynomial mod p."""
    f = _trim([c % p for c in f])
    r = len(f) - 1
    if r < 1:
        return False
    if r == 1:
        return True
    if _trim(_fp_divmod(_fp_powmod_x(p ** r, f, p), f, p)[1]) != _trim(_fp_divmod([0, 1], f, p)[1]):
        return False
    for q in _prime_factors(r):
        h = _fp_powmod_x(p ** (r // q), f, p)
        h = h + [0] * (2 - len(h)) if len(h) < 2 else list(h)
        h[1] -= 1
        g = _fp_gcd(f, h, p)
        if len(g) > 1:
            return False
    return True


def cyclotomic(m):
    """Integer coefficients of the m-th cyclotomic polynomial."""
    num = [-1] + [0] * (m - 1) + [1]
    for d in range(1, m):
        if m % d == 0:
            num = _int_exact_div(num, cyclotomic(d))
    return num


def _int_exact_div(a, b):
    a = list(a)
    q = [0] * (len(a) - len(b) + 1)
    for shift in range(len(a) - len(b), -1, -1):
        c = a[shift + len(b) - 1] // b[-1]
        q[shift] = c
        for i, bi in enumerate(b):
            a[shift + i] -= c * bi
    assert not any(a), "inexact cyclotomic division"
    return q


def _euler_phi(m):
    out = m
    for q in _prime_factors(m):
        out = out // q * (q - 1)
    return out


def default_modulus(p, r):
    """A cyclotomic modulus when one has p as a generator, else the
    lexicographically smallest monic irreducible with coefficients in [0, p)."""
    if r == 1:
        return (0, 1)
    for m in range(3, 400):
        if m % p and _euler_phi(m) == r and _order_mod(p, m) == r:
            return tuple(cyclotomic(m))
    for n in range(p ** r):
        coeffs, k = [], n
        for _ in range(r):
            coeffs.append(k % p)
            k //= p
        cand = coeffs + [1]
        if cand[0] and is_irreducible_mod_p(cand, p):
            return tuple(cand)
    raise ValueError(f"no irreducible polynomial of degree {r} mod {p}")


def _order_mod(p, m):
    k, acc = 1, p % m
    while acc != 1:
        acc = acc * p % m
        k += 1
        if k > m:
            return 0
    return k


def _is_prime(n):
    return n >= 2 and all(n % q for q in range(2, int(n ** 0.5) + 1))


@dataclass(frozen=True)
class CoeffContext:
    """Parameters of the coefficient field.

    ``modulus`` holds the coefficients of a monic polynomial of degree ``r``,
    lowest degree first.  Instances are immutable and shared freely.
    """

    p: int
    r: int = 1
    modulus: tuple = None
    N: int = field(default_factory=default_precision)

    def __post_init__(self):
        if not _is_prime(self.p):
            raise ValueError(f"p = {self.p} is not prime")
        if self.r < 1 or self.N < 2:
            raise ValueError("need r >= 1 and N >= 2")
        if self.modulus is None:
            object.__setattr__(self, "modulus", default_modulus(self.p, self.r))
        mod = tuple(int(c) for c in self.modulus)
        object.__setattr__(self, "modulus", mod)
        if len(mod) != self.r + 1 or mod[-1] != 1:
            raise ValueError("modulus must be monic of degree r")
        if not is_irreducible_mod_p(mod, self.p):
            raise ValueError(f"modulus {mod} is reducible mod {self.p}")

    @property
    def q(self):
        return self.p

    def with_precision(self, N):
        return CoeffContext(self.p, self.r, self.modulus, N)

    # -- integer polynomial arithmetic modulo the modulus -------------------

    @cached_property
    def _reduction_rows(self):
        """x**k mod modulus for k in [r, 2r-2], as integer coefficient lists."""
        r, f = self.r, self.modulus
        rows = []
        cur = [0] * r
        # x**r = -(f_0 + ... + f_{r-1} x**(r-1))
        cur = [-c for c in f[:r]]
        rows.append(cur)
        for _ in range(r, 2 * r - 2):
            top = cur[-1]
            nxt = [0] + cur[:-1]
            if top:
                nxt = [a - top * c for a, c in zip(nxt, f[:r])]
            cur = nxt
            rows.append(cur)
        return rows

    def polymul(self, a, b):
        """Product of two length-r integer tuples modulo the modulus (over Z)."""
        r = self.r
        if r == 1:
            return (a[0] * b[0],)
        prod = [0] * (2 * r - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    if bj:
                        prod[i + j] += ai * bj
        low = prod[:r]
        for k, row in enumerate(self._reduction_rows):
            c = prod[r + k]
            if c:
                for i in range(r):
                    low[i] += c * row[i]
        return tuple(low)

    def reduce_poly(self, coeffs):
        """Reduce an integer polynomial of any degree modulo the modulus."""
        c = list(coeffs) + [0] * max(0, self.r - len(coeffs))
        f = self.modulus
        r = self.r
        for k in range(len(c) - 1, r - 1, -1):
            top = c[k]
            if top:
                for i in range(r):
                    c[k - r + i] -= top * f[i]
            c[k] = 0
        return tuple(c[:r])

    def residue_inverse(self, u):
        """Inverse of a unit modulo p, as an integer tuple with entries in [0, p)."""
        p, r = self.p, self.r
        if r == 1:
            return (pow(u[0] % p, -1, p),)
        # extended Euclid in F_p[x]
        a, b = _trim([c % p for c in self.modulus]), _trim([c % p for c in u])
        s0, s1 = [], [1]
        while b:
            q, rem = _fp_divmod(a, b, p)
            a, b = b, rem
            qs = _fp_polymul_plain(q, s1, p)
            s0, s1 = s1, _fp_sub(s0, qs, p)
        inv_lead = pow(a[0], -1, p)
        s = [c * inv_lead % p for c in s0]
        s = list(_fp_divmod(s, self.modulus, p)[1])
        return tuple(s + [0] * (r - len(s)))

    def unit_inverse(self, u, k):
        """Inverse of a unit modulo p**k by Newton iteration."""
        y = self.residue_inverse(u)
        prec = 1
        while prec < k:
            prec = min(2 * prec, k)
            mod = self.p ** prec
            uy = self.polymul(u, y)
            two_minus = tuple(((2 if i == 0 else 0) - c) for i, c in enumerate(uy))
            y = tuple(c % mod for c in self.polymul(y, two_minus))
        mod = self.p ** k
        return tuple(c % mod for c in y)

    # -- Frobenius -----------------------------------------------------------

    @cached_property
    def _exact_cap(self):
        return self.p ** (2 * self.N)

    @cached_property
    def frobenius_precision(self):
        return 2 * self.N + 8

    @cached_property
    def _frobenius_image_of_x(self):
        """(sigma(x) as integer tuple, exact?)."""
        r, p = self.r, self.p
        if r == 1:
            return (0,), True
        xp = self.reduce_poly([0] * p + [1])
        if not any(self._eval_modulus(xp)):
            return xp, True
        M = self.frobenius_precision
        mod = p ** M
        y = tuple(c % mod for c in xp)
        fprime = [i * c for i, c in enumerate(self.modulus)][1:]
        prec = 1
        while prec < M:
            prec = min(2 * prec, M)
            m = p ** prec
            fy = self._eval_poly(self.modulus, y)
            dfy = self._eval_poly(fprime, y)
            inv = self.unit_inverse(dfy, prec)
            corr = self.polymul(fy, inv)
            y = tuple((a - b) % m for a, b in zip(y, corr))
        return tuple(c % mod for c in y), False

    def _eval_poly(self, coeffs, y):
        acc = (0,) * self.r
        for c in reversed(coeffs):
            acc = self.polymul(acc, y)
            acc = (acc[0] + c,) + acc[1:]
        return acc

    def _eval_modulus(self, y):
        return self._eval_poly(self.modulus, y)

    @property
    def frobenius_is_exact(self):
        return self._frobenius_image_of_x[1]

    @cached_property
    def frobenius_matrices(self):
        """Power-basis matrices of sigma**k for k = 0..r-1 (column j = image of x**j)."""
        r = self.r
        y, exact = self._frobenius_image_of_x
        mod = None if exact else self.p ** self.frobenius_precision
        cols = [(1,) + (0,) * (r - 1)]
        for _ in range(1, r):
            nxt = self.polymul(cols[-1], y)
            if mod:
                nxt = tuple(c % mod for c in nxt)
            cols.append(nxt)
        S = [[cols[j][i] for j in range(r)] for i in range(r)]
        mats = [[[int(i == j) for j in range(r)] for i in range(r)]]
        for _ in range(1, r):
            prev = mats[-1]
            nxt = [[sum(S[i][k] * prev[k][j] for k in range(r)) for j in range(r)] for i in range(r)]
            if mod:
                nxt = [[c % mod for c in row] for row in nxt]
            mats.append(nxt)
        return [tuple(tuple(row) for row in m) for m in mats]

    def apply_frobenius(self, u, k):
        """sigma**k applied to an integer tuple (no truncation applied)."""
        k %= self.r
        if k == 0 or self.r == 1:
            return u
        if not any(u[1:]):
            return u
        S = self.frobenius_matrices[k]
        return tuple(sum(S[i][j] * u[j] for j in range(self.r) if u[j]) for i in range(self.r))

    # -- element constructors (thin wrappers around ValuedScalar) -----------

    def zero(self):
        from .scalar import ValuedScalar
        return ValuedScalar.exact_zero(self)

    def one(self):
        return self.scalar(1)

    def pi(self, k=1):
        from .scalar import ValuedScalar
        return ValuedScalar.known(self, k, (1,) + (0,) * (self.r - 1), None)

    def scalar(self, value):
        """Exact scalar from an int, a Fraction with p-power denominator, or a
        coefficient sequence on the power basis."""
        from .scalar import ValuedScalar
        return ValuedScalar.from_value(self, value)

    def gen(self):
        """The generator x of the residue extension (a unit)."""
        return self.scalar([0, 1] if self.r > 1 else [1])

    def random_unit(self, rng, digits=None):
        """Random unit of the valuation ring with ``digits`` p-adic digits per coefficient."""
        from .scalar import ValuedScalar
        digits = self.N if digits is None else digits
        bound = self.p ** digits
        while True:
            coeffs = tuple(rng.randrange(bound) for _ in range(self.r))
            if any(c % self.p for c in coeffs):
                return ValuedScalar.known(self, 0, coeffs, None)

    def random_integer(self, rng, digits=None):
        """Random element of the valuation ring (possibly zero)."""
        digits = self.N if digits is None else digits
        bound = self.p ** digits
        return self.scalar([rng.randrange(bound) for _ in range(self.r)])

    def to_json(self):
        return {
            "p": str(self.p),
            "r": str(self.r),
            "modulus": [str(c) for c in self.modulus],
            "N": str(self.N),
        }

    @classmethod
    def from_json(cls, doc, N=None):
        p = int(doc["p"])
        r = int(doc.get("r", 1))
        mod = doc.get("modulus")
        mod = tuple(int(c) for c in mod) if mod is not None else None
        prec = N if N is not None else int(doc.get("N", default_precision()))
        return cls(p, r, mod, prec)


def _fp_polymul_plain(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        for j, bj in enumerate(b):
            out[i + j] = (out[i + j] + ai * bj) % p
    return _trim(out)


def _fp_sub(a, b, p):
    n = max(len(a), len(b))
    a = list(a) + [0] * (n - len(a))
    b = list(b) + [0] * (n - len(b))
    return _trim([(x - y) % p for x, y in zip(a, b)])
