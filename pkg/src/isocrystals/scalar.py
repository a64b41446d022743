"""Valued scalars: pi**v * unit, with the unit known modulo pi**prec.

Three states:

* exact zero
* known: valuation ``v`` is certified; the unit is an integer polynomial on the
  power basis, either exact (``prec is None``) or known to relative precision
  ``prec`` (coefficients reduced into ``[0, p**prec)``)
* bounded below: the true valuation is at least ``bound``; nothing else is known

Arithmetic is capped-relative: inexact results never carry more than ``N``
digits, and exact results whose coefficients outgrow ``p**(2N)`` are truncated
to ``N`` digits.  Truncation only drops information, so it is always sound.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .errors import DivisionByUncertain, InsufficientPrecision

INF = math.inf


def _vp_int(n, p):
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def _strip(coeffs, p):
    """Largest w with p**w dividing every coefficient (coeffs not all zero)."""
    w = None
    for c in coeffs:
        if c:
            k = 0
            while c % p == 0:
                c //= p
                k += 1
                if w is not None and k >= w:
                    break
            if w is None or k < w:
                w = k
                if w == 0:
                    return 0
    return w


class ValuedScalar:
    __slots__ = ("ctx", "v", "unit", "prec")

    def __init__(self, ctx, v, unit, prec):
        self.ctx = ctx
        self.v = v
        self.unit = unit
        self.prec = prec

    # -- constructors ---------------------------------------------------------

    @classmethod
    def exact_zero(cls, ctx):
        return cls(ctx, None, None, None)

    @classmethod
    def bounded(cls, ctx, bound):
        return cls(ctx, bound, None, None)

    @classmethod
    def known(cls, ctx, v, unit, prec):
        """Trusted constructor: ``unit`` must already be a unit."""
        return cls(ctx, v, tuple(unit), prec)

    @classmethod
    def from_value(cls, ctx, value):
        if isinstance(value, ValuedScalar):
            return value
        if isinstance(value, int):
            if value == 0:
                return cls.exact_zero(ctx)
            v = _vp_int(value, ctx.p)
            return cls(ctx, v, (value // ctx.p ** v,) + (0,) * (ctx.r - 1), None)
        if isinstance(value, Fraction):
            num = cls.from_value(ctx, value.numerator)
            den = value.denominator
            w = _vp_int(den, ctx.p)
            rest = den // ctx.p ** w
            out = num * ctx.pi(-w) if w else num
            return out / cls.from_value(ctx, rest) if rest != 1 else out
        coeffs = ctx.reduce_poly([int(c) for c in value])
        return cls.from_poly(ctx, 0, coeffs, None)

    @classmethod
    def from_poly(cls, ctx, e, coeffs, k):
        """Normalize p**e * coeffs, where coeffs is known modulo p**k (None: exact)."""
        p = ctx.p
        if k is None:
            if not any(coeffs):
                return cls(ctx, None, None, None)
            w = _strip(coeffs, p)
            if w:
                d = p ** w
                coeffs = tuple(c // d for c in coeffs)
            out = cls(ctx, e + w, tuple(coeffs), None)
            return out._cap_exact()
        if k <= 0:
            return cls(ctx, e + k, None, None)
        mod = p ** k
        coeffs = tuple(c % mod for c in coeffs)
        if not any(coeffs):
            return cls(ctx, e + k, None, None)
        w = _strip(coeffs, p)
        if w:
            d = p ** w
            coeffs = tuple(c // d for c in coeffs)
        rel = k - w
        if rel > ctx.N:
            rel = ctx.N
            m2 = p ** rel
            coeffs = tuple(c % m2 for c in coeffs)
        return cls(ctx, e + w, coeffs, rel)

    def _cap_exact(self):
        ctx = self.ctx
        cap = ctx._exact_cap
        for c in self.unit:
            if c >= cap or -c >= cap:
                mod = ctx.p ** ctx.N
                return ValuedScalar(ctx, self.v, tuple(x % mod for x in self.unit), ctx.N)
        return self

    # -- state queries ----------------------------------------------------------

    @property
    def is_exact_zero(self):
        return self.unit is None and self.v is None

    @property
    def is_known(self):
        return self.unit is not None

    @property
    def is_bounded(self):
        return self.unit is None and self.v is not None

    @property
    def is_exact(self):
        return self.is_exact_zero or (self.unit is not None and self.prec is None)

    def is_zero(self):
        """True when the element is zero at the working precision."""
        return self.unit is None

    def valuation(self):
        """Certified valuation; ``inf`` for exact zero."""
        if self.unit is not None:
            return self.v
        if self.v is None:
            return INF
        raise InsufficientPrecision(f"valuation only bounded below by {self.v}")

    def lower_bound(self):
        """Largest certified lower bound on the valuation."""
        if self.v is None:
            return INF
        return self.v

    def absolute_precision(self):
        if self.unit is None:
            return INF if self.v is None else self.v
        return INF if self.prec is None else self.v + self.prec

    # -- arithmetic ---------------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, ValuedScalar):
            return other
        if isinstance(other, (int, Fraction)):
            return ValuedScalar.from_value(self.ctx, other)
        return NotImplemented

    def __neg__(self):
        if self.unit is None:
            return self
        if self.prec is None:
            return ValuedScalar(self.ctx, self.v, tuple(-c for c in self.unit), None)
        mod = self.ctx.p ** self.prec
        return ValuedScalar(self.ctx, self.v, tuple((-c) % mod for c in self.unit), self.prec)

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return _add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        if other is self:
            return ValuedScalar(self.ctx, None, None, None)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return _add(self, -other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return _add(other, -self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return _mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return _div(self, other)

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return _div(other, self)

    def __pow__(self, n):
        if n < 0:
            return ValuedScalar.from_value(self.ctx, 1) / (self ** (-n))
        out = ValuedScalar.from_value(self.ctx, 1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def inverse(self):
        return _div(ValuedScalar.from_value(self.ctx, 1), self)

    def frobenius(self, k=1):
        """sigma**k; exact whenever the Frobenius lift is exact."""
        if self.unit is None or k % self.ctx.r == 0:
            return self
        ctx = self.ctx
        u = self.unit
        if not any(u[1:]):
            return self
        img = ctx.apply_frobenius(u, k)
        prec = self.prec
        if not ctx.frobenius_is_exact:
            prec = ctx.N if prec is None else min(prec, ctx.N)
        if prec is None:
            return ValuedScalar(ctx, self.v, img, None)._cap_exact()
        mod = ctx.p ** prec
        return ValuedScalar(ctx, self.v, tuple(c % mod for c in img), prec)

    def truncate(self, prec):
        """Forget digits beyond relative precision ``prec``."""
        if self.unit is None or (self.prec is not None and self.prec <= prec):
            return self
        mod = self.ctx.p ** prec
        return ValuedScalar(self.ctx, self.v, tuple(c % mod for c in self.unit), prec)

    def residue_digits(self, k):
        """Canonical representative of the class modulo pi**k, as the list of
        coefficients of p**v * unit reduced into [0, p**(k - v)) then scaled
        (only meaningful for k > v).  Entries are Fractions when v < 0."""
        if self.unit is None:
            if self.v is not None and self.v < k:
                raise InsufficientPrecision("residue requested beyond known digits")
            return (0,) * self.ctx.r
        if self.v >= k:
            return (0,) * self.ctx.r
        need = k - self.v
        if self.prec is not None and self.prec < need:
            raise InsufficientPrecision("residue requested beyond known digits")
        mod = self.ctx.p ** need
        if self.v >= 0:
            scale = self.ctx.p ** self.v
            return tuple((c % mod) * scale for c in self.unit)
        scale = self.ctx.p ** (-self.v)
        return tuple(Fraction(c % mod, scale) for c in self.unit)

    # -- comparison -------------------------------------------------------------

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return _add(self, -other).unit is None

    __hash__ = None

    def __repr__(self):
        if self.unit is None:
            return "0" if self.v is None else f"O(pi^{self.v})"
        u = self.unit if self.ctx.r > 1 else self.unit[0]
        tail = "" if self.prec is None else f" + O(pi^{self.v + self.prec})"
        return f"pi^{self.v}*{u}{tail}"

    def to_json(self):
        if self.unit is None:
            if self.v is None:
                return "0"
            return {"bound": str(self.v)}
        doc = {"val": str(self.v), "unit_poly": [str(c) for c in self.unit]}
        if self.prec is not None:
            doc["prec"] = str(self.prec)
        return doc

    @classmethod
    def from_json(cls, ctx, doc):
        if doc is None or doc == "0" or doc == 0:
            return cls.exact_zero(ctx)
        if isinstance(doc, (int, str)):
            return cls.from_value(ctx, Fraction(doc) if "/" in str(doc) else int(doc))
        if isinstance(doc, list):
            # integer coefficients of a polynomial in the generator t
            return cls.from_poly(ctx, 0, ctx.reduce_poly([int(c) for c in doc]), None)
        if "bound" in doc:
            return cls.bounded(ctx, int(doc["bound"]))
        v = int(doc["val"])
        coeffs = ctx.reduce_poly([int(c) for c in doc["unit_poly"]])
        prec = doc.get("prec")
        return cls.from_poly(ctx, v, coeffs, None if prec is None else int(prec))


def _min_prec(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return a if a < b else b


def _add(a, b):
    ctx = a.ctx
    if a.unit is None:
        if a.v is None:
            return b
        if b.unit is None:
            if b.v is None:
                return a
            return ValuedScalar(ctx, min(a.v, b.v), None, None)
        if b.v < a.v:
            return b.truncate(a.v - b.v)
        return a
    if b.unit is None:
        if b.v is None:
            return a
        if a.v < b.v:
            return a.truncate(b.v - a.v)
        return b
    if a.v > b.v:
        a, b = b, a
    p = ctx.p
    if a.v < b.v:
        shift = b.v - a.v
        # absolute precision of the sum, relative to a.v
        k = _min_prec(a.prec, None if b.prec is None else b.prec + shift)
        f = p ** shift
        coeffs = tuple(x + f * y for x, y in zip(a.unit, b.unit))
        if k is None:
            return ValuedScalar(ctx, a.v, coeffs, None)._cap_exact()
        if k > ctx.N:
            k = ctx.N
        mod = p ** k
        return ValuedScalar(ctx, a.v, tuple(c % mod for c in coeffs), k)
    k = _min_prec(a.prec, b.prec)
    coeffs = tuple(x + y for x, y in zip(a.unit, b.unit))
    return ValuedScalar.from_poly(ctx, a.v, coeffs, k)


def _mul(a, b):
    ctx = a.ctx
    if a.unit is None or b.unit is None:
        if a.is_exact_zero or b.is_exact_zero:
            return ValuedScalar(ctx, None, None, None)
        return ValuedScalar(ctx, a.lower_bound() + b.lower_bound(), None, None)
    coeffs = ctx.polymul(a.unit, b.unit)
    k = _min_prec(a.prec, b.prec)
    if k is None:
        return ValuedScalar(ctx, a.v + b.v, coeffs, None)._cap_exact()
    mod = ctx.p ** k
    return ValuedScalar(ctx, a.v + b.v, tuple(c % mod for c in coeffs), k)


def _is_plus_minus_one(u):
    return (u[0] == 1 or u[0] == -1) and not any(u[1:])


def _div(a, b):
    ctx = a.ctx
    if b.unit is None:
        if b.v is None:
            raise ZeroDivisionError("division by exact zero")
        raise DivisionByUncertain(f"divisor only bounded below by {b.v}")
    if a.unit is None:
        if a.v is None:
            return a
        return ValuedScalar(ctx, a.v - b.v, None, None)
    if b.prec is None and _is_plus_minus_one(b.unit):
        u = a.unit if b.unit[0] == 1 else tuple(-c for c in a.unit)
        if a.prec is not None:
            mod = ctx.p ** a.prec
            u = tuple(c % mod for c in u)
        return ValuedScalar(ctx, a.v - b.v, u, a.prec)
    k = _min_prec(_min_prec(a.prec, b.prec), ctx.N)
    inv = ctx.unit_inverse(b.unit, k)
    coeffs = ctx.polymul(a.unit, inv)
    mod = ctx.p ** k
    return ValuedScalar(ctx, a.v - b.v, tuple(c % mod for c in coeffs), k)
