"""Slope vectors, their polygons, and the dominance order."""

from __future__ import annotations

import re
from fractions import Fraction
from itertools import accumulate

from .errors import LengthMismatch


def _frac(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    return Fraction(x)


class SlopeVector:
    """A decreasing vector of rationals.  Input order does not matter."""

    __slots__ = ("entries",)

    def __init__(self, entries):
        self.entries = tuple(sorted((_frac(x) for x in entries), reverse=True))

    @classmethod
    def parse(cls, text):
        """Parse ``"[1/2, 1/2]"`` (brackets and spaces optional)."""
        body = text.strip()
        if body.startswith("[") and body.endswith("]"):
            body = body[1:-1]
        if not body.strip():
            return cls([])
        parts = re.split(r"[,\s]+", body.strip())
        try:
            return cls(Fraction(s) for s in parts if s)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"cannot parse slope vector {text!r}") from exc

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    def __eq__(self, other):
        if isinstance(other, SlopeVector):
            return self.entries == other.entries
        if isinstance(other, (list, tuple)):
            return self.entries == SlopeVector(other).entries
        return NotImplemented

    def __hash__(self):
        return hash(self.entries)

    def __str__(self):
        return "[" + ", ".join(str(x) for x in self.entries) + "]"

    def __repr__(self):
        return f"SlopeVector({self})"

    @property
    def d(self):
        return len(self.entries)

    def total(self):
        return sum(self.entries, Fraction(0))

    def partial_sums(self):
        return list(accumulate(self.entries))

    def is_integral(self):
        return all(x.denominator == 1 for x in self.entries)

    def as_ints(self):
        if not self.is_integral():
            raise ValueError(f"{self} is not integral")
        return [int(x) for x in self.entries]

    def multiplicities(self):
        """[(slope, multiplicity)] in decreasing slope order."""
        out = []
        for x in self.entries:
            if out and out[-1][0] == x:
                out[-1][1] += 1
            else:
                out.append([x, 1])
        return [(s, m) for s, m in out]

    def negated(self):
        return SlopeVector(-x for x in self.entries)

    def to_json(self):
        return [str(x) for x in self.entries]


def total(lam):
    return SlopeVector(lam).total() if not isinstance(lam, SlopeVector) else lam.total()


def dominance_leq(lam, lam2):
    """lam <= lam2: every partial sum of lam is at most that of lam2, totals equal."""
    a = lam if isinstance(lam, SlopeVector) else SlopeVector(lam)
    b = lam2 if isinstance(lam2, SlopeVector) else SlopeVector(lam2)
    if len(a) != len(b):
        raise LengthMismatch(f"lengths {len(a)} and {len(b)} differ")
    sa, sb = a.partial_sums(), b.partial_sums()
    if sa and sa[-1] != sb[-1]:
        return False
    return all(x <= y for x, y in zip(sa, sb))


class NewtonPolygon:
    """Lower-convex polygon starting at (0, 0), given by its vertex list."""

    __slots__ = ("vertices",)

    def __init__(self, vertices):
        self.vertices = tuple((Fraction(x), Fraction(y)) for x, y in vertices)

    def __eq__(self, other):
        return isinstance(other, NewtonPolygon) and self.vertices == other.vertices

    def __hash__(self):
        return hash(self.vertices)

    def __repr__(self):
        return f"NewtonPolygon({self})"

    def __str__(self):
        return " ".join(f"({x},{y})" for x, y in self.vertices)

    @property
    def endpoint(self):
        return self.vertices[-1]

    def value_at(self, x):
        x = Fraction(x)
        vs = self.vertices
        if x < vs[0][0] or x > vs[-1][0]:
            raise ValueError("outside the polygon's range")
        for (x0, y0), (x1, y1) in zip(vs, vs[1:]):
            if x0 <= x <= x1:
                return y0 + (y1 - y0) * (x - x0) / (x1 - x0)
        return vs[0][1]

    def slopes(self):
        """[(slope, horizontal length)] from left to right."""
        vs = self.vertices
        return [((y1 - y0) / (x1 - x0), x1 - x0) for (x0, y0), (x1, y1) in zip(vs, vs[1:])]

    def is_convex(self):
        s = [a for a, _ in self.slopes()]
        return all(x < y for x, y in zip(s, s[1:]))

    def on_or_above(self, other):
        """True when both polygons share endpoints and self is nowhere below other."""
        if self.vertices[0] != other.vertices[0] or self.endpoint != other.endpoint:
            return False
        xs = sorted({x for x, _ in self.vertices} | {x for x, _ in other.vertices})
        return all(self.value_at(x) >= other.value_at(x) for x in xs)

    def to_json(self):
        return [[str(x), str(y)] for x, y in self.vertices]


def polygon_of(lam):
    """Polygon whose segments have the entries of lam as slopes, in increasing order."""
    lam = lam if isinstance(lam, SlopeVector) else SlopeVector(lam)
    pts = [(Fraction(0), Fraction(0))]
    x, y = Fraction(0), Fraction(0)
    for slope, mult in reversed(lam.multiplicities()):
        x += mult
        y += slope * mult
        pts.append((x, y))
    return NewtonPolygon(pts)


def lower_hull(points):
    """Lower convex hull of points (x, y) with distinct x, from left to right.

    Coordinates may be ints or Fractions; they are returned unchanged.
    """
    pts = sorted(points)
    hull = []
    for P in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # drop the middle point unless it lies strictly below the chord
            if (y2 - y1) * (P[0] - x1) >= (P[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(P)
    return hull
