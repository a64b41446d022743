"""Seeded random instances: standard forms, base changes, lattices, filtrations
and (phi, N)-modules."""

from __future__ import annotations

import random
from fractions import Fraction
from math import gcd

from .context import CoeffContext
from .filtration import Filtration
from .isocrystal import standard_form
from .lattice import Lattice
from .linalg import random_unimodular
from .phin import random_phi_n_module
from .polygon import SlopeVector, dominance_leq
from .serialize import filtration_to_json, lattice_to_json, phin_to_json, standard_form_to_json

DIGITS = 16
MAX_D = 8
KINDS = ("multfree", "standard", "lattice", "filtration", "phin")


def random_summands(rng, d, multfree=True, max_b=4, a_range=(-3, 3)):
    """Random (a, b, m) summands of total dimension d.

    With ``multfree`` every slope appears once (one simple block each).
    """
    while True:
        out, used, left = [], set(), d
        tries = 0
        while left and tries < 200:
            tries += 1
            b = rng.randint(1, min(max_b, left))
            a = rng.randint(*a_range)
            if gcd(a, b) != 1:
                continue
            s = Fraction(a, b)
            if multfree and s in used:
                continue
            used.add(s)
            out.append((a, b, 1))
            left -= b
        if not left:
            return _merge(out)


def _merge(summands):
    acc = {}
    for a, b, m in summands:
        acc[(a, b)] = acc.get((a, b), 0) + m
    return sorted(((a, b, m) for (a, b), m in acc.items()), key=lambda t: Fraction(t[0], t[1]),
                  reverse=True)


def random_isocrystal(ctx, rng, d, multfree=True, conjugate=True, digits=DIGITS):
    summands = random_summands(rng, d, multfree)
    X = standard_form(ctx, summands)
    g = None
    if conjugate:
        g, g_inv = random_unimodular(ctx, X.d, rng, digits)
        X = X.base_change(g, g_inv)
    return X, summands, g


def random_dominating(nu, rng, spread=2, tries=2000):
    """Random integral mu >= nu, or None when nu has a non-integral total."""
    nu = SlopeVector(nu)
    t = nu.total()
    d = len(nu)
    if t.denominator != 1:
        return None
    if d == 0:
        return SlopeVector([])
    lo = int(min(nu)) - spread - 1
    hi = int(max(nu)) + spread + 1
    for _ in range(tries):
        head = [rng.randint(lo, hi) for _ in range(d - 1)]
        last = int(t) - sum(head)
        mu = SlopeVector(head + [last])
        if dominance_leq(nu, mu):
            return mu
    # (t - (d-1) m, m, ..., m) with m = floor(min nu) always dominates
    m = int(min(nu) // 1)
    return SlopeVector([int(t) - (d - 1) * m] + [m] * (d - 1))


def random_non_dominating(nu, rng, spread=2, tries=2000):
    """Random integral mu with mu >= nu failing (same total when possible)."""
    nu = SlopeVector(nu)
    d = len(nu)
    t = nu.total()
    lo = int(min(nu)) - spread - 1
    hi = int(max(nu)) + spread + 1
    if t.denominator == 1 and d > 1:
        for _ in range(tries):
            head = [rng.randint(lo, hi) for _ in range(d - 1)]
            mu = SlopeVector(head + [int(t) - sum(head)])
            if not dominance_leq(nu, mu):
                return mu
    base = [rng.randint(lo, hi) for _ in range(d)]
    if sum(base) == t:
        base[0] += 1
    return SlopeVector(base)


def generate(kind, d, seed, p=2, r=2, N=None, mu=None):
    """A JSON instance document; identical for identical arguments."""
    if kind not in KINDS:
        raise ValueError(f"unknown kind {kind!r}; expected one of {', '.join(KINDS)}")
    if not 1 <= d <= MAX_D:
        raise ValueError(f"dimension must be between 1 and {MAX_D}")
    ctx = CoeffContext(p, r) if N is None else CoeffContext(p, r, N=N)
    rng = random.Random(f"{kind}:{d}:{seed}")
    doc = {"schema": "instance/1", "kind": kind, "seed": str(seed)}
    if kind == "phin":
        m = random_phi_n_module(ctx, rng)
        doc.update(phin_to_json(m))
        doc["schema"] = "instance/1"
        return doc
    X, summands, g = random_isocrystal(ctx, rng, d, multfree=(kind != "standard"))
    doc["iso"] = standard_form_to_json(ctx, summands, g)
    doc["newton"] = X.newton_vector().to_json()
    if kind == "lattice":
        doc["lattice"] = lattice_to_json(Lattice.random(X, rng))
    if kind == "filtration":
        target = SlopeVector(mu) if mu is not None else random_dominating(X.newton_vector(), rng)
        if target is None:
            raise ValueError("the Newton vector has a non-integral total; no integral type exists")
        F = Filtration.random(X, target.as_ints(), rng, DIGITS)
        doc["filtration"] = filtration_to_json(F)
    return doc
