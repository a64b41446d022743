"""Filtrations, their types, induced filtrations and the weak-admissibility check."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import InsufficientPrecision, LengthMismatch
from .isocrystal import (Combined, CyclicSpans, Family, IsotypicSums, Isocrystal,
                         SubIsocrystal)
from .linalg import ValuedMatrix, intersect_spans, inverse, rank, smith_valuations
from .polygon import SlopeVector


class Filtration:
    """Decreasing filtration of type ``mu`` given by an adapted flag.

    The first ``c_i = #{j : mu_j >= i}`` columns of ``flag`` span ``F^i``.
    """

    def __init__(self, X, mu, flag, check=True):
        mu = sorted((int(m) for m in mu), reverse=True)
        if len(mu) != X.d:
            raise LengthMismatch(f"type of length {len(mu)} on a space of dimension {X.d}")
        if flag.shape != (X.d, X.d):
            raise LengthMismatch("flag matrix must be d x d")
        if check and X.d and rank(flag) != X.d:
            raise ValueError("flag columns are not independent")
        self.X = X
        self.mu = mu
        self.flag = flag

    def __repr__(self):
        return f"Filtration(mu={self.mu})"

    @property
    def d(self):
        return len(self.mu)

    def levels(self):
        """Distinct jumps, decreasing."""
        out = []
        for m in self.mu:
            if not out or out[-1] != m:
                out.append(m)
        return out

    def c(self, i):
        return sum(1 for m in self.mu if m >= i)

    def F(self, i):
        """Basis of F^i."""
        return self.flag.columns(range(self.c(i)))

    def type_of(self):
        return SlopeVector(self.mu)

    @property
    def t_H(self):
        return sum(self.mu)

    # -- constructions --------------------------------------------------------

    @classmethod
    def random(cls, X, mu, rng, digits=16):
        """Flag with seeded random unit entries of ``digits`` p-adic digits."""
        ctx = X.ctx
        d = X.d
        while True:
            grid = [[ctx.random_unit(rng, digits) for _ in range(d)] for _ in range(d)]
            flag = ValuedMatrix.from_values(ctx, grid)
            try:
                if d == 0 or rank(flag) == d:
                    return cls(X, mu, flag, check=False)
            except InsufficientPrecision:
                continue

    @classmethod
    def from_first_step(cls, X, mu, first):
        """Two-step filtration whose top step is spanned by the columns of
        ``first``; the flag is completed by standard basis vectors."""
        ctx = X.ctx
        cols = first
        d = X.d
        for j in range(d):
            if cols.ncols == d:
                break
            e = ValuedMatrix.identity(ctx, d).column(j)
            cand = cols.hstack(e)
            if rank(cand) == cand.ncols:
                cols = cand
        return cls(X, mu, cols)

    def dual(self, Xd=None):
        """Filtration on the dual: annihilators, type (-mu_d, ..., -mu_1)."""
        Xd = self.X.dual() if Xd is None else Xd
        Q = inverse(self.flag).transpose()
        Q = Q.columns(reversed(range(self.d)))
        return Filtration(Xd, [-m for m in reversed(self.mu)], Q, check=False)

    def tensor(self, other, Xt=None):
        Xt = self.X.tensor(other.X) if Xt is None else Xt
        degs = []
        for j, a in enumerate(self.mu):
            for k, b in enumerate(other.mu):
                degs.append((a + b, j * other.d + k))
        P = self.flag.kron(other.flag)
        order = sorted(range(len(degs)), key=lambda t: (-degs[t][0], t))
        flag = P.columns([degs[t][1] for t in order])
        return Filtration(Xt, [degs[t][0] for t in order], flag, check=False)

    def to_json(self):
        return {"mu": [str(m) for m in self.mu], "flag_matrix": self.flag.to_json()}

    @classmethod
    def from_json(cls, X, doc):
        mu = [int(m) for m in doc["mu"]]
        flag = ValuedMatrix.from_json(X.ctx, doc["flag_matrix"])
        return cls(X, mu, flag)


# -- induced filtrations ----------------------------------------------------------

def intersection_dims(F, sub):
    """{i: dim(F^i cap D')} for every jump i of F."""
    W = sub.basis if isinstance(sub, SubIsocrystal) else sub
    dp = W.ncols
    out = {}
    for i in F.levels():
        ci = F.c(i)
        if dp == 0 or ci == 0:
            out[i] = 0
        elif ci == F.d:
            out[i] = dp
        else:
            out[i] = ci + dp - rank(F.F(i).hstack(W))
    return out


def induced_type(F, sub):
    """Type of the induced filtration on the subspace, from intersection dims."""
    dims = intersection_dims(F, sub)
    mu, prev = [], 0
    for i in F.levels():
        n = dims[i]
        mu.extend([i] * (n - prev))
        prev = n
    return SlopeVector(mu)


def induced_t_H(F, sub):
    return sum(induced_type(F, sub).as_ints())


def induced(F, sub):
    """The induced filtration, as a Filtration on ``sub.as_isocrystal()``."""
    if sub.dim == 0:
        X0 = Isocrystal(F.X.ctx, ValuedMatrix.zeros(F.X.ctx, 0, 0))
        return Filtration(X0, [], ValuedMatrix.zeros(F.X.ctx, 0, 0), check=False)
    W = sub.basis
    cur = None
    mu = []
    for i in F.levels():
        S = W if F.c(i) == F.d else intersect_spans(F.F(i), W)
        for j in range(S.ncols):
            col = S.column(j)
            cand = col if cur is None else cur.hstack(col)
            if rank(cand) == cand.ncols:
                cur = cand
                mu.append(i)
    coords = sub.coordinates(cur)
    return Filtration(sub.as_isocrystal(), mu, coords, check=False)


def hodge_below_newton(mu, nu):
    """Polygon form: every partial sum of the k smallest entries of mu is at
    most the corresponding sum for nu (endpoints may differ)."""
    a = sorted(SlopeVector(mu).entries)
    b = sorted(SlopeVector(nu).entries)
    if len(a) != len(b):
        raise LengthMismatch("lengths differ")
    sa = sb = Fraction(0)
    for x, y in zip(a, b):
        sa += x
        sb += y
        if sa > sb:
            return False
    return True


# -- verdicts ----------------------------------------------------------------------

@dataclass
class Verdict:
    kind = "verdict"
    exit_code = 2

    def summary(self):
        return self.kind


@dataclass
class Admissible(Verdict):
    complete: bool = True
    family_size: int = 0
    kind = "Admissible"
    exit_code = 0


@dataclass
class NotAdmissible(Verdict):
    witness: SubIsocrystal = None
    t_H: int = 0
    t_N: int = 0
    kind = "NotAdmissible"
    exit_code = 1

    def reverify(self, F):
        """Recompute t_H and t_N on the witness."""
        return induced_t_H(F, self.witness) == self.t_H and self.witness.t_N == self.t_N \
            and self.t_H > self.t_N


@dataclass
class ProbablyAdmissible(Verdict):
    family_size: int = 0
    trials: int = 0
    kind = "ProbablyAdmissible"
    exit_code = 2


@dataclass
class ConditionIFails(Verdict):
    t_H: int = 0
    t_N: int = 0
    kind = "ConditionIFails"
    exit_code = 1


# -- rationality probe ------------------------------------------------------------

@dataclass
class ProbeRecord:
    level: int
    slope: Fraction | None
    found: bool
    basis: ValuedMatrix = field(repr=False, default=None)


def rationality_probe(F, X=None):
    """phi-stable subspaces inside F^i and inside F^i cap D_alpha.

    ``slope`` is None for the record about F^i itself.
    """
    X = F.X if X is None else X
    records = []
    dec = X.slope_decomposition()
    for i in F.levels():
        ci = F.c(i)
        if ci == 0 or ci == X.d:
            continue
        Fi = F.F(i)
        U = X.largest_stable_inside(Fi)
        records.append(ProbeRecord(i, None, U.ncols > 0, U))
        for alpha, E in dec.parts:
            W = intersect_spans(Fi, E)
            if W.ncols == 0:
                records.append(ProbeRecord(i, alpha, False, W))
                continue
            U = X.largest_stable_inside(W)
            records.append(ProbeRecord(i, alpha, U.ncols > 0, U))
    return records


# -- the checker ---------------------------------------------------------------------

class CheckStrategy:
    """Isotypic sums, cyclic spans and probe findings.

    ``structured`` and ``random_count`` configure the cyclic spans; the family
    is complete when every isoclinic component is simple, or when d <= 2
    (where the probe decides the only line that can destabilize).
    """

    def __init__(self, structured=16, random_count=64, seed=0, probe=True):
        self.structured = structured
        self.random_count = random_count
        self.seed = seed
        self.probe = probe

    def family(self, X, F=None):
        fam = Combined(IsotypicSums(), CyclicSpans(self.structured, self.random_count, self.seed)).build(X)
        if fam.complete or F is None or not self.probe:
            return fam
        dec = X.slope_decomposition()
        for rec in rationality_probe(F, X):
            if not rec.found:
                continue
            base = SubIsocrystal(X, rec.basis, check=True)
            fam.add(base)
            for j in range(rec.basis.ncols):
                fam.add(SubIsocrystal(X, X.cyclic_span(rec.basis.column(j)), check=False))
            for alpha, E in dec.parts:
                fam.add(SubIsocrystal(X, base.basis.hstack(E), check=False))
        if X.d <= 2:
            fam.complete = True
        return fam

    def trials(self):
        return self.random_count


def check_weak_admissibility(X, F, strategy=None, family=None):
    strategy = CheckStrategy() if strategy is None else strategy
    tH, tN = F.t_H, X.t_N
    if tH != tN:
        return ConditionIFails(t_H=tH, t_N=tN)
    fam = strategy.family(X, F) if family is None else family
    for sub in fam:
        if sub.dim == 0 or sub.dim == X.d:
            continue
        h = induced_t_H(F, sub)
        if h > sub.t_N:
            return NotAdmissible(witness=sub, t_H=h, t_N=sub.t_N)
    if fam.complete:
        return Admissible(complete=True, family_size=len(fam))
    return ProbablyAdmissible(family_size=len(fam), trials=strategy.trials())


def check_by_polygons(X, F, family):
    """Polygon form of the check on a given family: returns (ok, witness)."""
    if F.t_H != X.t_N:
        return False, None
    for sub in family:
        if sub.dim == 0:
            continue
        mu = induced_type(F, sub)
        nu = sub.newton_vector()
        if not hodge_below_newton(mu, nu):
            return False, sub
    return True, None
