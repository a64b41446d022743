"""Acceptance suite: ten property checks shared by the tests and ``selftest``.

Every criterion returns a :class:`CriterionResult`.  Instances are drawn from
seeds that do not depend on the working precision, so the discrete outputs of
runs at different precisions can be compared instance by instance.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import accumulate
from math import gcd

from .context import CoeffContext, with_precision_retries
from .errors import (DominanceFails, InsufficientPrecision, NoConvergence,
                     NotDiagonalizableAtPrecision, RetriesExhausted)
from .existence import GenericityBudget, construct_admissible_filtration
from .filtration import (Admissible, CheckStrategy, ConditionIFails, Filtration,
                         NotAdmissible, check_weak_admissibility)
from .generate import random_dominating, random_isocrystal, random_non_dominating
from .hn import hn_vector
from .isocrystal import newton_vector_of, standard_form
from .lattice import (Lattice, adapted_bounds, check_mazur, laffaille_iterate, lattice_type,
                      strongly_divisible)
from .linalg import ValuedMatrix, random_unimodular
from .phin import check_weak_admissibility_phiN, random_phi_n_module, slope_shift_holds
from .polygon import SlopeVector, dominance_leq, polygon_of

UNDECIDED = "undecided"
UNDECIDABLE = (InsufficientPrecision, NotDiagonalizableAtPrecision)
DIGITS = 16


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: str
    seconds: float = 0.0
    outputs: list = field(default_factory=list, repr=False)

    def line(self, timing=True):
        tag = "PASS" if self.passed else "FAIL"
        text = f"[{tag}] {self.number:2d}. {self.title}: {self.detail}"
        return f"{text} ({self.seconds:.1f}s)" if timing else text


def _timed(fn):
    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        res = fn(*args, **kwargs)
        res.seconds = time.perf_counter() - t0
        return res
    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


def _ctx(N, p=2, r=2):
    return CoeffContext(p, r) if N is None else CoeffContext(p, r, N=N)


# -- 1. dominance and polygons -------------------------------------------------------

def _random_slope_vector(rng, d):
    return SlopeVector(Fraction(rng.randint(-12, 12), rng.randint(1, 4)) for _ in range(d))


def _transfer(rng, lam):
    """Move mass from a lower entry to a higher one: the result dominates lam."""
    xs = list(lam.entries)
    for _ in range(rng.randint(0, 3)):
        if len(xs) < 2:
            break
        i, j = sorted(rng.sample(range(len(xs)), 2))
        amount = Fraction(rng.randint(0, 4), rng.randint(1, 3))
        xs[i] += amount
        xs[j] -= amount
    return SlopeVector(xs)


@_timed
def criterion_1(pairs=10_000, max_d=8, seed=0):
    """dominance_leq agrees with the polygon comparison on random pairs."""
    rng = random.Random(f"c1:{seed}")
    mismatches, true_count = 0, 0
    for _ in range(pairs):
        d = rng.randint(1, max_d)
        a = _random_slope_vector(rng, d)
        kind = rng.random()
        if kind < 0.4:
            b = _transfer(rng, a)
        elif kind < 0.7:
            b = _random_slope_vector(rng, d)
            shift = (a.total() - b.total()) / d
            b = SlopeVector(x + shift for x in b)
        else:
            b = _random_slope_vector(rng, d)
        dom = dominance_leq(a, b)
        poly = polygon_of(a).on_or_above(polygon_of(b))
        true_count += dom
        mismatches += dom != poly
    return CriterionResult(1, "dominance agrees with polygons", mismatches == 0,
                           f"{pairs} pairs, {true_count} dominated, {mismatches} mismatches")


# -- 2. Newton vectors of standard forms ---------------------------------------------

def summand_lists(a_range=(-3, 3), max_b=4, max_d=6):
    """All nonempty multisets of simple blocks (a, b) of total dimension <= max_d."""
    blocks = [(a, b) for b in range(1, max_b + 1) for a in range(a_range[0], a_range[1] + 1)
              if gcd(a, b) == 1]
    out = []

    def rec(start, left, cur):
        if cur:
            out.append(list(cur))
        for i in range(start, len(blocks)):
            a, b = blocks[i]
            if b <= left:
                cur.append((a, b))
                rec(i, left - b, cur)
                cur.pop()

    rec(0, max_d, [])
    return out


def declared_slopes(blocks):
    return SlopeVector(Fraction(a, b) for a, b in blocks for _ in range(b))


@_timed
def criterion_2(N=None, conjugations=50, seed=0, limit=None):
    """Newton vector of every standard form, and of 50 random sigma-conjugates."""
    ctx = _ctx(N)
    lists = summand_lists()
    if limit is not None:
        lists = lists[:limit]
    wrong, undecided, checks = 0, 0, 0
    outputs = []
    for idx, blocks in enumerate(lists):
        rng = random.Random(f"c2:{seed}:{idx}")
        want = declared_slopes(blocks)
        X = standard_form(ctx, [(a, b, 1) for a, b in blocks])
        row = []
        for k in range(conjugations + 1):
            try:
                if k == 0:
                    got = X.newton_vector()
                else:
                    g, g_inv = random_unimodular(ctx, X.d, rng, DIGITS)
                    A2 = g @ X.A @ g_inv.frobenius(1)
                    got = newton_vector_of(A2, ctx.r)
                row.append(str(got))
                wrong += got != want
            except UNDECIDABLE:
                row.append(UNDECIDED)
                undecided += 1
            checks += 1
        outputs.append(row)
    ok = wrong == 0 and undecided == 0
    return CriterionResult(2, "Newton vectors and sigma-conjugation invariance", ok,
                           f"{len(lists)} summand lists, {checks} checks, {wrong} wrong, "
                           f"{undecided} undecided", outputs=outputs)


# -- 3. Mazur's inequality ---------------------------------------------------------

@_timed
def criterion_3(N=None, count=500, max_d=4, seed=0):
    """Type of random lattices dominates the Newton vector."""
    ctx = _ctx(N)
    violations, undecided = 0, 0
    outputs = []
    for i in range(count):
        rng = random.Random(f"c3:{seed}:{i}")
        d = rng.randint(1, max_d)
        X, _, _ = random_isocrystal(ctx, rng, d, multfree=False)
        M = Lattice.random(X, rng)
        try:
            mu = lattice_type(M)
            ok = check_mazur(M)
            outputs.append(str(mu))
            violations += not ok
        except UNDECIDABLE:
            outputs.append(UNDECIDED)
            undecided += 1
    ok = violations == 0 and undecided == 0
    return CriterionResult(3, "Mazur inequality on random lattices", ok,
                           f"{count} lattices, {violations} violations, {undecided} undecided",
                           outputs=outputs)


# -- 4 and 5. existence of filtrations and lattices -----------------------------------

def dominating_instance(ctx, i, seed=0, max_d=5):
    """(X, mu) with X multiplicity free and mu >= nu; independent of ctx.N."""
    rng = random.Random(f"c4:{seed}:{i}")
    d = rng.randint(1, max_d)
    X, _, _ = random_isocrystal(ctx, rng, d, multfree=True)
    mu = random_dominating(X.newton_vector(), rng)
    return X, mu


def _construct(ctx, i, seed):
    """(X, mu, F or None, output) for instance i."""
    X, mu = dominating_instance(ctx, i, seed)
    budget = GenericityBudget(retries=3, seed=1000 * seed + i)
    try:
        F = construct_admissible_filtration(X, mu, budget)
    except RetriesExhausted:
        return X, mu, None, "retries exhausted"
    except UNDECIDABLE:
        return X, mu, None, UNDECIDED
    v = F.verdict
    return X, mu, F, f"{v.kind}:{'complete' if getattr(v, 'complete', False) else 'partial'}"


def _construct_all(ctx, count, seed):
    return [_construct(ctx, i, seed) for i in range(count)]


@_timed
def criterion_4(N=None, count=100, seed=0, rows=None):
    """Constructor succeeds with a complete certificate when mu >= nu, and
    raises DominanceFails otherwise."""
    ctx = _ctx(N)
    rows = _construct_all(ctx, count, seed) if rows is None else rows
    good, recheck_fail = 0, 0
    outputs = []
    for X, mu, F, out in rows:
        outputs.append(out)
        if F is None:
            continue
        if out == "Admissible:complete":
            again = check_weak_admissibility(X, F, CheckStrategy(seed=seed))
            if isinstance(again, Admissible) and again.complete:
                good += 1
            else:
                recheck_fail += 1
    refused, wrongly_built = 0, 0
    for i in range(count):
        rng = random.Random(f"c4n:{seed}:{i}")
        d = rng.randint(1, 5)
        X, _, _ = random_isocrystal(ctx, rng, d, multfree=True)
        mu = random_non_dominating(X.newton_vector(), rng)
        try:
            construct_admissible_filtration(X, mu, GenericityBudget(seed=i))
            wrongly_built += 1
            outputs.append("built")
        except DominanceFails:
            refused += 1
            outputs.append("DominanceFails")
    ok = good == count and refused == count
    return CriterionResult(4, "admissible filtrations of every dominating type", ok,
                           f"{good}/{count} complete certificates ({recheck_fail} failed recheck), "
                           f"{refused}/{count} non-dominating types refused", outputs=outputs)


def _adapted(X, F):
    M = laffaille_iterate(Lattice.standard(X), F)
    return M, lattice_type(M)


@_timed
def criterion_5(N=None, count=100, seed=0, rows=None, escalate=True):
    """The adapted-lattice iteration converges on every constructed filtration
    and the resulting lattice has type mu.

    With ``escalate`` an instance whose lattices are not determined is rebuilt
    and rerun at doubled precision, as the command line does; otherwise it is
    recorded as undecided.
    """
    ctx = _ctx(N)
    rows = _construct_all(ctx, count, seed) if rows is None else rows
    converged, right_type, undecided, escalated, total = 0, 0, 0, 0, 0
    outputs, fixpoints = [], []
    for i, (X, mu, F, _) in enumerate(rows):
        if F is None:
            outputs.append("no filtration")
            continue
        total += 1
        try:
            try:
                M, t = _adapted(X, F)
            except UNDECIDABLE:
                if not escalate:
                    raise
                escalated += 1

                def rerun(n):
                    X2, _, F2, _ = _construct(ctx.with_precision(n), i, seed)
                    return _adapted(X2, F2) + (F2,)
                (M, t, F), _ = with_precision_retries(rerun, 2 * ctx.N, retries=3)
            converged += 1
            right_type += t == mu
            outputs.append(str(t))
            fixpoints.append((M, F))
        except NoConvergence as exc:
            outputs.append(f"no convergence after {exc.iterations}")
        except UNDECIDABLE:
            outputs.append(UNDECIDED)
            undecided += 1
    ok = total == count and converged == total and right_type == total
    res = CriterionResult(5, "adapted lattices of type mu", ok,
                          f"{converged}/{total} converged, {right_type} of type mu, "
                          f"{escalated} rerun at higher precision, {undecided} undecided",
                          outputs=outputs)
    res.fixpoints = fixpoints
    return res


# -- 6. the two classical examples -----------------------------------------------------

@_timed
def criterion_6(N=None, samples=50, seed=0):
    """Rational flags on (L^2, id) at level 1 are never admissible; on (L, pi sigma)
    only type (1) is."""
    c1 = CoeffContext(2, 1) if N is None else CoeffContext(2, 1, N=N)
    X = standard_form(c1, [(0, 1, 2)])
    strategy = CheckStrategy(seed=seed)
    refuted, reverified = 0, 0
    rng = random.Random(f"c6:{seed}")
    for _ in range(samples):
        F = Filtration.random(X, [1, -1], rng)
        v = check_weak_admissibility(X, F, strategy)
        if isinstance(v, NotAdmissible):
            refuted += 1
            reverified += v.reverify(F)
    # the same space over a degree-2 coefficient field, restricted to rational subobjects
    c2 = _ctx(N)
    Xr = standard_form(c2, [(0, 1, 2)], rational_level=1)
    refuted_r = 0
    for _ in range(samples):
        flag = ValuedMatrix.from_values(c2, [[rng.randrange(1, 2 ** 16) * 2 + 1 for _ in range(2)]
                                             for _ in range(2)])
        try:
            F = Filtration(Xr, [1, -1], flag)
        except ValueError:
            F = Filtration(Xr, [1, -1], ValuedMatrix.identity(c2, 2))
        refuted_r += isinstance(check_weak_admissibility(Xr, F, strategy), NotAdmissible)
    Y = standard_form(c1, [(1, 1, 1)])
    verdicts = {}
    for mu in ([1], [0], [2], [-1]):
        F = Filtration.random(Y, mu, rng)
        verdicts[mu[0]] = check_weak_admissibility(Y, F, strategy)
    only_one = [k for k, v in verdicts.items() if isinstance(v, Admissible)] == [1]
    ok = refuted == samples and reverified == samples and refuted_r == samples and only_one
    detail = (f"{refuted}/{samples} refuted at level 1 ({reverified} witnesses re-verified), "
              f"{refuted_r}/{samples} rational flags refuted over degree 2, "
              f"(L, pi sigma) verdicts: " +
              ", ".join(f"({k}) {v.kind}" for k, v in verdicts.items()))
    return CriterionResult(6, "counterexample and rank-one example", ok, detail)


# -- 7. Harder-Narasimhan vectors ------------------------------------------------------

def _bad_filtration(X, mu):
    """Flag whose first vectors span the component of largest slope; it is
    destabilizing as soon as the top entries of mu exceed that slope's total."""
    dec = X.slope_decomposition()
    alpha, E = dec.parts[0]
    return Filtration.from_first_step(X, mu, E) if E.ncols < X.d else None


@_timed
def criterion_7(N=None, count=100, seed=0, rows=None):
    """lambda = 0 exactly for admissible filtrations; two hand-computed cases."""
    ctx = _ctx(N)
    rows = _construct_all(ctx, count, seed) if rows is None else rows
    agree, total = 0, 0
    strategy = CheckStrategy(seed=seed)
    for X, mu, F, _ in rows:
        cases = [F] if F is not None else []
        bad = _bad_filtration(X, mu.as_ints()) if X.d > 1 else None
        if bad is not None:
            cases.append(bad)
        for G in cases:
            try:
                v = check_weak_admissibility(X, G, strategy)
                lam = hn_vector(X, G, strategy)
            except UNDECIDABLE:
                continue
            total += 1
            agree += lam.is_zero() == isinstance(v, Admissible)
    # hand-computed instances
    c1 = CoeffContext(2, 1) if N is None else CoeffContext(2, 1, N=N)
    X = standard_form(c1, [(0, 1, 2)])
    F = Filtration.random(X, [1, -1], random.Random(f"c7:{seed}"))
    lam1 = hn_vector(X, F).slopes
    Y = standard_form(ctx, [(0, 1, 1), (1, 1, 1)])
    G = Filtration.from_first_step(Y, [1, 0], Y.slope_decomposition().component(Fraction(0)))
    lam2 = hn_vector(Y, G).slopes
    hand = lam1 == [1, -1] and lam2 == [1, -1]
    ok = agree == total and hand and total > 0
    return CriterionResult(7, "HN vector vanishes exactly on admissible filtrations", ok,
                           f"{agree}/{total} agree; hand cases {lam1} and {lam2}")


# -- 8. strong divisibility, duality, tensor products ----------------------------------

def tensor_incompatibility(ctx, seed=0, tries=40):
    """First seeded instance with (M1 (x) M2)^max != M1^max (x) M2^max, or None."""
    shapes = [[(1, 2, 1)], [(0, 1, 1), (1, 1, 1)], [(0, 1, 2)]]
    for k in range(tries):
        rng = random.Random(f"c8t:{seed}:{k}")
        X1 = standard_form(ctx, rng.choice(shapes))
        X2 = standard_form(ctx, rng.choice(shapes))
        mu1 = [1, 0] if X1.t_N == 1 else [1, -1]
        mu2 = [1, 0] if X2.t_N == 1 else [1, -1]
        F1 = construct_admissible_filtration(X1, mu1, GenericityBudget(seed=2 * k))
        F2 = construct_admissible_filtration(X2, mu2, GenericityBudget(seed=2 * k + 1))
        M1, M2 = Lattice.random(X1, rng, 2), Lattice.random(X2, rng, 2)
        A1 = laffaille_iterate(M1, F1)
        A2 = laffaille_iterate(M2, F2)
        Xt = X1.tensor(X2)
        Ft = F1.tensor(F2, Xt)
        At = laffaille_iterate(M1.tensor(M2, Xt), Ft)
        prod = A1.tensor(A2, Xt)
        if At != prod:
            return {"try": k, "X1": X1.summands, "X2": X2.summands,
                    "covolume_max": At.covolume(), "covolume_product": prod.covolume(),
                    "product_adapted": strongly_divisible(prod, Ft),
                    "contains": At.contains(prod)}
    return None


@_timed
def criterion_8(N=None, count=100, seed=0, fixpoints=None, max_d=3):
    """Fixpoints are strongly divisible; (M*)^max = (M^min)*; a tensor
    incompatibility instance exists."""
    ctx = _ctx(N)
    sd_ok = sum(strongly_divisible(M, F) for M, F in (fixpoints or []))
    n_fix = len(fixpoints or [])
    dual_ok, nested_ok, undecided = 0, 0, 0
    for i in range(count):
        rng = random.Random(f"c8:{seed}:{i}")
        d = rng.randint(1, max_d)
        X, _, _ = random_isocrystal(ctx, rng, d, multfree=True)
        mu = random_dominating(X.newton_vector(), rng)
        try:
            F = construct_admissible_filtration(X, mu, GenericityBudget(seed=i))
            M = Lattice.random(X, rng, 2)
            Mmax, Mmin = adapted_bounds(M, F)
            Xd = X.dual()
            Dmax, _ = adapted_bounds(M.dual(Xd), F.dual(Xd))
        except UNDECIDABLE:
            undecided += 1
            continue
        dual_ok += Dmax == Mmin.dual(Xd)
        nested_ok += (M.contains(Mmax) and Mmin.contains(M) and strongly_divisible(Mmax, F)
                      and strongly_divisible(Mmin, F))
    witness = tensor_incompatibility(ctx, seed)
    ok = sd_ok == n_fix and dual_ok == count and nested_ok == count and witness is not None
    wtxt = "none found" if witness is None else (
        f"try {witness['try']}: {witness['X1']} (x) {witness['X2']}, covolumes "
        f"{witness['covolume_max']} vs {witness['covolume_product']}")
    return CriterionResult(8, "strong divisibility, duality and tensor products", ok,
                           f"{sd_ok}/{n_fix} fixpoints strongly divisible, duality {dual_ok}/{count}, "
                           f"nesting {nested_ok}/{count}, tensor incompatibility {wtxt}")


# -- 9. (phi, N)-modules -----------------------------------------------------------

@_timed
def criterion_9(N=None, count=100, seed=0):
    """Admissible for the isocrystal implies admissible with monodromy; N lowers
    slopes by one."""
    ctx = _ctx(N)
    implied, iso_adm, shift_ok, valid = 0, 0, 0, 0
    for i in range(count):
        rng = random.Random(f"c9:{seed}:{i}")
        m = random_phi_n_module(ctx, rng)
        valid += m.validate()
        shift_ok += slope_shift_holds(m)
        mu = random_dominating(m.X.newton_vector(), rng)
        F = Filtration.random(m.X, mu.as_ints(), rng)
        strategy = CheckStrategy(seed=i)
        v = check_weak_admissibility(m.X, F, strategy)
        w = check_weak_admissibility_phiN(m, F, strategy)
        if isinstance(v, Admissible):
            iso_adm += 1
            implied += isinstance(w, Admissible)
    ok = valid == count and shift_ok == count and implied == iso_adm
    return CriterionResult(9, "(phi, N) inheritance and slope shift", ok,
                           f"{valid} valid modules, {implied}/{iso_adm} admissible pairs inherited, "
                           f"slope shift {shift_ok}/{count}")


# -- 10. precision robustness ------------------------------------------------------

def _compare(base, other):
    """(agreeing, undecided, conflicting) counts over flattened outputs."""
    def flat(xs):
        for x in xs:
            if isinstance(x, list):
                yield from x
            else:
                yield x
    a, b = list(flat(base)), list(flat(other))
    agree = und = bad = 0
    for x, y in zip(a, b):
        if y == UNDECIDED or x == UNDECIDED:
            und += 1
        elif x == y:
            agree += 1
        else:
            bad += 1
    bad += abs(len(a) - len(b))
    return agree, und, bad


@_timed
def criterion_10(baseline, precisions=(32, 128), scale=None):
    """Criteria 2-5 at other precisions agree with the default run or are undecided."""
    scale = scale or {}
    parts = []
    conflicts = 0
    for N in precisions:
        rows = _construct_all(_ctx(N), scale.get("count", 100), 0)
        runs = {
            2: criterion_2(N, conjugations=scale.get("conjugations", 50), limit=scale.get("limit")),
            3: criterion_3(N, count=scale.get("lattices", 500)),
            4: criterion_4(N, count=scale.get("count", 100), rows=rows),
            5: criterion_5(N, count=scale.get("count", 100), rows=rows, escalate=False),
        }
        for k, res in runs.items():
            agree, und, bad = _compare(baseline[k].outputs, res.outputs)
            conflicts += bad
            parts.append(f"N={N} #{k}: {agree} agree, {und} undecided, {bad} conflicts")
    return CriterionResult(10, "precision robustness", conflicts == 0, "; ".join(parts))


# -- driver -------------------------------------------------------------------------

FULL = {"pairs": 10_000, "conjugations": 50, "limit": None, "lattices": 500, "count": 100,
        "samples": 50, "dual": 100}
QUICK = {"pairs": 1000, "conjugations": 2, "limit": 300, "lattices": 60, "count": 12,
         "samples": 10, "dual": 10}


def run_all(scale=None, report=print, only=None):
    """Run the criteria in order; ``report`` receives one line per criterion."""
    scale = dict(FULL if scale is None else scale)
    wanted = set(range(1, 11)) if only is None else set(only)
    results = {}

    def emit(res):
        results[res.number] = res
        if res.number in wanted:
            report(res.line())

    need = set(wanted)
    if 10 in need:
        need |= {2, 3, 4, 5}
    if 8 in need:
        need |= {5}
    if need & {4, 5, 7}:
        rows = _construct_all(_ctx(None), scale["count"], 0)
    if 1 in need:
        emit(criterion_1(scale["pairs"]))
    if 2 in need:
        emit(criterion_2(None, scale["conjugations"], limit=scale["limit"]))
    if 3 in need:
        emit(criterion_3(None, scale["lattices"]))
    if 4 in need:
        emit(criterion_4(None, scale["count"], rows=rows))
    if 5 in need:
        emit(criterion_5(None, scale["count"], rows=rows))
    if 6 in need:
        emit(criterion_6(None, scale["samples"]))
    if 7 in need:
        emit(criterion_7(None, scale["count"], rows=rows))
    if 8 in need:
        emit(criterion_8(None, scale["dual"], fixpoints=results[5].fixpoints))
    if 9 in need:
        emit(criterion_9(None, scale["count"]))
    if 10 in need:
        emit(criterion_10(results, scale=scale))
    return [results[k] for k in sorted(wanted) if k in results]
