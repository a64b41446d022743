"""Command line interface.

Exit codes: 0 true or success, 1 refuted or false, 2 undecided (including
precision still insufficient after the retry cap), 3 input error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

from .context import DEFAULT_PRECISION, with_precision_retries
from .errors import (ConditionIFailsError, DominanceFails, InsufficientPrecision,
                     LengthMismatch, NoConvergence, NotDiagonalizableAtPrecision,
                     RetriesExhausted, SchemaError)
from .existence import GenericityBudget, construct_admissible_filtration
from .filtration import CheckStrategy, NotAdmissible, check_weak_admissibility, induced_t_H
from .generate import KINDS, generate
from .hn import hn_vector, stratum_sample
from .lattice import (adapted_bounds, check_mazur, construct_lattice_of_type, lattice_type,
                      strongly_divisible)
from .phin import check_weak_admissibility_phiN
from .polygon import SlopeVector, dominance_leq, polygon_of
from .serialize import (dumps, filtration_from_json, filtration_to_json, isocrystal_from_json,
                        lattice_from_json, lattice_to_json, load, phin_from_json)

EXIT_TRUE, EXIT_FALSE, EXIT_UNDECIDED, EXIT_INPUT = 0, 1, 2, 3
PRECISION_DOUBLINGS = 4


class Report:
    """Text lines plus a machine-readable document for ``--json``."""

    def __init__(self, code=EXIT_TRUE):
        self.code = code
        self.lines = []
        self.doc = {}

    def add(self, key, value, text=None):
        self.doc[key] = value
        self.lines.append(f"{key}: {value}" if text is None else text)

    def note(self, text):
        self.lines.append(text)


# -- input helpers -------------------------------------------------------------------

def parse_vector(text, what="vector"):
    try:
        return SlopeVector.parse(text)
    except ValueError as exc:
        raise SchemaError(f"{what}: {exc}") from exc


def parse_mu(text):
    mu = parse_vector(text, "mu")
    if not mu.is_integral():
        raise SchemaError(f"mu must be integral, got {mu}")
    return mu


def _load_iso(path, N):
    doc = load(path)
    return isocrystal_from_json(doc.get("iso", doc), N)


def _load_filt(X, path):
    doc = load(path)
    return filtration_from_json(X, doc.get("filtration", doc))


def _load_lattice(X, path):
    doc = load(path)
    return lattice_from_json(X, doc.get("lattice", doc))


def resolve_precision(args):
    """--precision, then ISOCRYSTAL_PRECISION, then the default."""
    if args.precision is not None:
        return args.precision
    raw = os.environ.get("ISOCRYSTAL_PRECISION")
    if raw:
        try:
            return int(raw)
        except ValueError as exc:
            raise SchemaError(f"ISOCRYSTAL_PRECISION must be an integer, got {raw!r}") from exc
    return DEFAULT_PRECISION


# -- commands ----------------------------------------------------------------------

def cmd_newton(args, N):
    X = _load_iso(args.iso, N)
    nu = X.newton_vector()
    rep = Report()
    rep.add("newton", str(nu))
    rep.add("polygon", str(polygon_of(nu)))
    rep.add("t_N", X.t_N)
    return rep


def cmd_hodge_type(args, N):
    X = _load_iso(args.iso, N)
    if (args.filt is None) == (args.lattice is None):
        raise SchemaError("give exactly one of --filt and --lattice")
    mu = _load_filt(X, args.filt).type_of() if args.filt else lattice_type(_load_lattice(X, args.lattice))
    rep = Report()
    rep.add("type", str(mu))
    rep.add("polygon", str(polygon_of(mu)))
    rep.add("t_H", int(mu.total()))
    return rep


def cmd_dominates(args, N):
    mu = parse_vector(args.mu, "mu")
    nu = parse_vector(args.nu, "nu")
    ok = len(mu) == len(nu) and dominance_leq(nu, mu)
    rep = Report(EXIT_TRUE if ok else EXIT_FALSE)
    rep.add("dominates", ok, f"{mu} {'dominates' if ok else 'does not dominate'} {nu}")
    if len(mu) != len(nu):
        rep.note("lengths differ")
    elif mu.total() != nu.total():
        rep.note(f"totals differ: {mu.total()} vs {nu.total()}")
    return rep


def _witness_lines(rep, verdict, F):
    w = verdict.witness
    h = induced_t_H(F, w)
    rep.add("witness", {"dim": w.dim, "t_H": h, "t_N": w.t_N, "basis": w.basis.to_json()},
            f"witness: sub-isocrystal of dimension {w.dim} with t_H = {h} > t_N = {w.t_N}, "
            f"slopes {w.newton_vector()}")


def cmd_wa_check(args, N):
    strategy = CheckStrategy(seed=args.seed)
    if args.phi_n:
        m = phin_from_json(load(args.phi_n), N)
        X = m.X
        F = _load_filt(X, args.filt)
        verdict = check_weak_admissibility_phiN(m, F, strategy)
    else:
        if args.iso is None:
            raise SchemaError("--iso is required without --phi-n")
        X = _load_iso(args.iso, N)
        F = _load_filt(X, args.filt)
        verdict = check_weak_admissibility(X, F, strategy)
    rep = Report(verdict.exit_code)
    rep.add("verdict", verdict.kind)
    if isinstance(verdict, NotAdmissible):
        _witness_lines(rep, verdict, F)
    elif verdict.kind == "ConditionIFails":
        rep.add("totals", {"t_H": verdict.t_H, "t_N": verdict.t_N},
                f"t_H = {verdict.t_H} differs from t_N = {verdict.t_N}")
    elif verdict.kind == "Admissible":
        rep.add("family_size", verdict.family_size)
    else:
        rep.add("family_size", verdict.family_size)
        rep.note("the subobject family is not known to be complete; no violation found")
    return rep


def _budget(args):
    return GenericityBudget(retries=args.retries, seed=args.seed)


def _write(path, doc):
    with open(path, "w") as fh:
        fh.write(dumps(doc) + "\n")


def cmd_build_filtration(args, N):
    X = _load_iso(args.iso, N)
    mu = parse_mu(args.mu)
    rep = Report()
    try:
        F = construct_admissible_filtration(X, mu, _budget(args))
    except DominanceFails as exc:
        rep.code = EXIT_FALSE
        rep.add("error", str(exc))
        return rep
    except RetriesExhausted as exc:
        rep.code = EXIT_UNDECIDED
        rep.add("error", str(exc))
        return rep
    doc = filtration_to_json(F)
    rep.add("verdict", F.verdict.kind)
    rows = [{"sub_dim": r["sub"].dim, "level": r["level"], "dim": r["dim"],
             "generic": r["generic"], "ok": r["ok"]} for r in F.report]
    rep.doc["transversality"] = rows
    rep.note("transversality (sub_dim, level, dim(F^i cap D'), generic value):")
    for r in rows:
        rep.note(f"  {r['sub_dim']} {r['level']} {r['dim']} {r['generic']}")
    if args.out:
        _write(args.out, doc)
        rep.add("written", args.out)
    else:
        rep.doc["filtration"] = doc
        rep.note(dumps(doc))
    return rep


def cmd_build_lattice(args, N):
    X = _load_iso(args.iso, N)
    mu = parse_mu(args.mu)
    rep = Report()
    try:
        M = construct_lattice_of_type(X, mu, _budget(args))
    except DominanceFails as exc:
        rep.code = EXIT_FALSE
        rep.add("error", str(exc))
        return rep
    except (RetriesExhausted, NoConvergence) as exc:
        rep.code = EXIT_UNDECIDED
        rep.add("error", str(exc))
        return rep
    rep.add("type", str(lattice_type(M)))
    rep.add("iterations", M.iterations)
    doc = lattice_to_json(M)
    if args.out:
        _write(args.out, doc)
        rep.add("written", args.out)
    else:
        rep.doc["lattice"] = doc
        rep.note(dumps(doc))
    return rep


def cmd_adapted(args, N):
    X = _load_iso(args.iso, N)
    F = _load_filt(X, args.filt)
    M = _load_lattice(X, args.lattice)
    rep = Report()
    try:
        Mmax, Mmin = adapted_bounds(M, F)
    except NoConvergence as exc:
        rep.code = EXIT_UNDECIDED
        rep.add("error", str(exc))
        rep.add("drift", exc.drift)
        return rep
    rep.add("given_strongly_divisible", strongly_divisible(M, F))
    for name, L in (("max", Mmax), ("min", Mmin)):
        rep.add(f"{name}_type", str(lattice_type(L)))
        rep.add(f"{name}_covolume", L.covolume())
        rep.doc[f"{name}_lattice"] = lattice_to_json(L)
    return rep


def cmd_mazur(args, N):
    X = _load_iso(args.iso, N)
    M = _load_lattice(X, args.lattice)
    ok = check_mazur(M)
    rep = Report(EXIT_TRUE if ok else EXIT_FALSE)
    rep.add("type", str(lattice_type(M)))
    rep.add("newton", str(X.newton_vector()))
    rep.add("mazur", ok)
    return rep


def cmd_hn(args, N):
    X = _load_iso(args.iso, N)
    F = _load_filt(X, args.filt)
    rep = Report()
    try:
        lam = hn_vector(X, F, CheckStrategy(seed=args.seed))
    except ConditionIFailsError as exc:
        rep.code = EXIT_FALSE
        rep.add("error", str(exc))
        return rep
    rep.add("hn_vector", str(lam.slopes))
    rep.add("flag_dims", [S.dim for S in lam.flag])
    rep.add("exact", lam.exact)
    return rep


def cmd_strata_sample(args, N):
    X = _load_iso(args.iso, N)
    mu = parse_mu(args.mu)
    if len(mu) != X.d:
        raise SchemaError(f"mu has length {len(mu)} but the isocrystal has dimension {X.d}")
    strata = stratum_sample(X, mu.as_ints(), args.trials, args.seed)
    rep = Report()
    rows = [{"hn_vector": str(s.slopes), "count": s.count} for s in strata]
    rep.doc["observed_strata"] = rows
    rep.doc["trials"] = args.trials
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["hn_vector", "count"])
        for r in rows:
            w.writerow([r["hn_vector"], r["count"]])
        rep.note(buf.getvalue().rstrip("\n"))
    else:
        rep.note(f"observed strata in {args.trials} trials (absent strata may be nonempty):")
        for r in rows:
            rep.note(f"  {r['count']:6d}  {r['hn_vector']}")
    return rep


def cmd_selftest(args, N):
    from .acceptance import FULL, QUICK, run_all
    rep = Report()
    results = run_all(QUICK if args.quick else FULL, report=lambda line: None, only=args.only)
    for res in results:
        rep.note(res.line(timing=args.timings))
    rep.doc["criteria"] = [{"number": r.number, "passed": r.passed, "detail": r.detail}
                           for r in results]
    failed = [r.number for r in results if not r.passed]
    rep.add("failed", failed)
    rep.code = EXIT_FALSE if failed else EXIT_TRUE
    return rep


def cmd_generate(args, N):
    mu = None if args.mu is None else parse_mu(args.mu)
    try:
        doc = generate(args.kind, args.d, args.seed, p=args.p, r=args.r, N=args.precision, mu=mu)
    except ValueError as exc:
        raise SchemaError(str(exc)) from exc
    rep = Report()
    if args.out:
        _write(args.out, doc)
        rep.add("written", args.out)
    else:
        rep.doc = doc
        rep.note(dumps(doc))
    return rep


# -- parser ------------------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(prog="isocrystals", description=__doc__.splitlines()[0])
    parser.add_argument("--json", action="store_true", help="machine-readable output")
    parser.add_argument("--precision", type=int, default=None,
                        help="working precision N (default: $ISOCRYSTAL_PRECISION or 64)")
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name, fn, help_text, iso=True, seed=False):
        p = sub.add_parser(name, help=help_text)
        if iso:
            p.add_argument("--iso", required=True, help="isocrystal JSON file")
        if seed:
            p.add_argument("--seed", type=int, default=0)
        p.set_defaults(fn=fn)
        return p

    command("newton", cmd_newton, "Newton vector and polygon")
    p = command("hodge-type", cmd_hodge_type, "type of a filtration or a lattice")
    p.add_argument("--filt")
    p.add_argument("--lattice")
    p = command("dominates", cmd_dominates, "exit 0 when mu dominates nu", iso=False)
    p.add_argument("mu")
    p.add_argument("nu")
    p = command("wa-check", cmd_wa_check, "weak admissibility", iso=False, seed=True)
    p.add_argument("--iso")
    p.add_argument("--filt", required=True)
    p.add_argument("--phi-n", dest="phi_n", help="(phi, N)-module file; replaces --iso")
    for name, fn, what in (("build-filtration", cmd_build_filtration, "an admissible filtration"),
                           ("build-lattice", cmd_build_lattice, "a lattice")):
        p = command(name, fn, f"construct {what} of type mu", seed=True)
        p.add_argument("--mu", required=True)
        p.add_argument("--retries", type=int, default=3)
        p.add_argument("--out")
    p = command("adapted", cmd_adapted, "largest and smallest adapted lattices around M")
    p.add_argument("--filt", required=True)
    p.add_argument("--lattice", required=True)
    p = command("mazur", cmd_mazur, "check the type of a lattice against the Newton vector")
    p.add_argument("--lattice", required=True)
    p = command("hn", cmd_hn, "Harder-Narasimhan vector", seed=True)
    p.add_argument("--filt", required=True)
    p = command("strata-sample", cmd_strata_sample, "observed HN strata of random filtrations",
                seed=True)
    p.add_argument("--mu", required=True)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--format", choices=("text", "csv"), default="text")
    p = command("selftest", cmd_selftest, "run the acceptance suite", iso=False)
    p.add_argument("--quick", action="store_true", help="reduced instance counts")
    p.add_argument("--only", type=int, nargs="+", help="criterion numbers")
    p.add_argument("--timings", action="store_true", help="print seconds per criterion")
    p = command("generate", cmd_generate, "seeded random instance", iso=False, seed=True)
    p.add_argument("kind", choices=KINDS)
    p.add_argument("--d", type=int, default=3)
    p.add_argument("--p", type=int, default=2)
    p.add_argument("--r", type=int, default=2)
    p.add_argument("--mu")
    p.add_argument("--out")
    return parser


def run(argv=None, out=None):
    """Run one command; returns the exit code."""
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_TRUE
    try:
        N = resolve_precision(args)
        rep, used = with_precision_retries(lambda n: args.fn(args, n), N, PRECISION_DOUBLINGS)
        if used != N:
            rep.doc["precision"] = used
            rep.note(f"precision raised to {used}")
    except (InsufficientPrecision, NotDiagonalizableAtPrecision) as exc:
        rep = Report(EXIT_UNDECIDED)
        rep.add("error", f"undecided: {exc}")
    except (SchemaError, LengthMismatch, ValueError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.json:
        doc = dict(rep.doc)
        doc["exit_code"] = rep.code
        out.write(json.dumps(doc, indent=2, sort_keys=True, default=str) + "\n")
    else:
        for line in rep.lines:
            out.write(line + "\n")
    return rep.code


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
