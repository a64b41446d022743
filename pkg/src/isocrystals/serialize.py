"""JSON documents for contexts, isocrystals, filtrations, lattices and
(phi, N)-modules.  Integers are written as decimal strings."""

from __future__ import annotations

import json

from .context import CoeffContext
from .errors import InsufficientPrecision, SchemaError
from .filtration import Filtration
from .isocrystal import Isocrystal, standard_form
from .lattice import Lattice
from .linalg import ValuedMatrix
from .phin import PhiNModule

VERSION = "1"


def _require(doc, key, where):
    if not isinstance(doc, dict) or key not in doc:
        raise SchemaError(f"{where}: missing field {key!r}")
    return doc[key]


def _int(x, where):
    try:
        return int(str(x))
    except ValueError as exc:
        raise SchemaError(f"{where}: expected an integer, got {x!r}") from exc


def matrix_from_json(ctx, doc, where="matrix", shape=None):
    if not isinstance(doc, list) or any(not isinstance(row, list) for row in doc):
        raise SchemaError(f"{where}: expected a list of rows")
    if doc and len({len(row) for row in doc}) != 1:
        raise SchemaError(f"{where}: ragged rows")
    if shape is not None and (len(doc), len(doc[0]) if doc else 0) != shape:
        raise SchemaError(f"{where}: expected shape {shape}")
    try:
        return ValuedMatrix.from_json(ctx, doc)
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"{where}: {exc}") from exc


def context_from_json(doc, N=None):
    try:
        return CoeffContext.from_json(doc, N)
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"context: {exc}") from exc


# -- isocrystals ------------------------------------------------------------------

def summands_to_json(summands):
    return [{"a": str(a), "b": str(b), "mult": str(m)} for a, b, m in summands]


def isocrystal_to_json(X):
    """Matrix form: ``phi = A sigma`` with A fixed by ``sigma**rho``."""
    doc = {"schema": f"isocrystal/{VERSION}", "context": X.ctx.to_json(),
           "matrix": X.A.to_json(), "rho": str(X.rho)}
    if X.rational_level is not None:
        doc["rational_level"] = str(X.rational_level)
    return doc


def standard_form_to_json(ctx, summands, base_change=None, rational_level=None):
    doc = {"schema": f"isocrystal/{VERSION}", "context": ctx.to_json(),
           "standard_form": summands_to_json(summands)}
    if base_change is not None:
        doc["base_change"] = base_change.to_json()
    if rational_level is not None:
        doc["rational_level"] = str(rational_level)
    return doc


def _summand(entry):
    if isinstance(entry, dict):
        missing = [k for k in ("a", "b") if k not in entry]
        if missing:
            raise SchemaError(f"standard_form: entry lacks {missing[0]!r}")
        return (_int(entry["a"], "a"), _int(entry["b"], "b"), _int(entry.get("mult", 1), "mult"))
    if isinstance(entry, list) and len(entry) in (2, 3):
        vals = [_int(x, "standard_form") for x in entry]
        return tuple(vals) if len(vals) == 3 else (vals[0], vals[1], 1)
    raise SchemaError("standard_form: entries must be {a, b, mult} objects")


def isocrystal_from_json(doc, N=None):
    """Either ``standard_form`` (optionally with ``base_change``) or ``matrix``."""
    ctx = context_from_json(_require(doc, "context", "isocrystal"), N)
    rl = doc.get("rational_level")
    rl = None if rl is None else _int(rl, "rational_level")
    if rl is not None and rl < 1:
        raise SchemaError("rational_level must be positive")
    if "standard_form" in doc:
        entries = doc["standard_form"]
        if not isinstance(entries, list) or not entries:
            raise SchemaError("standard_form: expected a nonempty list")
        summands = [_summand(e) for e in entries]
        try:
            X = standard_form(ctx, summands, rl)
        except ValueError as exc:
            raise SchemaError(f"standard_form: {exc}") from exc
        if "base_change" in doc:
            g = matrix_from_json(ctx, doc["base_change"], "base_change", (X.d, X.d))
            try:
                X = X.base_change(g)
            except (ZeroDivisionError, ValueError, InsufficientPrecision) as exc:
                raise SchemaError(f"base_change: not invertible ({exc})") from exc
        return X
    A = matrix_from_json(ctx, _require(doc, "matrix", "isocrystal"), "matrix")
    if A.nrows != A.ncols:
        raise SchemaError("matrix: must be square")
    rho = doc.get("rho")
    try:
        return Isocrystal(ctx, A, rho=None if rho is None else _int(rho, "rho"), rational_level=rl)
    except ValueError as exc:
        raise SchemaError(f"isocrystal: {exc}") from exc


# -- filtrations, lattices, monodromy ------------------------------------------------

def filtration_to_json(F):
    doc = {"schema": f"filtration/{VERSION}"}
    doc.update(F.to_json())
    return doc


def filtration_from_json(X, doc):
    mu = [_int(m, "mu") for m in _require(doc, "mu", "filtration")]
    if len(mu) != X.d:
        raise SchemaError(f"filtration: type of length {len(mu)} on dimension {X.d}")
    flag = matrix_from_json(X.ctx, _require(doc, "flag_matrix", "filtration"), "flag_matrix",
                            (X.d, X.d))
    try:
        return Filtration(X, mu, flag)
    except ValueError as exc:
        raise SchemaError(f"filtration: {exc}") from exc


def lattice_to_json(M):
    return {"schema": f"lattice/{VERSION}", "basis": M.basis.to_json()}


def lattice_from_json(X, doc):
    B = matrix_from_json(X.ctx, _require(doc, "basis", "lattice"), "basis", (X.d, X.d))
    try:
        return Lattice(X, B)
    except ValueError as exc:
        raise SchemaError(f"lattice: {exc}") from exc


def phin_to_json(m):
    return {"schema": f"phin/{VERSION}", "iso": isocrystal_to_json(m.X),
            "monodromy": m.N.to_json()}


def phin_from_json(doc, N=None):
    X = isocrystal_from_json(_require(doc, "iso", "phin"), N)
    Nm = matrix_from_json(X.ctx, _require(doc, "monodromy", "phin"), "monodromy", (X.d, X.d))
    return PhiNModule(X, Nm)


# -- files ----------------------------------------------------------------------

def load(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON ({exc})") from exc


def dumps(doc):
    return json.dumps(doc, indent=2, sort_keys=True)
